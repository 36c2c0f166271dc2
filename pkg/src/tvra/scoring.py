"""Attack-potential scoring and risk arithmetic.

The chain is::

    worksheet --(FactorTable)--> points --(BandTable)--> VulnerabilityRating
              --> Likelihood;  Likelihood x Impact --> risk value --> RiskClass

Point values and band boundaries are configurable per catalog; the defaults
follow the Common Criteria style attack-potential tables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum, IntEnum
from types import MappingProxyType
from typing import Mapping, Union

from .errors import InvalidRiskValueError, UnknownLevelError

FACTORS = ("time", "expertise", "knowledge", "opportunity", "equipment")

# Level order as written in the catalog grammar (ascending attacker effort).
LEVELS: Mapping[str, tuple[str, ...]] = MappingProxyType(
    {
        "time": ("t1d", "t1w", "t1m", "t3m", "t6m", "more"),
        "expertise": ("layman", "proficient", "expert", "multiple"),
        "knowledge": ("public", "restricted", "sensitive", "critical"),
        "opportunity": ("unnecessary", "easy", "moderate", "difficult", "none"),
        "equipment": ("standard", "specialized", "bespoke", "multiple"),
    }
)

# The opportunity level that makes an attack impossible to mount.
INFEASIBLE_LEVEL = "none"


class _Infeasible:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "Infeasible"

    def __str__(self) -> str:
        return "infeasible"

    def __reduce__(self):
        return (_Infeasible, ())


Infeasible = _Infeasible()
Points = Union[int, _Infeasible]


class VulnerabilityRating(IntEnum):
    """Resistance of the target, ascending."""

    NO_RATING = 0
    BASIC = 1
    MODERATE = 2
    HIGH = 3
    BEYOND_HIGH = 4

    @property
    def keyword(self) -> str:
        return self.name.lower().replace("_", "-")

    @property
    def label(self) -> str:
        return {
            VulnerabilityRating.NO_RATING: "No-rating",
            VulnerabilityRating.BASIC: "Basic",
            VulnerabilityRating.MODERATE: "Moderate",
            VulnerabilityRating.HIGH: "High",
            VulnerabilityRating.BEYOND_HIGH: "Beyond High",
        }[self]

    @classmethod
    def from_keyword(cls, word: str) -> VulnerabilityRating:
        for member in cls:
            if member.keyword == word:
                return member
        raise ValueError(f"unknown vulnerability rating {word!r}")


class Likelihood(IntEnum):
    UNLIKELY = 1
    POSSIBLE = 2
    LIKELY = 3

    @property
    def label(self) -> str:
        return self.name.capitalize()


class Impact(IntEnum):
    LOW = 1
    MEDIUM = 2
    HIGH = 3

    @property
    def keyword(self) -> str:
        return self.name.lower()

    @property
    def label(self) -> str:
        return self.name.capitalize()

    @classmethod
    def from_keyword(cls, word: str) -> Impact:
        return cls[word.upper()]


class RiskClass(IntEnum):
    MINOR = 1
    MAJOR = 2
    CRITICAL = 3

    @property
    def keyword(self) -> str:
        return self.name.lower()

    @property
    def label(self) -> str:
        return self.name.capitalize()

    @property
    def letter(self) -> str:
        return {RiskClass.MINOR: "m", RiskClass.MAJOR: "M", RiskClass.CRITICAL: "C"}[self]

    @classmethod
    def from_keyword(cls, word: str) -> RiskClass:
        return cls[word.upper()]


RISK_VALUES = frozenset({1, 2, 3, 4, 6, 9})


def _freeze(levels: Mapping[str, int]) -> Mapping[str, int]:
    return MappingProxyType(dict(levels))


@dataclass(frozen=True)
class FactorTable:
    """Level -> points for each of the five attack-potential factors.

    ``opportunity`` never lists ``none``; that level is always infeasible.
    """

    time: Mapping[str, int]
    expertise: Mapping[str, int]
    knowledge: Mapping[str, int]
    opportunity: Mapping[str, int]
    equipment: Mapping[str, int]

    def __post_init__(self) -> None:
        for name in FACTORS:
            table = _freeze(getattr(self, name))
            object.__setattr__(self, name, table)
            expected = tuple(lv for lv in LEVELS[name] if lv != INFEASIBLE_LEVEL)
            if INFEASIBLE_LEVEL in table and name == "opportunity":
                raise ValueError("opportunity level 'none' is fixed as infeasible and takes no points")
            missing = [lv for lv in expected if lv not in table]
            if missing:
                raise ValueError(f"factor {name!r} has no points for: {', '.join(missing)}")
            extra = sorted(set(table) - set(expected))
            if extra:
                raise ValueError(f"factor {name!r} has unknown levels: {', '.join(extra)}")
            values = [table[lv] for lv in expected]
            if any(not isinstance(v, int) or isinstance(v, bool) or v < 0 for v in values):
                raise ValueError(f"factor {name!r} points must be non-negative integers")
            if any(b <= a for a, b in zip(values, values[1:])):
                raise ValueError(f"factor {name!r} points must strictly increase with level")

    def __hash__(self) -> int:
        return hash(tuple(tuple(sorted(getattr(self, n).items())) for n in FACTORS))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FactorTable):
            return NotImplemented
        return all(dict(getattr(self, n)) == dict(getattr(other, n)) for n in FACTORS)

    def points(self, factor: str, level: str) -> Points:
        if factor == "opportunity" and level == INFEASIBLE_LEVEL:
            return Infeasible
        try:
            return getattr(self, factor)[level]
        except (KeyError, AttributeError):
            raise UnknownLevelError(f"no points for {factor} level {level!r}") from None


DEFAULT_FACTOR_TABLE = FactorTable(
    time={"t1d": 0, "t1w": 1, "t1m": 4, "t3m": 10, "t6m": 17, "more": 19},
    expertise={"layman": 0, "proficient": 3, "expert": 6, "multiple": 8},
    knowledge={"public": 0, "restricted": 3, "sensitive": 7, "critical": 11},
    opportunity={"unnecessary": 0, "easy": 1, "moderate": 4, "difficult": 10},
    equipment={"standard": 0, "specialized": 4, "bespoke": 7, "multiple": 9},
)


@dataclass(frozen=True)
class AttackPotential:
    time: str
    expertise: str
    knowledge: str
    opportunity: str
    equipment: str

    def levels(self) -> dict[str, str]:
        return {name: getattr(self, name) for name in FACTORS}

    def invalid_levels(self) -> list[tuple[str, str]]:
        """(factor, level) pairs not in the grammar."""
        return [(n, lv) for n, lv in self.levels().items() if lv not in LEVELS[n]]


@dataclass(frozen=True)
class BandTable:
    """Ascending (inclusive lower bound, rating) pairs; the first bound is 0."""

    bands: tuple[tuple[int, VulnerabilityRating], ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        bands = tuple((int(b), VulnerabilityRating(r)) for b, r in self.bands)
        object.__setattr__(self, "bands", bands)
        if not bands:
            raise ValueError("band table is empty")
        if bands[0][0] != 0:
            raise ValueError("lowest band bound must be 0")
        for (b0, r0), (b1, r1) in zip(bands, bands[1:]):
            if b1 <= b0:
                raise ValueError("band bounds must strictly increase")
            if r1 <= r0:
                raise ValueError("band ratings must strictly increase with bound")


DEFAULT_BAND_TABLE = BandTable(
    (
        (0, VulnerabilityRating.NO_RATING),
        (10, VulnerabilityRating.BASIC),
        (14, VulnerabilityRating.MODERATE),
        (20, VulnerabilityRating.HIGH),
        (25, VulnerabilityRating.BEYOND_HIGH),
    )
)


def potential_points(p: AttackPotential, table: FactorTable = DEFAULT_FACTOR_TABLE) -> Points:
    """Sum of the five factor points, or ``Infeasible`` when opportunity is ``none``."""
    values = [table.points(name, level) for name, level in p.levels().items()]
    if any(v is Infeasible for v in values):
        return Infeasible
    return sum(values)


def vulnerability_rating(points: int, bands: BandTable = DEFAULT_BAND_TABLE) -> VulnerabilityRating:
    if points < 0:
        raise ValueError("points must be non-negative")
    rating = bands.bands[0][1]
    for bound, r in bands.bands:
        if bound > points:
            break
        rating = r
    return rating


_LIKELIHOOD = {
    VulnerabilityRating.BEYOND_HIGH: Likelihood.UNLIKELY,
    VulnerabilityRating.HIGH: Likelihood.UNLIKELY,
    VulnerabilityRating.MODERATE: Likelihood.POSSIBLE,
    VulnerabilityRating.BASIC: Likelihood.LIKELY,
    VulnerabilityRating.NO_RATING: Likelihood.LIKELY,
}


def likelihood_of(rating: VulnerabilityRating) -> Likelihood:
    return _LIKELIHOOD[rating]


def risk_value(likelihood: Likelihood, impact: Impact) -> int:
    return int(likelihood) * int(impact)


def classify(value: int) -> RiskClass:
    if isinstance(value, bool) or value not in RISK_VALUES:
        raise InvalidRiskValueError(f"{value!r} is not a product of two values in 1..3")
    if value <= 3:
        return RiskClass.MINOR
    if value == 4:
        return RiskClass.MAJOR
    return RiskClass.CRITICAL


def score(
    p: AttackPotential,
    factors: FactorTable = DEFAULT_FACTOR_TABLE,
    bands: BandTable = DEFAULT_BAND_TABLE,
) -> tuple[Points, VulnerabilityRating, Likelihood]:
    """Points, rating and likelihood for one worksheet.

    An infeasible worksheet rates Beyond High, i.e. likelihood Unlikely.
    """
    points = potential_points(p, factors)
    if points is Infeasible:
        rating = VulnerabilityRating.BEYOND_HIGH
    else:
        rating = vulnerability_rating(points, bands)
    return points, rating, likelihood_of(rating)
