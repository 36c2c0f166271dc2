from __future__ import annotations

import io
import json
import subprocess
import sys

import pytest

from tvra.catalog import builtin_source
from tvra.cli import run

from conftest import GOLDEN, SHIPPED


def call(*argv: str) -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def mutated(tmp_path):
    """Shipped catalog with replay made very hard to exploit, so computed != declared."""
    text = SHIPPED.read_text(encoding="utf-8")
    head, _, tail = text.partition("threat replay {")
    block, _, rest = tail.partition("\n}\n")
    block = block.replace("time t1d", "time more").replace("opportunity easy", "opportunity difficult")
    block = block.replace("expertise proficient", "expertise multiple").replace("equipment standard", "equipment bespoke")
    path = tmp_path / "mutated.tvra"
    path.write_text(head + "threat replay {" + block + "\n}\n" + rest, encoding="utf-8")
    return path


class TestExitCodes:
    def test_validate_ok(self):
        code, out, err = call("validate", str(SHIPPED))
        assert code == 0
        assert out == ""
        assert "NORMALIZED_RISK_LABEL" in err

    def test_strict_clean(self):
        assert call("assess", str(SHIPPED), "--strict")[0] == 0

    def test_strict_discrepancy(self, mutated):
        code, _, err = call("assess", str(mutated), "--strict")
        assert code == 3
        assert "RISK_DISCREPANCY" in err and "'replay'" in err
        assert call("assess", str(mutated))[0] == 0

    def test_missing_file(self, tmp_path):
        code, out, err = call("validate", str(tmp_path / "nope.tvra"))
        assert code == 1
        assert out == ""
        assert "FILE_NOT_FOUND" in err

    def test_parse_error_location(self, tmp_path, minimal_source):
        path = tmp_path / "bad.tvra"
        path.write_text(minimal_source.replace("impact high", "impact extreme"), encoding="utf-8")
        code, _, err = call("assess", str(path))
        assert code == 1
        assert f"{path}:19:10: error[INVALID_VALUE]" in err

    def test_validation_error(self, tmp_path, minimal_source):
        path = tmp_path / "bad.tvra"
        path.write_text(minimal_source.replace("interfaces B", "interfaces Q"), encoding="utf-8")
        code, _, err = call("validate", str(path))
        assert code == 1
        assert f"{path}:17:14: error[UNRESOLVED_INTERFACE]" in err

    @pytest.mark.parametrize(
        "argv",
        [[], ["frobnicate"], ["assess"], ["assess", "x.tvra", "--format", "xml"], ["diff", "only-one"]],
    )
    def test_usage(self, argv):
        code, out, err = call(*argv)
        assert code == 2
        assert out == ""
        assert "usage:" in err


class TestOutput:
    def test_matrix_golden(self):
        code, out, _ = call("matrix", str(SHIPPED))
        assert code == 0
        assert out == (GOLDEN / "av-fullauto.matrix.txt").read_text(encoding="utf-8")

    @pytest.mark.parametrize("fmt", ["json", "csv"])
    def test_structured_golden(self, fmt):
        code, out, _ = call("assess", str(SHIPPED), "--format", fmt)
        assert code == 0
        assert out == (GOLDEN / f"av-fullauto.assess.{fmt}").read_text(encoding="utf-8")

    def test_json_stdout_is_pure(self):
        _, out, err = call("assess", str(SHIPPED), "--format", "json")
        json.loads(out)
        assert "NO_WORKSHEET" in err

    def test_text_assess_lists_every_threat(self, builtin):
        _, out, _ = call("assess", str(SHIPPED))
        for t in builtin.threats:
            assert t.id in out
        assert "Assessed threats: 18" in out

    def test_plan(self):
        code, out, err = call("plan", str(SHIPPED))
        assert code == 0
        heads = [line for line in out.splitlines() if line and not line.startswith((" ", "["))]
        assert heads.index("backdoor") < heads.index("eavesdropping") < heads.index("repudiation") == len(heads) - 1
        assert "location-tracking" in err

    def test_exposure_all(self):
        code, out, _ = call("exposure", str(SHIPPED))
        assert code == 0
        for ref in ("A", "A[*]", "B", "E"):
            assert any(line.split()[:1] == [ref] for line in out.splitlines())

    def test_exposure_indexed(self):
        code, out, _ = call("exposure", str(SHIPPED), "--interface", "A[*]")
        assert code == 0
        assert "phishing" in out and "intrusion" in out
        assert "replay" not in out

    def test_exposure_unknown(self):
        code, out, err = call("exposure", str(SHIPPED), "--interface", "Z")
        assert code == 2
        assert out == ""
        assert "UNKNOWN_INTERFACE" in err

    def test_builtin(self):
        code, out, _ = call("builtin")
        assert code == 0
        assert out == builtin_source() == SHIPPED.read_text(encoding="utf-8")

    def test_diff(self, mutated):
        assert call("diff", str(SHIPPED), str(SHIPPED))[1] == "no changes\n"
        code, out, _ = call("diff", str(SHIPPED), str(mutated))
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "~ threat replay"
        assert lines[1].startswith("    potential: time=t1d ") and "-> time=more " in lines[1]
        assert len(lines) == 2

    def test_idempotent(self):
        assert call("assess", str(SHIPPED)) == call("assess", str(SHIPPED))


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "tvra", "matrix", str(SHIPPED)], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert proc.stdout == (GOLDEN / "av-fullauto.matrix.txt").read_text(encoding="utf-8")
