import csv
import json
import math
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from multiferm import cli
from multiferm.suites import CheckRecord

ROOT = Path(__file__).resolve().parents[1]


def test_schema_file_is_current():
    on_disk = json.loads((ROOT / "docs" / "report.schema.json").read_text())
    assert on_disk == cli.REPORT_SCHEMA
    jsonschema.Draft202012Validator.check_schema(cli.REPORT_SCHEMA)


def _run(tmp_path, *args, name="out.json"):
    out = tmp_path / name
    code = cli.main([*args, "--out", str(out)])
    return code, out


def test_modular_report_validates(tmp_path):
    code, out = _run(tmp_path, "modular", "--samples", "10")
    assert code == 0
    data = json.loads(out.read_text())
    jsonschema.validate(data, cli.REPORT_SCHEMA)
    assert data["summary"]["failed"] == 0
    assert "modular_O_n3" in data["tables"]
    assert all(r["status"] == "pass" for r in data["records"])


def test_reports_are_byte_identical(tmp_path):
    _, a = _run(tmp_path, "modular", "--samples", "5", "--seed", "7", name="a.json")
    _, b = _run(tmp_path, "modular", "--samples", "5", "--seed", "7", name="b.json")
    assert a.read_bytes() == b.read_bytes()


def test_general_intervals(tmp_path):
    code, out = _run(tmp_path, "modular", "--samples", "5", "--intervals=-2.5,-1.9,-0.4,0.3,1.0,2.2")
    assert code == 0
    ids = [r["check_id"] for r in json.loads(out.read_text())["records"]]
    assert "mod.n3.general.cocycle" in ids
    assert not any("closed_form" in i for i in ids)


@pytest.mark.parametrize("args", [
    ["modular", "--intervals", "0.1,0.5,0.4,0.9"],
    ["modular", "--intervals", "0.1,0.5,0.7"],
    ["modular", "--intervals", "a,b"],
    ["ramond", "--cutoff", "9/2"],
    ["verify-iso", "--n", "9"],
    ["verify-iso", "--cutoff", "1/3"],
    ["modular", "--tol", "cocycle=-1"],
    ["modular", "--samples", "0"],
    ["frobnicate"],
])
def test_configuration_errors_exit_2(tmp_path, args):
    code, out = _run(tmp_path, *args)
    assert code == 2
    assert not out.exists()


def test_failing_check_exits_1(tmp_path, capsys):
    code, out = _run(tmp_path, "modular", "--samples", "5", "--tol", "cocycle=1e-300")
    assert code == 1
    data = json.loads(out.read_text())
    assert data["summary"]["exit_code"] == 1
    assert "FAIL mod.n2.cocycle" in capsys.readouterr().err


def test_csv_output(tmp_path):
    code, out = _run(tmp_path, "modular", "--samples", "5", "--n", "2", "--format", "csv", name="r.csv")
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert rows and {r["status"] for r in rows} == {"pass"}
    traj = list(csv.reader((tmp_path / "r_modular_O_n2.csv").open()))
    assert traj[0] == ["X", "O_11", "O_12", "O_21", "O_22"]
    assert len(traj) == 26


def test_dumps_is_canonical():
    s = cli.dumps({"b": [1.0, float("nan"), 2], "a": {"x": 0.1}})
    assert s.index('"a"') < s.index('"b"')
    assert "null" in s and "0.10000000000000001" in s
    assert json.loads(s)["b"] == [1.0, None, 2]


def test_record_statuses():
    r = CheckRecord("x", "anchor", 1e-3, 0.0, 1e-6)
    assert r.status == "fail" and not r.passed
    r = CheckRecord("x", "anchor", math.nan, 0.0, 1.0, resource_error="too big")
    assert r.status == "error"


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "multiferm", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    assert "report-all" in res.stdout
