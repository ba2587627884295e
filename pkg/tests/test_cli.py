import io
import json
import subprocess
import sys

import pytest

from conftest import HOSPITAL_LP, INTERVAL_RANGES
from robdea import ranking
from robdea.cli import InputError, RunConfig, run_cli
from robdea.lp import NumericFailure


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_cli(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_rank_json_matches_table(hospitals):
    code, out, _ = run("rank", "--example", "hospitals", "--format", "json")
    assert code == 0
    rows = json.loads(out)
    assert [row["id"] for row in rows] == list(hospitals.ids)
    assert [row["r"] for row in rows] == pytest.approx(HOSPITAL_LP, abs=5e-4)


def test_json_is_byte_stable():
    argv = ("rank", "--example", "bcc", "--model", "bcc-robust-exact", "--format", "json")
    assert run(*argv)[1] == run(*argv)[1]


def test_fixed_inputs_table():
    code, out, _ = run("rank", "--example", "abc", "--fix", "inputs", "--fix", "peers-inputs",
                       "--model", "robust-exact")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].split() == ["id", "classical", "delta*", "r", "efficient"]
    assert [line.split()[3] for line in lines[1:4]] == ["1.2857", "1.0000", "1.2857"]
    assert lines[-1] == "order: A > C > B"


def test_precision():
    _, out, _ = run("rank", "--example", "abc", "--precision", "2")
    assert out.splitlines()[1].split() == ["A", "1.00", "0.14", "1.14", "yes"]


def test_csv_input(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("id,i:x,o:y\nA,1,2\nB,1,1\n")
    code, out, _ = run("rank", "--input", str(path), "--format", "json")
    rows = json.loads(out)
    assert code == 0 and rows[0]["r"] == pytest.approx(4 / 3) and rows[1]["efficient"] is False


def test_interval_json():
    code, out, _ = run("rank", "--example", "interval", "--interval", "--format", "json")
    assert code == 0
    for row in json.loads(out):
        lo, hi = INTERVAL_RANGES[row["id"]]
        assert (row["r_lower"], row["r_upper"]) == pytest.approx((lo, hi), abs=5e-4)


def test_perturb():
    code, out, _ = run("perturb", "--example", "hospitals", "--dmu", "A", "--delta", "0.08",
                       "--trials", "1000", "--seed", "7", "--format", "json")
    rep = json.loads(out)
    assert code == 0 and rep["retained"] == 1000 and rep["violations"] == []


def test_verify_small():
    code, out, _ = run("verify", "--datasets", "3", "--seed", "1")
    assert code == 0
    assert "PASS order_preservation" in out and "bcc_exact_order" in out


@pytest.mark.parametrize("argv, fragment", [
    (("rank", "--example", "hospitals", "--model", "ccr", "--interval"), "robust model"),
    (("rank", "--example", "interval"), "interval"),
    (("rank", "--input", "/nonexistent/data.csv"), ""),
    (("rank", "--example", "abc", "--precision", "0"), "precision"),
    (("rank", "--example", "hospitals", "--model", "bcc-robust-lp", "--fix", "inputs"), "all-vary"),
    (("perturb", "--example", "hospitals", "--dmu", "Z", "--delta", "0.1"), "Z"),
    (("perturb", "--example", "hospitals", "--dmu", "A", "--delta", "1.5"), "delta"),
    (("rank", "--bogus"), ""),
])
def test_input_errors_exit_1(argv, fragment):
    code, out, err = run(*argv)
    assert code == 1 and out == ""
    assert fragment.lower() in err.lower()


def test_bad_csv_reports_row(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("id,i:x,o:y\nA,1,2\nB,oops,1\n")
    code, _, err = run("rank", "--input", str(path))
    assert code == 1 and "row 3" in err


def test_numeric_failure_exit_2(monkeypatch):
    monkeypatch.setattr(ranking, "robust_delta", lambda *a, **k: (_ for _ in ()).throw(NumericFailure("boom")))
    code, _, err = run("rank", "--example", "abc")
    assert code == 2 and "boom" in err


def test_run_config_validation():
    with pytest.raises(InputError):
        RunConfig(model="ccr", interval_mode=True)
    with pytest.raises(InputError):
        RunConfig(output_format="xml")
    with pytest.raises(InputError):
        RunConfig(precision=13)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "robdea", "rank", "--example", "abc"],
                          capture_output=True, text=True, timeout=60)
    assert proc.returncode == 0 and "order: A > C > B" in proc.stdout
