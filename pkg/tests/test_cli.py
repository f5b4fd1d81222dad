import json
import subprocess
import sys

import jsonschema
import pytest

from hdmean import harness
from hdmean.cli import main
from hdmean.diagnostics import DEFAULT_EPSILON_GRID
from hdmean.schemas import DIAGNOSTICS_REPORT, EXPERIMENT_REPORT, TEST_REPORT


@pytest.fixture
def csv_file(tmp_path):
    def make(text, name="data.csv"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return make


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_cmd_test_report(csv_file, capsys, tmp_path):
    out_path = tmp_path / "r.json"
    code, out, _ = run(["test", "--input", csv_file("1,0\n0,1\n"), "--alpha", "0.25", "--b", "200",
                        "--seed", "42", "--out", str(out_path)], capsys)
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, TEST_REPORT)
    assert doc["statistic"] == 1.0
    assert (doc["n"], doc["d"], doc["alpha"], doc["B"], doc["seed"]) == (2, 2, 0.25, 200, 42)
    assert out_path.read_text() == out


def test_cmd_test_mu0_at_column_means(csv_file, capsys):
    path = csv_file("x,y\n1,2\n3,4\n")
    code, out, _ = run(["test", "--input", path, "--seed", "1", "--b", "100", "--mu0", "2,3"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["statistic"] == 0.0 and doc["reject"] is False
    mu_file = csv_file("2,3\n", "mu.csv")
    code, out2, _ = run(["test", "--input", path, "--seed", "1", "--b", "100", "--mu0", mu_file], capsys)
    assert out2 == out


def test_cmd_test_rejects_shifted_data(csv_file, capsys):
    rows = "\n".join(f"{10 + 0.01 * (i % 7)},{10 - 0.01 * (i % 5)}" for i in range(40))
    code, out, _ = run(["test", "--input", csv_file(rows), "--seed", "3", "--b", "300"], capsys)
    assert code == 0 and json.loads(out)["reject"] is True


@pytest.mark.parametrize(
    "text, needle",
    [
        ("1,2\n3\n", "row 2"),
        ("1,2\n3,abc\n", "row 2, column 2"),
        ("", "no data rows"),
        ("a,b\n", "no data rows"),
        ("1,2\nnan,3\n", "row 2, column 1"),
    ],
)
def test_cmd_test_malformed_csv(csv_file, capsys, text, needle):
    code, _, err = run(["test", "--input", csv_file(text), "--seed", "1"], capsys)
    assert code == 2
    assert needle in err


def test_cmd_test_mu0_length_mismatch(csv_file, capsys):
    code, _, err = run(["test", "--input", csv_file("1,2\n3,4\n"), "--seed", "1", "--mu0", "1,2,3"], capsys)
    assert code == 2 and "mu0" in err


def test_cmd_test_missing_file(capsys, tmp_path):
    code, _, err = run(["test", "--input", str(tmp_path / "nope.csv"), "--seed", "1"], capsys)
    assert code == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["test", "--input", "x.csv"],  # seed is required
        ["test", "--input", "x.csv", "--seed", "1", "--bogus"],
        ["test", "--input", "x.csv", "--seed", "1", "--alpha", "1.5"],
        ["test", "--input", "x.csv", "--seed", "-3"],
        ["test", "--input", "x.csv", "--seed", "1", "--b", "0"],
        ["diagnose", "--input", "x.csv", "--eps", "0.1,-1"],
        ["frobnicate"],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_cmd_test_identical_invocations(csv_file, capsys):
    rows = "\n".join(f"{(i * 37) % 11 - 5},{(i * 13) % 7 - 3},{i % 3 - 1}" for i in range(60))
    path = csv_file(rows)
    outs = [run(["test", "--input", path, "--seed", "9", "--b", "500", "--workers", str(w)], capsys)[1]
            for w in (1, 1, 3)]
    assert outs[0] == outs[1] == outs[2]


def test_cmd_diagnose(csv_file, capsys):
    code, out, _ = run(["diagnose", "--input", csv_file("2,2\n2,2\n2,2\n")], capsys)
    doc = json.loads(out)
    assert code == 0
    jsonschema.validate(doc, DIAGNOSTICS_REPORT)
    assert set(doc["lindeberg"]) == {repr(e) for e in DEFAULT_EPSILON_GRID}
    assert all(v == 0.0 for v in doc["lindeberg"].values())


def test_cmd_diagnose_custom_grid_and_level(csv_file, capsys):
    code, out, _ = run(["diagnose", "--input", csv_file("0,1,2\n0,1,5\n0,3,2\n10,1,2\n"),
                        "--eps", "0.5,1", "--l", "1"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["l_projection"] == 1
    assert doc["lindeberg"] == {"0.5": 18.75, "1.0": 18.75}
    assert doc["epsilon_grid"] == [0.5, 1.0]


def test_cmd_diagnose_level_exceeds_d(csv_file, capsys):
    code, _, err = run(["diagnose", "--input", csv_file("1,2\n3,4\n"), "--l", "3"], capsys)
    assert code == 2 and "--l 3" in err


PLAN = """kind = "level_study"
n_grid = [30]
m_datasets = {m}
b_replicates = 49
alpha_list = [0.05, 0.1]
master_seed = 17
decay = "list"
eigenvalues = [1.0, 1.0, 1.0]
truncation = "fixed"
truncation_d = 3
"""


def test_cmd_simulate(csv_file, capsys, tmp_path):
    plan = csv_file(PLAN.format(m=40), "plan.toml")
    outs = []
    for i in range(2):
        out = tmp_path / f"r{i}.json"
        code, _, err = run(["simulate", "--plan", plan, "--out", str(out), "--csv", str(tmp_path / "r.csv")], capsys)
        assert code == 0
        assert "cell 0: n=30 d_n=3 alpha=0.05 rejection_rate=" in err
        outs.append(json.loads(out.read_text()))
    jsonschema.validate(outs[0], EXPERIMENT_REPORT)
    assert [c["alpha"] for c in outs[0]["cells"]] == [0.05, 0.1]
    assert harness.strip_timing(outs[0]) == harness.strip_timing(outs[1])
    assert (tmp_path / "r.csv").read_text().count("\n") == 3


def test_cmd_simulate_config_error(csv_file, capsys, tmp_path):
    plan = csv_file(PLAN.format(m=0), "plan.toml")
    code, _, err = run(["simulate", "--plan", plan, "--out", str(tmp_path / "r.json")], capsys)
    assert code == 2 and "m_datasets must be ≥ 1" in err
    bad = csv_file("kind = [", "bad.toml")
    code, _, err = run(["simulate", "--plan", bad, "--out", str(tmp_path / "r.json")], capsys)
    assert code == 2


def test_cmd_simulate_partial_failure(csv_file, capsys, tmp_path, monkeypatch):
    def broken(*args, **kwargs):
        raise RuntimeError("disk on fire")

    monkeypatch.setattr(harness, "generate_sample", broken)
    out = tmp_path / "r.json"
    code, _, err = run(["simulate", "--plan", csv_file(PLAN.format(m=5), "plan.toml"), "--out", str(out)], capsys)
    assert code == 1 and "FAILED" in err
    doc = json.loads(out.read_text())
    assert doc["failed"] is True and doc["cells"][0]["status"] == "failed"


def test_module_entry_point(csv_file):
    proc = subprocess.run(
        [sys.executable, "-m", "hdmean", "test", "--input", csv_file("1,0\n0,1\n"), "--seed", "1", "--b", "10"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["statistic"] == 1.0
