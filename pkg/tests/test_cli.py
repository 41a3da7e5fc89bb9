import json
import subprocess
import sys

import pytest

from secular import __version__, cli


def run_json(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, json.loads(out.out), out.err


def test_levelset_example(capsys):
    code, rep, _ = run_json(["levelset", "--r1", "0.1", "--a2", "1", "--theta", "0.4", "--G", "0.7",
                             "--lambda2", "1"], capsys)
    assert code == 0
    assert set(rep) == {"config", "results", "checks", "version"}
    assert rep["version"] == __version__
    assert rep["results"][0]["defect"] < 1e-9
    assert rep["config"]["seed"] is not None


def test_legendre_check_example(capsys):
    code, rep, _ = run_json(["legendre-check", "--nmax", "30"], capsys)
    assert code == 0
    assert len(rep["results"]) == 31
    assert all(r["max_defect"] < 1e-10 for r in rep["results"])


def test_harrington_example(capsys):
    code, rep, _ = run_json(["harrington", "--nmax", "4"], capsys)
    assert code == 0
    names = {c["name"] for c in rep["checks"]}
    assert "c[2][2]_vanishes" in names
    assert all(c["passed"] for c in rep["checks"])


@pytest.mark.parametrize("argv", [
    ["average", "--r1", "0.1", "--theta", "0.2", "--Gamma2", "0.8", "--gamma2", "0.5"],
    ["dual", "--r1", "0.1", "--G2", "0.8", "--iota", "0.5", "--g2", "0.3"],
    ["mixed", "--r1", "0.1", "--e2", "0.3", "--polar", "0.5", "--azimuth", "0.2"],
    ["bridge", "--r1", "0.1", "--e2", "0.3", "--polar", "0.5", "--azimuth", "0.2"],
    ["recursion-check", "--H", "12"],
    ["chart-check", "--samples", "5"],
])
def test_other_subcommands_pass(argv, capsys):
    code, rep, err = run_json(argv, capsys)
    assert code == 0, err
    assert rep["results"]


def test_usage_error():
    with pytest.raises(SystemExit) as info:
        cli.main(["levelset", "--no-such-flag"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        cli.main(["not-a-command"])
    assert info.value.code == 2


def test_failure_names_check(capsys):
    code, rep, err = run_json(["separatrix"], capsys)
    assert code == 1
    failed = [c["name"] for c in rep["checks"] if not c["passed"]]
    assert failed
    assert all(f"FAILED check: {n}" in err for n in failed)


def test_numerical_error_exit(capsys):
    # Theta = 0 has no interior critical locus
    code, rep, err = run_json(["separatrix", "--theta", "0"], capsys)
    assert code == 1
    assert rep["checks"][0]["name"] == "NoRootError"
    assert "FAILED check: NoRootError" in err


def test_reports_are_byte_identical(capsys):
    argv = ["bracket", "--samples", "4", "--seed", "7"]
    cli.main(argv)
    first = capsys.readouterr().out
    cli.main(argv)
    assert capsys.readouterr().out == first


def test_threads_do_not_change_output(capsys, monkeypatch):
    argv = ["twocentre", "--orbits", "2", "--t-end", "5"]
    monkeypatch.setenv("SECULAR_THREADS", "1")
    cli.main(argv)
    serial = capsys.readouterr().out
    monkeypatch.setenv("SECULAR_THREADS", "3")
    cli.main(argv)
    assert capsys.readouterr().out == serial


def test_floats_have_17_digits(capsys):
    cli.main(["average", "--r1", "0.1", "--theta", "0.2", "--Gamma2", "0.8"])
    text = capsys.readouterr().out
    assert '"r1": 0.10000000000000001' in text
    h1 = json.loads(text)["results"][0]["h1"]
    assert f'"h1": {format(h1, ".17g")}' in text


def test_csv_and_output_file(tmp_path):
    out = tmp_path / "report.csv"
    assert cli.main(["legendre-check", "--nmax", "5", "--format", "csv", "-o", str(out)]) == 0
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("kind,")
    kinds = [ln.split(",")[0] for ln in lines[1:]]
    assert kinds.count("result") == 6
    assert "check" in kinds and "config" in kinds


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "secular", "legendre-check", "--nmax", "3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["checks"][0]["passed"]
