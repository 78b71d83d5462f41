import json
import subprocess
import sys
from pathlib import Path

import pytest

from krawkernel import __version__
from krawkernel.cli import main

DATA = Path(__file__).parent / "data"
COUNTS = str(DATA / "sample_counts.txt")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("argv,expected", [
    (["eval", "kernel", "--N", "4", "--p", "1/2,1/4,1/4", "--n", "1", "--x", "4,0,0", "--y", "4,0,0"], "4"),
    (["eval", "kernel", "--N", "3", "--p", "1/2,1/4,1/4", "--n", "2", "--x", "2,1,0", "--y", "1,1,1", "--form", "recursion"], "1/3"),
    (["eval", "kernel", "--N", "3", "--p", "1/2,1/4,1/4", "--n", "3", "--x", "1,0,2", "--y", "0,2,1", "--form", "hypergeom"], "5/3"),
    (["eval", "krawtchouk", "--N", "4", "--p", "1/3", "--n", "2", "--x", "1"], "-1/2"),
    (["eval", "charlier", "--n", "2", "--x", "3", "--lam", "2"], "-1/2"),
])
def test_eval_prints_exact_then_float(capsys, argv, expected):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    exact, approx = out.strip().split("\t")
    assert exact == expected
    assert float(approx) == pytest.approx(float(eval(expected)))


def test_negative_values_are_not_options(capsys):
    code, out, _ = run(capsys, "eval", "poisson-limit", "--mu", "1,2", "--n", "1", "--x", "1,0", "--y", "0,1")
    assert code == 0
    code, out, _ = run(capsys, "verify", "--suite", "lancaster", "--rho", "-1/3,1/9,-1/27")
    assert code == 0 and "min entry 0" in out


def test_bad_arguments_exit_2(capsys):
    code, _, err = run(capsys, "eval", "kernel", "--N", "3", "--p", "1/2,1/2", "--n", "1", "--x", "3,0,0", "--y", "3,0,0")
    assert code == 2 and err.startswith("error:")
    code, _, err = run(capsys, "chain", "--N", "3", "--p", "1/2,1/4,1/4", "--q", "1/2")
    assert code == 2
    assert "inadmissible" in err and "1 - p_dup <= min_j p_j" in err


def test_malformed_counts_exit_3(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("#N=3,d=3\n1,1,1\n2,1,0\n2,2,2\n")
    code, _, err = run(capsys, "gof", str(bad), "--p", "1/2,1/4,1/4")
    assert code == 3 and "line 4:" in err
    code, _, err = run(capsys, "gof", str(tmp_path / "missing.txt"), "--p", "1/2,1/4,1/4")
    assert code == 3


@pytest.mark.parametrize("flags,golden", [
    (["--p", "1/2,1/4,1/4"], "golden_fixed_p.json"),
    (["--estimate-p"], "golden_estimated_p.json"),
])
def test_gof_matches_golden_bytes(capsys, flags, golden):
    code, out, err = run(capsys, "gof", COUNTS, *flags)
    assert code == 0 and f"krawkernel {__version__}" in err
    assert out == (DATA / golden).read_text()


def test_gof_output_file(tmp_path, capsys):
    target = tmp_path / "report.json"
    assert run(capsys, "gof", COUNTS, "--p", "1/2,1/4,1/4", "-o", str(target))[0] == 0
    report = json.loads(target.read_text())
    assert report["total"] == pytest.approx(sum(report["components"]))
    assert report["dfs"] == [2, 3, 4, 5]


def test_chain_csv(capsys):
    code, out, err = run(capsys, "chain", "--N", "3", "--p", "1/2,1/4,1/4", "--steps", "0:3")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "l,chi2,tv,lower,upper"
    assert lines[1].startswith("0,7.0,0.875,")
    assert len(lines) == 5
    assert f"krawkernel {__version__}" in err


def test_chain_cutoff_rows(capsys):
    code, out, _ = run(capsys, "chain", "--N", "100", "--p", "1/2,1/4,1/4", "--c", "-3,0,3", "--tv", "off")
    assert code == 0
    rows = [r.split(",") for r in out.splitlines()[1:]]
    assert len(rows) == 3
    for r in rows:
        assert float(r[3]) <= float(r[1]) <= float(r[4])


def test_chain_simulation_seed_env(capsys, monkeypatch):
    argv = ["chain", "--N", "3", "--p", "1/2,1/4,1/4", "--steps", "0,2", "--simulate", "2000"]
    monkeypatch.setenv("KRAWKERNEL_SEED", "9")
    _, env_out, env_err = run(capsys, *argv)
    monkeypatch.delenv("KRAWKERNEL_SEED")
    _, flag_out, flag_err = run(capsys, *argv, "--seed", "9")
    assert env_out == flag_out and "seed=9" in env_err and "seed=9" in flag_err
    assert env_out.splitlines()[0].endswith(",tv_sim")


def test_dup_json(capsys):
    code, out, _ = run(capsys, "dup", "--p", "1/2,1/4,1/4", "--p-dup", "4/5", "--x", "2,1,0", "--y", "1,1,1")
    rep = json.loads(out)
    assert code == 0 and rep["routes_agree"] and rep["identity_holds"]
    assert rep["phi"] == ["0", "8/75", "8/25", "43/75"]


def test_match_json_is_reproducible(capsys):
    argv = ["match", "--p", "1/2,1/4,1/4", "--q", "1/4", "--x", "2,1,0", "--y", "1,1,1", "--replicates", "20000", "--seed", "5"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    rep = json.loads(a)
    assert a == b and rep["seed"] == 5 and rep["version"] == __version__
    assert rep["tv"] < 0.02


def test_verify_boundary(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "duplication", "--boundary")
    assert code == 0
    assert "boundary_negative" in out and "FAIL" not in out


def test_verify_all_as_subprocess():
    proc = subprocess.run([sys.executable, "-m", "krawkernel", "verify"], capture_output=True, text=True, timeout=60)
    assert proc.returncode == 0, proc.stdout + proc.stderr
    lines = [l for l in proc.stdout.splitlines() if l.startswith(("PASS", "FAIL"))]
    assert len(lines) >= 20 and all(l.startswith("PASS") for l in lines)


def test_version(capsys):
    with pytest.raises(SystemExit):
        main(["--version"])
    assert __version__ in capsys.readouterr().out
