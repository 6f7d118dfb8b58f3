import io
import json
import subprocess
import sys

import pytest

from tateforge import cli
from tateforge.dglie import sl2, to_document
from tateforge.scalars import parse_scalar

SMOKE = {
    "residue-pairing": {"d": 1, "n": 2},
    "koszul": {"d": 2, "n": 1, "k": 2},
    "koszul-duality": {"d": 1, "n": 2, "k": 1},
    "local-cohomology": {"d": 1, "n_max": 2},
    "cofinality": {"d": 1, "p": 1},
    "tate": {"lattices": [{"window": [0, 2], "rows": [["1/1", "0/1"], ["0/1", "1/1"]]}, {"window": [0, 2], "rows": [["0/1", "3/1"]]}]},
    "tate-laws": {"trials": 5},
    "validate-lie": {"lie": "sl2"},
    "free-lie": {"generators": [0, 0], "weight": 3},
    "ce-homology": {"lie": "sl2", "weight": 3},
    "ce-cohomology": {"lie": "sl2", "weight": 3, "coefficients": "adjoint"},
    "ce-conventions": {"lie": "free:1,1:4", "weight": 4},
    "pbw": {"lie": "sl2", "weight": 2},
    "envelope-oracle": {"lie": "abelian:0,1", "weight": 3},
    "loop-generators": {"d": 2, "E": [1], "n": 1, "p": 1},
    "subsets-colim": {"d": 2, "source": "random", "seed": 4},
    "loop-tangent": {"d": 2, "n": 1, "p": 1},
    "bubble-fiber": {"d": 1, "n": 1, "p": 1},
    "formal-sphere": {"d": 1, "n": 2, "p": 2},
    "bubble-pairing": {"d": 1, "m": 1, "n": 2},
    "hilbert": {"d": 1, "E": [1], "n": 1, "p": 1, "m": 2, "cutoff": 2},
}


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def run_stdin(text, capsys, extra=()):
    old, sys.stdin = sys.stdin, io.StringIO(text)
    try:
        return run(["run", "-", *extra], capsys)
    finally:
        sys.stdin = old


def run_job(job, capsys, extra=()):
    return run_stdin(json.dumps(job), capsys, extra)


def test_every_operation_has_a_smoke_job():
    assert set(SMOKE) == set(cli.OPERATIONS)


@pytest.mark.parametrize("name", sorted(SMOKE))
def test_operation_runs_cleanly(name):
    report, code = cli.execute({"operation": name, "params": SMOKE[name]})
    assert code == cli.EXIT_OK, report["verdicts"]
    assert report["ok"] and report["verdicts"]
    assert "seconds" not in report


@pytest.mark.parametrize("name", sorted(SMOKE))
def test_report_inputs_rerun_identically(name):
    report, _ = cli.execute({"operation": name, "params": SMOKE[name]})
    again, _ = cli.execute(report["inputs"])
    assert cli.dumps(again) == cli.dumps(report)


# ---------------------------------------------------------------------------
# command line examples


def test_residue_pairing_command(capsys):
    code, out, _ = run(["residue-pairing", "--d", "1", "--n", "2"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["result"]["matrix"] == [["0/1", "1/1"], ["1/1", "0/1"]]


def test_ce_cohomology_command(capsys):
    code, out, _ = run(["ce-cohomology", "--lie", "sl2", "--weight", "3"], capsys)
    assert code == 0
    assert json.loads(out)["result"]["totals"] == {"0": 1, "1": 0, "2": 0, "3": 1}


def test_scalars_are_fractions_in_reports():
    report, _ = cli.execute({"operation": "tate", "params": SMOKE["tate"]})

    def scalars(x):
        if isinstance(x, dict):
            for v in x.values():
                yield from scalars(v)
        elif isinstance(x, list):
            for v in x:
                yield from scalars(v)
        elif isinstance(x, str) and "/" in x:
            yield x

    found = list(scalars(report["result"]))
    assert found
    for s in found:
        assert cli.scalar(parse_scalar(s)) == s


def test_flags_over_a_prime_field(capsys):
    code, out, _ = run(["koszul", "--d", "2", "--n", "1", "--k", "2", "--field", "fp:7"], capsys)
    assert code == 0
    assert json.loads(out)["inputs"]["field"] == "fp:7"


def test_timing_only_adds_seconds(capsys):
    code, out, _ = run(["residue-pairing", "--d", "1", "--n", "1", "--timing"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["seconds"] >= 0
    plain, _ = cli.execute({"operation": "residue-pairing", "params": {"d": 1, "n": 1}})
    del rep["seconds"]
    assert rep == json.loads(cli.dumps(plain))


def test_out_file(tmp_path, capsys):
    target = tmp_path / "r.json"
    code, out, _ = run(["loop-generators", "--d", "1", "--E", "1", "--n", "2", "--p", "0", "--out", str(target)], capsys)
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["result"]["count"] == 3


def test_lie_from_a_file(tmp_path, capsys):
    path = tmp_path / "sl2.json"
    path.write_text(json.dumps(to_document(sl2())))
    code, out, _ = run(["ce-homology", "--lie", str(path), "--weight", "3"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert isinstance(rep["inputs"]["params"]["lie"], dict)
    # the echoed document reproduces the run without the file
    again, _ = cli.execute(rep["inputs"])
    assert again["result"] == rep["result"]


# ---------------------------------------------------------------------------
# exit codes


def test_invariant_failure_exits_one_with_witness(capsys):
    code, out, err = run(["validate-lie", "--lie", "sl2-corrupted"], capsys)
    assert code == cli.EXIT_INVARIANT
    rep = json.loads(out)
    assert not rep["ok"] and "Jacobi" in rep["verdicts"][0]["witness"]
    assert "FAIL" in err


def test_plain_convention_exits_one(capsys):
    code, out, _ = run(["ce-homology", "--lie", "free:1,1:4", "--weight", "4", "--convention", "plain"], capsys)
    assert code == cli.EXIT_INVARIANT
    assert "eta[x,[x,[x,y]]]" in json.loads(out)["verdicts"][0]["witness"]


@pytest.mark.parametrize(
    "argv",
    [
        ["residue-pairing", "--d", "9", "--n", "1"],
        ["loop-tangent", "--d", "1", "--n", "1", "--p", "1", "--field", "fp:7"],
        ["loop-generators", "--d", "2", "--E", "3", "--n", "1", "--p", "1"],
        ["koszul", "--d", "1", "--n", "1", "--k", "1", "--field", "fp:9"],
        ["ce-homology", "--lie", "no-such-algebra", "--weight", "2"],
        ["pbw", "--lie", "sl2", "--weight", "3", "--field", "fp:3"],
        ["formal-sphere", "--d", "1", "--n", "2", "--p", "1"],
        ["koszul-duality", "--d", "1", "--n", "3", "--k", "1", "--window", "2"],
        ["residue-pairing", "--d", "1", "--n", "1", "--parallel", "0"],
    ],
)
def test_input_errors_exit_two_without_a_report(argv, capsys):
    code, out, err = run(argv, capsys)
    assert code == cli.EXIT_INPUT
    assert out == "" and err.startswith("error:")


def test_unknown_parameter_rejected(capsys):
    code, out, _ = run_job({"operation": "residue-pairing", "params": {"d": 1, "n": 1, "bogus": 1}}, capsys)
    assert code == cli.EXIT_INPUT and out == ""


def test_unknown_job_key_rejected(capsys):
    code, _, _ = run_job({"operation": "residue-pairing", "params": {"d": 1, "n": 1}, "extra": 1}, capsys)
    assert code == cli.EXIT_INPUT


def test_malformed_json_exits_two(capsys):
    code, out, _ = run_stdin("{not json", capsys)
    assert code == cli.EXIT_INPUT and out == ""


def test_malformed_lie_document_exits_two(capsys):
    doc = {"basis": ["x"], "degrees": [0], "brackets": [["x", "nowhere", {"x": "1/1"}]]}
    code, _, _ = run_job({"operation": "validate-lie", "params": {"lie": doc}}, capsys)
    assert code == cli.EXIT_INPUT


def test_float_scalars_rejected(capsys):
    doc = {"basis": ["x", "y"], "degrees": [0, 0], "brackets": [["x", "y", {"x": 0.5}]]}
    code, _, _ = run_job({"operation": "validate-lie", "params": {"lie": doc}}, capsys)
    assert code == cli.EXIT_INPUT


# ---------------------------------------------------------------------------
# job files and fan-out


def job_file():
    return {"jobs": [{"operation": name, "params": params} for name, params in sorted(SMOKE.items())]}


def test_parallel_fan_out_is_deterministic(tmp_path, capsys):
    path = tmp_path / "jobs.json"
    path.write_text(json.dumps(job_file()))
    code1, out1, _ = run(["run", str(path)], capsys)
    code3, out3, _ = run(["run", str(path), "--parallel", "3"], capsys)
    assert code1 == code3 == 0
    assert out1 == out3
    reports = json.loads(out1)["reports"]
    assert [r["inputs"]["operation"] for r in reports] == sorted(SMOKE)


def test_job_file_with_a_failing_job(capsys):
    jobs = {"jobs": [{"operation": "validate-lie", "params": {"lie": "sl2"}}, {"operation": "validate-lie", "params": {"lie": "sl2-corrupted"}}]}
    code, out, err = run_job(jobs, capsys)
    assert code == cli.EXIT_INVARIANT
    doc = json.loads(out)
    assert [r["ok"] for r in doc["reports"]] == [True, False] and not doc["ok"]
    assert "job 1: FAIL" in err


def test_job_file_rejected_as_a_whole(capsys):
    jobs = {"jobs": [{"operation": "validate-lie", "params": {"lie": "sl2"}}, {"operation": "loop-tangent", "params": {"d": 7, "n": 1, "p": 1}}]}
    code, out, _ = run_job(jobs, capsys)
    assert code == cli.EXIT_INPUT and out == ""


def test_per_job_out(tmp_path, capsys):
    target = tmp_path / "one.json"
    code, out, _ = run_job({"operation": "residue-pairing", "params": {"d": 1, "n": 1}, "out": str(target)}, capsys)
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["ok"]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "tateforge", "loop-generators", "--d", "2", "--n", "1", "--p", "1"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout)["result"]["count"] == 4


def test_help_lists_every_operation(capsys):
    with pytest.raises(SystemExit):
        cli.main(["--help"])
    out = capsys.readouterr().out
    assert all(name in out for name in cli.OPERATIONS)
