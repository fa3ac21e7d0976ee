import csv
import json

import pytest

from k2u.cli import main, parse_grid


def _write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def _run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze_tda_all(tmp_path, capsys):
    f = _write(tmp_path, "two.json", {"tasks": [{"c": 1, "t": 2}, {"c": 1, "t": 3}]})
    code, out, _ = _run(capsys, ["analyze", "--input", f, "--test", "tda", "--task", "all"])
    assert code == 0
    report = json.loads(out)
    assert report["accepted"] and [v["task"] for v in report["verdicts"]] == [1, 2]


def test_analyze_fp_rejects_dm_example(tmp_path, capsys):
    f = _write(tmp_path, "dm.json", {"tasks": [{"c": 0.55, "t": 1}, {"c": 0.5, "t": 1.5}]})
    code, out, _ = _run(capsys, ["analyze", "--input", f, "--test", "fp-hyperbolic", "--task", "2"])
    assert code == 1
    v = json.loads(out)["verdicts"][0]
    assert v["task"] == 2 and v["value"] == pytest.approx(2.0667, abs=1e-4) and v["bound"] == 2.0


def test_analyze_dag_missing_cp(tmp_path, capsys):
    f = _write(tmp_path, "s.json", {"tasks": [{"c": 1, "t": 4}], "processors": 2})
    code, _, err = _run(capsys, ["analyze", "--input", f, "--test", "grm-dag"])
    assert code == 2 and "task 0" in err and "cp" in err


def test_analyze_mismatch_is_not_applicable(tmp_path, capsys):
    f = _write(tmp_path, "c.json", {"tasks": [{"c": 1, "t": 4, "d": 3}], "processors": 2})
    code, out, _ = _run(capsys, ["analyze", "--input", f, "--test", "grm"])
    assert code == 1
    v = json.loads(out)["verdicts"][0]
    assert v["applicable"] is False and "implicit" in v["note"]


def test_analyze_processor_override(tmp_path, capsys):
    f = _write(tmp_path, "g.json", {"tasks": [{"c": 1, "t": 2}, {"c": 1, "t": 2}, {"c": 0.8, "t": 2}]})
    code, _, _ = _run(capsys, ["analyze", "--input", f, "--test", "grm-naive", "--task", "3", "--processors", "2"])
    assert code == 1
    code, _, _ = _run(capsys, ["analyze", "--input", f, "--test", "grm-naive", "--task", "3", "--processors", "4"])
    assert code == 0


def test_analyze_usage_errors(tmp_path, capsys):
    f = _write(tmp_path, "one.json", {"tasks": [{"c": 1, "t": 2}]})
    assert _run(capsys, ["analyze", "--input", f, "--test", "nope"])[0] == 2
    assert _run(capsys, ["analyze", "--input", f, "--test", "tda", "--task", "5"])[0] == 2
    assert _run(capsys, ["analyze", "--input", str(tmp_path / "missing.json"), "--test", "tda"])[0] == 2
    assert _run(capsys, ["analyze", "--input", f])[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert _run(capsys, ["analyze", "--input", str(bad), "--test", "tda"])[0] == 2


def test_rt_tests_need_flag(tmp_path, capsys):
    f = _write(tmp_path, "rt.json", {"tasks": [{"c": 1, "t": 2}, {"c": 0.5, "t": 10}]})
    assert _run(capsys, ["analyze", "--input", f, "--test", "rt-linear"])[0] == 2
    code, out, _ = _run(capsys, ["analyze", "--input", f, "--test", "rt-linear", "--experimental-rt-bounds"])
    assert code == 0 and "R <= 2" in json.loads(out)["verdicts"][1]["note"]


def test_rm_us_classification(tmp_path, capsys):
    f = _write(tmp_path, "us.json", {"tasks": [{"c": 0.4, "t": 1}, {"c": 0.3, "t": 1}], "processors": 2})
    code, out, _ = _run(capsys, ["analyze", "--input", f, "--test", "rm-us"])
    assert code == 0 and "top=[1]" in json.loads(out)["verdicts"][0]["note"]


def test_solve_factors(capsys):
    code, out, _ = _run(capsys, ["solve-factors"])
    d = json.loads(out)
    assert code == 0
    assert d["speedup"]["factor"] == pytest.approx(1.76322, abs=1e-3)
    assert d["capacity_dag"]["factor"] == pytest.approx(3.62143, abs=1e-3)
    assert d["capacity_sporadic"]["factor"] == pytest.approx(2.668, abs=1e-3)


def test_parse_grid():
    assert parse_grid("0.1:0.5:0.1") == [0.1, 0.2, 0.3, 0.4, 0.5]
    assert parse_grid("0.3:0.3:0.1") == [0.3]


def _sweep(tmp_path, capsys, name, *extra):
    out = tmp_path / name
    argv = ["sweep", "--n", "5", "--processors", "1", "--util", "0.1:0.9:0.4", "--sets", "30", "--seed", "7",
            "--tests", "tda,fp-hyperbolic,fp-sum", "--out", str(out), "--deadlines", "constrained", *extra]
    assert _run(capsys, argv)[0] == 0
    return out


def test_sweep_schema_and_dominance(tmp_path, capsys):
    out = _sweep(tmp_path, capsys, "a.csv")
    rows = list(csv.DictReader(out.open()))
    assert list(rows[0]) == ["test", "n", "m", "util", "sets", "accepted", "ratio", "seed"]
    assert len(rows) == 9
    by = {(r["test"], r["util"]): int(r["accepted"]) for r in rows}
    assert by[("tda", "0.1")] == by[("fp-hyperbolic", "0.1")] == 30
    for u in ("0.1", "0.5", "0.9"):
        assert by[("fp-hyperbolic", u)] <= by[("tda", u)]
        assert by[("fp-sum", u)] <= by[("fp-hyperbolic", u)]
    for r in rows:
        assert float(r["ratio"]) == int(r["accepted"]) / int(r["sets"])


def test_sweep_workers_do_not_change_bytes(tmp_path, capsys):
    a = _sweep(tmp_path, capsys, "a.csv").read_bytes()
    b = _sweep(tmp_path, capsys, "b.csv", "--workers", "2").read_bytes()
    assert a == b


def test_sweep_errors(tmp_path, capsys):
    base = ["sweep", "--n", "3", "--sets", "2", "--tests", "tda"]
    assert _run(capsys, base + ["--util", "0.5:0.1:0.1", "--out", str(tmp_path / "x.csv")])[0] == 2
    assert _run(capsys, base + ["--util", "0.1:0.2:0.1", "--out", str(tmp_path / "no" / "x.csv")])[0] == 2
    assert _run(capsys, ["sweep", "--n", "3", "--sets", "2", "--tests", "bogus", "--util", "0.1:0.1:0.1",
                         "--out", str(tmp_path / "y.csv")])[0] == 2


def test_sweep_multiprocessor_dag(tmp_path, capsys):
    out = tmp_path / "m.csv"
    argv = ["sweep", "--n", "6", "--processors", "4", "--util", "0.4:2.0:0.8", "--sets", "20", "--seed", "3",
            "--tests", "grm,grm-sum,grm-tight,bertogna,grm-dag,grm-fast", "--out", str(out)]
    assert _run(capsys, argv)[0] == 0
    by = {(r["test"], r["util"]): int(r["accepted"]) for r in csv.DictReader(out.open())}
    for u in ("0.4", "1.2", "2.0"):
        assert by[("grm-sum", u)] <= by[("grm", u)]
        assert by[("grm-fast", u)] <= by[("grm-dag", u)]


def test_sweep_spec_points(tmp_path, capsys):
    out = tmp_path / "s.csv"
    argv = ["sweep", "--n", "5", "--processors", "1", "--util", "0.1:0.999:0.899", "--sets", "60", "--seed", "1",
            "--tests", "tda,fp-hyperbolic,edf-dbf,rt-linear", "--out", str(out), "--experimental-rt-bounds"]
    assert _run(capsys, argv)[0] == 0
    rows = {(r["test"], r["util"]): float(r["ratio"]) for r in csv.DictReader(out.open())}
    assert all(rows[(t, "0.1")] == 1.0 for t in ("tda", "fp-hyperbolic", "edf-dbf", "rt-linear"))
    # with log-uniform periods almost no set is RM-schedulable at 0.999
    assert rows[("fp-hyperbolic", "0.999")] <= rows[("tda", "0.999")]


def test_sweep_sufficient_strictly_below_exact(tmp_path, capsys):
    out = tmp_path / "s.csv"
    argv = ["sweep", "--n", "5", "--util", "0.85:0.85:0.1", "--sets", "200", "--seed", "1",
            "--tests", "tda,fp-hyperbolic", "--out", str(out)]
    assert _run(capsys, argv)[0] == 0
    rows = {r["test"]: float(r["ratio"]) for r in csv.DictReader(out.open())}
    assert rows["fp-hyperbolic"] < rows["tda"]


def test_registry_guards():
    from k2u import registry
    from k2u.taskmodel import Task, TaskSet

    multi = TaskSet([Task(1, 2), Task(1, 3)], 2)
    assert not registry.run_test("tda", multi)[0].applicable
    assert not registry.run_test("busy-window", TaskSet([Task(1, 2)]))[0].applicable
    arb = TaskSet([Task(0.5, 3), Task(1, 2, 4)])
    assert registry.run_test("fp-hyperbolic", arb, 1)[0].accepted
    assert not registry.run_test("tda", arb, 1)[0].applicable
    assert not registry.set_accepted("edf-dbf", TaskSet([Task(1, 1), Task(1, 2)]))
    assert registry.set_accepted("edf-dbf", TaskSet([Task(1, 2), Task(1, 3)]))
