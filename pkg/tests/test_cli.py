import json

import pytest

from graphsort.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_sort(capsys):
    code, out, _ = run(capsys, "sort", "--sorter", "harmonic", "--n", "32", "--seed", "4")
    d = json.loads(out)
    assert code == 0 and d["sorted"] and d["seed"] == 4 and d["status"] == "sorted"


@pytest.mark.parametrize("sorter", ["uniform", "gray", "structured", "dimcut", "async-mark"])
def test_sort_sorters(capsys, sorter):
    code, out, _ = run(capsys, "sort", "--sorter", sorter, "--n", "32", "--input", "random")
    assert code == 0 and json.loads(out)["sorted"]


def test_experiment_flags_and_config(capsys, tmp_path):
    out_a = tmp_path / "a.csv"
    code, _, err = run(capsys, "experiment", "--sorter", "harmonic", "--n", "16,32",
                       "--trials", "3", "--out", str(out_a))
    assert code == 0 and "6 runs" in err
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"sorter": "harmonic", "n_list": [16, 32], "trials": 3}))
    out_b = tmp_path / "b.csv"
    assert run(capsys, "experiment", "--config", str(cfg), "--out", str(out_b))[0] == 0
    assert out_a.read_bytes() == out_b.read_bytes()


def test_parallel_and_fit(capsys, tmp_path):
    path = tmp_path / "p.csv"
    code, _, _ = run(capsys, "parallel", "--mode", "structured", "--n", "16", "32", "64", "128",
                     "--trials", "10", "--seed", "2", "--out", str(path))
    assert code == 0
    code, out, _ = run(capsys, "fit", str(path), "--metric", "rounds")
    assert code == 0 and "(log n)^2" in out
    code, out, _ = run(capsys, "fit", str(path), "--metric", "rounds", "--expect", "n^3")
    assert code == 1


def test_parallel_async_modes(capsys):
    for mode in ("async-atomic", "async-mark", "thinned", "dimcut"):
        code, out, _ = run(capsys, "parallel", "--mode", mode, "--n", "64", "--p", "8",
                           "--trials", "2")
        assert code == 0 and out.startswith("sorter,")


def test_verify_qalpha_exit_codes(capsys):
    assert run(capsys, "verify-qalpha", "--n", "16")[0] == 0
    code, out, _ = run(capsys, "verify-qalpha", "--n", "8", "--alpha-factor", "2")
    assert code == 1 and json.loads(out)["worst_pair"]


def test_usage_errors(capsys):
    assert run(capsys, "sort", "--sorter", "structured", "--n", "12")[0] == 2
    assert run(capsys, "experiment", "--trials", "3")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_backend_flag(capsys):
    code, out, _ = run(capsys, "--backend", "python", "sort", "--n", "16")
    assert code == 0 and json.loads(out)["backend"] == "python"
    main(["--backend", "auto", "sort", "--n", "4"])
    capsys.readouterr()


def test_oracle_reports_each_check(capsys):
    code, out, _ = run(capsys, "oracle", "--quick")
    reports = [json.loads(line) for line in out.splitlines()]
    assert {"check", "n", "trials", "failures", "firstCounterexample"} <= set(reports[0])
    failing = [r["check"] for r in reports if r["failures"]]
    assert code == (1 if failing else 0)
