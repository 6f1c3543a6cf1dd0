import json
import math

import pytest

from graphsort.graph import PairWeightSpec, total_weight
from graphsort.harness import (ExperimentConfig, fit_scaling, read_table, run_experiment,
                               table_csv, verify_qalpha)
from graphsort.parallel import MatchingSamplerSpec
from graphsort.rng import Stream
from graphsort.stats import CSV_HEADER, RunStats


def test_identical_files(tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"r{k}.csv"
        run_experiment(ExperimentConfig("harmonic", [16, 32], trials=2, master_seed=7,
                                        output_path=str(path)))
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    assert outs[0].decode().splitlines()[0] == ",".join(CSV_HEADER)


def test_results_independent_of_fanout():
    cfg = dict(sorter="structured", n_list=[32, 64], trials=6, master_seed=3)
    a = table_csv(run_experiment(ExperimentConfig(**cfg, workers=1)))
    b = table_csv(run_experiment(ExperimentConfig(**cfg, workers=4)))
    assert a == b


def test_trial_seeds_isolated():
    one = run_experiment(ExperimentConfig("uniform", [16], trials=3, master_seed=1))
    more = run_experiment(ExperimentConfig("uniform", [16, 32], trials=5, master_seed=1))
    assert [s.row() for s in one] == [s.row() for s in more[:3]]


def test_adjacent_reverse_all_sorted():
    table = run_experiment(ExperimentConfig("adjacent", [64], trials=20))
    assert all(s.sorted for s in table)


def test_harmonic_coupon_anchor():
    table = run_experiment(ExperimentConfig("harmonic", [64], trials=500,
                                            input_kind="alternating"))
    mean = sum(s.comparisons for s in table) / len(table)
    w = total_weight(PairWeightSpec.harmonic(64))
    target = w / 4 * sum(1 / i for i in range(1, 33))
    assert abs(mean / target - 1) < 0.10


def test_json_mirror_roundtrip(tmp_path):
    path = tmp_path / "r.json"
    table = run_experiment(ExperimentConfig("dimcut", [16], trials=3, output_path=str(path)))
    rows = json.loads(path.read_text())
    assert rows[0]["sorter"] == "dimcut" and rows[0]["sorted"] is True
    back = read_table(path)
    assert [s.row() for s in back] == [s.row() for s in table]


def test_config_validation(tmp_path):
    with pytest.raises(ValueError):
        ExperimentConfig("bogus", [16])
    with pytest.raises(ValueError):
        ExperimentConfig("structured", [12])
    with pytest.raises(ValueError):
        ExperimentConfig("harmonic", [16], trials=0)
    with pytest.raises(ValueError):
        ExperimentConfig("harmonic", [16], fault_prob=0)
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({"sorter": "harmonic", "n_list": [8], "color": "red"})
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"sorter": "thinned", "n_list": [64], "p": 8, "trials": 2}))
    assert ExperimentConfig.from_json(cfg).spec_for(64).p == 8


def test_budget_multiplier_truncates():
    table = run_experiment(ExperimentConfig("uniform", [64], trials=3, budget_multiplier=1e-5))
    assert not any(s.sorted for s in table)


def _planted(law):
    return [RunStats(n=n, comparisons=int(round(law(n))), swaps=0, sorted=True)
            for n in (64, 128, 256, 512, 1024) for _ in range(2)]


def test_fit_planted_law():
    rep = fit_scaling(_planted(lambda n: 7 * n * math.log(n) ** 2))
    assert rep.best == "n (log n)^2"
    assert rep.fit("n (log n)^2").flatness == pytest.approx(1.0, abs=1e-4)
    assert "n (log n)^2" in rep.format()
    with pytest.raises(ValueError):
        fit_scaling(_planted(lambda n: n)[:4])


def test_fit_uniform_reverse():
    table = run_experiment(ExperimentConfig("uniform", [64, 128, 256, 512], trials=30))
    rep = fit_scaling(table, ["n^2", "n^2 log n", "n^3"])
    assert rep.best == "n^2 log n"
    assert rep.fit("n^2 log n").flatness < 1.5


def test_qalpha_examples():
    rep = verify_qalpha(MatchingSamplerSpec("structured", 16))
    assert rep.passed and rep.worst_margin >= 1
    bad = verify_qalpha(MatchingSamplerSpec("structured", 8), alpha_factor=2)
    assert not bad.passed and bad.worst_pair[1] > bad.worst_pair[0]
    with pytest.raises(ValueError):
        verify_qalpha(MatchingSamplerSpec("thinned", 64, 8), mode="exact")


def test_qalpha_montecarlo_small():
    rep = verify_qalpha(MatchingSamplerSpec("thinned", 64, 8), "montecarlo", 20000, Stream(1))
    assert rep.passed and rep.pairs_checked == 64 * 63 // 2
