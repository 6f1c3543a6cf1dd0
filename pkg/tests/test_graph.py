import math
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from graphsort.graph import (PairWeightSpec, alias_table, build_sampler, gray_code, gray_edges,
                             is_connected, is_gray_edge, load_custom_table, pair_probability,
                             sample_pair, total_weight)
from graphsort.rng import Stream


def test_total_weight_examples():
    assert total_weight(PairWeightSpec.harmonic(4)) == pytest.approx(52 / 3, rel=1e-15)
    assert total_weight(PairWeightSpec.uniform(4)) == 6
    assert total_weight(PairWeightSpec.adjacent(5)) == 4
    assert total_weight(PairWeightSpec.harmonic(2)) == 4
    assert total_weight(PairWeightSpec.uniform(100)) == 4950
    w = total_weight(PairWeightSpec.harmonic(4))
    assert 4 * (4 * math.log(4) - 4) <= w <= 4 * (4 * math.log(4) + 4)


@pytest.mark.parametrize("family", ["uniform", "adjacent", "harmonic", "gray"])
@pytest.mark.parametrize("n", [2, 4, 8, 16])
def test_total_weight_matches_pair_sum(family, n):
    spec = PairWeightSpec(family, n)
    assert total_weight(spec) == pytest.approx(math.fsum(w for _, _, w in spec.pairs()))


def test_pair_probability_examples():
    assert pair_probability(PairWeightSpec.harmonic(4), 0, 3) == pytest.approx(1 / 13)
    for i, j in [(0, 1), (1, 3), (0, 2)]:
        assert pair_probability(PairWeightSpec.uniform(4), i, j) == pytest.approx(1 / 6)
    assert pair_probability(PairWeightSpec.gray(8), 0, 2) == 0


@pytest.mark.parametrize("family,n", [("uniform", 7), ("adjacent", 9), ("harmonic", 10),
                                      ("gray", 16)])
def test_probabilities_sum_to_one(family, n):
    spec = PairWeightSpec(family, n)
    total = math.fsum(pair_probability(spec, i, j) for i in range(n) for j in range(i + 1, n))
    assert total == pytest.approx(1.0, abs=1e-12)


def test_spec_validation():
    with pytest.raises(ValueError):
        PairWeightSpec.harmonic(8, scale=0)
    with pytest.raises(ValueError):
        PairWeightSpec.harmonic(8, scale=float("inf"))
    with pytest.raises(ValueError):
        PairWeightSpec.gray(12)
    with pytest.raises(ValueError):
        PairWeightSpec.uniform(1)
    with pytest.raises(ValueError):
        PairWeightSpec("bogus", 4)
    with pytest.raises(ValueError):
        PairWeightSpec.custom(4, {(1, 1): 1.0})
    with pytest.raises(ValueError):
        PairWeightSpec.custom(4, {(0, 4): 1.0})
    with pytest.raises(ValueError):
        PairWeightSpec.custom(4, {(0, 1): -1.0})
    with pytest.raises(ValueError):
        PairWeightSpec.custom(4, {(0, 1): 0.0})
    with pytest.raises(ValueError):
        PairWeightSpec.uniform(4).weight(2, 2)


def test_gray_examples():
    assert [gray_code(i) for i in range(4)] == [0b00, 0b01, 0b11, 0b10]
    assert is_gray_edge(0, 1, 8)
    with pytest.raises(ValueError):
        is_gray_edge(0, 0, 8)
    with pytest.raises(ValueError):
        is_gray_edge(0, 1, 6)


@pytest.mark.parametrize("n", [2, 4, 8, 32, 128])
def test_gray_hypercube_regular(n):
    edges = gray_edges(n)
    assert len(edges) == n * int(math.log2(n)) // 2
    deg = Counter(v for e in edges for v in e)
    assert set(deg.values()) == {int(math.log2(n))}
    assert is_connected(PairWeightSpec.gray(n))


def _chi2_pvalue(spec, draws, seed, backend_rng=None):
    sampler = build_sampler(spec)
    rng = Stream(seed)
    counts = Counter(sample_pair(sampler, rng) for _ in range(draws))
    pairs = [(i, j) for i, j, _ in spec.pairs()]
    assert set(counts) <= set(pairs)
    obs = [counts.get(p, 0) for p in pairs]
    exp = [draws * pair_probability(spec, *p) for p in pairs]
    return stats.chisquare(obs, exp).pvalue


@pytest.mark.parametrize("spec", [PairWeightSpec.uniform(6), PairWeightSpec.harmonic(8),
                                  PairWeightSpec.gray(8),
                                  PairWeightSpec.custom(5, {(0, 4): 3.0, (1, 2): 1.0, (2, 3): 0.5})],
                         ids=["uniform", "harmonic", "gray", "custom"])
def test_sampler_chi_square(spec):
    assert _chi2_pvalue(spec, 60000, seed=11) > 1e-4


def test_sampler_examples():
    rng = Stream(5)
    s3 = build_sampler(PairWeightSpec.uniform(3))
    counts = Counter(sample_pair(s3, rng) for _ in range(60000))
    assert sorted(counts) == [(0, 1), (0, 2), (1, 2)]
    assert all(abs(c - 20000) <= 600 for c in counts.values())
    s2 = build_sampler(PairWeightSpec.adjacent(2))
    assert {sample_pair(s2, rng) for _ in range(100)} == {(0, 1)}
    h = build_sampler(PairWeightSpec.harmonic(4))
    hits = sum(sample_pair(h, rng) == (0, 3) for _ in range(10 ** 5))
    sigma = math.sqrt(10 ** 5 * (1 / 13) * (12 / 13))
    assert abs(hits - 10 ** 5 / 13) <= 3 * sigma


def test_sampler_arrays_are_frozen():
    s = build_sampler(PairWeightSpec.harmonic(16))
    with pytest.raises(ValueError):
        s.prob[0] = 0.5


@given(st.lists(st.floats(0, 100, allow_nan=False), min_size=1, max_size=40))
@settings(max_examples=80, deadline=None)
def test_alias_table_reconstructs_weights(ws):
    if not sum(ws) > 0:
        with pytest.raises(ValueError):
            alias_table(ws)
        return
    prob, alias = alias_table(ws)
    m = len(ws)
    mass = [0.0] * m
    for c in range(m):
        mass[c] += prob[c] / m
        mass[alias[c]] += (1 - prob[c]) / m
    total = math.fsum(ws)
    for k in range(m):
        assert mass[k] == pytest.approx(ws[k] / total, abs=1e-9)


def test_custom_table_file(tmp_path):
    path = tmp_path / "w.txt"
    path.write_text("# ring\n0 1 1.0\n1 2 2\n2 3 1\n3 0 0.5  # wrap\n")
    spec = load_custom_table(path)
    assert spec.n == 4
    assert total_weight(spec) == 4.5
    assert spec.weight(0, 3) == 0.5
    assert is_connected(spec)
    bad = tmp_path / "bad.txt"
    bad.write_text("0 1\n")
    with pytest.raises(ValueError):
        load_custom_table(bad)


def test_disconnected_custom_graph():
    assert not is_connected(PairWeightSpec.custom(4, {(0, 1): 1, (2, 3): 1}))
