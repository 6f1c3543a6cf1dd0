import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphsort import analysis, oracles
from graphsort.analysis import (coupon_expectation, coupon_tail, cumulative_misplaced, in_omega,
                                inversions, inversions_bruteforce, lift, lift_sizes,
                                misplaced_counts, recurrence_bound_check, recurrence_violations,
                                threshold_projection, zero_one_oracle)
from graphsort.graph import PairWeightSpec
from graphsort.rng import Stream


def test_threshold_projection_examples():
    assert threshold_projection([3, 1, 2], 1) == [1, 0, 0]
    assert threshold_projection([3, 1, 2], 2) == [1, 0, 1]
    assert threshold_projection([3, 1, 2], 0) == [0, 0, 0]
    assert threshold_projection([3, 1, 2], 3) == [1, 1, 1]
    assert threshold_projection([5, 5, 5], 1) == [0, 0, 1]
    with pytest.raises(ValueError):
        threshold_projection([1, 2], 3)


def test_zero_one_oracle_examples():
    rep = zero_one_oracle([], [1, 2, 3])
    assert rep.agree and rep.sorts_x
    bubble = [(i, i + 1) for k in range(4) for i in range(3 - k)]
    rep = zero_one_oracle(bubble, [4, 3, 2, 1])
    assert rep.agree and rep.sorts_x and rep.sorts_projections
    rep = zero_one_oracle([(0, 1)], [3, 2, 1])
    assert rep.agree and not rep.sorts_x and rep.failing_k
    with pytest.raises(ValueError):
        zero_one_oracle([(0, 0)], [1, 2])


def test_zero_one_exhaustive_n5():
    rep = oracles.zero_one_principle(5, traces=200, length=30, seed=3)
    assert rep.trials == 120 * 200 and rep.passed


def test_lift_examples():
    assert lift_sizes(3, 1) == (2, 3, 8)
    assert lift([0, 1, 0]) == [0, 0, 0, 1, 0, 1, 1, 1]
    x = [1, 0, 0, 1, 1, 0, 1, 0]
    y = lift(x)
    assert len(y) == 16 and sum(y) == 8
    with pytest.raises(ValueError):
        lift([])
    with pytest.raises(ValueError):
        lift([0, 2])


@given(st.lists(st.integers(0, 1), min_size=1, max_size=40))
def test_lift_properties(x):
    y = lift(x)
    n0, n1, total = lift_sizes(len(x), sum(x))
    top = 1 << max(0, (len(x) - 1).bit_length())
    assert total == len(y) == 2 * top
    assert 2 * sum(y) == len(y)
    assert y[n0:n0 + len(x)] == x


def test_lift_padding_frozen():
    for seed in range(3):
        assert oracles.lift_frozen([1, 1, 0, 1, 0, 0, 0], seed=seed).passed


def test_inversions_examples():
    assert inversions([2, 1, 4, 3]) == 2
    assert inversions(list(range(10))) == 0
    assert inversions(list(range(10, 0, -1))) == 45
    assert inversions([]) == 0


@given(st.lists(st.integers(-5, 5), max_size=60))
def test_inversions_match_bruteforce(x):
    assert inversions(x) == inversions_bruteforce(x)


def test_misplaced_examples():
    m = misplaced_counts([1, 1, 1, 1, 0, 0, 0, 0])
    assert m.total == 4
    assert m.zeros[0] == 2
    s = misplaced_counts([0, 0, 0, 0, 1, 1, 1, 1])
    assert s.total == 0 and not any(s.zeros + s.ones + s.zeros_below + s.ones_below)
    assert misplaced_counts([1, 0]).total == 1
    with pytest.raises(ValueError):
        misplaced_counts([1, 1, 0])
    with pytest.raises(ValueError):
        misplaced_counts([1, 1, 1, 0])


@given(st.permutations([0] * 8 + [1] * 8))
def test_misplaced_levels_consistent(x):
    m = misplaced_counts(x)
    N = 4
    for k in range(1, N + 2):
        assert (m.zeros_below[k - 1], m.ones_below[k - 1]) == cumulative_misplaced(x, k)
    # the N levels tile each half except the single cell next to 1/2
    assert sum(m.zeros) + (1 - x[8]) == m.total


def test_in_omega_examples():
    for x in ([1, 0, 1, 0], [1, 1, 0, 0], [0, 1, 1, 0]):
        assert in_omega(x, 0)
    srt = [0] * 8 + [1] * 8
    assert all(in_omega(srt, r) for r in range(8))
    assert in_omega([1] * 8 + [0] * 8, 1)
    assert not in_omega([1] * 8 + [0] * 8, 2)
    with pytest.raises(ValueError):
        in_omega(srt, -1)


def test_coupon_examples():
    assert coupon_expectation(1) == 1
    assert coupon_expectation(32) == pytest.approx(4.0585, abs=1e-4)
    assert coupon_tail(32, math.log(32) + 3) == pytest.approx(math.exp(-3))
    with pytest.raises(ValueError):
        coupon_expectation(0)


def test_recurrence_small_and_alternatives():
    assert recurrence_bound_check(10)
    assert all(recurrence_bound_check(N) for N in range(1, 13))
    # base case r = 0: the bound is 2^{3k} n >= n
    assert all(Fraction(2) ** (3 * k) >= 1 for k in range(1, 30))
    # with unit cross coefficient, or with decay e^-2, the bound holds through N = 30
    assert all(recurrence_bound_check(N, cross=1) for N in range(1, 31))
    assert all(recurrence_bound_check(N, decay=math.exp(-2)) for N in range(1, 31))
    with pytest.raises(ValueError):
        recurrence_bound_check(41)


def test_recurrence_first_violation_is_recorded():
    bad = recurrence_violations(13)
    assert bad and bad[0][:2] == (41, 13)


@pytest.mark.parametrize("family", ["uniform", "adjacent", "harmonic", "gray"])
def test_trace_oracles(family):
    spec = PairWeightSpec(family, 16)
    assert oracles.trace_inversions(spec, list(range(16, 0, -1)), 3000, seed=4).passed
    assert oracles.trace_zero_one_monotone(spec, [1] * 8 + [0] * 8, 3000, seed=5).passed


def test_oracle_report_json():
    rep = oracles.structured_matching_law(16)
    assert rep.passed
    assert '"firstCounterexample": null' in rep.to_json()
    assert oracles.total_weight_bounds(10).passed


def test_random_trace_pairs_valid():
    for i, j in oracles.random_trace(5, 500, Stream(1)):
        assert 0 <= i < j < 5


def test_projection_commutes_with_trace():
    # compare-exchange commutes with monotone thresholding
    rng = Stream(2)
    for perm in itertools.permutations(range(5)):
        tr = oracles.random_trace(5, 8, rng)
        out = analysis.replay(tr, perm)
        for k in range(6):
            assert analysis.replay(tr, threshold_projection(perm, k)) == \
                threshold_projection(out, k)
