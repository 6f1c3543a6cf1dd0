import numpy as np
import pytest

from graphsort.async_exec import run_async
from graphsort.graph import PairWeightSpec, build_sampler
from graphsort.rng import Stream
from graphsort.sequential import FaultModel, SortState, make_input, run_sequential


@pytest.mark.parametrize("protocol,p", [("atomic", 1), ("atomic", 4), ("atomic", 16),
                                        ("mark", 1), ("mark", 8)])
def test_async_sorts_and_conserves(protocol, p, backend):
    n = 64
    x = make_input("random", n, Stream(7))
    state = SortState(x.copy())
    res = run_async(state, p, PairWeightSpec.harmonic(n), protocol=protocol, rng=Stream(1),
                    threads=2, backend=backend)
    assert res.sorted
    assert state.keys.tolist() == sorted(x.tolist())
    assert sum(res.extra["worker_comparisons"]) == res.comparisons


def test_atomic_single_worker_matches_sequential_in_mean(backend):
    n = 64
    sampler = build_sampler(PairWeightSpec.harmonic(n))
    x = make_input("reverse", n)
    rng_a, rng_s = Stream(1), Stream(2)
    trials = 400 if backend == "cython" else 80
    a = np.mean([run_async(x.copy(), 1, sampler, rng=rng_a.spawn(t), check_every=1,
                           backend=backend).comparisons for t in range(trials)])
    s = np.mean([run_sequential(x.copy(), sampler, rng=rng_s, backend=backend).comparisons
                 for _ in range(trials)])
    assert a == pytest.approx(s, rel=0.08)


def test_atomic_many_threads_conserves(backend):
    n, p = 256, 32
    spec = build_sampler(PairWeightSpec.harmonic(n))
    for t in range(40 if backend == "cython" else 3):
        x = make_input("random", n, Stream(t))
        state = SortState(x.copy())
        res = run_async(state, p, spec, rng=Stream(100 + t), threads=4, backend=backend)
        assert res.sorted and state.keys.tolist() == sorted(x.tolist())


def test_mark_protocol_accounting(backend):
    n, p = 256, 32
    res = run_async(make_input("reverse", n), p, PairWeightSpec.harmonic(n), protocol="mark",
                    rng=Stream(3), backend=backend)
    assert res.sorted
    assert res.extra["violations"] == 0
    assert res.extra["attempts"] == res.rounds * p
    frac = res.comparisons / res.extra["attempts"]
    assert frac >= 0.5


def test_mark_reproducible(backend):
    x = make_input("reverse", 128)
    spec = PairWeightSpec.harmonic(128)
    a = run_async(x.copy(), 16, spec, protocol="mark", rng=Stream(5), threads=3, backend=backend)
    b = run_async(x.copy(), 16, spec, protocol="mark", rng=Stream(5), threads=1, backend=backend)
    assert (a.rounds, a.comparisons, a.swaps) == (b.rounds, b.comparisons, b.swaps)


def test_async_fault_and_budget(backend):
    n = 64
    res = run_async(make_input("reverse", n), 4, PairWeightSpec.harmonic(n),
                    FaultModel.constant(0.5), rng=Stream(1), backend=backend)
    assert res.sorted
    short = run_async(make_input("reverse", n), 4, PairWeightSpec.harmonic(n), budget=20,
                      rng=Stream(1), check_every=4, backend=backend)
    assert not short.sorted and short.status == "budget-exhausted"


def test_async_validation():
    spec = PairWeightSpec.harmonic(16)
    with pytest.raises(ValueError):
        run_async(list(range(16)), 0, spec)
    with pytest.raises(ValueError):
        run_async(list(range(16)), 5, spec, protocol="mark")
    with pytest.raises(ValueError):
        run_async(list(range(16)), 2, spec, protocol="gossip")
    with pytest.raises(ValueError):
        run_async(list(range(16)), 2, spec, FaultModel.per_pair(lambda i, j: 1.0, 0.5))
    with pytest.raises(ValueError):
        run_async(list(range(8)), 2, spec)
