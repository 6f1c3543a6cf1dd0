"""Concurrent executor: ``p`` workers sharing one key array.

``atomic``: every worker loops {draw a pair, lock both positions in ascending
index order, compare-exchange, unlock}. Sortedness is checked only at
quiescence points, after every ``check_every`` worker-steps in total.

``mark``: barrier-synchronised two-phase rounds. Each worker draws a pair and
marks both endpoints; a worker whose endpoints carry no other mark then sorts
its pair, the rest do nothing that round.

Per-worker random streams are derived from ``rng``, so ``mark`` runs are
reproducible; ``atomic`` runs with ``p > 1`` depend on thread interleaving.
"""

import os
import time

import numpy as np

from . import _backend
from .graph import build_sampler
from .rng import Stream
from .sequential import FaultModel, SortState, default_max_steps, is_sorted
from .stats import RunStats

ATOMIC = "atomic"
MARK = "mark"


def run_async(initial, p, sampler, fault=None, protocol=ATOMIC, budget=None, rng=None,
              check_every=None, threads=None, backend=None):
    """Run the concurrent executor; ``budget`` is comparisons (atomic) or rounds (mark)."""
    if not hasattr(sampler, "prob"):
        sampler = build_sampler(sampler)
    fault = fault or FaultModel()
    if fault.fn is not None:
        raise ValueError("the concurrent executor supports constant fault models only")
    state = initial if isinstance(initial, SortState) else SortState(initial)
    n = state.n
    if n != sampler.n:
        raise ValueError(f"array length {n} does not match sampler n={sampler.n}")
    if p < 1:
        raise ValueError("worker count must be at least 1")
    if protocol == MARK and p > n // 4:
        raise ValueError(f"mark protocol needs p <= n/4, got p={p}, n={n}")
    if protocol not in (ATOMIC, MARK):
        raise ValueError(f"unknown protocol {protocol!r}")
    rng = rng if rng is not None else Stream(0)
    states = np.array([rng.spawn(w).s for w in range(p)], dtype=np.uint64)
    threads = threads or os.cpu_count() or 1
    k = _backend.get(backend)
    sam = (sampler.mode, sampler.prob, sampler.alias, sampler.first, sampler.second)
    per_worker = np.zeros(p, dtype=np.int64)
    other = np.zeros(p, dtype=np.int64)
    t0 = time.perf_counter_ns()
    if protocol == ATOMIC:
        budget = budget or default_max_steps(sampler.spec)
        check_every = check_every or n
        comps, swaps, done, epochs = k.async_atomic(
            state.keys, p, *sam, fault.p, states, check_every, budget, per_worker, other,
            threads=threads)
        extra = {"epochs": int(epochs), "worker_swaps": other.tolist()}
        rounds = 0
    else:
        budget = budget or max(1, 4 * default_max_steps(sampler.spec) // p)
        rounds, comps, attempts, swaps, done, violations = k.async_mark(
            state.keys, p, *sam, fault.p, states, budget, per_worker, other, threads=threads)
        extra = {"attempts": int(attempts), "violations": int(violations),
                 "worker_attempts": other.tolist()}
    wall = time.perf_counter_ns() - t0
    extra["worker_comparisons"] = per_worker.tolist()
    state.steps += int(comps)
    state.swaps += int(swaps)
    state.rounds += int(rounds)
    return RunStats(n=n, comparisons=int(comps), swaps=int(swaps), rounds=int(rounds),
                    sorted=bool(done) and is_sorted(state.keys),
                    sorter=f"async-{protocol}", wall_ns=wall, extra=extra)
