"""Single-pair compare-exchange dynamics.

Each step draws one pair from an :class:`~graphsort.graph.EdgeSampler`,
advances simulated continuous time by an exponential holding time with rate
``w(E)``, and compare-exchanges the pair (subject to the fault model).
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .graph import HARMONIC, build_sampler
from .rng import Stream
from .stats import RunStats

TRACE_CHUNK = 1 << 16


@dataclass
class SortState:
    keys: np.ndarray
    steps: int = 0
    swaps: int = 0
    sim_time: float = 0.0
    rounds: int = 0

    def __post_init__(self):
        self.keys = as_keys(self.keys)

    @property
    def n(self):
        return len(self.keys)


@dataclass(frozen=True)
class TraceEvent:
    step: int
    pair: tuple
    swapped: bool
    sim_time: float


class FaultModel:
    """Comparator reliability.

    ``FaultModel()`` never fails; ``FaultModel.constant(p)`` succeeds with
    probability ``p``; ``FaultModel.per_pair(fn, p)`` succeeds on ``(i, j)``
    with probability ``fn(i, j)``, which must be at least ``p``.
    A failed comparison still counts as a comparison and consumes time.
    """

    def __init__(self, p=1.0, fn=None):
        if not 0.0 < p <= 1.0:
            raise ValueError(f"success probability must lie in (0, 1], got {p}")
        self.p = float(p)
        self.fn = fn

    @classmethod
    def none(cls):
        return cls()

    @classmethod
    def constant(cls, p):
        return cls(p)

    @classmethod
    def per_pair(cls, fn, lower_bound):
        lb = float(lower_bound)

        def checked(i, j):
            q = fn(i, j)
            if not lb <= q <= 1.0:
                raise ValueError(f"pair ({i}, {j}) success probability {q} outside [{lb}, 1]")
            return q

        return cls(lb, checked)

    @property
    def mode(self):
        if self.fn is not None:
            return "per-pair"
        return "none" if self.p == 1.0 else "constant"

    def kernel_arg(self):
        return self.fn if self.fn is not None else self.p

    def __repr__(self):
        return f"FaultModel(mode={self.mode!r}, p={self.p})"


def as_keys(values):
    a = np.array(values, dtype=np.int64).ravel()
    if a.size and a.min() < 0:
        raise ValueError("keys must be nonnegative integers")
    return np.ascontiguousarray(a)


def is_sorted(x):
    keys = x.keys if isinstance(x, SortState) else x
    return all(keys[k] <= keys[k + 1] for k in range(len(keys) - 1))


def compare_and_sort(state, i, j):
    """Put ``keys[i] <= keys[j]``; returns whether a swap happened."""
    n = state.n
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"pair ({i}, {j}) out of range for n={n}")
    if i >= j:
        raise ValueError(f"need i < j, got ({i}, {j})")
    a = state.keys
    state.steps += 1
    if a[i] > a[j]:
        a[i], a[j] = a[j], a[i]
        state.swaps += 1
        return True
    return False


def default_max_steps(spec):
    n = spec.n
    c = math.ceil(math.log2(n))
    if spec.family == HARMONIC:
        return 64 * n * c * c
    return 64 * n * n * max(c, 1)


class TraceBuffer:
    """Preallocated event storage; ``ring`` keeps only the last ``size`` events."""

    def __init__(self, size, ring=False):
        self.size = int(size)
        self.ring = ring
        self.step = np.zeros(self.size, dtype=np.int64)
        self.i = np.zeros(self.size, dtype=np.int64)
        self.j = np.zeros(self.size, dtype=np.int64)
        self.swapped = np.zeros(self.size, dtype=np.uint8)
        self.time = np.zeros(self.size, dtype=np.float64)

    def arrays(self):
        return self.step, self.i, self.j, self.swapped, self.time

    def events(self, count):
        if count <= self.size:
            order = range(count)
        else:
            start = count % self.size
            order = [(start + k) % self.size for k in range(self.size)]
        return [TraceEvent(int(self.step[k]), (int(self.i[k]), int(self.j[k])),
                           bool(self.swapped[k]), float(self.time[k])) for k in order]


def run_sequential(initial, sampler, fault=None, rng=None, max_steps=None,
                   trace=None, backend=None):
    """Sort ``initial`` with single-pair dynamics.

    ``trace`` is ``None`` (off), ``"full"`` (every event) or an int giving a
    ring buffer of that many most recent events; recorded events land in
    ``stats.trace``. Pass a :class:`SortState` to keep the final array and
    counters; it is advanced in place.
    """
    if not hasattr(sampler, "prob"):
        sampler = build_sampler(sampler)
    fault = fault or FaultModel()
    rng = rng if rng is not None else Stream(0)
    state = initial if isinstance(initial, SortState) else SortState(initial)
    if state.n == 0:
        raise ValueError("initial array is empty")
    if state.n != sampler.n:
        raise ValueError(f"array length {state.n} does not match sampler n={sampler.n}")
    if max_steps is None:
        max_steps = default_max_steps(sampler.spec)
    if max_steps <= 0:
        raise ValueError("max_steps must be positive")
    k = _backend.get(backend)
    if fault.fn is not None:
        k = _backend.get("python")
    farg = fault.kernel_arg()
    st = np.array(rng.s, dtype=np.uint64)
    common = (sampler.mode, sampler.prob, sampler.alias, sampler.first, sampler.second,
              sampler.total_weight, farg, st)
    limit = state.steps + max_steps
    events = None
    if trace is None:
        steps, swaps, t, done, _ = k.seq_run(state.keys, *common, state.steps, state.swaps,
                                             state.sim_time, limit, None, None, None, None, None)
    elif trace == "full":
        events = []
        buf = TraceBuffer(TRACE_CHUNK)
        steps, swaps, t = state.steps, state.swaps, state.sim_time
        done = is_sorted(state.keys)
        while not done and steps < limit:
            steps, swaps, t, done, count = k.seq_run(
                state.keys, *common, steps, swaps, t, min(limit, steps + TRACE_CHUNK), *buf.arrays())
            events.extend(buf.events(count))
    else:
        buf = TraceBuffer(int(trace), ring=True)
        steps, swaps, t, done, count = k.seq_run(state.keys, *common, state.steps, state.swaps,
                                                 state.sim_time, limit, *buf.arrays())
        events = buf.events(count)
    rng.s = [int(v) for v in st]
    state.steps, state.swaps, state.sim_time = int(steps), int(swaps), float(t)
    done = bool(done) and is_sorted(state.keys)
    stats = RunStats(n=state.n, comparisons=state.steps, swaps=state.swaps, sorted=done,
                     sim_time=state.sim_time, sorter=sampler.spec.name, trace=events)
    return stats


def make_input(kind, n, rng=None):
    """Generate a named initial array of length ``n``.

    Kinds: ``reverse`` (n..1), ``alternating`` (2,1,4,3,...), ``random`` /
    ``random-permutation``, ``zero-one-balanced-worst`` (ones block then zeros
    block), ``sorted``, or ``file:PATH`` (one integer per line).
    """
    if kind.startswith("file:"):
        return load_keys(kind[5:])
    if kind == "reverse":
        return as_keys(range(n, 0, -1))
    if kind == "sorted":
        return as_keys(range(1, n + 1))
    if kind == "alternating":
        vals = []
        for k in range(0, n - 1, 2):
            vals += [k + 2, k + 1]
        if n % 2:
            vals.append(n)
        return as_keys(vals)
    if kind in ("random", "random-permutation"):
        vals = list(range(1, n + 1))
        (rng or Stream(0)).shuffle(vals)
        return as_keys(vals)
    if kind == "zero-one-balanced-worst":
        ones = n // 2
        return as_keys([1] * ones + [0] * (n - ones))
    raise ValueError(f"unknown input kind {kind!r}")


def load_keys(path):
    vals = []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                vals.append(int(line))
    if not vals:
        raise ValueError(f"{path}: no keys")
    return as_keys(vals)


__all__ = ["SortState", "FaultModel", "TraceEvent", "TraceBuffer", "compare_and_sort",
           "is_sorted", "run_sequential", "make_input", "load_keys", "default_max_steps"]
