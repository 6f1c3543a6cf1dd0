"""Matching samplers and synchronous parallel rounds.

Three matching distributions are provided:

* structured (power-of-two ``n``): draw a level ``K``, an edge length ``D``
  and a rotation ``R``; the matching is a union of rotated copies of a
  fundamental block and always has ``n/4`` pairs;
* thinned: draw ``p`` iid harmonic pairs and keep those that share no
  endpoint with any other draw;
* dimension cut (power-of-two ``n``): positions carry Gray codes and the
  matching joins every position to its neighbour across one random bit.

Pair generation uses arithmetic mod ``n``, but every pair is applied as a
compare-exchange on ``(min, max)`` in linear position order.
"""

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _backend
from ._pykernels import _structured_round, _thinned_draws, dimcut_pairs, structured_pairs
from .graph import PairWeightSpec, build_sampler, gray_code, gray_inverse, is_power_of_two, lg
from .rng import Stream
from .sequential import SortState, is_sorted
from .stats import RunStats

STRUCTURED = "structured"
THINNED = "thinned"
DIMCUT = "dimcut"


@dataclass(frozen=True)
class StructuredMeta:
    k: int
    d: int
    r: int


@dataclass(frozen=True)
class ThinnedMeta:
    proposed: tuple
    retained: tuple


@dataclass(frozen=True)
class DimCutMeta:
    k: int


@dataclass(frozen=True)
class Matching:
    pairs: tuple
    meta: object = None

    def __len__(self):
        return len(self.pairs)

    def is_disjoint(self):
        seen = set()
        for i, j in self.pairs:
            if i in seen or j in seen or i == j:
                return False
            seen.add(i)
            seen.add(j)
        return True


@dataclass(frozen=True)
class MatchingSamplerSpec:
    kind: str
    n: int
    p: int = 0
    extra: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if self.kind not in (STRUCTURED, THINNED, DIMCUT):
            raise ValueError(f"unknown matching sampler {self.kind!r}")
        if self.kind in (STRUCTURED, DIMCUT) and not is_power_of_two(self.n):
            raise ValueError(f"{self.kind} sampler needs a power-of-two n, got {self.n}")
        if self.kind == STRUCTURED and self.n < 4:
            raise ValueError("structured sampler needs n >= 4")
        if self.kind == DIMCUT and self.n < 2:
            raise ValueError("dimcut sampler needs n >= 2")
        if self.kind == THINNED and not 1 <= self.p <= self.n // 4:
            raise ValueError(f"thinned sampler needs 1 <= p <= n/4, got p={self.p}, n={self.n}")

    @property
    def name(self):
        return self.kind


def fundamental_block(n, d, k):
    """Pairs ``{i, i + d mod n}`` for ``i = 0 .. n/2^(k+1) - 1``."""
    N = lg(n)
    if not 1 <= k <= N:
        raise ValueError(f"k must lie in 1..{N}, got {k}")
    if not 1 <= d < n:
        raise ValueError(f"d must lie in 1..{n - 1}, got {d}")
    out = []
    for i in range(n >> (k + 1)):
        j = (i + d) % n
        out.append((min(i, j), max(i, j)))
    return out


def structured_outcomes(n):
    """Every ``(k, d, r, probability)`` outcome of the structured sampler."""
    N = lg(n)
    for k in range(1, N + 1):
        lo, hi = n >> (k + 1), n >> k
        for d in range(lo + 1, hi + 1):
            for r in range(4):
                yield k, d, r, Fraction(1, N * (hi - lo) * 4)


def structured_matching(n, k, d, r):
    return Matching(tuple(structured_pairs(n, k, d, r)), StructuredMeta(k, d, r))


def sample_structured_matching(n, rng):
    if not is_power_of_two(n) or n < 4:
        raise ValueError(f"structured sampler needs a power-of-two n >= 4, got {n}")
    k, d, r = _structured_round(rng, n, lg(n))
    return structured_matching(n, k, d, r)


def circular_distance(n, i, j):
    d = abs(j - i) % n
    return min(d, n - d)


@functools.lru_cache(maxsize=16)
def structured_marginals(n):
    """Exact ``Pr[{i, j} in M]`` for all pairs, by enumerating every outcome."""
    q = {}
    for k, d, r, pr in structured_outcomes(n):
        for pair in structured_pairs(n, k, d, r):
            q[pair] = q.get(pair, 0) + pr
    return q


def exact_structured_marginal(n, i, j):
    if i == j:
        raise ValueError(f"degenerate pair ({i}, {j})")
    if not (0 <= i < n and 0 <= j < n):
        raise ValueError(f"pair ({i}, {j}) out of range for n={n}")
    return structured_marginals(n).get((min(i, j), max(i, j)), Fraction(0))


@functools.lru_cache(maxsize=32)
def harmonic_unit_sampler(n):
    return build_sampler(PairWeightSpec.harmonic(n, scale=1.0))


def _sam(sampler):
    return sampler.mode, sampler.prob, sampler.alias, sampler.first, sampler.second


def sample_thinned_matching(n, p, rng, sampler=None):
    if not 1 <= p <= n // 4:
        raise ValueError(f"need 1 <= p <= n/4, got p={p}, n={n}")
    sampler = sampler or harmonic_unit_sampler(n)
    props, kept = _thinned_draws(rng, n, p, [x.tolist() if hasattr(x, "tolist") else x
                                             for x in _sam(sampler)])
    return Matching(tuple(kept), ThinnedMeta(tuple(props), tuple(
        pr in kept for pr in props)))


@functools.lru_cache(maxsize=32)
def _gray_tables(n):
    gray = np.array([gray_code(i) for i in range(n)], dtype=np.int64)
    ginv = np.array([gray_inverse(g) for g in range(n)], dtype=np.int64)
    gray.setflags(write=False)
    ginv.setflags(write=False)
    return gray, ginv


def dimcut_matching(n, k):
    """Pairs of positions whose Gray codes differ exactly in bit ``k - 1``."""
    N = lg(n)
    if not 1 <= k <= N:
        raise ValueError(f"k must lie in 1..{N}, got {k}")
    gray, ginv = _gray_tables(n)
    return Matching(tuple(dimcut_pairs(gray.tolist(), ginv.tolist(), k - 1)), DimCutMeta(k))


def sample_dimcut_matching(n, rng):
    N = lg(n)
    return dimcut_matching(n, 1 + rng.randbelow(N))


def sample_matching(spec, rng):
    if spec.kind == STRUCTURED:
        return sample_structured_matching(spec.n, rng)
    if spec.kind == THINNED:
        return sample_thinned_matching(spec.n, spec.p, rng)
    return sample_dimcut_matching(spec.n, rng)


def apply_matching(state, m):
    """Compare-exchange every pair of ``m``; returns the number of swaps."""
    pairs = m.pairs if isinstance(m, Matching) else tuple(m)
    n = state.n
    seen = set()
    for i, j in pairs:
        if not (0 <= i < n and 0 <= j < n) or i == j:
            raise ValueError(f"pair ({i}, {j}) invalid for n={n}")
        if i in seen or j in seen:
            raise ValueError(f"pair ({i}, {j}) overlaps another pair of the matching")
        seen.add(i)
        seen.add(j)
    a = state.keys
    swaps = 0
    for i, j in pairs:
        lo, hi = min(i, j), max(i, j)
        if a[lo] > a[hi]:
            a[lo], a[hi] = a[hi], a[lo]
            swaps += 1
    state.steps += len(pairs)
    state.swaps += swaps
    state.rounds += 1
    return swaps


def default_max_rounds(spec):
    N = max(1, math.ceil(math.log2(spec.n)))
    if spec.kind == STRUCTURED:
        return 1024 * N * N
    if spec.kind == THINNED:
        return 1024 * N * N * -(-spec.n // spec.p)
    return 64 * spec.n * N


def run_parallel(initial, spec, rng=None, max_rounds=None, backend=None):
    """Sample-and-apply matchings until sorted or ``max_rounds`` rounds."""
    rng = rng if rng is not None else Stream(0)
    state = initial if isinstance(initial, SortState) else SortState(initial)
    if state.n != spec.n:
        raise ValueError(f"array length {state.n} does not match spec n={spec.n}")
    if max_rounds is None:
        max_rounds = default_max_rounds(spec)
    k = _backend.get(backend)
    st = np.array(rng.s, dtype=np.uint64)
    limit = state.rounds + max_rounds
    extra = {}
    if spec.kind == STRUCTURED:
        rounds, comps, swaps, done = k.par_structured(state.keys, st, limit, state.rounds,
                                                      state.steps, state.swaps)
    elif spec.kind == THINNED:
        rounds, comps, props, swaps, done = k.par_thinned(
            state.keys, spec.p, *_sam(harmonic_unit_sampler(spec.n)), st, limit,
            state.rounds, state.steps, 0, state.swaps)
        extra["proposals"] = int(props)
    else:
        gray, ginv = _gray_tables(spec.n)
        rounds, comps, swaps, done = k.par_dimcut(state.keys, gray, ginv, st, limit,
                                                  state.rounds, state.steps, state.swaps)
    rng.s = [int(v) for v in st]
    state.rounds, state.steps, state.swaps = int(rounds), int(comps), int(swaps)
    return RunStats(n=state.n, comparisons=state.steps, swaps=state.swaps, rounds=state.rounds,
                    sorted=bool(done) and is_sorted(state.keys), sorter=spec.name, extra=extra)


def thinned_marginal_counts(n, p, samples, rng, backend=None):
    """Retention counts of every pair over ``samples`` thinned matchings.

    Returns an ``(n, n)`` array whose upper triangle holds the counts.
    """
    counts = np.zeros(n * n, dtype=np.int64)
    st = np.array(rng.s, dtype=np.uint64)
    _backend.get(backend).thinned_counts(n, p, *_sam(harmonic_unit_sampler(n)), st,
                                         samples, counts)
    rng.s = [int(v) for v in st]
    return counts.reshape(n, n)
