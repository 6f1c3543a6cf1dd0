"""Comparator-graph weight families and single-pair sampling.

A :class:`PairWeightSpec` describes a weighted graph on positions ``0..n-1``.
:func:`build_sampler` preprocesses it into an :class:`EdgeSampler` that draws
a pair ``{i, j}`` with probability ``w(i, j) / w(E)`` in O(1) per draw.

Distance-symmetric families (uniform, adjacent, harmonic) are sampled in two
stages: a distance ``d`` from an alias table weighted by ``(n - d) * w(d)``,
then a uniform offset in ``[0, n - d)``. The Gray hypercube and custom tables
use an alias table over explicit pairs.
"""

import math
from dataclasses import dataclass, field

import numpy as np

UNIFORM = "uniform"
ADJACENT = "adjacent"
HARMONIC = "harmonic"
GRAY = "gray"
CUSTOM = "custom"

FAMILIES = (UNIFORM, ADJACENT, HARMONIC, GRAY, CUSTOM)
DISTANCE_FAMILIES = (UNIFORM, ADJACENT, HARMONIC)
SORTER_HELP = "weight family or parallel mode"

# sampler table layouts understood by both kernel backends
MODE_DISTANCE = 0
MODE_PAIRS = 1


def is_power_of_two(n):
    return n >= 1 and n & (n - 1) == 0


def lg(n):
    """Exact base-2 logarithm of a power of two."""
    if not is_power_of_two(n):
        raise ValueError(f"{n} is not a power of two")
    return n.bit_length() - 1


@dataclass(frozen=True)
class PairWeightSpec:
    family: str
    n: int
    scale: float = 4.0
    weights: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if not isinstance(self.n, (int, np.integer)) or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n!r}")
        if self.family == HARMONIC and not (self.scale > 0 and math.isfinite(self.scale)):
            raise ValueError("harmonic scale must be a positive finite real")
        if self.family == GRAY and not is_power_of_two(self.n):
            raise ValueError(f"gray hypercube needs a power-of-two n, got {self.n}")
        if self.family == CUSTOM:
            if not self.weights:
                raise ValueError("custom table has no pairs")
            clean = {}
            for (i, j), w in self.weights.items():
                i, j = int(i), int(j)
                if i == j:
                    raise ValueError(f"self-loop ({i}, {j}) in custom table")
                a, b = min(i, j), max(i, j)
                if a < 0 or b >= self.n:
                    raise ValueError(f"pair ({i}, {j}) out of range for n={self.n}")
                w = float(w)
                if not math.isfinite(w) or w < 0:
                    raise ValueError(f"weight {w} for ({i}, {j}) must be finite and >= 0")
                clean[(a, b)] = clean.get((a, b), 0.0) + w
            if not any(w > 0 for w in clean.values()):
                raise ValueError("custom table has no positive weight")
            object.__setattr__(self, "weights", clean)

    @classmethod
    def uniform(cls, n):
        return cls(UNIFORM, n)

    @classmethod
    def adjacent(cls, n):
        return cls(ADJACENT, n)

    @classmethod
    def harmonic(cls, n, scale=4.0):
        return cls(HARMONIC, n, scale=float(scale))

    @classmethod
    def gray(cls, n):
        return cls(GRAY, n)

    @classmethod
    def custom(cls, n, weights):
        return cls(CUSTOM, n, weights=dict(weights))

    @property
    def name(self):
        return self.family

    def distance_weight(self, d):
        """Weight of any pair at linear distance ``d`` (distance families only)."""
        if self.family == UNIFORM:
            return 1.0
        if self.family == ADJACENT:
            return 1.0 if d == 1 else 0.0
        if self.family == HARMONIC:
            return self.scale / d
        raise ValueError(f"{self.family} is not distance-symmetric")

    def weight(self, i, j):
        _check_pair(self.n, i, j)
        a, b = min(i, j), max(i, j)
        if self.family in DISTANCE_FAMILIES:
            return self.distance_weight(b - a)
        if self.family == GRAY:
            return 1.0 if is_gray_edge(a, b, self.n) else 0.0
        return self.weights.get((a, b), 0.0)

    def pairs(self):
        """Explicit ``(i, j, weight)`` list of positive-weight pairs."""
        if self.family == GRAY:
            return [(i, j, 1.0) for i, j in gray_edges(self.n)]
        if self.family == CUSTOM:
            return [(i, j, w) for (i, j), w in sorted(self.weights.items()) if w > 0]
        return [(i, j, self.weight(i, j)) for i in range(self.n)
                for j in range(i + 1, self.n) if self.weight(i, j) > 0]


def _check_pair(n, i, j):
    if i == j:
        raise ValueError(f"degenerate pair ({i}, {j})")
    if not (0 <= i < n and 0 <= j < n):
        raise ValueError(f"pair ({i}, {j}) out of range for n={n}")


def gray_code(i):
    """Reflected binary Gray code of ``i``."""
    if i < 0:
        raise ValueError("gray_code needs a nonnegative integer")
    return i ^ (i >> 1)


def gray_inverse(g):
    i = 0
    while g:
        i ^= g
        g >>= 1
    return i


def is_gray_edge(i, j, n):
    """True iff positions ``i`` and ``j`` carry Gray codes one bit apart."""
    if not is_power_of_two(n):
        raise ValueError(f"gray hypercube needs a power-of-two n, got {n}")
    _check_pair(n, i, j)
    x = gray_code(i) ^ gray_code(j)
    return x & (x - 1) == 0


def gray_edges(n):
    """All hypercube edges as position pairs ``(i, j)`` with ``i < j``."""
    bits = lg(n)
    out = []
    for i in range(n):
        g = gray_code(i)
        for b in range(bits):
            j = gray_inverse(g ^ (1 << b))
            if i < j:
                out.append((i, j))
    out.sort()
    return out


def total_weight(spec):
    """Exact ``w(E)``; distance families sum ``(n - d) * w(d)`` with fsum."""
    n = spec.n
    if spec.family == UNIFORM:
        return float(n * (n - 1) // 2)
    if spec.family == ADJACENT:
        return float(n - 1)
    if spec.family == HARMONIC:
        return spec.scale * math.fsum((n - d) / d for d in range(1, n))
    if spec.family == GRAY:
        return float(n * lg(n) // 2)
    return math.fsum(spec.weights.values())


def pair_probability(spec, i, j):
    return spec.weight(i, j) / total_weight(spec)


def alias_table(weights):
    """Vose alias table for a nonnegative weight vector.

    Returns ``(prob, alias)``: pick a column uniformly, keep it with
    probability ``prob[col]``, otherwise take ``alias[col]``.
    """
    w = np.asarray(weights, dtype=np.float64)
    m = len(w)
    if m == 0 or not np.all(w >= 0) or not w.sum() > 0:
        raise ValueError("alias table needs nonnegative weights with positive sum")
    scaled = (w * (m / math.fsum(w))).tolist()
    prob = [1.0] * m
    alias = list(range(m))
    small = [i for i, p in enumerate(scaled) if p < 1.0]
    large = [i for i, p in enumerate(scaled) if p >= 1.0]
    while small and large:
        s = small.pop()
        g = large.pop()
        prob[s] = scaled[s]
        alias[s] = g
        scaled[g] = (scaled[g] + scaled[s]) - 1.0
        if scaled[g] < 1.0:
            small.append(g)
        else:
            large.append(g)
    # leftovers are 1 up to rounding
    for i in small + large:
        prob[i] = 1.0
        alias[i] = i
    return np.array(prob, dtype=np.float64), np.array(alias, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class EdgeSampler:
    """Immutable, shareable pair sampler built from a :class:`PairWeightSpec`.

    ``mode`` is ``MODE_DISTANCE`` (``values`` holds distances) or
    ``MODE_PAIRS`` (``first``/``second`` hold explicit pairs).
    """

    spec: PairWeightSpec
    total_weight: float
    mode: int
    prob: np.ndarray
    alias: np.ndarray
    first: np.ndarray
    second: np.ndarray

    @property
    def n(self):
        return self.spec.n

    def draw(self, rng):
        return sample_pair(self, rng)


def build_sampler(spec):
    n = spec.n
    if spec.family in DISTANCE_FAMILIES:
        if spec.family == ADJACENT:
            dists = [1]
        else:
            dists = list(range(1, n))
        mass = [(n - d) * spec.distance_weight(d) for d in dists]
        prob, alias = alias_table(mass)
        first = np.zeros(len(dists), dtype=np.int64)
        second = np.array(dists, dtype=np.int64)
        mode = MODE_DISTANCE
    else:
        pairs = spec.pairs()
        prob, alias = alias_table([w for _, _, w in pairs])
        first = np.array([i for i, _, _ in pairs], dtype=np.int64)
        second = np.array([j for _, j, _ in pairs], dtype=np.int64)
        mode = MODE_PAIRS
    for arr in (prob, alias, first, second):
        arr.setflags(write=False)
    return EdgeSampler(spec, total_weight(spec), mode, prob, alias, first, second)


def sample_pair(sampler, rng):
    """Draw ``(i, j)`` with ``i < j`` from ``sampler`` using stream ``rng``."""
    col = rng.randbelow(len(sampler.prob))
    if rng.random() >= sampler.prob[col]:
        col = int(sampler.alias[col])
    if sampler.mode == MODE_DISTANCE:
        d = int(sampler.second[col])
        i = rng.randbelow(sampler.spec.n - d)
        return i, i + d
    return int(sampler.first[col]), int(sampler.second[col])


def load_custom_table(path, n=None):
    """Read ``i j weight`` lines (``#`` comments) into a custom spec.

    ``n`` defaults to one more than the largest index mentioned.
    """
    weights = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 'i j weight', got {raw.strip()!r}")
            i, j, w = int(parts[0]), int(parts[1]), float(parts[2])
            key = (min(i, j), max(i, j))
            weights[key] = weights.get(key, 0.0) + w
    if not weights:
        raise ValueError(f"{path}: no pairs")
    if n is None:
        n = max(max(k) for k in weights) + 1
    return PairWeightSpec.custom(n, weights)


def is_connected(spec):
    """Whether the positive-weight pairs connect all ``n`` positions."""
    parent = list(range(spec.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    if spec.family in DISTANCE_FAMILIES:
        return True
    for i, j, _ in spec.pairs():
        parent[find(i)] = find(j)
    return len({find(x) for x in range(spec.n)}) == 1
