"""Reduction machinery and counting quantities used as correctness oracles.

Positions ``0..n-1`` are identified with the grid points ``i/n`` of ``[0, 1)``;
interval membership is decided with exact rationals.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .graph import is_power_of_two, lg

HALF = Fraction(1, 2)


def threshold_projection(x, k):
    """0-1 array with ones at the ``k`` largest entries of ``x``.

    Ties go to the larger index first, i.e. positions are ranked by
    ``(value, index)`` descending.
    """
    n = len(x)
    if not 0 <= k <= n:
        raise ValueError(f"k must lie in 0..{n}, got {k}")
    order = sorted(range(n), key=lambda i: (x[i], i), reverse=True)
    out = [0] * n
    for i in order[:k]:
        out[i] = 1
    return out


def _pairs_of(trace):
    for ev in trace:
        pair = getattr(ev, "pair", ev)
        yield pair


def replay(trace, x):
    """Apply a fixed comparator sequence to a copy of ``x``."""
    a = list(x)
    for i, j in _pairs_of(trace):
        lo, hi = min(i, j), max(i, j)
        if a[lo] > a[hi]:
            a[lo], a[hi] = a[hi], a[lo]
    return a


def _nondecreasing(a):
    return all(a[k] <= a[k + 1] for k in range(len(a) - 1))


@dataclass(frozen=True)
class ZeroOneReport:
    agree: bool
    sorts_x: bool
    sorts_projections: bool
    failing_k: tuple


def zero_one_oracle(trace, x):
    """Check that the trace sorts ``x`` iff it sorts every threshold projection."""
    pairs = list(_pairs_of(trace))
    n = len(x)
    for i, j in pairs:
        if not (0 <= i < n and 0 <= j < n) or i == j:
            raise ValueError(f"trace pair ({i}, {j}) invalid for length {n}")
    sorts_x = _nondecreasing(replay(pairs, x))
    failing = tuple(k for k in range(n + 1)
                    if not _nondecreasing(replay(pairs, threshold_projection(x, k))))
    return ZeroOneReport(sorts_x == (not failing), sorts_x, not failing, failing)


def lift_sizes(n, k):
    """``(n0, n1, length)`` for lifting a length-``n`` 0-1 array with ``k`` ones.

    ``n1 = 2^ceil(lg n) - k``: this is the value that makes the result balanced
    and of length ``2^(ceil(lg n) + 1)``.
    """
    top = 1 << (n - 1).bit_length() if n > 1 else 1
    n0 = top - n + k
    n1 = top - k
    return n0, n1, n + n0 + n1


def lift(x):
    """Pad a 0-1 array with leading zeros and trailing ones to a balanced power-of-two length."""
    x = [int(v) for v in x]
    if not x:
        raise ValueError("lift needs a nonempty array")
    if any(v not in (0, 1) for v in x):
        raise ValueError("lift needs a 0-1 array")
    k = sum(x)
    n0, n1, _ = lift_sizes(len(x), k)
    return [0] * n0 + x + [1] * n1


def inversions(x):
    """Number of pairs ``i < j`` with ``x[i] > x[j]`` (merge-sort count)."""
    a = list(x)
    count = 0
    width = 1
    n = len(a)
    buf = a[:]
    while width < n:
        for lo in range(0, n, 2 * width):
            mid = min(lo + width, n)
            hi = min(lo + 2 * width, n)
            i, j, k = lo, mid, lo
            while i < mid and j < hi:
                if a[i] <= a[j]:
                    buf[k] = a[i]
                    i += 1
                else:
                    buf[k] = a[j]
                    count += mid - i
                    j += 1
                k += 1
            buf[k:hi] = a[i:mid] + a[j:hi]
        a, buf = buf, a
        width *= 2
    return count


def inversions_bruteforce(x):
    n = len(x)
    return sum(1 for i in range(n) for j in range(i + 1, n) if x[i] > x[j])


def _check_balanced(x):
    n = len(x)
    if not is_power_of_two(n) or n < 2:
        raise ValueError(f"length must be a power of two >= 2, got {n}")
    if any(v not in (0, 1) for v in x):
        raise ValueError("expected a 0-1 array")
    if 2 * sum(x) != n:
        raise ValueError("expected a balanced array (as many ones as zeros)")


def level_interval(k, side):
    """Half-open ``[lo, hi)`` of the level-``k`` interval left (0) or right (1) of 1/2."""
    outer = Fraction(1, 2 ** k)
    inner = Fraction(1, 2 ** (k + 1))
    if side == 0:
        return HALF - outer, HALF - inner
    return HALF + inner, HALF + outer


def positions_in(n, lo, hi):
    """Grid positions ``i`` with ``lo <= i/n < hi``."""
    first = max(0, math.ceil(lo * n))
    last = min(n, math.ceil(hi * n))
    return range(first, max(first, last))


@dataclass(frozen=True)
class MisplacedCounts:
    """Misplaced-card counts of a balanced 0-1 array.

    ``zeros[k - 1]`` is the number of 0-s in the right interval of level ``k``
    and ``ones[k - 1]`` the number of 1-s in the left one; ``zeros_below[k - 1]``
    and ``ones_below[k - 1]`` accumulate levels ``1..k-1``. ``total`` is the
    number of 0-s in the back half.
    """

    n: int
    zeros: tuple
    ones: tuple
    zeros_below: tuple
    ones_below: tuple
    total: int

    def level(self, k):
        return self.zeros[k - 1] + self.ones[k - 1]

    def below(self, k):
        return self.zeros_below[k - 1] + self.ones_below[k - 1]


def misplaced_counts(x):
    x = [int(v) for v in x]
    _check_balanced(x)
    n = len(x)
    N = lg(n)
    zeros, ones = [], []
    for k in range(1, N + 1):
        zeros.append(sum(1 for i in positions_in(n, *level_interval(k, 1)) if x[i] == 0))
        ones.append(sum(1 for i in positions_in(n, *level_interval(k, 0)) if x[i] == 1))
    # levels 1..N+1 so that the last entry covers every level
    zb = tuple(sum(zeros[:k - 1]) for k in range(1, N + 2))
    ob = tuple(sum(ones[:k - 1]) for k in range(1, N + 2))
    total = sum(1 for i in range(n // 2, n) if x[i] == 0)
    return MisplacedCounts(n, tuple(zeros), tuple(ones), zb, ob, total)


def cumulative_misplaced(x, k):
    """``(zeros in [1/2 + 2^-k, 1), ones in [0, 1/2 - 2^-k))`` by direct scan."""
    n = len(x)
    edge = Fraction(1, 2 ** k)
    z = sum(1 for i in positions_in(n, HALF + edge, Fraction(1)) if x[i] == 0)
    o = sum(1 for i in positions_in(n, Fraction(0), HALF - edge) if x[i] == 1)
    return z, o


def in_omega(x, r):
    """Whether every 0 lies in ``[0, 1/2) ∪ [1/2, 1/2 + 2^-r)`` and every 1 in
    ``[1/2 - 2^-r, 1/2) ∪ [1/2, 1)``."""
    if r < 0 or int(r) != r:
        raise ValueError(f"level must be a nonnegative integer, got {r}")
    x = [int(v) for v in x]
    _check_balanced(x)
    n = len(x)
    reach = Fraction(1, 2 ** r)
    for i, v in enumerate(x):
        pos = Fraction(i, n)
        if v == 0 and pos >= HALF + reach:
            return False
        if v == 1 and pos < HALF - reach:
            return False
    return True


def recurrence_violations(N, decay=Fraction(1, 3), cross=2, rounds=None, cap=True, n=1):
    """Iterate ``m[k] <- decay*m[k] + cross*sum(m[1..k-1])`` from ``m = n`` and
    list every ``(r, k, value, bound)`` where ``m[k] > 2^-(r - 3k) * n``.

    ``cap`` clips each iterate at ``n`` (the recurrence is only assumed for
    sequences bounded by ``n``). Arithmetic is exact when the inputs are.
    """
    rounds = 10 * N if rounds is None else rounds
    m = [n] * (N + 1)
    bad = []
    for r in range(1, rounds + 1):
        prefix = 0
        new = [None] * (N + 1)
        for k in range(1, N + 1):
            v = decay * m[k] + cross * prefix
            if cap and v > n:
                v = n
            new[k] = v
            prefix += m[k]
        m = new
        for k in range(1, N + 1):
            bound = Fraction(2) ** (3 * k - r) * n
            if m[k] > bound:
                bad.append((r, k, m[k], bound))
    return bad


def recurrence_bound_check(N, **kw):
    if N > 40:
        raise ValueError("N must be at most 40")
    return not recurrence_violations(N, **kw)


def coupon_expectation(m):
    """Expected time to collect ``m`` rate-1 coupons: the harmonic number H_m."""
    if m < 1:
        raise ValueError("need m >= 1")
    return math.fsum(1.0 / i for i in range(1, m + 1))


def coupon_tail(m, t):
    """Union bound ``m * exp(-t)`` on Pr(some coupon uncollected at time t)."""
    if m < 1:
        raise ValueError("need m >= 1")
    return m * math.exp(-t)


def harmonic_number(m):
    return Fraction(sum(Fraction(1, i) for i in range(1, m + 1)))


def descents(x):
    return int(np.count_nonzero(np.diff(np.asarray(x)) < 0))
