"""Self-checks built from the analysis module; each returns an :class:`OracleReport`."""

import itertools
import json
import math
from dataclasses import asdict, dataclass

from . import analysis
from .graph import PairWeightSpec, total_weight
from .parallel import STRUCTURED, structured_outcomes, structured_pairs
from .rng import Stream
from .sequential import SortState, run_sequential


@dataclass
class OracleReport:
    check: str
    n: int
    trials: int
    failures: int
    firstCounterexample: object = None

    @property
    def passed(self):
        return self.failures == 0

    def to_json(self):
        return json.dumps(asdict(self), default=str)


def random_trace(n, length, rng):
    out = []
    for _ in range(length):
        i = rng.randbelow(n)
        j = rng.randbelow(n - 1)
        j += j >= i
        out.append((min(i, j), max(i, j)))
    return out


def zero_one_principle(n, traces=100, length=30, seed=0):
    """Every permutation of ``1..n`` against ``traces`` random comparator sequences."""
    rng = Stream(seed)
    trials = failures = 0
    first = None
    for perm in itertools.permutations(range(1, n + 1)):
        for _ in range(traces):
            tr = random_trace(n, length, rng)
            rep = analysis.zero_one_oracle(tr, perm)
            trials += 1
            if not rep.agree:
                failures += 1
                first = first or {"x": perm, "trace": tr, "failing_k": rep.failing_k}
    return OracleReport("zero-one-principle", n, trials, failures, first)


def _walk(events, x0, visit):
    a = list(x0)
    for ev in events:
        i, j = ev.pair
        before = list(a)
        if a[i] > a[j]:
            a[i], a[j] = a[j], a[i]
        bad = visit(ev, before, a)
        if bad:
            return bad
    return None


def trace_inversions(spec, x0, steps, seed=0):
    """Swaps drop the inversion count by at least one; other steps keep it."""
    stats = run_sequential(SortState(list(x0)), spec, rng=Stream(seed), max_steps=steps,
                           trace="full")
    events = stats.trace
    failures = []

    def visit(ev, before, after):
        ib, ia = analysis.inversions(before), analysis.inversions(after)
        ok = ia <= ib - 1 if ev.swapped else ia == ib
        if not ok or (after != before) != ev.swapped:
            failures.append({"step": ev.step, "pair": ev.pair, "before": ib, "after": ia})

    _walk(events, x0, visit)
    return OracleReport(f"trace-inversions[{spec.family}]", spec.n, len(events), len(failures),
                        failures[0] if failures else None)


def trace_zero_one_monotone(spec, x0, steps, seed=0):
    """Absorbing levels and nonincreasing cumulative misplaced counts on a 0-1 trace."""
    n = spec.n
    N = n.bit_length() - 1
    stats = run_sequential(SortState(list(x0)), spec, rng=Stream(seed), max_steps=steps,
                           trace="full")
    events = stats.trace
    failures = []

    def summary(a):
        omega = [analysis.in_omega(a, r) for r in range(N + 2)]
        below = [analysis.cumulative_misplaced(a, k) for k in range(1, N + 2)]
        return omega, below

    state = {"prev": summary(x0)}

    def visit(ev, before, after):
        cur = summary(after)
        po, pb = state["prev"]
        co, cb = cur
        for r in range(N + 2):
            if po[r] and not co[r]:
                failures.append({"step": ev.step, "pair": ev.pair, "left_omega": r})
        for k in range(N + 1):
            if cb[k][0] > pb[k][0] or cb[k][1] > pb[k][1]:
                failures.append({"step": ev.step, "pair": ev.pair, "level": k + 1,
                                 "before": pb[k], "after": cb[k]})
        state["prev"] = cur

    _walk(events, x0, visit)
    return OracleReport(f"trace-zero-one[{spec.family}]", n, len(events), len(failures),
                        failures[0] if failures else None)


def lift_frozen(x, steps=2000, seed=0, family="harmonic"):
    """Padding of a lifted 0-1 array never moves under dynamics on the lifted range."""
    y = analysis.lift(x)
    n0, n1, total = analysis.lift_sizes(len(x), sum(x))
    failures = 0
    first = None
    if sum(y) * 2 != total or len(y) != total:
        failures += 1
        first = {"lifted": y}
    spec = PairWeightSpec(family, total)
    stats = run_sequential(SortState(y), spec, rng=Stream(seed), max_steps=steps, trace="full")
    a = list(y)
    for t, ev in enumerate(stats.trace):
        i, j = ev.pair
        if a[i] > a[j]:
            a[i], a[j] = a[j], a[i]
        if any(a[k] != 0 for k in range(n0)) or any(a[k] != 1 for k in range(total - n1, total)):
            failures += 1
            first = first or {"step": ev.step, "pair": ev.pair}
    return OracleReport("lift-padding-frozen", len(x), len(stats.trace), failures, first)


def structured_matching_law(n):
    """Every structured outcome is a matching of exactly ``n/4`` pairs."""
    trials = failures = 0
    first = None
    for k, d, r, _ in structured_outcomes(n):
        pairs = structured_pairs(n, k, d, r)
        ends = [v for pr in pairs for v in pr]
        trials += 1
        if len(pairs) != n // 4 or len(set(ends)) != len(ends):
            failures += 1
            first = first or {"k": k, "d": d, "r": r, "size": len(pairs)}
    return OracleReport(f"{STRUCTURED}-matching-law", n, trials, failures, first)


def total_weight_bounds(max_power=14, scale=4.0):
    failures = 0
    first = None
    for e in range(1, max_power + 1):
        n = 2 ** e
        w = total_weight(PairWeightSpec.harmonic(n, scale))
        lo = scale * (n * math.log(n) - n)
        hi = scale * (n * math.log(n) + n)
        if not lo <= w <= hi:
            failures += 1
            first = first or {"n": n, "weight": w, "lower": lo, "upper": hi}
    return OracleReport("harmonic-total-weight", 2 ** max_power, max_power, failures, first)


def recurrence(max_N=30, **kw):
    failures = 0
    first = None
    for N in range(1, max_N + 1):
        bad = analysis.recurrence_violations(N, **kw)
        if bad:
            failures += 1
            r, k, v, b = bad[0]
            first = first or {"N": N, "r": r, "k": k, "value": float(v), "bound": float(b)}
    return OracleReport("recurrence-bound", max_N, max_N, failures, first)


def default_suite(quick=False):
    """The oracle battery run by ``graphsort oracle``."""
    n01 = 5 if quick else 6
    yield zero_one_principle(n01, traces=20 if quick else 100)
    for fam in ("uniform", "adjacent", "harmonic", "gray"):
        spec = PairWeightSpec(fam, 16)
        yield trace_inversions(spec, list(range(16, 0, -1)), 2500, seed=1)
        yield trace_zero_one_monotone(spec, [1] * 8 + [0] * 8, 2500, seed=2)
    yield lift_frozen([0, 1, 1, 0, 1])
    for e in range(3, 8 if quick else 11):
        yield structured_matching_law(2 ** e)
    yield total_weight_bounds()
    yield recurrence()
