"""Reproducible experiment driver, scaling-law fits and matching-marginal checks."""

import csv
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from . import async_exec
from .graph import FAMILIES, HARMONIC, PairWeightSpec, build_sampler, load_custom_table
from .parallel import (DIMCUT, STRUCTURED, THINNED, MatchingSamplerSpec, circular_distance,
                       default_max_rounds, run_parallel, structured_marginals,
                       thinned_marginal_counts)
from .rng import Stream, derive_seed
from .sequential import FaultModel, default_max_steps, make_input, run_sequential
from .stats import CSV_HEADER, RunStats

SEQUENTIAL_SORTERS = FAMILIES
PARALLEL_SORTERS = (STRUCTURED, THINNED, DIMCUT)
ASYNC_SORTERS = ("async-atomic", "async-mark")
SORTERS = SEQUENTIAL_SORTERS + PARALLEL_SORTERS + ASYNC_SORTERS

LAWS = {
    "n^2": lambda n: n ** 2,
    "n^2 log n": lambda n: n ** 2 * math.log(n),
    "n^3": lambda n: n ** 3,
    "n log n": lambda n: n * math.log(n),
    "n (log n)^2": lambda n: n * math.log(n) ** 2,
    "(log n)^2": lambda n: math.log(n) ** 2,
}


@dataclass
class ExperimentConfig:
    sorter: str
    n_list: list
    trials: int = 200
    master_seed: int = 0
    input_kind: str = "reverse"
    fault_prob: float = None
    budget_multiplier: float = 1.0
    output_path: str = None
    scale: float = 4.0
    p: int = None
    custom_table: str = None
    workers: int = 1
    timing: bool = False

    def __post_init__(self):
        if self.sorter not in SORTERS:
            raise ValueError(f"unknown sorter {self.sorter!r}; choose from {', '.join(SORTERS)}")
        if isinstance(self.n_list, int):
            self.n_list = [self.n_list]
        self.n_list = [int(n) for n in self.n_list]
        if not self.n_list:
            raise ValueError("n_list is empty")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.budget_multiplier <= 0:
            raise ValueError("budget_multiplier must be positive")
        if self.fault_prob is not None and not 0 < self.fault_prob <= 1:
            raise ValueError("fault_prob must lie in (0, 1]")
        if self.sorter == "custom" and not self.custom_table:
            raise ValueError("custom sorter needs custom_table")
        for n in self.n_list:
            self.spec_for(n)

    @classmethod
    def from_dict(cls, d):
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config fields: {', '.join(sorted(unknown))}")
        return cls(**d)

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def workers_for(self, n):
        return self.p if self.p is not None else max(1, n // 8)

    def spec_for(self, n):
        """The sampler spec for length ``n`` (validates ``n`` for this sorter)."""
        s = self.sorter
        if s == "custom":
            return load_custom_table(self.custom_table, n)
        if s in SEQUENTIAL_SORTERS:
            return PairWeightSpec(s, n, scale=self.scale if s == HARMONIC else 4.0)
        if s in PARALLEL_SORTERS:
            return MatchingSamplerSpec(s, n, self.p or (max(1, n // 4) if s == THINNED else 0))
        spec = PairWeightSpec.harmonic(n, self.scale)
        p = self.workers_for(n)
        if s == "async-mark" and not 1 <= p <= n // 4:
            raise ValueError(f"async-mark needs 1 <= p <= n/4, got p={p}, n={n}")
        return spec


def trial_seed(master, n, trial):
    return derive_seed(master, n, trial)


def run_one(cfg, n, trial, spec=None):
    """One independent run; its random stream depends only on ``(seed, n, trial)``."""
    seed = trial_seed(cfg.master_seed, n, trial)
    rng = Stream(seed)
    keys = make_input(cfg.input_kind, n, Stream(derive_seed(seed, 1)))
    spec = spec if spec is not None else cfg.spec_for(n)
    fault = FaultModel.constant(cfg.fault_prob) if cfg.fault_prob else FaultModel()
    t0 = time.perf_counter_ns()
    if cfg.sorter in SEQUENTIAL_SORTERS:
        budget = max(1, int(default_max_steps(spec.spec if hasattr(spec, "spec") else spec)
                            * cfg.budget_multiplier))
        stats = run_sequential(keys, spec, fault, rng, budget)
    elif cfg.sorter in PARALLEL_SORTERS:
        budget = max(1, int(default_max_rounds(spec) * cfg.budget_multiplier))
        stats = run_parallel(keys, spec, rng, budget)
    else:
        protocol = async_exec.ATOMIC if cfg.sorter == "async-atomic" else async_exec.MARK
        stats = async_exec.run_async(keys, cfg.workers_for(n), spec, fault, protocol, rng=rng)
    wall = time.perf_counter_ns() - t0
    stats.sorter = cfg.sorter
    stats.trial = trial
    stats.seed = seed
    stats.wall_ns = wall if cfg.timing else 0
    return stats


def run_experiment(cfg, progress=None):
    """All ``trials x len(n_list)`` runs, ordered by ``(n, trial)``.

    Results do not depend on ``cfg.workers``; the output file is written when
    ``cfg.output_path`` is set (``.json`` gets the JSON mirror, anything else CSV).
    """
    jobs = []
    for n in cfg.n_list:
        spec = cfg.spec_for(n)
        if hasattr(spec, "family"):
            spec = build_sampler(spec)
        jobs += [(n, t, spec) for t in range(cfg.trials)]

    def job(args):
        res = run_one(cfg, *args)
        if progress:
            progress(res)
        return res

    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            table = list(pool.map(job, jobs))
    else:
        table = [job(j) for j in jobs]
    table.sort(key=lambda s: (s.n, s.trial))
    if cfg.output_path:
        write_table(table, cfg.output_path)
    return table


def table_csv(table):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for s in table:
        w.writerow(s.row())
    return buf.getvalue()


def table_json(table):
    rows = [dict(zip(CSV_HEADER, s.row())) for s in table]
    for r in rows:
        r["sim_time"] = float(r["sim_time"])
        r["sorted"] = bool(r["sorted"])
    return json.dumps(rows, indent=1) + "\n"


def write_table(table, path):
    text = table_json(table) if str(path).endswith(".json") else table_csv(table)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def read_table(path):
    """Load a results CSV (or JSON mirror) back into :class:`RunStats` rows."""
    with open(path, newline="") as fh:
        if str(path).endswith(".json"):
            rows = json.load(fh)
        else:
            rows = list(csv.DictReader(fh))
    out = []
    for r in rows:
        out.append(RunStats(n=int(r["n"]), comparisons=int(r["comparisons"]),
                            swaps=int(r["swaps"]), sorted=str(r["sorted"]) in ("1", "True", "true"),
                            rounds=int(r["rounds"]), sim_time=float(r["sim_time"]),
                            trial=int(r["trial"]), seed=int(r["seed"]), sorter=r["sorter"],
                            wall_ns=int(r["wall_ns"])))
    return out


@dataclass
class LawFit:
    law: str
    ratios: dict
    flatness: float


@dataclass
class FitReport:
    metric: str
    means: dict
    fits: list
    best: str
    slope: float

    def fit(self, law):
        for f in self.fits:
            if f.law == law:
                return f
        raise KeyError(law)

    def to_dict(self):
        return asdict(self)

    def format(self):
        lines = [f"metric: mean {self.metric} per n (log-log slope {self.slope:.3f})"]
        ns = sorted(self.means)
        lines.append("n:      " + "  ".join(f"{n:>12d}" for n in ns))
        lines.append("mean:   " + "  ".join(f"{self.means[n]:>12.1f}" for n in ns))
        for f in sorted(self.fits, key=lambda f: f.flatness):
            mark = "*" if f.law == self.best else " "
            vals = "  ".join(f"{f.ratios[n]:>12.5g}" for n in ns)
            lines.append(f"{mark} {f.law:<12} flatness {f.flatness:7.3f} | {vals}")
        return "\n".join(lines)


def fit_scaling(table, laws=None, metric="comparisons"):
    """Compare mean ``metric`` per ``n`` against candidate growth laws.

    For each law ``f`` the ratio ``mean/f(n)`` is computed per ``n``; the
    flatness score is ``max/min`` of those ratios and the flattest law wins.
    """
    laws = laws or LAWS
    if not isinstance(laws, dict):
        laws = {name: LAWS[name] for name in laws}
    groups = {}
    for s in table:
        groups.setdefault(s.n, []).append(getattr(s, metric))
    if len(groups) < 4:
        raise ValueError(f"need at least 4 distinct n values, got {len(groups)}")
    means = {n: float(np.mean(v)) for n, v in sorted(groups.items())}
    fits = []
    for name, f in laws.items():
        ratios = {n: m / f(n) for n, m in means.items()}
        vals = list(ratios.values())
        flat = max(vals) / min(vals) if min(vals) > 0 else math.inf
        fits.append(LawFit(name, ratios, flat))
    best = min(fits, key=lambda f: f.flatness).law
    ns = np.array(list(means), dtype=float)
    ms = np.array(list(means.values()), dtype=float)
    slope = float(np.polyfit(np.log(ns), np.log(np.maximum(ms, 1e-300)), 1)[0])
    return FitReport(metric, means, fits, best, slope)


@dataclass
class QAlphaReport:
    kind: str
    n: int
    mode: str
    alpha: float
    passed: bool
    worst_pair: tuple
    worst_margin: float
    samples: int = 0
    worst_z: float = None
    pairs_checked: int = 0
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        d = asdict(self)
        d["worst_pair"] = list(self.worst_pair)
        return d


def qalpha_alpha(spec):
    n = spec.n
    if spec.kind == STRUCTURED:
        return Fraction(1, 4 * (n.bit_length() - 1))
    if spec.kind == THINNED:
        return 1.0 / (4 * (n / spec.p) * math.log(n))
    raise ValueError(f"no marginal constant for {spec.kind}")


def verify_qalpha(spec, mode="exact", samples=10 ** 6, rng=None, alpha_factor=1):
    """Check ``Pr[{i, j} in M] >= alpha / dist(i, j)`` for every pair.

    ``exact`` enumerates the structured sampler (circular distance, rational
    arithmetic); ``montecarlo`` estimates thinned marginals (linear distance)
    and passes when every pair satisfies ``q_hat + 3 sigma_hat >= alpha/d``.
    ``alpha_factor`` scales the constant under test.
    """
    n = spec.n
    alpha = qalpha_alpha(spec) * alpha_factor
    if mode == "exact":
        if spec.kind != STRUCTURED:
            raise ValueError("exact mode is available for the structured sampler only")
        q = structured_marginals(n)
        worst, worst_pair = None, None
        for i in range(n):
            for j in range(i + 1, n):
                margin = q.get((i, j), Fraction(0)) * circular_distance(n, i, j) / alpha
                if worst is None or margin < worst:
                    worst, worst_pair = margin, (i, j)
        return QAlphaReport(spec.kind, n, mode, float(alpha), worst >= 1, worst_pair,
                            float(worst), pairs_checked=n * (n - 1) // 2,
                            extra={"worst_margin_exact": str(worst)})
    if mode != "montecarlo":
        raise ValueError(f"unknown mode {mode!r}")
    if spec.kind != THINNED:
        raise ValueError("Monte Carlo mode is implemented for the thinned sampler")
    rng = rng if rng is not None else Stream(0)
    counts = thinned_marginal_counts(n, spec.p, samples, rng)
    i_idx, j_idx = np.triu_indices(n, 1)
    c = counts[i_idx, j_idx].astype(float)
    qhat = c / samples
    sigma = np.sqrt(qhat * (1 - qhat) / samples)
    d = (j_idx - i_idx).astype(float)
    target = alpha / d
    margin = qhat * d / alpha
    z = (qhat - target) / np.where(sigma > 0, sigma, np.inf)
    ok = qhat + 3 * sigma >= target
    w = int(np.argmin(margin))
    return QAlphaReport(spec.kind, n, mode, float(alpha), bool(ok.all()),
                        (int(i_idx[w]), int(j_idx[w])), float(margin[w]), samples=samples,
                        worst_z=float(np.min(z)), pairs_checked=len(c),
                        extra={"failing_pairs": int((~ok).sum()),
                               "mean_retained": float(c.sum() / samples)})
