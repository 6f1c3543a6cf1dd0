"""``graphsort`` command line. Exit codes: 0 pass, 1 check failed, 2 usage error."""

import argparse
import json
import sys

from . import _backend, oracles
from .async_exec import ATOMIC, MARK, run_async
from .graph import SORTER_HELP, PairWeightSpec, build_sampler, load_custom_table
from .harness import (ASYNC_SORTERS, PARALLEL_SORTERS, SORTERS, ExperimentConfig, fit_scaling,
                      read_table, run_experiment, table_csv, verify_qalpha)
from .parallel import MatchingSamplerSpec, run_parallel
from .rng import Stream
from .sequential import FaultModel, make_input, run_sequential


class UsageError(Exception):
    pass


def _n_list(values):
    out = []
    for v in values:
        out += [int(x) for x in str(v).split(",") if x]
    return out


def cmd_sort(args):
    n = args.n
    rng = Stream(args.seed)
    keys = make_input(args.input, n, Stream(args.seed ^ 0x5EED))
    n = len(keys)
    fault = FaultModel.constant(args.fault) if args.fault else FaultModel()
    if args.sorter in PARALLEL_SORTERS:
        stats = run_parallel(keys, MatchingSamplerSpec(args.sorter, n, args.p or max(1, n // 4)),
                             rng, args.max_rounds)
    elif args.sorter in ASYNC_SORTERS:
        protocol = ATOMIC if args.sorter == "async-atomic" else MARK
        stats = run_async(keys, args.p or max(1, n // 8), PairWeightSpec.harmonic(n, args.scale),
                          fault, protocol, rng=rng)
    else:
        if args.sorter == "custom":
            spec = load_custom_table(args.table, n)
        else:
            spec = PairWeightSpec(args.sorter, n, scale=args.scale)
        stats = run_sequential(keys, build_sampler(spec), fault, rng, args.max_steps)
    stats.seed = args.seed
    d = stats.to_dict()
    d["backend"] = _backend.BACKEND
    print(json.dumps(d))
    return 0


def _config_from_args(args):
    if args.config:
        with open(args.config) as fh:
            d = json.load(fh)
        if args.out:
            d["output_path"] = args.out
        return ExperimentConfig.from_dict(d)
    if not args.sorter or not args.n:
        raise UsageError("experiment needs --config or both --sorter and --n")
    return ExperimentConfig(
        sorter=args.sorter, n_list=_n_list(args.n), trials=args.trials, master_seed=args.seed,
        input_kind=args.input, fault_prob=args.fault, budget_multiplier=args.budget,
        output_path=args.out, scale=args.scale, p=args.p, custom_table=args.table,
        workers=args.workers, timing=args.timing)


def _emit_table(cfg, table):
    if not cfg.output_path:
        sys.stdout.write(table_csv(table))
    unsorted = sum(not s.sorted for s in table)
    print(f"{len(table)} runs, {unsorted} budget-exhausted", file=sys.stderr)
    return 0


def cmd_experiment(args):
    cfg = _config_from_args(args)
    return _emit_table(cfg, run_experiment(cfg))


def cmd_parallel(args):
    sorter = {"async-atomic": "async-atomic", "async-mark": "async-mark"}.get(args.mode, args.mode)
    cfg = ExperimentConfig(sorter=sorter, n_list=_n_list(args.n), trials=args.trials,
                           master_seed=args.seed, input_kind=args.input, output_path=args.out,
                           p=args.p, workers=args.workers, timing=args.timing)
    return _emit_table(cfg, run_experiment(cfg))


def cmd_fit(args):
    table = read_table(args.table)
    if args.sorter:
        table = [s for s in table if s.sorter == args.sorter]
    report = fit_scaling(table, args.laws or None, metric=args.metric)
    if args.json:
        print(json.dumps(report.to_dict(), default=str))
    else:
        print(report.format())
    if args.expect and report.best != args.expect:
        return 1
    return 0


def cmd_verify_qalpha(args):
    spec = MatchingSamplerSpec(args.kind, args.n, args.p or 0)
    rep = verify_qalpha(spec, args.mode, args.samples, Stream(args.seed), args.alpha_factor)
    print(json.dumps(rep.to_dict()))
    return 0 if rep.passed else 1


def cmd_oracle(args):
    failed = 0
    for rep in oracles.default_suite(quick=args.quick):
        print(rep.to_json(), flush=True)
        failed += not rep.passed
    return 1 if failed else 0


def build_parser():
    ap = argparse.ArgumentParser(prog="graphsort", description=__doc__)
    ap.add_argument("--backend", choices=("auto", "python", "cython"), default="auto",
                    help="kernel implementation (default: compiled when available)")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, n_multi=False):
        if n_multi:
            p.add_argument("--n", nargs="+", help="lengths (space or comma separated)")
        else:
            p.add_argument("--n", type=int, required=True)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--input", default="reverse",
                       help="reverse, alternating, random, zero-one-balanced-worst, file:PATH")
        p.add_argument("--scale", type=float, default=4.0, help="harmonic weight scale")
        p.add_argument("--p", type=int, help="workers / proposals per round")
        p.add_argument("--fault", type=float, help="comparator success probability")
        p.add_argument("--table", help="custom pair-weight file ('i j weight' lines)")

    p = sub.add_parser("sort", help="one run, prints RunStats as JSON")
    p.add_argument("--sorter", choices=SORTERS, default="harmonic", help=SORTER_HELP)
    common(p)
    p.add_argument("--max-steps", type=int)
    p.add_argument("--max-rounds", type=int)
    p.set_defaults(func=cmd_sort)

    p = sub.add_parser("experiment", help="many seeded runs, CSV output")
    p.add_argument("--config", help="JSON file with ExperimentConfig fields")
    p.add_argument("--sorter", choices=SORTERS)
    common(p, n_multi=True)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--budget", type=float, default=1.0, help="budget multiplier")
    p.add_argument("--workers", type=int, default=1, help="trial fan-out threads")
    p.add_argument("--timing", action="store_true", help="record wall_ns (breaks byte-identity)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("parallel", help="parallel and concurrent sorters")
    p.add_argument("--mode", required=True,
                   choices=("structured", "thinned", "dimcut", "async-atomic", "async-mark"))
    p.add_argument("--n", nargs="+", required=True)
    p.add_argument("--p", type=int)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--input", default="reverse")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timing", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_parallel)

    p = sub.add_parser("fit", help="scaling-law flatness report from a results CSV")
    p.add_argument("table")
    p.add_argument("--metric", default="comparisons", choices=("comparisons", "rounds",
                                                                "swaps", "sim_time"))
    p.add_argument("--laws", nargs="+")
    p.add_argument("--sorter")
    p.add_argument("--expect", help="exit 1 unless this law is flattest")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("verify-qalpha", help="check matching marginals against alpha/|j-i|")
    p.add_argument("--kind", choices=("structured", "thinned"), default="structured")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int)
    p.add_argument("--mode", choices=("exact", "montecarlo"), default="exact")
    p.add_argument("--samples", type=int, default=10 ** 6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha-factor", type=float, default=1.0)
    p.set_defaults(func=cmd_verify_qalpha)

    p = sub.add_parser("oracle", help="run the analysis self-checks, JSON lines")
    p.add_argument("--quick", action="store_true")
    p.set_defaults(func=cmd_oracle)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.backend != "auto":
        try:
            _backend.use(args.backend)
        except ImportError:
            print("graphsort: compiled backend not built", file=sys.stderr)
            return 2
    try:
        return args.func(args)
    except (UsageError, ValueError, FileNotFoundError) as exc:
        print(f"graphsort: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
