"""Command line entry point: ``run``, ``suite``, ``oracle`` and ``gradcheck``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .framework import TRACE_FIELDS, run
from .harness import (ConfigError, SuiteConfig, front_rows, load_config, run_stem, run_suite,
                      write_csv)
from .host import HOSTS, make_host
from .problems import PROBLEM_NAMES, analytic_front, grid_oracle_front, make_problem
from .qnet import gradient_check, init_network


def _suite_config(args) -> SuiteConfig:
    overrides = dict(N=args.pop, G_max=args.gens, n=args.n, host=args.host, out=args.out,
                     max_iters=args.max_iters, assessor=args.assessor)
    if args.config:
        return load_config(args.config, **overrides)
    return SuiteConfig(**{k: v for k, v in overrides.items() if v is not None})


def cmd_run(args) -> int:
    cfg = _suite_config(args)
    policy = args.policy or "drl"
    spec = make_problem(args.problem, cfg.n)
    reference = analytic_front(spec, cfg.front_resolution).points
    result = run(make_host(cfg.host), spec, cfg.run_config(policy, args.seed), reference)

    out = Path(cfg.out)
    stem = run_stem(spec.name, policy, args.seed)
    write_csv([row.csv_row() for row in result.trace], out / f"{stem}_trace.csv", TRACE_FIELDS)
    pop = result.population
    write_csv(front_rows(pop.objectives, pop.violations), out / f"{stem}_front.csv", ("f1", "f2"))
    usage = ", ".join(f"{k}={v}" for k, v in result.usage.items())
    print(f"{spec.name} {policy} seed={args.seed}: IGD+={result.final_igd_plus:.6g} "
          f"HV={result.final_hv:.6g} usage[{usage}] sessions={result.sessions}")
    return 0


def cmd_suite(args) -> int:
    cfg = _suite_config(args)
    summary = run_suite(cfg)
    failures = sum(r.error is not None for r in summary.results)
    print(summary.table())
    print(f"{len(summary.results)} runs, {failures} failed; output in {cfg.out}")
    return 0


def cmd_oracle(args) -> int:
    spec = make_problem(args.problem, args.n or 10)
    if args.analytic:
        front = analytic_front(spec, args.analytic)
    else:
        front = grid_oracle_front(spec, args.points)
    rows = [{"f1": a, "f2": b} for a, b in front.points]
    out = Path(args.out or f"{spec.name}_{front.source}.csv")
    write_csv(rows, out, ("f1", "f2"))
    print(f"{spec.name}: {len(rows)} {front.source} points -> {out}")
    return 0


def cmd_gradcheck(args) -> int:
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    for trial in range(args.trials):
        net = init_network(rng)
        X = rng.random((args.batch, 4))
        y = rng.random(args.batch)
        err = gradient_check(net, X, y, h=args.h)
        worst = max(worst, err)
        print(f"trial {trial}: max relative error {err:.3e}")
    ok = worst < args.tol
    print(f"{'PASS' if ok else 'FAIL'}: worst {worst:.3e} (tolerance {args.tol:g})")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="drlos", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key = value configuration file")
        p.add_argument("--host", choices=sorted(HOSTS), default=None)
        p.add_argument("--pop", type=int, help="population size N")
        p.add_argument("--gens", type=int, help="generation budget")
        p.add_argument("--n", type=int, help="decision-space dimension")
        p.add_argument("--max-iters", type=int, help="gradient steps per training session")
        p.add_argument("--assessor", choices=("basic", "indicator"))
        p.add_argument("--out", help="output directory")

    p = sub.add_parser("run", help="a single run")
    common(p)
    p.add_argument("--problem", choices=PROBLEM_NAMES, type=str.upper, default="CP1")
    p.add_argument("--policy", default="drl", help="drl | random | fixed:ga | fixed:de")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("suite", help="batch of problems x policies x seeds")
    common(p)
    p.set_defaults(func=cmd_suite)

    p = sub.add_parser("oracle", help="write a reference front as CSV")
    p.add_argument("--problem", choices=PROBLEM_NAMES, type=str.upper, default="CP1")
    p.add_argument("--n", type=int)
    p.add_argument("--points", type=int, default=101, help="grid points per dimension")
    p.add_argument("--analytic", type=int, metavar="RES", help="sample the analytic front instead")
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gradcheck", help="backprop vs finite differences")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--batch", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--h", type=float, default=1e-5)
    p.add_argument("--tol", type=float, default=1e-4)
    p.set_defaults(func=cmd_gradcheck)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
