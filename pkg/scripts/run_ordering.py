"""Policy-ordering experiment: DRL selection against random and fixed operators.

Runs CP1-CP4 with every policy over several seeds and prints mean IGD+/HV
ranks, then checks the DRL policy against the random and fixed baselines.

    python scripts/run_ordering.py --out results/ordering
"""

import argparse
import time

from drlos.harness import SuiteConfig, config_text, run_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/ordering")
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--gens", type=int, default=200)
    ap.add_argument("--max-iters", type=int, default=2000, help="gradient steps per session")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    cfg = SuiteConfig(seeds=tuple(range(args.seeds)), G_max=args.gens, max_iters=args.max_iters,
                      workers=args.workers, out=args.out)
    print(config_text(cfg))
    start = time.perf_counter()
    summary = run_suite(cfg)
    elapsed = time.perf_counter() - start

    print(summary.table())
    ranks = summary.mean_rank_igd_plus
    worse_fixed = max(ranks["fixed:ga"], ranks["fixed:de"])
    print(f"\nwall time {elapsed:.0f} s")
    print(f"drl <= random + 0.25 : {ranks['drl'] <= ranks['random'] + 0.25}")
    print(f"drl <  worse fixed   : {ranks['drl'] < worse_fixed}")


if __name__ == "__main__":
    main()
