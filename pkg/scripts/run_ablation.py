"""State-representation ablation: basic (con, fea, div) state vs indicator state.

Runs the DRL policy with both assessors on the same problems and seeds and
prints per-problem IGD+ medians side by side. No ordering is expected.

    python scripts/run_ablation.py --seeds 5
"""

import argparse
import math

import numpy as np

from drlos.harness import SuiteConfig, run_suite


def medians(summary):
    return {r["problem"]: r["igd_plus_median"] for r in summary.rows
            if r["problem"] != "mean" and r["policy"] == "drl"}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/ablation")
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--gens", type=int, default=200)
    ap.add_argument("--max-iters", type=int, default=2000)
    args = ap.parse_args()

    found = {}
    for assessor in ("basic", "indicator"):
        cfg = SuiteConfig(policies=("drl",), seeds=tuple(range(args.seeds)), G_max=args.gens,
                          max_iters=args.max_iters, assessor=assessor)
        summary = run_suite(cfg, out=f"{args.out}/{assessor}")
        failed = sum(r.error is not None for r in summary.results)
        print(f"{assessor}: {len(summary.results)} runs, {failed} failed")
        found[assessor] = medians(summary)

    print(f"\n{'problem':<8} {'basic':>12} {'indicator':>12}")
    for prob, basic in found["basic"].items():
        ind = found["indicator"][prob]
        print(f"{prob:<8} {basic:>12.6f} {ind:>12.6f}")
    ratio = [found["indicator"][p] / b for p, b in found["basic"].items() if b > 0]
    if ratio and all(math.isfinite(r) for r in ratio):
        print(f"\ngeometric mean IGD+ ratio indicator/basic: {np.exp(np.mean(np.log(ratio))):.3f}")


if __name__ == "__main__":
    main()
