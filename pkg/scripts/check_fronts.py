"""Cross-check every analytic reference front against the brute-force grid oracle.

Prints the Hausdorff distance between the two fronts and the IGD+ of each
with respect to the other.

    python scripts/check_fronts.py --n 10 --points 101
"""

import argparse

import numpy as np

from drlos.indicators import igd_plus
from drlos.problems import PROBLEM_NAMES, analytic_front, grid_oracle_front, make_problem


def hausdorff(A, B):
    d = np.linalg.norm(A[:, None, :] - B[None, :, :], axis=2)
    return max(d.min(axis=1).max(), d.min(axis=0).max())


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=10)
    ap.add_argument("--points", type=int, default=101, help="grid points per dimension")
    ap.add_argument("--resolution", type=int, default=500)
    args = ap.parse_args()

    print(f"{'problem':<8} {'oracle pts':>10} {'hausdorff':>10} {'igd+ a|o':>10} {'igd+ o|a':>10}")
    for name in PROBLEM_NAMES:
        spec = make_problem(name, args.n)
        exact = analytic_front(spec, args.resolution).points
        oracle = grid_oracle_front(spec, args.points).points
        print(f"{name:<8} {len(oracle):>10} {hausdorff(exact, oracle):>10.4f} "
              f"{igd_plus(exact, oracle):>10.4f} {igd_plus(oracle, exact):>10.4f}")


if __name__ == "__main__":
    main()
