"""Normalised first and second moments of I_n against the Airy values.

    python3 scripts/moment_convergence.py --family ordered --n 50 100 200 400 800
"""

import argparse
import math

from invlab import airy_moments, builtin, global_moments, solve_constants


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--family", default="ordered")
    ap.add_argument("--n", type=int, nargs="+", default=[25, 50, 100, 200, 400, 800, 1600])
    args = ap.parse_args()
    fam = builtin(args.family)
    c = solve_constants(fam)
    mu = airy_moments(2).mu
    print(f"# {fam.name}: c_phi = {c.c_phi:.6f}; Airy mu_1 = {mu[0]:.6f}, mu_2 = {mu[1]:.6f}")
    print(f"{'n':>6} {'E[I]/norm':>12} {'ratio1':>8} {'E[I^2]/norm^2':>14} {'ratio2':>8}")
    for n in args.n:
        mt = global_moments(fam, n, 2, backend="float")
        norm = c.c_phi * n ** 1.5
        m1, m2 = mt.raw[1] / norm, mt.raw[2] / norm ** 2
        print(f"{n:6d} {m1:12.6f} {m1 / mu[0]:8.4f} {m2:14.6f} {m2 / mu[1]:8.4f}")
    print(f"# limit ratios are 1; sqrt(pi) = {math.sqrt(math.pi):.6f}")


if __name__ == "__main__":
    main()
