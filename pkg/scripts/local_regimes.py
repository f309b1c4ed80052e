"""Exact law of I_{n,j} across the three regimes of n - j.

Prints the mean of (sqrt(n)/(n-j)) I_{n,j} next to the Rayleigh value sqrt(pi/2) * sigma
for j far from n, and P(I_{n,j} = k) next to the Y_gamma pmf for n - j = alpha sqrt(n).

    python3 scripts/local_regimes.py --family unordered --n 150
"""

import argparse
import math

from invlab import builtin, local_distribution, solve_constants, ygamma_pmf
from invlab.family import gamma_for


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--family", default="unordered")
    ap.add_argument("--n", type=int, default=150)
    ap.add_argument("--alphas", type=float, nargs="+", default=[0.5, 1.0, 2.0])
    args = ap.parse_args()
    fam, n = builtin(args.family), args.n
    c = solve_constants(fam)
    print(f"# {fam.name}, n = {n}, sigma = {c.sigma:.6f}")
    print("# Rayleigh regime")
    for frac in (0.1, 0.25, 0.5, 0.75):
        j = max(1, int(frac * n))
        pmf = local_distribution(fam, n, j, backend="float")
        mean = sum(k * float(p) for k, p in enumerate(pmf.probs)) * math.sqrt(n) / (n - j)
        print(f"j = {j:5d}: normalised mean {mean:.5f}  (limit {math.sqrt(math.pi / 2) * c.sigma:.5f})")
    print("# Y_gamma regime")
    for alpha in args.alphas:
        j = n - round(alpha * math.sqrt(n))
        a = (n - j) / math.sqrt(n)
        g = gamma_for(c, a)
        pmf = local_distribution(fam, n, j, backend="float")
        row = "  ".join(f"{float(pmf.probs[k]):.4f}/{ygamma_pmf(g, k):.4f}" for k in range(min(4, n - j + 1)))
        print(f"j = {j:5d} (alpha {a:.3f}, gamma {g:.3f}): P(k), k <= 3, exact/limit: {row}")


if __name__ == "__main__":
    main()
