"""Monte Carlo estimates of E[I_n/(c_phi n^{3/2})] for growing n, with the exact value where cheap.

    python3 scripts/monte_carlo_airy.py --family binary --n 250 500 1000 2000 --reps 10000
"""

import argparse
import json

from invlab import RngStream, builtin, global_moments, monte_carlo_global, solve_constants


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--family", default="binary")
    ap.add_argument("--n", type=int, nargs="+", default=[250, 500, 1000, 2000])
    ap.add_argument("--reps", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--threads", type=int)
    ap.add_argument("--json", action="store_true", help="dump the full summaries")
    args = ap.parse_args()
    fam = builtin(args.family)
    c = solve_constants(fam)
    out = []
    for i, n in enumerate(args.n):
        s = monte_carlo_global(fam, n, args.reps, RngStream(args.seed, i), args.threads)
        m = s.moments[0]
        exact = global_moments(fam, n, 1, backend="float").raw[1] / (c.c_phi * n ** 1.5)
        print(f"n = {n:6d}: MC {m.mean:.4f} +- {m.se:.4f}, exact {exact:.4f}, limit {m.reference:.4f}, "
              f"{'pass' if m.passed else 'FAIL'}")
        out.append(s.as_json())
    if args.json:
        print(json.dumps(out, indent=1))


if __name__ == "__main__":
    main()
