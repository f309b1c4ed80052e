"""Command-line front end: ``invlab <command> ...`` writes versioned JSON (or CSV).

Exit status is 0 on success, 2 on usage errors (including an unknown family)
and 1 when a computation fails; failures print a one-line hint to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .enumeration import brute_inversion_polynomial, brute_local_distribution
from .errors import FamilyError, InvlabError
from .family import resolve, solve_constants
from .invpoly import global_moments, inversion_polynomial
from .limitlaws import airy_moments, rayleigh_moment, ygamma_factorial_moment, ygamma_pmf
from .localdist import (local_distribution, local_distribution_ordered, local_distribution_unordered,
                        local_factorial_moment)
from .sampler import RngStream, monte_carlo_global, monte_carlo_local
from .verify import DEFAULT_REPS, DEFAULT_SEED, SUITES, run_suite

SCHEMA = "1"


class UsageError(Exception):
    pass


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    return x


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get("INVLAB_THREADS", "1")))
    except ValueError:
        raise UsageError("INVLAB_THREADS must be an integer")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="invlab", description="Inversions in simply generated labelled trees.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, family=True):
        if family:
            sp.add_argument("--family", required=True, help="binary|ordered|unordered|cyclic or a JSON file")
        sp.add_argument("--output", "-o", help="write to this file instead of stdout")
        sp.add_argument("--format", choices=("json", "csv"), default="json")

    sp = sub.add_parser("constants", help="tau, rho, c_phi, sigma, d")
    common(sp)

    sp = sub.add_parser("poly", help="inversion polynomial J_n (or Jhat_n with --root1)")
    common(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--root1", action="store_true")

    sp = sub.add_parser("local", help="distribution of I_{n,j}")
    common(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--j", type=int, required=True)
    sp.add_argument("--closed-form", action="store_true", help="closed form (ordered and unordered only)")
    sp.add_argument("--backend", choices=("exact", "float"), default="exact")

    sp = sub.add_parser("moments", help="moments of I_n (--global) or I_{n,j} (--local)")
    common(sp)
    kind = sp.add_mutually_exclusive_group(required=True)
    kind.add_argument("--global", dest="scope", action="store_const", const="global")
    kind.add_argument("--local", dest="scope", action="store_const", const="local")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--j", type=int)
    sp.add_argument("--r", type=int, default=2)
    sp.add_argument("--backend", choices=("exact", "float"), default=None,
                    help="default: exact up to n = 64, float above")

    sp = sub.add_parser("limitlaw", help="Airy moments, Rayleigh moments or the Y_gamma pmf")
    common(sp, family=False)
    sp.add_argument("law", choices=("airy", "rayleigh", "ygamma"))
    sp.add_argument("--r", type=int, default=2)
    sp.add_argument("--sigma", type=float, default=1.0)
    sp.add_argument("--gamma", type=float, default=1.0)
    sp.add_argument("--k", type=int, default=5)

    sp = sub.add_parser("sample", help="Monte Carlo against the limit laws")
    common(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--reps", type=int, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--stream", type=int, default=0)
    sp.add_argument("--j", type=int, help="per-label statistic I_{n,j} instead of I_n")
    sp.add_argument("--threads", type=int)
    sp.add_argument("--emit-histogram", metavar="CSV")

    sp = sub.add_parser("oracle", help="brute-force enumeration (n <= 9)")
    common(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--j", type=int, help="dump P(I_{n,j} = k) instead of the polynomials")

    sp = sub.add_parser("verify", help="run a verification suite")
    common(sp, family=False)
    sp.add_argument("--suite", required=True, choices=(*SUITES, "all"))
    sp.add_argument("--max-n", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--reps", type=int)
    sp.add_argument("--threads", type=int)
    return p


def _resolve_defaults(args: argparse.Namespace) -> None:
    """Fill environment- and size-dependent defaults so the echoed config is complete."""
    if hasattr(args, "threads"):
        args.threads = _default_threads() if args.threads is None else args.threads
        _check_positive(threads=args.threads)
    if args.command == "moments" and args.backend is None:
        args.backend = "exact" if args.n <= 64 else "float"
    if args.command == "verify":
        args.seed = DEFAULT_SEED if args.seed is None else args.seed
        args.reps = DEFAULT_REPS if args.reps is None else args.reps


def _config(args: argparse.Namespace, family=None) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("output", "format")}
    if family is not None:
        cfg["family"] = family.name
        cfg["family_spec"] = args.family
    return cfg


def _check_positive(**vals) -> None:
    for k, v in vals.items():
        if v is not None and v < 1:
            raise UsageError(f"--{k.replace('_', '-')} must be >= 1, got {v}")


# -- commands ----------------------------------------------------------------------

def cmd_constants(args, fam) -> tuple[dict, list]:
    c = solve_constants(fam)
    return c.as_dict(), [("key", "value"), *c.as_dict().items()]


def cmd_poly(args, fam):
    _check_positive(n=args.n)
    poly = inversion_polynomial(fam, args.n, root1=args.root1)
    out = poly.as_json()
    return out, [("k", "coeff"), *((k, str(v)) for k, v in sorted(poly.coeffs.items()))]


def cmd_local(args, fam):
    _check_positive(n=args.n, j=args.j)
    if not args.j <= args.n:
        raise UsageError(f"need j <= n, got n={args.n}, j={args.j}")
    if args.closed_form:
        forms = {"ordered": local_distribution_ordered, "unordered": local_distribution_unordered}
        if fam.name not in forms:
            raise UsageError("--closed-form is available for ordered and unordered trees only")
        probs = [forms[fam.name](args.n, args.j, k) for k in range(args.n - args.j + 1)]
        out = {"family": fam.name, "n": args.n, "j": args.j, "pmf": {str(k): str(p) for k, p in enumerate(probs)}}
    else:
        pmf = local_distribution(fam, args.n, args.j, backend=args.backend)
        probs = list(pmf.probs)
        out = pmf.as_json()
    fmt = str if isinstance(probs[0], Fraction) else float
    return out, [("k", "prob"), *((k, fmt(p)) for k, p in enumerate(probs))]


def cmd_moments(args, fam):
    _check_positive(n=args.n)
    if args.r < 0:
        raise UsageError("--r must be >= 0")
    if args.scope == "global":
        mt = global_moments(fam, args.n, args.r, backend=args.backend)
        out = {"scope": "global", **mt.as_json()}
        c = solve_constants(fam)
        mu = airy_moments(max(args.r, 1))
        out["normalized_raw"] = [float(mt.raw[r]) / (c.c_phi * args.n ** 1.5) ** r for r in range(1, args.r + 1)]
        out["airy"] = list(mu.mu[:args.r])
    else:
        if args.j is None:
            raise UsageError("--local needs --j")
        _check_positive(j=args.j)
        if args.j > args.n:
            raise UsageError(f"need j <= n, got n={args.n}, j={args.j}")
        fac = [local_factorial_moment(fam, args.n, args.j, r, args.backend) for r in range(args.r + 1)]
        out = {"scope": "local", "n": args.n, "j": args.j, "factorial": _jsonable(fac)}
    rows = [("r", "factorial")] + [(r, v) for r, v in enumerate(out["factorial"])]
    return out, rows


def cmd_limitlaw(args, _):
    if args.law == "airy":
        _check_positive(r=args.r)
        am = airy_moments(args.r)
        out = {"law": "airy", "C": [str(c) for c in am.C], "mu": list(am.mu)}
        rows = [("r", "C_r", "mu_r")] + [(r + 1, str(c), m) for r, (c, m) in enumerate(zip(am.C, am.mu))]
    elif args.law == "rayleigh":
        _check_positive(r=args.r)
        mom = [rayleigh_moment(args.sigma, r) for r in range(1, args.r + 1)]
        out = {"law": "rayleigh", "sigma": args.sigma, "moments": mom}
        rows = [("r", "moment")] + list(enumerate(mom, start=1))
    else:
        if args.k < 0:
            raise UsageError("--k must be >= 0")
        pmf = [ygamma_pmf(args.gamma, k) for k in range(args.k + 1)]
        out = {"law": "ygamma", "gamma": args.gamma, "pmf": {str(k): p for k, p in enumerate(pmf)},
               "factorial_moments": [ygamma_factorial_moment(args.gamma, r) for r in range(1, 4)]}
        rows = [("k", "prob")] + list(enumerate(pmf))
    return out, rows


def cmd_sample(args, fam):
    _check_positive(n=args.n)
    rng = RngStream(args.seed, args.stream)
    if args.j is None:
        s = monte_carlo_global(fam, args.n, args.reps, rng, args.threads)
    else:
        s = monte_carlo_local(fam, args.n, args.j, args.reps, rng, args.threads)
    out = s.as_json()
    rows = [("k", "count")] + sorted(s.histogram.items())
    if args.emit_histogram:
        with open(args.emit_histogram, "w", newline="") as fh:
            csv.writer(fh).writerows(rows)
    return out, rows


def cmd_oracle(args, fam):
    _check_positive(n=args.n)
    if args.j is not None:
        probs = brute_local_distribution(fam, args.n, args.j)
        out = {"family": fam.name, "n": args.n, "j": args.j, "pmf": {str(k): str(p) for k, p in enumerate(probs)}}
        return out, [("k", "prob")] + [(k, str(p)) for k, p in enumerate(probs)]
    J = brute_inversion_polynomial(fam, args.n)
    Jh = brute_inversion_polynomial(fam, args.n, root1=True)
    out = {"family": fam.name, "n": args.n, "coeffs": {str(k): str(v) for k, v in J.items()},
           "root1_coeffs": {str(k): str(v) for k, v in Jh.items()}}
    return out, [("k", "coeff", "root1_coeff")] + [(k, str(J.get(k, 0)), str(Jh.get(k, 0)))
                                                   for k in sorted(set(J) | set(Jh))]


def cmd_verify(args, _):
    names = list(SUITES) if args.suite == "all" else [args.suite]
    kw = {"seed": args.seed, "reps": args.reps, "threads": args.threads}
    if args.max_n is not None:
        kw["max_n"] = args.max_n
    reports = [run_suite(name, **kw) for name in names]
    out = {"passed": all(r.passed for r in reports), "suites": [r.as_json() for r in reports]}
    rows = [("suite", "identity", "passed", "residual")]
    for r in reports:
        rows += [(r.suite, c.identity, c.passed, c.residual) for c in r.checks]
    return out, rows


COMMANDS = {"constants": cmd_constants, "poly": cmd_poly, "local": cmd_local, "moments": cmd_moments,
            "limitlaw": cmd_limitlaw, "sample": cmd_sample, "oracle": cmd_oracle, "verify": cmd_verify}


def _emit(args, payload: dict, rows: list) -> None:
    if args.format == "csv":
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(rows)
        text = buf.getvalue()
    else:
        text = json.dumps(_jsonable(payload), indent=2, allow_nan=True) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _resolve_defaults(args)
        fam = resolve(args.family) if getattr(args, "family", None) else None
        result, rows = COMMANDS[args.command](args, fam)
    except (UsageError, FamilyError) as exc:
        print(f"invlab {args.command}: {exc}", file=sys.stderr)
        if getattr(exc, "hint", ""):
            print(f"hint: {exc.hint}", file=sys.stderr)
        return 2
    except (InvlabError, ValueError, ArithmeticError) as exc:
        print(f"invlab {args.command}: {exc}", file=sys.stderr)
        hint = getattr(exc, "hint", "") or "check the numeric parameters against the command help"
        print(f"hint: {hint}", file=sys.stderr)
        return 1
    payload = {"schema": SCHEMA, "config": _config(args, fam), **result}
    _emit(args, payload, rows)
    if args.command == "verify" and not result["passed"]:
        return 1
    return 0  # a statistical miss in ``sample`` is reported in the JSON, not by the exit code


def main() -> None:
    sys.exit(run())
