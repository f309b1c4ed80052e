"""Batteries of cross-identities, one suite per acceptance check.

Each check records the identity, where it comes from (in words), the measured
residual and pass/fail.  Reports carry no timings, so re-running a suite with
the same seed gives an identical JSON document.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .enumeration import brute_inversion_polynomial, brute_local_distribution
from .family import BUILTIN_NAMES, builtin, solve_constants
from .invpoly import (global_moments, inversion_polynomials, mallows_riordan_residual, pumped_factorial_moments,
                      transfer_moments)
from .limitlaws import airy_moments, ygamma_factorial_moment, ygamma_pmf_table
from .localdist import (local_distribution_ordered, local_distribution_table, local_distribution_unordered,
                        local_factorial_moment)
from .sampler import RngStream, monte_carlo_global, monte_carlo_local, sample_histogram

# reference constants for the four example families
PUBLISHED_CONSTANTS = {
    "binary": (1.0, 0.5, math.sqrt(2)),
    "ordered": (0.5, 0.25, 1 / math.sqrt(2)),
    "unordered": (1.0, 1 / math.sqrt(8), 1.0),
    "cyclic": (0.682155, 0.199325, 0.563776),
}


@dataclass
class Check:
    identity: str
    source: str
    passed: bool
    residual: object = 0
    detail: str = ""


@dataclass
class Report:
    suite: str
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, identity: str, source: str, passed: bool, residual=0, detail: str = "") -> Check:
        if isinstance(residual, Fraction):
            residual = str(residual)
        c = Check(identity, source, bool(passed), residual, detail)
        self.checks.append(c)
        return c

    def as_json(self) -> dict:
        return {"suite": self.suite, "passed": self.passed, "checks": [asdict(c) for c in self.checks]}


def _dict_residual(a: dict, b: dict) -> Fraction:
    keys = set(a) | set(b)
    return max((abs(Fraction(a.get(k, 0)) - Fraction(b.get(k, 0))) for k in keys), default=Fraction(0))


def _list_residual(a, b) -> Fraction:
    n = max(len(a), len(b))
    get = lambda x, i: x[i] if i < len(x) else 0  # noqa: E731
    return max((abs(Fraction(get(a, i)) - Fraction(get(b, i))) for i in range(n)), default=Fraction(0))


# -- suites ---------------------------------------------------------------------

def suite_oracle(max_n: int = 7, **_) -> Report:
    rep = Report("oracle")
    for name in BUILTIN_NAMES:
        fam = builtin(name)
        polys = inversion_polynomials(fam, max_n)
        for n in range(1, max_n + 1):
            J, Jh = polys[n - 1]
            r1 = _dict_residual(J.coeffs, brute_inversion_polynomial(fam, n))
            r2 = _dict_residual(Jh.coeffs, brute_inversion_polynomial(fam, n, root1=True))
            rep.add(f"{name}: J_{n}, Jhat_{n} from D_z F = phi(HF) equal enumeration",
                    "inversion polynomial definition", r1 == 0 and r2 == 0, max(r1, r2))
            if not J.coeffs:
                continue
            table = local_distribution_table(fam, n)
            r3 = max(_list_residual(table[j - 1].probs, brute_local_distribution(fam, n, j))
                     for j in range(1, n + 1))
            rep.add(f"{name}: P(I_{{{n},j}} = k) from N(z,u,q) equals enumeration, all j",
                    "local trivariate generating function", r3 == 0, r3)
    return rep


def suite_closed_forms(max_n: int = 40, **_) -> Report:
    rep = Report("closed-forms")
    forms = {"ordered": local_distribution_ordered, "unordered": local_distribution_unordered}
    for name, closed in forms.items():
        fam = builtin(name)
        worst = Fraction(0)
        for n in range(1, max_n + 1):
            table = local_distribution_table(fam, n)
            for j in range(1, n + 1):
                for k in range(n - j + 1):
                    worst = max(worst, abs(closed(n, j, k) - table[j - 1][k]))
        rep.add(f"{name}: closed-form P(I_{{n,j}} = k) equals generic extraction, n <= {max_n}, all j, k",
                "exact local distribution for ordered and unordered trees", worst == 0, worst)
    return rep


def suite_mallows_riordan(max_n: int = 10, **_) -> Report:
    rep = Report("mallows-riordan")
    r = mallows_riordan_residual(max_n)
    rep.add(f"exp(sum (q-1)^(n-1) Jhat_n(q) t^n/n!) = sum q^C(n,2) t^n/n! through t^{max_n} (unordered)",
            "Mallows-Riordan inversion enumerator", r == 0, r)
    return rep


def suite_moments(max_n: int = 12, local_n: int = 20, r_max: int = 3, **_) -> Report:
    rep = Report("moments")
    for name in BUILTIN_NAMES:
        fam = builtin(name)
        pumped = pumped_factorial_moments(fam, max_n, r_max)
        polys = inversion_polynomials(fam, max_n)
        worst = Fraction(0)
        for n in range(1, max_n + 1):
            J, Jh = polys[n - 1]
            if pumped[n - 1] is None:
                continue
            for r in range(r_max + 1):
                worst = max(worst, abs(pumped[n - 1].factorial[r] - Jh.factorial_moment(r)))
            # moment transfer from root-1 trees to all trees
            tr = transfer_moments(pumped[n - 1], n)
            for r in range(r_max + 1):
                worst = max(worst, abs(tr.factorial[r] - J.factorial_moment(r)))
        rep.add(f"{name}: pumped factorial moments equal polynomial moments, n <= {max_n}, r <= {r_max}",
                "pumping recursion and moment transfer", worst == 0, worst)
        worst = Fraction(0)
        for n in range(1, local_n + 1):
            table = local_distribution_table(fam, n)
            for j in range(1, n + 1):
                for r in range(1, r_max + 1):
                    worst = max(worst, abs(local_factorial_moment(fam, n, j, r) - table[j - 1].factorial_moment(r)))
        rep.add(f"{name}: exact local factorial moments equal pmf moments, n <= {local_n}, r <= {r_max}",
                "local factorial moment formula", worst == 0, worst)
    for name, want in (("ordered", Fraction(5, 4)), ("unordered", Fraction(4, 3))):
        got = global_moments(builtin(name), 3, 1, backend="exact").raw[1]
        rep.add(f"{name}: E[I_3] = {want} by moment transfer", "small-case worked example", got == want,
                abs(got - want), f"got {got}")
    return rep


def suite_constants(**_) -> Report:
    rep = Report("constants")
    for name in ("binary", "ordered", "unordered"):
        c = solve_constants(builtin(name))
        want = PUBLISHED_CONSTANTS[name]
        err = max(abs(c.tau - want[0]), abs(c.c_phi - want[1]), abs(c.sigma - want[2]))
        rep.add(f"{name}: (tau, c_phi, sigma) = {tuple(round(w, 9) for w in want)} within 1e-9",
                "example constants", err <= 1e-9, err)
    c = solve_constants(builtin("cyclic"))
    want = PUBLISHED_CONSTANTS["cyclic"]
    rep.add("cyclic: tau = 0.682155 within 1e-5", "example constants", abs(c.tau - want[0]) <= 1e-5,
            abs(c.tau - want[0]))
    err = max(abs(c.c_phi - want[1]), abs(c.sigma - want[2]))
    rep.add("cyclic: (c_phi, sigma) = (0.199325, 0.563776) within 1e-5", "example constants (published values)",
            err <= 1e-5, err, f"computed c_phi={c.c_phi:.6f}, sigma={c.sigma:.6f} from the defining formulas")
    # the formulas themselves, judged by exact first moments at growing n
    mt = global_moments(builtin("cyclic"), 1000, 1, backend="float")
    ratio = mt.raw[1] / (c.c_phi * math.sqrt(math.pi) * 1000 ** 1.5)
    rep.add("cyclic: E[I_1000] / (c_phi sqrt(pi) 1000^(3/2)) in [0.97, 1.03] with computed c_phi",
            "mean asymptotics", 0.97 <= ratio <= 1.03, abs(ratio - 1), f"ratio {ratio:.6f}")
    return rep


def suite_asymptotic(n: int = 400, **_) -> Report:
    rep = Report("asymptotic")
    fam = builtin("ordered")
    c = solve_constants(fam)
    mt = global_moments(fam, n, 2, backend="float")
    r1 = mt.raw[1] / (c.c_phi * math.sqrt(math.pi) * n ** 1.5)
    r2 = mt.raw[2] / (c.c_phi ** 2 * n ** 3 * 10 / 3)
    rep.add(f"ordered: E[I_n]/(c_phi sqrt(pi) n^(3/2)) in [0.9, 1.1] at n = {n}", "Airy limit, first moment",
            0.9 <= r1 <= 1.1, abs(r1 - 1), f"ratio {r1:.6f}")
    rep.add(f"ordered: E[I_n^2]/(c_phi^2 n^3 10/3) in [0.85, 1.15] at n = {n}", "Airy limit, second moment",
            0.85 <= r2 <= 1.15, abs(r2 - 1), f"ratio {r2:.6f}")
    return rep


def suite_limitlaws(**_) -> Report:
    rep = Report("limitlaws")
    am = airy_moments(2)
    rep.add("C_1 = 1/2", "Airy moment recursion", am.C[0] == Fraction(1, 2), abs(am.C[0] - Fraction(1, 2)))
    rep.add("C_2 = 5/4", "Airy moment recursion", am.C[1] == Fraction(5, 4), abs(am.C[1] - Fraction(5, 4)))
    err = abs(am.mu[0] - math.sqrt(math.pi))
    rep.add("mu_1 = sqrt(pi) within 1e-12", "Airy moments", err <= 1e-12, err)
    tab = ygamma_pmf_table(1.0)
    err = abs(sum(tab) - 1)
    rep.add("Y_1 pmf sums to 1 within 1e-10", "Y_gamma law", err <= 1e-10, err)
    worst = 0.0
    for r in range(1, 4):
        est = sum(p * math.perm(k, r) for k, p in enumerate(tab))
        worst = max(worst, abs(est - ygamma_factorial_moment(1.0, r)))
    rep.add("Y_1 quadrature factorial moments (r <= 3) match the closed form within 1e-8", "Y_gamma law",
            worst <= 1e-8, worst)
    return rep


DEFAULT_SEED = 20240229
DEFAULT_REPS = 10_000


def suite_montecarlo(seed: int = DEFAULT_SEED, reps: int = DEFAULT_REPS, threads: Optional[int] = None, **_) -> Report:
    rep = Report("montecarlo")
    s = monte_carlo_global(builtin("binary"), 2000, reps, RngStream(seed, 1), threads)
    m = s.moments[0]
    rep.add("binary n=2000: mean of I_n/(c_phi n^(3/2)) within 3 SE + 5% of sqrt(pi)", "Airy limit",
            m.passed, abs(m.mean - m.reference), f"mean {m.mean:.6f} se {m.se:.6f}")
    s = monte_carlo_local(builtin("unordered"), 10_000, 5000, reps, RngStream(seed, 2), threads)
    m = s.moments[0]
    rep.add("unordered n=10^4, j=n/2: mean of (sqrt(n)/(n-j)) I_{n,j} within 3 SE + 5% of sqrt(pi/2)",
            "Rayleigh limit", m.passed and s.regime == "rayleigh", abs(m.mean - m.reference),
            f"mean {m.mean:.6f} se {m.se:.6f}")
    s = monte_carlo_local(builtin("unordered"), 10_000, 10_000 - 100, reps, RngStream(seed, 3), threads)
    worst = max(abs(p.empirical - p.reference) for p in s.pmf)
    rep.add("unordered n=10^4, j=n-100: P(I_{n,j} = k), k <= 3, within 3 SE + 5% of the Y_1 pmf",
            "Y_gamma limit", all(p.passed for p in s.pmf) and s.regime == "ygamma", worst,
            "; ".join(f"k={p.k}: {p.empirical:.4f} vs {p.reference:.4f}" for p in s.pmf))
    h1 = sample_histogram(builtin("cyclic"), 50, 500, RngStream(seed, 4), threads=1)
    h2 = sample_histogram(builtin("cyclic"), 50, 500, RngStream(seed, 4), threads=3)
    rep.add("Galton-Watson histograms agree across thread counts", "determinism", h1 == h2)
    return rep


SUITES: dict[str, Callable[..., Report]] = {
    "oracle": suite_oracle,
    "closed-forms": suite_closed_forms,
    "mallows-riordan": suite_mallows_riordan,
    "moments": suite_moments,
    "montecarlo": suite_montecarlo,
    "constants": suite_constants,
    "asymptotic": suite_asymptotic,
    "limitlaws": suite_limitlaws,
}


def run_suite(name: str, **kwargs) -> Report:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; valid: {', '.join(SUITES)}")
    kwargs = {k: v for k, v in kwargs.items() if v is not None}
    return SUITES[name](**kwargs)
