"""Exact global inversion statistics from the q-functional equation.

``inversion_polynomials`` solves ``D_z F = phi(H F)`` coefficientwise;
``pumped_factorial_moments`` differentiates that equation at ``q = 1`` to get
the factorial moments of the root-1 inversion count without ever forming the
bivariate series, which is what makes sizes of several hundred reachable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

from .errors import BudgetError
from .family import DegreeWeightSequence, builtin, solve_constants
from .series import EXACT, FLOAT, BiSeries, UniSeries, bi_solve_F, coerce, phi_of, solve_tree_series

#: largest order accepted by the bivariate solver; storage grows like N^4 / 8 coefficients
MAX_BIVARIATE_ORDER = 40
MAX_PUMP_R = 4
#: past this size the float backend is used when ``backend="auto"``
FLOAT_THRESHOLD = 64


@dataclass(frozen=True)
class InvPolynomial:
    """``coeffs[k]`` = total weight of size-``n`` trees with ``k`` inversions."""

    n: int
    coeffs: dict
    root1: bool = False

    def total(self) -> Fraction:
        return sum(self.coeffs.values(), Fraction(0))

    def __call__(self, q):
        return sum((c * q ** k for k, c in self.coeffs.items()), Fraction(0))

    def factorial_moment(self, r: int) -> Fraction:
        return sum((c * math.perm(k, r) for k, c in self.coeffs.items()), Fraction(0)) / self.total()

    def as_json(self) -> dict:
        return {"n": self.n, "root1": self.root1, "coeffs": {str(k): str(v) for k, v in sorted(self.coeffs.items())}}


@dataclass(frozen=True)
class MomentTable:
    """Factorial moments ``E[X^(r falling)]`` and raw moments ``E[X^r]``, ``r = 0..r_max``."""

    n: int
    factorial: tuple
    raw: tuple

    @property
    def r_max(self) -> int:
        return len(self.factorial) - 1

    @classmethod
    def from_factorial(cls, n: int, factorial: Sequence) -> "MomentTable":
        return cls(n, tuple(factorial), tuple(factorial_to_raw(factorial)))

    @classmethod
    def from_raw(cls, n: int, raw: Sequence) -> "MomentTable":
        return cls(n, tuple(raw_to_factorial(raw)), tuple(raw))

    def as_json(self) -> dict:
        fmt = (lambda x: str(x)) if isinstance(self.raw[0], Fraction) else float
        return {"n": self.n, "factorial": [fmt(x) for x in self.factorial], "raw": [fmt(x) for x in self.raw]}


# -- Stirling conversions ---------------------------------------------------

@lru_cache(maxsize=None)
def stirling2(r: int, ell: int) -> int:
    if r == ell:
        return 1
    if ell == 0 or ell > r:
        return 0
    return ell * stirling2(r - 1, ell) + stirling2(r - 1, ell - 1)


@lru_cache(maxsize=None)
def stirling1_signed(r: int, ell: int) -> int:
    if r == ell:
        return 1
    if ell == 0 or ell > r:
        return 0
    return stirling1_signed(r - 1, ell - 1) - (r - 1) * stirling1_signed(r - 1, ell)


def factorial_to_raw(factorials: Sequence) -> list:
    """``E[X^r] = sum_l S2(r, l) E[X^(l falling)]``."""
    return [sum((stirling2(r, ell) * factorials[ell] for ell in range(r + 1)), factorials[0] * 0)
            for r in range(len(factorials))]


def raw_to_factorial(raw: Sequence) -> list:
    return [sum((stirling1_signed(r, ell) * raw[ell] for ell in range(r + 1)), raw[0] * 0)
            for r in range(len(raw))]


# -- polynomials --------------------------------------------------------------

@lru_cache(maxsize=32)
def _bi_solution(family: DegreeWeightSequence, N: int) -> tuple[BiSeries, BiSeries]:
    return bi_solve_F(family, N)


def inversion_polynomials(family: DegreeWeightSequence, N: int) -> list[tuple[InvPolynomial, InvPolynomial]]:
    """``[(J_n, Jhat_n) for n = 1..N]``: all-root and root-label-1 inversion polynomials."""
    if N > MAX_BIVARIATE_ORDER:
        need = N ** 4 // 8
        raise BudgetError(f"N={N} exceeds the exact bivariate budget (N <= {MAX_BIVARIATE_ORDER}); "
                          f"it would store about {need:,} rational coefficients")
    F, Tq = _bi_solution(family, N)
    out = []
    fact = 1
    for n in range(1, N + 1):
        fact *= n
        J = InvPolynomial(n, {k: v * fact for k, v in sorted(Tq.rows[n].items())})
        Jh = InvPolynomial(n, {k: v * fact for k, v in sorted(F.rows[n].items())}, root1=True)
        out.append((J, Jh))
    return out


def inversion_polynomial(family: DegreeWeightSequence, n: int, root1: bool = False) -> InvPolynomial:
    J, Jh = inversion_polynomials(family, n)[n - 1]
    return Jh if root1 else J


def increasing_tree_count(family: DegreeWeightSequence, n: int) -> Fraction:
    """Total weight of increasing trees (labels grow away from the root)."""
    return inversion_polynomial(family, n, root1=True).coeffs.get(0, Fraction(0))


def mallows_riordan_residual(N: int) -> Fraction:
    """Largest coefficient deviation in the Mallows-Riordan exponential identity for unordered trees.

    Left side: ``exp(sum_n (q-1)^(n-1) Jhat_n(q) t^n / n!)``; right side:
    ``sum_n q^C(n,2) t^n / n!``; both compared through ``t^N``.
    """
    polys = inversion_polynomials(builtin("unordered"), N)
    rows: list[dict] = [{}]
    for n, (_, Jh) in enumerate(polys, start=1):
        row = dict(Jh.coeffs)
        for _ in range(n - 1):  # multiply by (q - 1)
            shifted: dict = {}
            for k, v in row.items():
                shifted[k + 1] = shifted.get(k + 1, 0) + v
                shifted[k] = shifted.get(k, 0) - v
            row = {k: v for k, v in shifted.items() if v}
        rows.append({k: v / math.factorial(n) for k, v in row.items()})
    lhs = BiSeries(tuple(rows)).exp()
    resid = Fraction(0)
    for n in range(N + 1):
        rhs = {math.comb(n, 2): Fraction(1, math.factorial(n))}
        keys = set(lhs.rows[n]) | set(rhs)
        for k in keys:
            resid = max(resid, abs(lhs.rows[n].get(k, 0) - rhs.get(k, 0)))
    return resid


def commutation_sides(j: int, k: int, n: int) -> tuple[Fraction, Fraction]:
    """Both sides of ``V D_q^j H = sum_s C(j,s)/(s+1) Z^(s+1) D_z^(s+1) V D_q^(j-s)`` on ``q^k z^n``."""
    G = BiSeries(tuple({k: Fraction(1)} if m == n else {} for m in range(n + 1)))
    left = G.H().VDq(j)[n]
    right = Fraction(0)
    for s in range(j + 1):
        right += Fraction(math.comb(j, s), s + 1) * G.VDq(j - s).zd(s + 1)[n]
    return left, right


# -- pumping ------------------------------------------------------------------

def _partitions_B(r: int) -> Iterator[tuple]:
    """``(k_1..k_{r-1})`` with ``sum m k_m = r`` (empty for ``r = 1``)."""
    if r < 2:
        return

    def rec(m: int, remaining: int, acc: list):
        if m == r:
            if remaining == 0:
                yield tuple(acc)
            return
        for km in range(remaining // m + 1):
            yield from rec(m + 1, remaining - km * m, acc + [km])

    yield from rec(1, r, [])


def _resolve_backend(backend: str, N: int) -> str:
    if backend == "auto":
        return FLOAT if N > FLOAT_THRESHOLD else EXACT
    if backend not in (EXACT, FLOAT):
        raise ValueError(f"unknown backend {backend!r}")
    return backend


@dataclass(frozen=True)
class PumpedSeries:
    """``t = T(s z)`` and ``g[r] = z f_r'(z)`` (at the same scale) for ``r = 0..r_max``."""

    tree: UniSeries
    g: tuple
    scale: object


def pumped_series(family: DegreeWeightSequence, N: int, r_max: int, backend: str = EXACT) -> PumpedSeries:
    if r_max > MAX_PUMP_R:
        raise ValueError(f"pumped moments are implemented for r <= {MAX_PUMP_R}")
    backend = _resolve_backend(backend, N)
    scale = coerce(solve_constants(family).rho, FLOAT) if backend == FLOAT else 1
    t = solve_tree_series(family, N, backend, scale)
    zser = UniSeries.variable(N, backend, scale)
    phis = [phi_of(family, t, m) for m in range(r_max + 1)]
    denom = (1 - zser * phis[1]).reciprocal()
    one = coerce(1, backend)
    # f_0 has coefficients t_n / n; z f_0' = t
    f = [UniSeries(tuple([one * 0] + [t[n] / n for n in range(1, N + 1)]))]
    g = [t]

    def vdh(m: int) -> UniSeries:
        # V D_q^m H F expressed through f_0..f_m
        acc = UniSeries.zero(N, backend)
        for s in range(m + 1):
            acc = acc + f[m - s].zd(s + 1) * (Fraction(math.comb(m, s), s + 1) if backend == EXACT
                                              else math.comb(m, s) / (s + 1))
        return acc

    for r in range(1, r_max + 1):
        inner = UniSeries.zero(N, backend)
        for tt in range(1, r + 1):
            c = Fraction(math.comb(r, tt), tt + 1)
            inner = inner + f[r - tt].zd(tt + 1) * (c if backend == EXACT else float(c))
        total = phis[1] * inner
        blocks = {m: vdh(m) * (Fraction(1, math.factorial(m)) if backend == EXACT else 1 / math.factorial(m))
                  for m in range(1, r)}
        for ks in _partitions_B(r):
            coef = math.factorial(r)
            for km in ks:
                coef //= math.factorial(km)
            term = phis[sum(ks)] * coef
            for m, km in enumerate(ks, start=1):
                if km:
                    term = term * blocks[m] ** km
            total = total + term
        gr = zser * denom * total
        g.append(gr)
        f.append(UniSeries(tuple([one * 0] + [gr[n] / n for n in range(1, N + 1)])))
    return PumpedSeries(tree=t, g=tuple(g), scale=scale)


def pumped_factorial_moments(family: DegreeWeightSequence, N: int, r_max: int = 2,
                             backend: str = EXACT) -> list[MomentTable]:
    """Moment tables of the root-1 inversion count for ``n = 1..N`` (index ``n - 1``)."""
    ps = pumped_series(family, N, r_max, backend)
    out = []
    for n in range(1, N + 1):
        tn = ps.tree[n]
        if not tn:
            out.append(None)  # no trees of this size (n != 1 mod d)
            continue
        fac = [ps.g[r][n] / tn for r in range(r_max + 1)]
        out.append(MomentTable.from_factorial(n, fac))
    return out


def _power_sum(n: int, e: int) -> int:
    return sum(i ** e for i in range(n))


def transfer_moments(hat_table: MomentTable, n: int) -> MomentTable:
    """Moments of the all-root inversion count from the root-1 moments.

    Relabelling the root 1 -> j adds ``j - 1`` inversions and is a bijection, so
    ``E[I^r] = (1/n) sum_{i<n} E[(Ihat + i)^r]``.
    """
    raw_hat = hat_table.raw
    exact = isinstance(raw_hat[0], Fraction)
    out = []
    for r in range(len(raw_hat)):
        acc = raw_hat[0] * 0
        for p in range(r + 1):
            ps = _power_sum(n, r - p)
            w = Fraction(ps, n) if exact else ps / n
            acc += math.comb(r, p) * raw_hat[p] * w
        out.append(acc)
    return MomentTable.from_raw(n, out)


def global_moments(family: DegreeWeightSequence, n: int, r_max: int = 2, backend: str = "auto") -> MomentTable:
    """Moment table of the total inversion count ``I_n``."""
    hat = pumped_factorial_moments(family, n, r_max, backend)[n - 1]
    if hat is None:
        raise ValueError(f"{family.name} has no trees of size {n}")
    return transfer_moments(hat, n)
