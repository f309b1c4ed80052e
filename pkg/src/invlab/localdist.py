"""Distribution of the number of inversions induced by one label.

``I_{n,j}`` counts ancestors of node ``j`` with a larger label.  The generic
route expands ``N(z,u,q) = phi(T(z+u)) / (1 - (z+uq) phi'(T(z+u)))`` as a
geometric series and reduces every coefficient to a univariate one,
``[z^p] phi(T) phi'(T)^m``.  Closed forms for ordered and unordered trees are
implemented separately and serve as an independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .family import DegreeWeightSequence, FamilyConstants, solve_constants
from .series import EXACT, FLOAT, UniSeries, phi_of, solve_tree_series


@dataclass(frozen=True)
class Pmf:
    """``probs[k] = P{X = k}`` for ``k = 0..len(probs)-1``."""

    probs: tuple
    family: str = ""
    n: int = 0
    j: int = 0
    meta: dict = field(default_factory=dict, compare=False)

    def __getitem__(self, k: int):
        if 0 <= k < len(self.probs):
            return self.probs[k]
        return self.probs[0] * 0

    def __len__(self):
        return len(self.probs)

    def total(self):
        return sum(self.probs, self.probs[0] * 0)

    def factorial_moment(self, r: int):
        return sum((p * math.perm(k, r) for k, p in enumerate(self.probs)), self.probs[0] * 0)

    def as_json(self) -> dict:
        fmt = str if isinstance(self.probs[0], Fraction) else float
        return {"family": self.family, "n": self.n, "j": self.j,
                "pmf": {str(k): fmt(p) for k, p in enumerate(self.probs)}}


def _logcomb(a: int, b: int) -> float:
    return math.lgamma(a + 1) - math.lgamma(b + 1) - math.lgamma(a - b + 1)


def _comb(a: int, b: int) -> int:
    return math.comb(a, b) if 0 <= b <= a else 0


@lru_cache(maxsize=16)
def _tree_data(family: DegreeWeightSequence, N: int, backend: str):
    """``t``, ``phi(T)``, ``phi'(T)`` through order ``N``; float series are taken at scale rho."""
    scale = solve_constants(family).rho if backend == FLOAT else 1
    t = solve_tree_series(family, N, backend, scale)
    return t, phi_of(family, t, 0), phi_of(family, t, 1), scale


@lru_cache(maxsize=16)
def _power_table(family: DegreeWeightSequence, N: int, backend: str) -> tuple:
    """Row ``m`` holds ``[z^p] phi(T) phi'(T)^m`` for ``p = 0..N``; prefix products are reused."""
    _, phi0, phi1, _ = _tree_data(family, N, backend)
    rows = [phi0]
    for _ in range(N):
        rows.append(rows[-1] * phi1)
    return tuple(r.coeffs for r in rows)


def _check_nj(n: int, j: int) -> None:
    if not 1 <= j <= n:
        raise ValueError(f"need 1 <= j <= n, got n={n}, j={j}")


def local_distribution_table(family: DegreeWeightSequence, n: int, backend: str = EXACT) -> list[Pmf]:
    """Pmfs of ``I_{n,j}`` for ``j = 1..n`` (list index ``j - 1``)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    G = _power_table(family, max(n - 1, 1), backend)
    t, *_rest, scale = _tree_data(family, max(n, 1), backend)
    out = []
    if backend == EXACT:
        Tn = t[n] * math.factorial(n)
        if not Tn:
            raise ValueError(f"{family.name} has no trees of size {n}")
        for j in range(1, n + 1):
            pref = Fraction(math.factorial(j - 1) * math.factorial(n - j)) / Tn
            probs = []
            for k in range(n - j + 1):
                s = Fraction(0)
                for m in range(k, min(j - 1 + k, n - 1) + 1):
                    b = _comb(n - m - 1, j - 1 - m + k)
                    if b:
                        s += math.comb(m, k) * b * G[m][n - m - 1]
                probs.append(pref * s)
            out.append(Pmf(tuple(probs), family.name, n, j))
        return out
    # float: G and t are at scale rho, so c_{m,p} / t_n = (G~ / t~) * rho^(n-p)
    log_tn = math.log(t[n])
    log_rho = math.log(scale)
    for j in range(1, n + 1):
        base = -math.log(n) - _logcomb(n - 1, j - 1) - log_tn
        probs = []
        for k in range(n - j + 1):
            s = 0.0
            for m in range(k, min(j - 1 + k, n - 1) + 1):
                a = j - 1 - m + k
                c = G[m][n - m - 1]
                if a < 0 or a > n - m - 1 or c <= 0:
                    continue
                s += math.exp(base + _logcomb(m, k) + _logcomb(n - m - 1, a) + math.log(c) + (m + 1) * log_rho)
            probs.append(s)
        out.append(Pmf(tuple(probs), family.name, n, j))
    return out


def local_distribution(family: DegreeWeightSequence, n: int, j: int, backend: str = EXACT) -> Pmf:
    _check_nj(n, j)
    return local_distribution_table(family, n, backend)[j - 1]


def local_distribution_ordered(n: int, j: int, k: int) -> Fraction:
    """Closed form of ``P{I_{n,j} = k}`` for ordered trees; ``0`` outside ``0 <= k <= n-j``."""
    _check_nj(n, j)
    if not 0 <= k <= n - j:
        return Fraction(0)
    s = Fraction(0)
    for ell in range(n - j - k, n - k):
        s += Fraction(math.comb(ell, n - j - k) * math.comb(2 * n - 2, ell) * math.comb(n - ell - 1, k)
                      * (2 * n - 1 - 2 * ell), 2 * n - 1 - ell)
    return s / (math.comb(n - 1, j - 1) * math.comb(2 * (n - 1), n - 1))


def local_distribution_unordered(n: int, j: int, k: int) -> Fraction:
    """Closed form of ``P{I_{n,j} = k}`` for unordered (Cayley) trees."""
    _check_nj(n, j)
    if not 0 <= k <= n - j:
        return Fraction(0)
    s = Fraction(0)
    for ell in range(n - j - k, n - k):
        s += (math.comb(ell, n - j - k) * math.comb(n - ell - 1, k)
              * Fraction(n - ell) * Fraction(n) ** (ell - 1) / math.factorial(ell))
    return s * Fraction(math.factorial(j - 1) * math.factorial(n - j), n ** (n - 1))


@lru_cache(maxsize=32)
def _moment_series(family: DegreeWeightSequence, N: int, r: int, backend: str):
    scale = solve_constants(family).rho if backend == FLOAT else 1
    t = solve_tree_series(family, N, backend, scale)
    zphi = UniSeries.variable(N, backend, scale) * phi_of(family, t, 1)
    h = zphi ** r * t * (1 - zphi).reciprocal() ** (r + 1)
    return t, h


def local_factorial_moment(family: DegreeWeightSequence, n: int, j: int, r: int, backend: str = EXACT):
    """``E[I_{n,j}^(r falling)]`` from ``[z^n] (z phi'(T))^r T / (1 - z phi'(T))^(r+1)``."""
    _check_nj(n, j)
    if r < 0:
        raise ValueError("r must be >= 0")
    if r == 0:
        return Fraction(1) if backend == EXACT else 1.0
    if n - j < r:
        return Fraction(0) if backend == EXACT else 0.0
    t, h = _moment_series(family, n, r, backend)
    if backend == EXACT:
        # (j-1)! (n-j)! r! C(n-r-1, j-1) / n!  times  h_n / t_n
        pref = Fraction(math.factorial(j - 1) * math.factorial(n - j) * math.factorial(r)
                        * math.comb(n - r - 1, j - 1), math.factorial(n))
        return pref * h[n] / t[n]
    logpref = (math.lgamma(j) + math.lgamma(n - j + 1) + math.lgamma(r + 1)
               + _logcomb(n - r - 1, j - 1) - math.lgamma(n + 1))
    return math.exp(logpref) * h[n] / t[n]


def local_moment_asymptotic(constants: FamilyConstants, n: int, j: int, r: int) -> float:
    """Leading term ``Gamma(r/2+1) 2^(r/2) sigma^r (n-j)^(r falling) / n^(r/2)``."""
    if r < 0:
        raise ValueError("r must be >= 0")
    return (math.gamma((r + 2) / 2) * 2 ** (r / 2) * constants.sigma ** r
            * math.perm(n - j, r) / n ** (r / 2))


def local_gf_residual(family: DegreeWeightSequence, order: int) -> Fraction:
    """Check ``N = phi(T(z+u)) + (z + uq) phi'(T(z+u)) N`` through joint degree ``order`` in ``z, u``.

    ``N`` is assembled from :func:`local_distribution` via its definition
    ``sum P{I_{m+j,j}=k} T_{m+j} z^(j-1)/(j-1)! u^m/m! q^k``; the right side is
    expanded by plain trivariate multiplication.  Returns the largest
    coefficient deviation.
    """
    D = order
    t = solve_tree_series(family, D + 1, EXACT)
    Nc: dict = {}
    for total in range(1, D + 2):
        Tn = t[total] * math.factorial(total)
        if not Tn:
            continue
        for j, pmf in enumerate(local_distribution_table(family, total), start=1):
            m = total - j
            for k, p in enumerate(pmf.probs):
                if p:
                    Nc[(j - 1, m, k)] = p * Tn / (math.factorial(j - 1) * math.factorial(m))
    Nc = {key: v for key, v in Nc.items() if key[0] + key[1] <= D}

    def shifted(g: UniSeries) -> dict:
        # g(z+u) expanded by the binomial theorem
        out = {}
        for p in range(D + 1):
            if g[p]:
                for a in range(p + 1):
                    out[(a, p - a, 0)] = g[p] * math.comb(p, a)
        return out

    def mul(A: dict, B: dict) -> dict:
        out: dict = {}
        for (a1, b1, k1), x in A.items():
            for (a2, b2, k2), y in B.items():
                if a1 + a2 + b1 + b2 <= D:
                    key = (a1 + a2, b1 + b2, k1 + k2)
                    out[key] = out.get(key, 0) + x * y
        return out

    phi0 = shifted(phi_of(family, t.truncate(D), 0))
    phi1 = shifted(phi_of(family, t.truncate(D), 1))
    lin = {(1, 0, 0): Fraction(1), (0, 1, 1): Fraction(1)}
    rhs = dict(phi0)
    for key, v in mul(mul(lin, phi1), Nc).items():
        rhs[key] = rhs.get(key, 0) + v
    keys = set(rhs) | set(Nc)
    return max((abs(rhs.get(key, 0) - Nc.get(key, 0)) for key in keys), default=Fraction(0))
