"""Truncated formal power series in one variable (``UniSeries``) and in two
variables with per-order sparse rows (``BiSeries``).

Coefficients are either ``fractions.Fraction`` (exact backend) or ``float``
(float backend, roughly 1e-15 relative error per operation).  The truncation
order travels with each value: a ``UniSeries`` of order ``N`` stands for
``sum_{n<=N} a_n z^n + O(z^{N+1})`` and every binary operation returns a
result of order ``min`` of its operands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Callable, Iterable, Sequence

import numpy as np

if TYPE_CHECKING:
    from .family import DegreeWeightSequence

EXACT = "exact"
FLOAT = "float"
BACKENDS = (EXACT, FLOAT)


def _check_backend(backend: str) -> None:
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")


def coerce(x, backend: str):
    """Convert a number to the coefficient type of ``backend``."""
    if backend == FLOAT:
        return float(x)
    if isinstance(x, float):
        return Fraction(x)
    return Fraction(x)


def _conv(a: Sequence, b: Sequence, N: int, exact: bool) -> list:
    if not exact:
        out = np.convolve(np.asarray(a[: N + 1], dtype=float), np.asarray(b[: N + 1], dtype=float))
        res = out[: N + 1].tolist()
        res.extend([0.0] * (N + 1 - len(res)))
        return res
    zero = Fraction(0)
    res = [zero] * (N + 1)
    # skip zero entries; tree series are sparse at low order
    nz_b = [(j, bj) for j, bj in enumerate(b[: N + 1]) if bj]
    for i, ai in enumerate(a[: N + 1]):
        if not ai:
            continue
        lim = N - i
        for j, bj in nz_b:
            if j > lim:
                break
            res[i + j] += ai * bj
    return res


@dataclass(frozen=True)
class UniSeries:
    """Truncated univariate power series ``a_0 + a_1 z + ... + a_N z^N + O(z^{N+1})``."""

    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) == 0:
            raise ValueError("a series needs at least one coefficient")
        if not isinstance(self.coeffs, tuple):
            object.__setattr__(self, "coeffs", tuple(self.coeffs))

    # -- construction -----------------------------------------------------
    @classmethod
    def from_list(cls, coeffs: Iterable, backend: str = EXACT) -> "UniSeries":
        _check_backend(backend)
        return cls(tuple(coerce(c, backend) for c in coeffs))

    @classmethod
    def zero(cls, N: int, backend: str = EXACT) -> "UniSeries":
        return cls.from_list([0] * (N + 1), backend)

    @classmethod
    def constant(cls, c, N: int, backend: str = EXACT) -> "UniSeries":
        return cls.from_list([c] + [0] * N, backend)

    @classmethod
    def variable(cls, N: int, backend: str = EXACT, scale=1) -> "UniSeries":
        """The series ``scale * z`` truncated at order ``N``."""
        coeffs = [0] * (N + 1)
        if N >= 1:
            coeffs[1] = scale
        return cls.from_list(coeffs, backend)

    # -- basic properties --------------------------------------------------
    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def backend(self) -> str:
        return FLOAT if isinstance(self.coeffs[0], float) else EXACT

    @property
    def exact(self) -> bool:
        return self.backend == EXACT

    def __getitem__(self, n: int):
        return self.coeffs[n]

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def truncate(self, N: int) -> "UniSeries":
        if N > self.order:
            raise ValueError(f"cannot raise truncation order {self.order} to {N}")
        return UniSeries(self.coeffs[: N + 1])

    def pad(self, N: int) -> "UniSeries":
        """Same coefficients, truncation order raised to ``N`` by zero padding."""
        zero = self.coeffs[0] * 0
        return UniSeries(self.coeffs + (zero,) * (N - self.order))

    def to_float(self) -> "UniSeries":
        return UniSeries(tuple(float(c) for c in self.coeffs))

    def _lift(self, other) -> "UniSeries":
        if isinstance(other, UniSeries):
            return other
        return UniSeries.constant(coerce(other, self.backend), self.order, self.backend)

    # -- ring operations ---------------------------------------------------
    def __add__(self, other) -> "UniSeries":
        other = self._lift(other)
        N = min(self.order, other.order)
        return UniSeries(tuple(self.coeffs[i] + other.coeffs[i] for i in range(N + 1)))

    __radd__ = __add__

    def __neg__(self) -> "UniSeries":
        return UniSeries(tuple(-c for c in self.coeffs))

    def __sub__(self, other) -> "UniSeries":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "UniSeries":
        return self._lift(other) - self

    def __mul__(self, other) -> "UniSeries":
        if not isinstance(other, UniSeries):
            c = coerce(other, self.backend)
            return UniSeries(tuple(c * a for a in self.coeffs))
        N = min(self.order, other.order)
        return UniSeries(tuple(_conv(self.coeffs, other.coeffs, N, self.exact and other.exact)))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "UniSeries":
        if k < 0:
            return self.reciprocal() ** (-k)
        result = UniSeries.constant(1, self.order, self.backend)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # -- calculus ----------------------------------------------------------
    def derive(self) -> "UniSeries":
        """Formal derivative; the result has order ``N - 1``."""
        if self.order == 0:
            return UniSeries((self.coeffs[0] * 0,))
        return UniSeries(tuple(n * self.coeffs[n] for n in range(1, self.order + 1)))

    def integrate(self) -> "UniSeries":
        """Antiderivative with zero constant term; the result has order ``N + 1``."""
        zero = self.coeffs[0] * 0
        rest = [c / n for n, c in enumerate(self.coeffs, start=1)]
        return UniSeries((zero, *rest))

    def zd(self, k: int) -> "UniSeries":
        """The operator ``z^k D_z^k``: coefficient ``a_n`` becomes ``n^(k falling) a_n``."""
        out = []
        for n, c in enumerate(self.coeffs):
            f = 1
            for i in range(k):
                f *= n - i
            out.append(c * f)
        return UniSeries(tuple(out))

    def shift(self, k: int = 1) -> "UniSeries":
        """Multiply by ``z^k`` keeping the truncation order."""
        zero = self.coeffs[0] * 0
        return UniSeries(tuple([zero] * k + list(self.coeffs[: self.order + 1 - k]))[: self.order + 1])

    def reciprocal(self) -> "UniSeries":
        a = self.coeffs
        if not a[0]:
            raise ZeroDivisionError("reciprocal of a series with zero constant term")
        N = self.order
        inv0 = 1 / a[0]
        if not self.exact:
            arr = np.asarray(a, dtype=float)
            b = np.zeros(N + 1)
            b[0] = inv0
            for n in range(1, N + 1):
                b[n] = -inv0 * np.dot(arr[1 : n + 1], b[n - 1 :: -1][:n])
            return UniSeries(tuple(b.tolist()))
        b = [inv0]
        for n in range(1, N + 1):
            s = sum((a[k] * b[n - k] for k in range(1, n + 1) if a[k]), Fraction(0))
            b.append(-inv0 * s)
        return UniSeries(tuple(b))

    def __truediv__(self, other) -> "UniSeries":
        if isinstance(other, UniSeries):
            return self * other.reciprocal()
        return self * (1 / coerce(other, self.backend))

    def log1m(self) -> "UniSeries":
        """``log(1 - s)`` for a series with zero constant term."""
        if self.coeffs[0]:
            raise ValueError("log1m needs a series with zero constant term")
        return -(self.derive() * (1 - self).reciprocal().truncate(self.order - 1)).integrate() \
            if self.order else self * 0

    def exp(self) -> "UniSeries":
        """``exp`` of a series with zero constant term, via ``(exp g)' = g' exp g``."""
        g = self.coeffs
        if g[0]:
            raise ValueError("exp needs a series with zero constant term")
        N = self.order
        one = coerce(1, self.backend)
        e = [one]
        for n in range(1, N + 1):
            s = sum((k * g[k] * e[n - k] for k in range(1, n + 1) if g[k]), one * 0)
            e.append(s / n)
        return UniSeries(tuple(e))


def compose(outer: UniSeries, inner: UniSeries) -> UniSeries:
    """``outer(inner(z))`` by Horner evaluation in the inner series.

    ``inner`` must have zero constant term; the result has the order of ``inner``
    (terms of ``outer`` beyond that order cannot contribute).
    """
    if inner.coeffs[0]:
        raise ValueError("compose: inner series must have zero constant term")
    N = inner.order
    exact = outer.exact and inner.exact
    backend = EXACT if exact else FLOAT
    a = [coerce(c, backend) for c in outer.coeffs[: N + 1]]
    inner_c = inner.coeffs if exact else tuple(float(c) for c in inner.coeffs)
    acc = [a[-1]] + [a[-1] * 0] * N
    for c in reversed(a[:-1]):
        acc = _conv(acc, inner_c, N, exact)
        acc[0] += c
    return UniSeries(tuple(acc))


def derivative_weights(weights: Sequence, m: int) -> list:
    """Coefficients of ``phi^(m)`` given the coefficients of ``phi``."""
    out = []
    for ell in range(len(weights) - m):
        f = 1
        for i in range(1, m + 1):
            f *= ell + i
        out.append(weights[ell + m] * f)
    return out


def phi_of(family: "DegreeWeightSequence", t: UniSeries, m: int = 0) -> UniSeries:
    """``phi^(m)(t(z))`` for a series ``t`` with zero constant term.

    Families with a closed-form series rule avoid the cubic Horner composition.
    """
    if family.phi_series is not None:
        return family.phi_series(t, m)
    N = t.order
    w = [coerce(x, t.backend) for x in family.weights(N + m)]
    return compose(UniSeries(tuple(derivative_weights(w, m))), t)


def solve_tree_series(family: "DegreeWeightSequence", N: int, backend: str = EXACT, scale=1) -> UniSeries:
    """The tree function ``t`` with ``t = s z phi(t)`` through order ``N``.

    With ``scale = s = 1`` this is the exponential generating function of
    total weights, ``n! [z^n] t = T_n``.  Other scales give ``T(s z)``,
    which keeps float coefficients of order one when ``s`` is the radius
    of convergence.  Newton iteration doubles the number of correct
    coefficients per step.
    """
    _check_backend(backend)
    if N < 1:
        raise ValueError("order N must be >= 1")
    w0 = coerce(family.weight(0), backend)
    if w0 <= 0:
        raise ValueError("phi_0 must be positive")
    s = coerce(scale, backend)
    t = UniSeries.variable(1, backend, s * w0)
    p = 1
    # a Newton step takes a series correct through order p to one correct through 2p+1
    polish = 2 if backend == FLOAT else 0
    while p < N or polish:
        if p == N:
            polish -= 1
        p = min(2 * p + 1, N)
        t = t.pad(p)
        zser = UniSeries.variable(p, backend, s)
        resid = t - zser * phi_of(family, t, 0)
        jac = 1 - zser * phi_of(family, t, 1)
        t = t - resid * jac.reciprocal()
    return t


# ---------------------------------------------------------------------------
# Bivariate series in (z, q) with sparse rows.
# ---------------------------------------------------------------------------

Row = dict  # k -> coefficient


def _row_mul(a: Row, b: Row) -> Row:
    out: Row = {}
    for i, x in a.items():
        for j, y in b.items():
            out[i + j] = out.get(i + j, 0) + x * y
    return {k: v for k, v in out.items() if v}


def _row_add(a: Row, b: Row, sign: int = 1) -> Row:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + sign * v
    return {k: v for k, v in out.items() if v}


def _row_scale(a: Row, c) -> Row:
    if not c:
        return {}
    return {k: v * c for k, v in a.items()}


@dataclass(frozen=True)
class BiSeries:
    """Truncated series ``sum_{n<=N} sum_k a_{n,k} z^n q^k`` (exact coefficients).

    ``rows[n]`` is a dict ``k -> a_{n,k}`` holding the (finite) polynomial in
    ``q`` multiplying ``z^n``.
    """

    rows: tuple

    def __post_init__(self):
        if not isinstance(self.rows, tuple):
            object.__setattr__(self, "rows", tuple(self.rows))

    @classmethod
    def zero(cls, N: int) -> "BiSeries":
        return cls(tuple({} for _ in range(N + 1)))

    @classmethod
    def from_uni(cls, s: UniSeries) -> "BiSeries":
        return cls(tuple({0: c} if c else {} for c in s.coeffs))

    @property
    def order(self) -> int:
        return len(self.rows) - 1

    def coeff(self, n: int, k: int):
        return self.rows[n].get(k, Fraction(0))

    def __add__(self, other: "BiSeries") -> "BiSeries":
        N = min(self.order, other.order)
        return BiSeries(tuple(_row_add(self.rows[n], other.rows[n]) for n in range(N + 1)))

    def __sub__(self, other: "BiSeries") -> "BiSeries":
        N = min(self.order, other.order)
        return BiSeries(tuple(_row_add(self.rows[n], other.rows[n], -1) for n in range(N + 1)))

    def __mul__(self, other) -> "BiSeries":
        if not isinstance(other, BiSeries):
            return BiSeries(tuple(_row_scale(r, other) for r in self.rows))
        N = min(self.order, other.order)
        out = []
        for n in range(N + 1):
            acc: Row = {}
            for i in range(n + 1):
                if self.rows[i] and other.rows[n - i]:
                    acc = _row_add(acc, _row_mul(self.rows[i], other.rows[n - i]))
            out.append(acc)
        return BiSeries(tuple(out))

    __rmul__ = __mul__

    def exp(self) -> "BiSeries":
        """``exp`` of a series whose ``z^0`` row vanishes."""
        if self.rows[0]:
            raise ValueError("exp needs a vanishing z^0 row")
        N = self.order
        e = [{0: Fraction(1)}]
        for n in range(1, N + 1):
            acc: Row = {}
            for k in range(1, n + 1):
                if self.rows[k] and e[n - k]:
                    acc = _row_add(acc, _row_scale(_row_mul(self.rows[k], e[n - k]), k))
            e.append(_row_scale(acc, Fraction(1, n)))
        return BiSeries(tuple(e))

    def derive_z(self) -> "BiSeries":
        return BiSeries(tuple(_row_scale(self.rows[n], n) for n in range(1, self.order + 1)))

    def H(self) -> "BiSeries":
        """``(G(z,q) - G(qz,q)) / (1-q)``: row ``n`` is multiplied by ``1 + q + ... + q^(n-1)``."""
        return BiSeries(tuple(_row_mul(r, {i: 1 for i in range(n)}) for n, r in enumerate(self.rows)))

    def V(self) -> UniSeries:
        """Evaluate at ``q = 1``."""
        return UniSeries(tuple(sum(r.values(), Fraction(0)) for r in self.rows))

    def VDq(self, j: int) -> UniSeries:
        """``j``-th ``q``-derivative evaluated at ``q = 1``."""
        out = []
        for r in self.rows:
            s = Fraction(0)
            for k, v in r.items():
                s += v * math.perm(k, j)
            out.append(s)
        return UniSeries(tuple(out))

    def map_rows(self, fn: Callable[[int, Row], Row]) -> "BiSeries":
        return BiSeries(tuple(fn(n, r) for n, r in enumerate(self.rows)))


def bi_solve_F(family: "DegreeWeightSequence", N: int) -> tuple[BiSeries, BiSeries]:
    """Solve ``D_z F = phi(H F)`` and return ``(F, Tq)`` with ``Tq = H F``.

    Row ``n`` of ``F`` times ``n!`` holds the root-label-1 weights by number of
    inversions; row ``n`` of ``Tq`` times ``n!`` the weights over all trees.
    Row ``n+1`` of ``F`` depends only on rows ``<= n`` of ``Tq``; the powers
    ``Tq^l`` are extended one row at a time so that each row is computed once.
    """
    if N < 1:
        raise ValueError("order N must be >= 1")
    w = [Fraction(x) for x in family.weights(N)]
    F_rows: list[Row] = [{}]
    T_rows: list[Row] = [{}]
    # powers[l][n] = [z^n] Tq^l, only rows n >= l are non-zero
    powers: list[list[Row]] = [[{0: Fraction(1)}]]
    for n in range(0, N):
        # extend powers to row n using T rows 1..n
        if n > 0:
            powers[0].append({})
        for ell in range(1, n + 1):
            if len(powers) <= ell:
                powers.append([{} for _ in range(n)])
            acc: Row = {}
            prev = powers[ell - 1]
            for i in range(1, n - ell + 2):
                if T_rows[i] and prev[n - i]:
                    acc = _row_add(acc, _row_mul(T_rows[i], prev[n - i]))
            powers[ell].append(acc)
        phi_row: Row = {}
        for ell in range(0, n + 1):
            if w[ell] and powers[ell][n]:
                phi_row = _row_add(phi_row, _row_scale(powers[ell][n], w[ell]))
        a = _row_scale(phi_row, Fraction(1, n + 1))
        F_rows.append(a)
        T_rows.append(_row_mul(a, {i: 1 for i in range(n + 1)}))
    return BiSeries(tuple(F_rows)), BiSeries(tuple(T_rows))
