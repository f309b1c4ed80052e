"""Tree families given by degree-weight sequences, and their analytic constants."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache, reduce
from pathlib import Path
from typing import Callable, Optional, Sequence

from .errors import FamilyError, NotAdmissibleError

BUILTIN_NAMES = ("binary", "ordered", "unordered", "cyclic")


@dataclass(frozen=True, eq=False)
class DegreeWeightSequence:
    """A simply generated family: node of out-degree ``l`` has weight ``phi_l``.

    ``weight_rule`` maps ``l`` to an exact rational.  ``phi_closed`` optionally
    evaluates ``phi^(m)(t)`` in closed form; otherwise finite weight lists are
    evaluated as polynomials and infinite ones by partial sums (see
    :meth:`phi`).  ``phi_series`` optionally computes ``phi^(m)(t(z))`` for a
    power series ``t``.  ``max_degree`` is set for finite weight lists.
    """

    name: str
    weight_rule: Callable[[int], Fraction] = field(repr=False)
    radius_hint: float = math.inf
    phi_closed: Optional[Callable[[float, int], float]] = field(default=None, repr=False)
    phi_series: Optional[Callable] = field(default=None, repr=False)
    max_degree: Optional[int] = None
    support_period: Optional[int] = None

    def weight(self, ell: int) -> Fraction:
        if ell < 0:
            return Fraction(0)
        if self.max_degree is not None and ell > self.max_degree:
            return Fraction(0)
        return Fraction(self.weight_rule(ell))

    def weights(self, N: int) -> list[Fraction]:
        """``[phi_0, ..., phi_N]``."""
        return [self.weight(ell) for ell in range(N + 1)]

    @cached_property
    def d(self) -> int:
        """gcd of the degrees carrying positive weight."""
        if self.support_period is not None:
            return self.support_period
        top = 63 if self.max_degree is None else min(63, self.max_degree)
        support = [ell for ell in range(top + 1) if self.weight(ell) > 0]
        return reduce(math.gcd, support, 0)

    def phi(self, t: float, m: int = 0) -> float:
        """``phi^(m)(t)`` as a float."""
        if self.phi_closed is not None:
            return self.phi_closed(t, m)
        if self.max_degree is not None:
            total = 0.0
            for ell in range(self.max_degree, m - 1, -1):
                total = total * t + float(self.weight(ell)) * math.perm(ell, m)
            return total
        return self._phi_partial_sum(t, m)

    def _phi_partial_sum(self, t: float, m: int) -> float:
        R = self.radius_hint
        if not math.isfinite(R):
            ratio = 0.5
        else:
            if not 0 <= t < R:
                raise FamilyError(f"{self.name}: phi({t}) diverges, radius_hint is {R}")
            ratio = t / R
        total = 0.0
        for ell in range(m, 200_000):
            term = float(self.weight(ell)) * math.perm(ell, m) * t ** (ell - m)
            total += term
            # geometric tail bound once terms shrink
            if ell > m + 8 and abs(term) * (ell + 1) / (1 - ratio) <= 1e-17 * abs(total):
                return total
        raise FamilyError(f"{self.name}: partial sums of phi^({m}) did not converge at t={t} (radius_hint={R})")

    # -- construction ----------------------------------------------------
    @classmethod
    def from_weights(cls, name: str, weights: Sequence, radius_hint: Optional[float] = None,
                     support_period: Optional[int] = None) -> "DegreeWeightSequence":
        ws = tuple(Fraction(w) for w in weights)
        if not ws or ws[0] <= 0:
            raise FamilyError("phi_0 must be positive")
        if any(w < 0 for w in ws):
            raise FamilyError("weights must be non-negative")
        return cls(name=name, weight_rule=ws.__getitem__, max_degree=len(ws) - 1,
                   radius_hint=math.inf if radius_hint is None else float(radius_hint),
                   support_period=support_period)

    @classmethod
    def from_json(cls, path) -> "DegreeWeightSequence":
        """Read ``{"name": ..., "weights": ["1", "1/2", ...], "radius_hint": ...}``."""
        data = json.loads(Path(path).read_text())
        try:
            weights = [Fraction(str(w)) for w in data["weights"]]
        except (KeyError, ValueError, ZeroDivisionError) as exc:
            raise FamilyError(f"{path}: bad weights field ({exc})") from exc
        return cls.from_weights(data.get("name", Path(path).stem), weights,
                                radius_hint=data.get("radius_hint"),
                                support_period=data.get("support_period"))

    def to_json(self, N: int) -> dict:
        out = {"name": self.name, "weights": [str(w) for w in self.weights(N)]}
        if math.isfinite(self.radius_hint):
            out["radius_hint"] = self.radius_hint
        return out


def _binary_phi(t: float, m: int) -> float:
    return ((1 + t) ** 2, 2 * (1 + t), 2.0)[m] if m <= 2 else 0.0


def _ordered_phi(t: float, m: int) -> float:
    return math.factorial(m) / (1 - t) ** (m + 1)


def _unordered_phi(t: float, m: int) -> float:
    return math.exp(t)


def _cyclic_phi(t: float, m: int) -> float:
    if m == 0:
        return 1 - math.log1p(-t)
    return math.factorial(m - 1) / (1 - t) ** m


# phi^(m)(t(z)) for a power series t, in O(N^2) coefficient operations

def _binary_series(t, m):
    if m == 0:
        return (1 + t) * (1 + t)
    if m == 1:
        return 2 * (1 + t)
    return t * 0 + (2 if m == 2 else 0)


def _ordered_series(t, m):
    return (1 - t).reciprocal() ** (m + 1) * math.factorial(m)


def _unordered_series(t, m):
    return t.exp()


def _cyclic_series(t, m):
    if m == 0:
        return 1 - t.log1m()
    return (1 - t).reciprocal() ** m * math.factorial(m - 1)


_BUILTINS = {
    "binary": dict(weight_rule=lambda ell: Fraction(math.comb(2, ell)), phi_closed=_binary_phi,
                   phi_series=_binary_series, max_degree=2),
    "ordered": dict(weight_rule=lambda ell: Fraction(1), phi_closed=_ordered_phi, phi_series=_ordered_series,
                    radius_hint=1.0),
    "unordered": dict(weight_rule=lambda ell: Fraction(1, math.factorial(ell)), phi_closed=_unordered_phi,
                      phi_series=_unordered_series),
    "cyclic": dict(weight_rule=lambda ell: Fraction(1, ell) if ell else Fraction(1), phi_closed=_cyclic_phi,
                   phi_series=_cyclic_series, radius_hint=1.0),
}
_builtin_cache: dict[str, DegreeWeightSequence] = {}


def builtin(name: str) -> DegreeWeightSequence:
    """One of ``binary``, ``ordered``, ``unordered``, ``cyclic``."""
    if name not in _BUILTINS:
        raise FamilyError(f"unknown family {name!r}; valid names: {', '.join(BUILTIN_NAMES)}")
    if name not in _builtin_cache:
        _builtin_cache[name] = DegreeWeightSequence(name=name, **_BUILTINS[name])
    return _builtin_cache[name]


def resolve(spec: str) -> DegreeWeightSequence:
    """A built-in name, or a path to a JSON family file."""
    if spec in _BUILTINS:
        return builtin(spec)
    p = Path(spec)
    if p.suffix == ".json" or p.exists():
        if not p.exists():
            raise FamilyError(f"family file {spec} not found")
        return DegreeWeightSequence.from_json(p)
    return builtin(spec)


@dataclass(frozen=True)
class FamilyConstants:
    tau: float
    rho: float
    c_phi: float
    sigma: float
    d: int
    phi_tau: float
    phi2_tau: float
    residual: float

    def as_dict(self) -> dict:
        return {"tau": self.tau, "rho": self.rho, "c_phi": self.c_phi, "sigma": self.sigma, "d": self.d,
                "residual": self.residual}


def _scan_grid(R: float) -> list[float]:
    if math.isfinite(R):
        grid = [R * 2.0 ** (k - 40) for k in range(40)]
        grid += [R * (1 - 2.0 ** -k) for k in range(2, 53)]
    else:
        grid = [2.0 ** (k - 40) for k in range(81)]
    return grid


@lru_cache(maxsize=None)
def solve_constants(family: DegreeWeightSequence) -> FamilyConstants:
    """tau (minimal positive root of ``t phi'(t) = phi(t)``), rho, c_phi, sigma and d."""
    R = family.radius_hint
    if family.max_degree is not None and family.max_degree < 2:
        raise NotAdmissibleError(f"{family.name}: family not admissible (no weight of degree >= 2)")

    def g(t: float) -> float:
        return t * family.phi(t, 1) - family.phi(t, 0)

    lo = 0.0
    hi = None
    for t in _scan_grid(R):
        if g(t) >= 0:
            hi = t
            break
        lo = t
    if hi is None:
        raise NotAdmissibleError(f"{family.name}: family not admissible (t phi'(t) - phi(t) has no sign change "
                                 f"on (0, {R}))")
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if g(mid) >= 0:
            hi = mid
        else:
            lo = mid
    tau = hi if g(hi) == 0 else 0.5 * (lo + hi)
    for _ in range(5):
        slope = tau * family.phi(tau, 2)
        if slope == 0:
            break
        step = g(tau) / slope
        if not math.isfinite(step):
            break
        cand = tau - step
        if lo <= cand <= hi:
            tau = cand
    phi0 = family.phi(tau, 0)
    phi2 = family.phi(tau, 2)
    residual = abs(g(tau))
    if residual > 1e-12 * phi0:
        raise NotAdmissibleError(f"{family.name}: root refinement failed (residual {residual:g})")
    rho = tau / phi0
    sigma = 1 / math.sqrt(rho * tau * phi2)
    c_phi = 1 / math.sqrt(8 * rho * tau * phi2)
    consts = FamilyConstants(tau=tau, rho=rho, c_phi=c_phi, sigma=sigma, d=family.d,
                             phi_tau=phi0, phi2_tau=phi2, residual=residual)
    return consts


def gamma_for(constants: FamilyConstants, alpha: float) -> float:
    """Parameter of the discrete limit law when ``n - j ~ alpha sqrt(n)``."""
    if alpha < 0:
        raise ValueError("alpha must be positive")
    return alpha * constants.sigma


def tree_coefficient_asymptotic(constants: FamilyConstants, n: int) -> float:
    """Leading term of ``[z^n] T(z)`` (valid for ``n = 1 mod d``), as ``log``-safe float."""
    c = constants
    log_val = (math.log(c.d) + 0.5 * math.log(c.phi_tau / (2 * math.pi * c.phi2_tau))
               - n * math.log(c.rho) - 1.5 * math.log(n))
    return math.exp(log_val)
