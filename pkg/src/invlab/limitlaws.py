"""Reference limit laws: Airy (by its moments), Rayleigh, and the discrete Y_gamma law."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from scipy.integrate import quad

SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class AiryMoments:
    C: tuple   # exact C_1..C_r
    mu: tuple  # mu_1..mu_r

    def __getitem__(self, r: int) -> float:
        return self.mu[r - 1]


def airy_moments(r_max: int) -> AiryMoments:
    """``C_r`` from ``2 C_r = (3r-4) r C_{r-1} + sum_j C(r,j) C_j C_{r-j}``, ``C_1 = 1/2``;
    ``mu_r = 2 sqrt(pi) C_r / Gamma((3r-1)/2)``."""
    if r_max < 1:
        raise ValueError("r_max must be >= 1")
    C = [None, Fraction(1, 2)]
    for r in range(2, r_max + 1):
        s = (3 * r - 4) * r * C[r - 1] + sum(math.comb(r, j) * C[j] * C[r - j] for j in range(1, r))
        C.append(s / 2)
    mu = tuple(2 * SQRT_PI * float(C[r]) / math.gamma((3 * r - 1) / 2) for r in range(1, r_max + 1))
    return AiryMoments(tuple(C[1:]), mu)


def rayleigh_pdf(sigma: float, x: float) -> float:
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if x <= 0:
        return 0.0
    return x / sigma ** 2 * math.exp(-x * x / (2 * sigma ** 2))


def rayleigh_moment(sigma: float, r: int) -> float:
    """``sigma^r 2^(r/2) Gamma(1 + r/2)``."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    return sigma ** r * 2 ** (r / 2) * math.gamma((r + 2) / 2)


def _ygamma_upper(gamma: float, k: int) -> float:
    # integrand peaks near sqrt(k+1); beyond peak + 12 the Gaussian factor is < e^-72
    return max(10.0, gamma + 12.0, math.sqrt(k + 1) + 12.0)


def ygamma_pmf(gamma: float, k: int) -> float:
    """``P{Y_gamma = k} = gamma^k / k! * int_0^inf x^(k+1) exp(-x^2/2 - gamma x) dx``."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if k < 0:
        return 0.0
    logc = k * math.log(gamma) - math.lgamma(k + 1)

    def integrand(x: float) -> float:
        if x <= 0:
            return 0.0
        return math.exp(logc + (k + 1) * math.log(x) - 0.5 * x * x - gamma * x)

    val, _ = quad(integrand, 0.0, _ygamma_upper(gamma, k), epsabs=1e-15, epsrel=1e-13, limit=200)
    return val


def ygamma_pmf_table(gamma: float, tail: float = 1e-16, k_max: int = 10_000) -> list[float]:
    """``P{Y_gamma = k}`` for ``k = 0..K``, with ``K`` chosen where the terms have decayed below ``tail``."""
    mean = ygamma_factorial_moment(gamma, 1)
    out = []
    for k in range(k_max):
        p = ygamma_pmf(gamma, k)
        out.append(p)
        if k > mean and p < tail:
            break
    return out


def ygamma_factorial_moment(gamma: float, r: int) -> float:
    """``E[Y_gamma^(r falling)] = gamma^r 2^(r/2) Gamma(r/2 + 1)``."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if r < 0:
        raise ValueError("r must be >= 0")
    return gamma ** r * 2 ** (r / 2) * math.gamma((r + 2) / 2)
