"""Weight-proportional random trees and Monte Carlo checks of the limit laws.

Binary, ordered and unordered trees use exact bijective samplers (Remy,
cycle lemma, Pruefer); every other family goes through a critical
Galton-Watson process conditioned on its size.  Monte Carlo runs are split
into fixed-size blocks, block ``b`` drawing from sub-stream ``b``; each block
produces an integer histogram of the statistic and histograms are summed.
The result therefore does not depend on the number of threads.
"""

from __future__ import annotations

import math
import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Optional, Union

import numpy as np

from . import _kernels as K
from .enumeration import LabelledTree
from .errors import NotAdmissibleError, RejectionCapError
from .family import DegreeWeightSequence, FamilyConstants, builtin, gamma_for, solve_constants
from .invpoly import stirling2
from .limitlaws import airy_moments, rayleigh_moment, ygamma_factorial_moment, ygamma_pmf

REJECTION_CAP = 10 ** 6
MIN_REPS = 100
MODEL_BIAS = 0.05       # relative finite-size allowance on top of 3 standard errors
YGAMMA_ALPHA_MAX = 10.0  # (n - j)/sqrt(n) at or below this compares against Y_gamma
_BLOCK_CELLS = 1 << 21   # random numbers drawn per block, roughly


@dataclass(frozen=True)
class RngStream:
    """Named random stream: a Philox generator keyed by ``(seed, stream, *path)``."""

    seed: int
    stream: int = 0
    path: tuple = ()

    def __post_init__(self):
        for v in (self.seed, self.stream, *self.path):
            if not 0 <= int(v) < 2 ** 64:
                raise ValueError("seed and stream ids must be 64-bit unsigned integers")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream), *self.path))
        return np.random.Generator(np.random.Philox(ss))

    def child(self, k: int) -> "RngStream":
        return RngStream(self.seed, self.stream, (*self.path, int(k)))


RngLike = Union[RngStream, np.random.Generator]


def _gen(rng: RngLike) -> np.random.Generator:
    return rng.generator() if isinstance(rng, RngStream) else rng


# -- single trees -------------------------------------------------------------

_BIJECTIVE = {"binary": "remy", "ordered": "ballot", "unordered": "pruefer"}


def _method(family: DegreeWeightSequence) -> str:
    name = family.name
    if name in _BIJECTIVE and family is builtin(name):
        return _BIJECTIVE[name]
    return "gw"


@dataclass(frozen=True)
class _GW:
    prob: np.ndarray
    alias: np.ndarray


@lru_cache(maxsize=None)
def _gw_table(family: DegreeWeightSequence) -> _GW:
    """Vose alias table for ``p_l = phi_l tau^l / phi(tau)``, cut where the tail drops below 1e-15."""
    c = solve_constants(family)
    p = []
    acc = 0.0
    top = family.max_degree if family.max_degree is not None else 100_000
    for ell in range(top + 1):
        w = float(family.weight(ell)) * c.tau ** ell / c.phi_tau if family.weight(ell) else 0.0
        p.append(w)
        acc += w
        if 1 - acc < 1e-15 and ell >= 2:
            break
    p = np.array(p) / sum(p)
    Kn = len(p)
    scaled = p * Kn
    prob = np.zeros(Kn)
    alias = np.arange(Kn)
    small = [i for i in range(Kn) if scaled[i] < 1]
    large = [i for i in range(Kn) if scaled[i] >= 1]
    while small and large:
        s, g = small.pop(), large.pop()
        prob[s] = scaled[s]
        alias[s] = g
        scaled[g] -= 1 - scaled[s]
        (small if scaled[g] < 1 else large).append(g)
    for i in small + large:
        prob[i] = 1.0
    return _GW(prob, alias.astype(np.int64))


def _check_size(family: DegreeWeightSequence, n: int) -> None:
    if n < 1:
        raise ValueError("n must be >= 1")
    d = family.d
    if d > 1 and n % d != 1:
        raise NotAdmissibleError(f"{family.name} has no trees of size {n}: sizes must be 1 mod {d}")


def _gw_degrees(family: DegreeWeightSequence, n: int, gen: np.random.Generator, cap: int) -> np.ndarray:
    tab = _gw_table(family)
    deg = np.zeros(n, np.int64)
    attempts = 0
    batch = max(8 * n, 256)
    while attempts < cap:
        u = gen.random(batch)
        ok, _, used = K.gw_attempts(tab.prob, tab.alias, u, n, cap - attempts, deg)
        attempts += used
        if ok:
            return deg
        batch = min(2 * batch, max(8 * n, 1 << 20))
    raise RejectionCapError(f"{family.name}: no tree of size {n} after {cap} Galton-Watson attempts "
                            f"(check that n = 1 mod d, d = {family.d})")


def sample_parent(family: DegreeWeightSequence, n: int, rng: RngLike,
                  cap: int = REJECTION_CAP) -> tuple[np.ndarray, np.ndarray]:
    """One random tree as ``(parent_by_label, child_order)``.

    ``child_order`` lists labels in the order children are attached, giving
    the left-to-right order of siblings.
    """
    _check_size(family, n)
    gen = _gen(rng)
    method = _method(family)
    if method == "pruefer":
        seq = gen.integers(1, n + 1, size=max(n - 2, 0))
        root = int(gen.integers(1, n + 1))
        parent = K.pruefer_parent(seq, n, root)
        # an unordered tree stands for all orderings of its children, equally weighted
        return parent, gen.permutation(np.arange(1, n + 1))
    if method == "remy":
        picks = gen.integers(0, 2 * np.arange(1, n + 1) - 1)
        sides = gen.integers(0, 2, size=n)
        pp, _ = K.remy_preorder(picks, sides)
    elif method == "ballot":
        tokens = gen.permutation(np.repeat(np.array([1, 0]), n - 1))
        pp = K.lukasiewicz_preorder(K.tokens_to_degrees(tokens, n), True)
    else:
        pp = K.lukasiewicz_preorder(_gw_degrees(family, n, gen, cap), False)
    perm = gen.permutation(np.arange(1, n + 1))
    return K.label_preorder(pp, perm), perm


def sample_tree(family: DegreeWeightSequence, n: int, rng: RngLike, cap: int = REJECTION_CAP) -> LabelledTree:
    """A random tree of size ``n``, chosen with probability proportional to its weight."""
    parent, order = sample_parent(family, n, rng, cap)
    return LabelledTree.from_parents(parent, order)


def _parent_array(tree: LabelledTree) -> np.ndarray:
    return np.asarray(tree.parent, dtype=np.int64)


def inversions_by_node(tree: LabelledTree) -> np.ndarray:
    """``out[j - 1] = I_j(T)`` for ``j = 1..n``."""
    return K.inversions_by_label(_parent_array(tree))[1:]


def inversions_total(tree: LabelledTree) -> int:
    return int(K.total_inversions(_parent_array(tree)))


# -- Monte Carlo ------------------------------------------------------------------

def _block_size(n: int) -> int:
    return int(max(1, min(4096, _BLOCK_CELLS // max(n, 1))))


def _run_block(family: DegreeWeightSequence, n: int, j: int, reps: int, rng: RngStream, cap: int) -> np.ndarray:
    """Statistic values (total inversions for ``j = 0``, else ``I_{n,j}``) for ``reps`` trees."""
    gen = rng.generator()
    method = _method(family)
    if n == 1:
        return np.zeros(reps, np.int64)
    if method == "remy":
        picks = gen.integers(0, 2 * np.arange(1, n + 1) - 1, size=(reps, n))
        sides = gen.integers(0, 2, size=(reps, n), dtype=np.int8)
        perms = gen.permuted(np.tile(np.arange(1, n + 1), (reps, 1)), axis=1)
        return K.remy_block(picks, sides, perms, j)
    if method == "ballot":
        tokens = gen.permuted(np.tile(np.repeat(np.array([1, 0], np.int8), n - 1), (reps, 1)), axis=1)
        perms = gen.permuted(np.tile(np.arange(1, n + 1), (reps, 1)), axis=1)
        return K.ballot_block(tokens, perms, j)
    if method == "pruefer":
        seqs = gen.integers(1, n + 1, size=(reps, max(n - 2, 0)))
        roots = gen.integers(1, n + 1, size=reps)
        return K.pruefer_block(seqs, roots, n, j)
    out = np.empty(reps, np.int64)
    for b in range(reps):
        parent, _ = sample_parent(family, n, gen, cap)
        out[b] = K.total_inversions(parent) if j == 0 else K.local_inversions(parent, j)
    return out


def sample_histogram(family: DegreeWeightSequence, n: int, reps: int, rng: RngStream, j: int = 0,
                     threads: Optional[int] = None, cap: int = REJECTION_CAP) -> Counter:
    """Histogram of the statistic over ``reps`` trees; block ``b`` uses ``rng.child(b)``."""
    _check_size(family, n)
    if not 0 <= j <= n:
        raise ValueError(f"need 1 <= j <= n (or j = 0 for the total), got j={j}")
    if _method(family) == "gw":
        solve_constants(family)
    bs = _block_size(n)
    sizes = [bs] * (reps // bs) + ([reps % bs] if reps % bs else [])
    threads = threads or int(os.environ.get("INVLAB_THREADS", "1"))

    def work(b: int) -> Counter:
        vals = _run_block(family, n, j, sizes[b], rng.child(b), cap)
        return Counter(dict(zip(*(x.tolist() for x in np.unique(vals, return_counts=True)))))

    if threads <= 1 or len(sizes) == 1:
        parts = [work(b) for b in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(work, range(len(sizes))))
    total: Counter = Counter()
    for p in parts:
        total.update(p)
    return total


@dataclass
class MomentLine:
    r: int
    mean: float
    se: float
    reference: float
    passed: bool
    checked: bool = True  # False: reported for information, not part of SampleSummary.passed


@dataclass
class PmfLine:
    k: int
    empirical: float
    se: float
    reference: float
    passed: bool


@dataclass
class SampleSummary:
    """Empirical moments (and optionally point probabilities) against a limit law.

    A line passes within ``3 se + MODEL_BIAS |reference|``; the summary passes
    when every checked line does.  Only the first moment is checked, higher
    moments carry finite-size bias well beyond 5% at desk-scale ``n``.
    """

    family: str
    n: int
    j: int
    reps: int
    statistic: str        # "global" or "local"
    regime: str           # "airy", "rayleigh", "ygamma" or "degenerate"
    normalization: float  # the statistic is multiplied by this before taking moments
    moments: list
    pmf: list = field(default_factory=list)
    gamma: Optional[float] = None
    histogram: dict = field(default_factory=dict, repr=False)

    @property
    def passed(self) -> bool:
        return all(m.passed for m in self.moments if m.checked) and all(p.passed for p in self.pmf)

    def as_json(self) -> dict:
        out = asdict(self)
        out["histogram"] = {str(k): v for k, v in sorted(self.histogram.items())}
        out["passed"] = self.passed
        return out


def _within(est: float, se: float, ref: float) -> bool:
    return abs(est - ref) <= 3 * se + MODEL_BIAS * abs(ref)


def _moment_lines(hist: Counter, scale: float, refs: dict) -> list:
    ks = np.array(sorted(hist), dtype=float)
    cs = np.array([hist[k] for k in sorted(hist)], dtype=float)
    reps = cs.sum()
    out = []
    for r, ref in refs.items():
        x = (ks * scale) ** r
        mean = float((cs * x).sum() / reps)
        var = float((cs * (x - mean) ** 2).sum() / (reps - 1))
        se = math.sqrt(var / reps)
        out.append(MomentLine(r, mean, se, ref, _within(mean, se, ref), checked=(r == 1)))
    return out


def _check_reps(reps: int) -> None:
    if reps < MIN_REPS:
        raise ValueError(f"reps must be >= {MIN_REPS}, got {reps}")


def _as_stream(rng: Union[RngStream, int]) -> RngStream:
    return rng if isinstance(rng, RngStream) else RngStream(int(rng))


def monte_carlo_global(family: DegreeWeightSequence, n: int, reps: int, rng: Union[RngStream, int],
                       threads: Optional[int] = None, r_max: int = 2) -> SampleSummary:
    """Moments of ``I_n / (c_phi n^(3/2))`` against the Airy moments."""
    _check_reps(reps)
    c = solve_constants(family)
    hist = sample_histogram(family, n, reps, _as_stream(rng), 0, threads)
    scale = 1 / (c.c_phi * n ** 1.5)
    mu = airy_moments(r_max)
    lines = _moment_lines(hist, scale, {r: mu[r] for r in range(1, r_max + 1)})
    return SampleSummary(family.name, n, 0, reps, "global", "airy", scale, lines, histogram=dict(hist))


def local_regime(n: int, j: int) -> str:
    if j == n:
        return "degenerate"
    return "ygamma" if (n - j) / math.sqrt(n) <= YGAMMA_ALPHA_MAX else "rayleigh"


def monte_carlo_local(family: DegreeWeightSequence, n: int, j: int, reps: int, rng: Union[RngStream, int],
                      threads: Optional[int] = None, r_max: int = 2, k_max: int = 3) -> SampleSummary:
    """``I_{n,j}`` against Rayleigh moments, the ``Y_gamma`` pmf, or the point mass at 0.

    The regime follows ``alpha = (n - j)/sqrt(n)``: ``Y_gamma`` with
    ``gamma = alpha sigma`` for ``alpha <= YGAMMA_ALPHA_MAX``, Rayleigh above.
    Moments of ``(sqrt(n)/(n-j)) I_{n,j}`` are reported in both cases, against
    ``Y_gamma / alpha`` in the middle regime.
    """
    _check_reps(reps)
    if not 1 <= j <= n:
        raise ValueError(f"need 1 <= j <= n, got j={j}")
    c: FamilyConstants = solve_constants(family)
    hist = sample_histogram(family, n, reps, _as_stream(rng), j, threads)
    regime = local_regime(n, j)
    if regime == "degenerate":
        lines = _moment_lines(hist, 1.0, {r: 0.0 for r in range(1, r_max + 1)})
        pmf = [PmfLine(0, hist[0] / reps, 0.0, 1.0, hist[0] == reps)]
        return SampleSummary(family.name, n, j, reps, "local", regime, 1.0, lines, pmf, histogram=dict(hist))
    alpha = (n - j) / math.sqrt(n)
    scale = 1 / alpha
    pmf: list = []
    gamma = None
    if regime == "rayleigh":
        refs = {r: rayleigh_moment(c.sigma, r) for r in range(1, r_max + 1)}
    else:
        gamma = gamma_for(c, alpha)
        # raw moments of Y_gamma / alpha from its factorial moments
        refs = {r: sum(stirling2(r, i) * ygamma_factorial_moment(gamma, i) for i in range(r + 1)) / alpha ** r
                for r in range(1, r_max + 1)}
        for k in range(k_max + 1):
            p = hist.get(k, 0) / reps
            se = math.sqrt(max(p * (1 - p), 1 / reps) / reps)  # floored: an empty cell still has se > 0
            ref = ygamma_pmf(gamma, k)
            pmf.append(PmfLine(k, p, se, ref, _within(p, se, ref)))
    lines = _moment_lines(hist, scale, refs)
    return SampleSummary(family.name, n, j, reps, "local", regime, scale, lines, pmf, gamma, dict(hist))
