"""Exhaustive enumeration of small weighted labelled ordered trees.

This is the ground truth the generating-function code is checked against.
Shapes are generated recursively by root degree; every shape is then paired
with all ``n!`` labellings.  Unordered trees need no deduplication: they are
ordered trees carrying weight ``1/l!`` per node of degree ``l``.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

import numpy as np

from .errors import BudgetError
from .family import DegreeWeightSequence

MAX_N = 9


@dataclass(frozen=True)
class LabelledTree:
    """Rooted ordered tree on labels ``1..n``.

    ``parent[v]`` is the parent label of ``v`` (``0`` for the root, index 0 unused);
    ``children[v]`` lists the children of ``v`` left to right.
    """

    n: int
    parent: tuple
    children: tuple

    @property
    def root(self) -> int:
        return next(v for v in range(1, self.n + 1) if self.parent[v] == 0)

    @classmethod
    def from_children(cls, children: dict | list, n: int | None = None) -> "LabelledTree":
        if isinstance(children, dict):
            n = n or max([*children.keys(), *(c for cs in children.values() for c in cs)], default=1)
            ch = [tuple(children.get(v, ())) for v in range(n + 1)]
        else:
            ch = [tuple(c) for c in children]
            n = len(ch) - 1
        parent = [0] * (n + 1)
        for v in range(1, n + 1):
            for c in ch[v]:
                parent[c] = v
        tree = cls(n=n, parent=tuple(parent), children=tuple(ch))
        tree.validate()
        return tree

    @classmethod
    def from_parents(cls, parent, order=None) -> "LabelledTree":
        """From a parent array indexed by label; children are sorted unless ``order`` lists node labels."""
        parent = [int(p) for p in parent]
        n = len(parent) - 1
        ch: list[list[int]] = [[] for _ in range(n + 1)]
        for v in (order if order is not None else range(1, n + 1)):
            if parent[v]:
                ch[parent[v]].append(int(v))
        return cls(n=n, parent=tuple(parent), children=tuple(tuple(c) for c in ch))

    def validate(self) -> None:
        n = self.n
        roots = [v for v in range(1, n + 1) if self.parent[v] == 0]
        if len(roots) != 1:
            raise ValueError(f"expected exactly one root, found {roots}")
        seen = set()
        stack = [roots[0]]
        while stack:
            v = stack.pop()
            if v in seen:
                raise ValueError("cycle in tree")
            seen.add(v)
            for c in self.children[v]:
                if self.parent[c] != v:
                    raise ValueError(f"child list of {v} inconsistent with parent of {c}")
                stack.append(c)
        if seen != set(range(1, n + 1)):
            raise ValueError("labels are not exactly 1..n or tree is disconnected")

    def ancestors(self, v: int) -> list[int]:
        out = []
        p = self.parent[v]
        while p:
            out.append(p)
            p = self.parent[p]
        return out

    def out_degrees(self) -> list[int]:
        return [len(c) for c in self.children[1:]]

    def relabel(self, mapping: dict[int, int]) -> "LabelledTree":
        m = lambda v: mapping.get(v, v)  # noqa: E731
        ch = [()] * (self.n + 1)
        for v in range(1, self.n + 1):
            ch[m(v)] = tuple(m(c) for c in self.children[v])
        return LabelledTree.from_children(ch)


def count_inversions(tree: LabelledTree) -> int:
    """Pairs ``(i, j)`` with ``i > j`` and ``i`` an ancestor of ``j``; quadratic reference version."""
    return sum(1 for v in range(1, tree.n + 1) for a in tree.ancestors(v) if a > v)


def local_inversions(tree: LabelledTree, j: int) -> int:
    return sum(1 for a in tree.ancestors(j) if a > j)


def swap_labels(tree: LabelledTree, a: int, b: int) -> LabelledTree:
    return tree.relabel({a: b, b: a})


# -- shapes -----------------------------------------------------------------

@lru_cache(maxsize=None)
def _shapes(n: int) -> tuple:
    """All ordered tree shapes with ``n`` nodes, as nested tuples of subtrees."""
    if n == 1:
        return ((),)
    out = []
    for sizes in _compositions(n - 1):
        for subs in itertools.product(*(_shapes(s) for s in sizes)):
            out.append(tuple(subs))
    return tuple(out)


def _compositions(m: int) -> Iterator[tuple]:
    if m == 0:
        yield ()
        return
    for first in range(1, m + 1):
        for rest in _compositions(m - first):
            yield (first, *rest)


def _flatten(shape) -> tuple[list[int], list[int]]:
    """Preorder parent positions (-1 for root) and out-degrees."""
    parent: list[int] = []
    deg: list[int] = []

    def walk(s, p):
        me = len(parent)
        parent.append(p)
        deg.append(len(s))
        for c in s:
            walk(c, me)

    walk(shape, -1)
    return parent, deg


def _shape_weight(family: DegreeWeightSequence, deg: list[int]) -> Fraction:
    w = Fraction(1)
    for d in deg:
        w *= family.weight(d)
        if not w:
            break
    return w


def _check_cap(n: int) -> None:
    if not 1 <= n <= MAX_N:
        raise BudgetError(f"brute-force enumeration is capped at 1 <= n <= {MAX_N}, got n={n}")


def enumerate_trees(family: DegreeWeightSequence, n: int) -> Iterator[tuple[LabelledTree, Fraction]]:
    """Yield every labelled ordered tree of size ``n`` with non-zero weight, with its weight."""
    _check_cap(n)
    for shape in _shapes(n):
        parent, deg = _flatten(shape)
        w = _shape_weight(family, deg)
        if not w:
            continue
        for perm in itertools.permutations(range(1, n + 1)):
            ch: list[list[int]] = [[] for _ in range(n + 1)]
            par = [0] * (n + 1)
            for pos in range(1, n):
                par[perm[pos]] = perm[parent[pos]]
                ch[perm[parent[pos]]].append(perm[pos])
            yield LabelledTree(n=n, parent=tuple(par), children=tuple(tuple(c) for c in ch)), w


# -- exact statistics by shape ----------------------------------------------

@dataclass(frozen=True)
class _ShapeStats:
    degrees: tuple
    inv_hist: dict        # k -> number of labellings
    root1_hist: dict      # k -> number of labellings with root label 1
    local_hist: tuple     # local_hist[j] : dict k -> number of labellings


@lru_cache(maxsize=None)
def _perm_matrix(n: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(1, n + 1))), dtype=np.int16).reshape(-1, n)


@lru_cache(maxsize=None)
def _shape_stats(n: int) -> tuple:
    P = _perm_matrix(n)
    out = []
    for shape in _shapes(n):
        parent, deg = _flatten(shape)
        local = np.zeros(P.shape, dtype=np.int16)
        for v in range(1, n):
            a = parent[v]
            while a != -1:
                local[:, v] += P[:, a] > P[:, v]
                a = parent[a]
        total = local.sum(axis=1)
        inv_hist = Counter(dict(enumerate(np.bincount(total).tolist())))
        root1 = total[P[:, 0] == 1]
        root1_hist = Counter(dict(enumerate(np.bincount(root1, minlength=1).tolist())))
        loc = [None]
        for j in range(1, n + 1):
            vals = local[P == j]
            loc.append(dict(enumerate(np.bincount(vals, minlength=1).tolist())))
        out.append(_ShapeStats(tuple(deg), +inv_hist, +root1_hist, tuple(loc)))
    return tuple(out)


def _weighted_hist(family: DegreeWeightSequence, n: int, pick) -> dict[int, Fraction]:
    _check_cap(n)
    acc: dict[int, Fraction] = {}
    for st in _shape_stats(n):
        w = _shape_weight(family, list(st.degrees))
        if not w:
            continue
        for k, c in pick(st).items():
            if c:
                acc[k] = acc.get(k, Fraction(0)) + w * c
    return dict(sorted(acc.items()))


def brute_inversion_polynomial(family: DegreeWeightSequence, n: int, root1: bool = False) -> dict[int, Fraction]:
    """``k -> total weight of trees with k inversions`` (root label 1 only when ``root1``)."""
    return _weighted_hist(family, n, (lambda st: st.root1_hist) if root1 else (lambda st: st.inv_hist))


def brute_local_distribution(family: DegreeWeightSequence, n: int, j: int) -> list[Fraction]:
    """Exact ``P{I_{n,j} = k}`` for ``k = 0..n-j``."""
    _check_cap(n)
    if not 1 <= j <= n:
        raise ValueError(f"need 1 <= j <= n, got j={j}, n={n}")
    hist = _weighted_hist(family, n, lambda st: st.local_hist[j])
    total = sum(hist.values())
    return [hist.get(k, Fraction(0)) / total for k in range(n - j + 1)]


def brute_total_weight(family: DegreeWeightSequence, n: int) -> Fraction:
    return sum(brute_inversion_polynomial(family, n).values(), Fraction(0))
