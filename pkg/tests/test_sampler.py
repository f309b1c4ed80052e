import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import chi2 as chi2_dist

from invlab import _kernels as K
from invlab.enumeration import (LabelledTree, count_inversions, enumerate_trees, local_inversions)
from invlab.errors import NotAdmissibleError, RejectionCapError
from invlab.family import BUILTIN_NAMES, DegreeWeightSequence, builtin, solve_constants
from invlab.localdist import local_distribution
from invlab.sampler import (RngStream, inversions_by_node, inversions_total, monte_carlo_global,
                            monte_carlo_local, sample_histogram, sample_parent, sample_tree)

WORKED_TREE = LabelledTree.from_children({3: [6, 7], 6: [1, 2], 1: [4], 7: [5]}, 7)


def chi2_critical(dof):
    return chi2_dist.isf(1e-3, dof)


def chi2(counts: Counter, probs: dict) -> float:
    N = sum(counts.values())
    assert set(counts) <= set(probs)
    return sum((counts.get(k, 0) - N * p) ** 2 / (N * p) for k, p in probs.items())


def tree_key(t: LabelledTree):
    return t.parent, t.children


def shape_key(t: LabelledTree):
    """Preorder out-degree word: the unlabelled ordered shape."""
    out, stack = [], [t.root]
    while stack:
        v = stack.pop()
        out.append(len(t.children[v]))
        stack.extend(reversed(t.children[v]))
    return tuple(out)


def exact_law(family, n, key):
    total = Fraction(0)
    acc: dict = {}
    for t, w in enumerate_trees(family, n):
        acc[key(t)] = acc.get(key(t), 0) + w
        total += w
    return {k: float(v / total) for k, v in acc.items()}


def generic_clone(fam):
    return DegreeWeightSequence(fam.name + "-gw", fam.weight_rule, fam.radius_hint, fam.phi_closed, None,
                                fam.max_degree)


def test_rng_stream():
    a = RngStream(5, 2).generator().random(4)
    assert np.array_equal(a, RngStream(5, 2).generator().random(4))
    assert not np.array_equal(a, RngStream(5, 3).generator().random(4))
    assert not np.array_equal(a, RngStream(5, 2).child(0).generator().random(4))
    with pytest.raises(ValueError):
        RngStream(-1)


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_trees_are_valid(name):
    fam = builtin(name)
    gen = RngStream(11).generator()
    for n in (1, 2, 3, 7, 40, 200):
        for _ in range(5):
            t = sample_tree(fam, n, gen)
            t.validate()
            assert sorted(t.parent[1:]).count(0) == 1 and t.n == n


def test_inversion_counting_examples():
    assert list(inversions_by_node(WORKED_TREE)) == [2, 2, 0, 1, 1, 0, 0]
    assert inversions_total(WORKED_TREE) == 6
    n = 30
    increasing = LabelledTree.from_parents([0, 0] + [v // 2 for v in range(2, n + 1)])
    assert inversions_total(increasing) == 0
    path = LabelledTree.from_parents([0] + [v + 1 for v in range(1, n)] + [0])
    assert inversions_total(path) == math.comb(n, 2)


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_fast_counts_match_oracle(name):
    fam = builtin(name)
    gen = RngStream(3).generator()
    for i in range(1000):
        t = sample_tree(fam, 1 + i % 9, gen)
        by_node = inversions_by_node(t)
        assert inversions_total(t) == count_inversions(t) == by_node.sum()
        j = 1 + i % t.n
        assert by_node[j - 1] == local_inversions(t, j) == K.local_inversions(np.array(t.parent), j)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 300), st.integers(0, 2 ** 32), st.sampled_from(BUILTIN_NAMES))
def test_sum_of_local_counts(n, seed, name):
    parent, _ = sample_parent(builtin(name), n, RngStream(seed))
    assert K.inversions_by_label(parent).sum() == K.total_inversions(parent)
    assert sorted(np.flatnonzero(parent[1:] == 0)) == [int(np.flatnonzero(parent[1:] == 0)[0])]


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_uniform_over_labelled_trees_n3(name):
    fam = builtin(name)
    probs = exact_law(fam, 3, tree_key)
    gen = RngStream(2024).generator()
    N = 120_000 if name == "ordered" else 40_000
    counts = Counter(tree_key(sample_tree(fam, 3, gen)) for _ in range(N))
    assert chi2(counts, probs) < chi2_critical(len(probs) - 1)
    if name == "ordered":
        assert len(probs) == 12 and all(abs(p - 1 / 12) < 1e-12 for p in probs.values())


def test_remy_binary_n2():
    gen = RngStream(8).generator()
    counts = Counter()
    for _ in range(40_000):
        picks = gen.integers(0, 2 * np.arange(1, 3) - 1)
        pp, code = K.remy_preorder(picks, gen.integers(0, 2, size=2))
        perm = gen.permutation(np.arange(1, 3))
        counts[(int(code[0]), int(perm[0]))] += 1
    # root label 1 or 2, its single child on the left (code 2) or right (code 1)
    probs = {(c, r): 0.25 for c in (1, 2) for r in (1, 2)}
    assert chi2(counts, probs) < chi2_critical(3)


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_galton_watson_matches_shape_law(name):
    fam = builtin(name)
    probs = exact_law(fam, 5, shape_key)
    gen = RngStream(77).generator()
    clone = generic_clone(fam)
    for f in {fam, clone}:
        counts = Counter(shape_key(sample_tree(f, 5, gen)) for _ in range(30_000))
        assert chi2(counts, probs) < chi2_critical(len(probs) - 1)


def test_local_pmf_total_variation():
    o = builtin("ordered")
    hist = sample_histogram(o, 30, 100_000, RngStream(5), j=10)
    exact = local_distribution(o, 30, 10).probs
    tv = 0.5 * sum(abs(hist.get(k, 0) / 100_000 - float(p)) for k, p in enumerate(exact))
    assert tv <= 0.02


def test_ordered_n3_mean():
    o = builtin("ordered")
    s = monte_carlo_global(o, 3, 100_000, RngStream(1))
    ref = 1.25 / (solve_constants(o).c_phi * 3 ** 1.5)
    assert abs(s.moments[0].mean - ref) <= 3 * s.moments[0].se


def test_degenerate_regime(family):
    s = monte_carlo_local(family, 25, 25, 200, RngStream(4))
    assert s.regime == "degenerate" and s.histogram == {0: 200} and s.passed


def test_preconditions():
    with pytest.raises(ValueError):
        monte_carlo_global(builtin("binary"), 50, 0, RngStream(1))
    with pytest.raises(ValueError):
        monte_carlo_local(builtin("binary"), 50, 51, 100, RngStream(1))
    with pytest.raises(NotAdmissibleError):
        sample_tree(DegreeWeightSequence.from_weights("even", [1, 0, 1]), 4, RngStream(1))
    with pytest.raises(RejectionCapError, match="1 mod d"):
        sample_tree(builtin("cyclic"), 400, RngStream(1), cap=3)


def test_even_family_odd_sizes():
    fam = DegreeWeightSequence.from_weights("even", [1, 0, 1])
    t = sample_tree(fam, 7, RngStream(9))
    assert sorted(len(c) for c in t.children[1:]) == [0, 0, 0, 0, 2, 2, 2]


def test_determinism_and_threads():
    for name in ("binary", "cyclic"):
        fam = builtin(name)
        a = monte_carlo_global(fam, 60, 3000, RngStream(42, 7), threads=1)
        b = monte_carlo_global(fam, 60, 3000, RngStream(42, 7), threads=1)
        c = monte_carlo_global(fam, 60, 3000, RngStream(42, 7), threads=4)
        assert a == b == c
        assert a.as_json() == c.as_json()
        d = monte_carlo_global(fam, 60, 3000, RngStream(42, 8), threads=1)
        assert d.histogram != a.histogram
