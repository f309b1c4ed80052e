from fractions import Fraction

import pytest

from invlab.enumeration import brute_local_distribution
from invlab.family import builtin, solve_constants
from invlab.localdist import (local_distribution, local_distribution_ordered, local_distribution_table,
                              local_distribution_unordered, local_factorial_moment, local_gf_residual,
                              local_moment_asymptotic)


def test_examples():
    assert local_distribution(builtin("ordered"), 2, 1).probs == (Fraction(1, 2), Fraction(1, 2))
    assert local_distribution(builtin("unordered"), 3, 1).probs == (Fraction(1, 3), Fraction(4, 9), Fraction(2, 9))
    for name in ("binary", "cyclic"):
        assert local_distribution(builtin(name), 6, 6).probs == (1,)
    with pytest.raises(ValueError):
        local_distribution(builtin("ordered"), 3, 4)


def test_matches_enumeration(family):
    for n in range(1, 8):
        table = local_distribution_table(family, n)
        for j in range(1, n + 1):
            assert list(table[j - 1].probs) == brute_local_distribution(family, n, j)


def test_closed_form_examples():
    assert local_distribution_ordered(2, 1, 0) == Fraction(1, 2)
    assert local_distribution_ordered(5, 5, 0) == 1
    assert local_distribution_unordered(3, 1, 1) == Fraction(4, 9)
    assert local_distribution_unordered(3, 1, 2) == Fraction(2, 9)
    assert local_distribution_unordered(7, 7, 0) == 1
    assert local_distribution_ordered(4, 2, 3) == 0 and local_distribution_unordered(4, 2, -1) == 0


@pytest.mark.parametrize("name,closed", [("ordered", local_distribution_ordered),
                                         ("unordered", local_distribution_unordered)])
def test_closed_forms_match_generic(name, closed):
    for n in (1, 2, 3, 8, 17, 40):
        table = local_distribution_table(builtin(name), n)
        for j in range(1, n + 1):
            assert [closed(n, j, k) for k in range(n - j + 1)] == list(table[j - 1].probs)


def test_pmf_sums_and_support(family):
    for j, pmf in enumerate(local_distribution_table(family, 15), start=1):
        assert pmf.total() == 1 and len(pmf) == 16 - j
        assert min(pmf.probs) >= 0 and pmf[15 - j + 1] == 0


def test_factorial_moments_match_pmf(family):
    for n in range(1, 21):
        table = local_distribution_table(family, n)
        for j in range(1, n + 1):
            for r in range(4):
                assert local_factorial_moment(family, n, j, r) == table[j - 1].factorial_moment(r)


def test_factorial_moment_examples():
    assert local_factorial_moment(builtin("ordered"), 2, 1, 1) == Fraction(1, 2)
    assert local_factorial_moment(builtin("unordered"), 3, 1, 1) == Fraction(8, 9)
    assert local_factorial_moment(builtin("binary"), 9, 9, 2) == 0


def test_float_backend():
    o = builtin("ordered")
    ex = local_distribution_table(o, 30)
    fl = local_distribution_table(o, 30, backend="float")
    for a, b in zip(ex, fl):
        for p, q in zip(a.probs, b.probs):
            assert q == pytest.approx(float(p), abs=1e-13)
    assert local_factorial_moment(o, 50, 20, 2, "float") == pytest.approx(
        float(local_factorial_moment(o, 50, 20, 2)), rel=1e-10)


def test_asymptotic_moments():
    c = solve_constants(builtin("unordered"))
    assert local_moment_asymptotic(c, 10 ** 4, 5000, 1) == pytest.approx(62.666, abs=1e-3)
    assert local_moment_asymptotic(c, 10, 3, 0) == 1
    o = builtin("ordered")
    ratio = local_factorial_moment(o, 200, 100, 1) / local_moment_asymptotic(solve_constants(o), 200, 100, 1)
    assert 0.9 <= ratio <= 1.1


def test_functional_equation():
    for name in ("ordered", "unordered", "binary", "cyclic"):
        assert local_gf_residual(builtin(name), 10) == 0


def test_as_json():
    js = local_distribution(builtin("unordered"), 3, 1).as_json()
    assert [Fraction(v) for v in js["pmf"].values()] == [Fraction(1, 3), Fraction(4, 9), Fraction(2, 9)]
