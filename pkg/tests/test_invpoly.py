import math
from fractions import Fraction

import pytest

from invlab.enumeration import brute_inversion_polynomial
from invlab.errors import BudgetError
from invlab.family import builtin, solve_constants
from invlab.invpoly import (MomentTable, commutation_sides, factorial_to_raw, global_moments, increasing_tree_count,
                            inversion_polynomial, inversion_polynomials, mallows_riordan_residual,
                            pumped_factorial_moments, raw_to_factorial, transfer_moments)
from invlab.limitlaws import airy_moments
from invlab.series import solve_tree_series


def test_examples():
    o = builtin("ordered")
    assert inversion_polynomial(o, 3).coeffs == {0: 3, 1: 4, 2: 4, 3: 1}
    assert inversion_polynomial(o, 3, root1=True).coeffs == {0: 3, 1: 1}
    assert inversion_polynomial(builtin("binary"), 2).coeffs == {0: 2, 1: 2}


def test_against_enumeration(family):
    for n, (J, Jh) in enumerate(inversion_polynomials(family, 7), start=1):
        assert J.coeffs == brute_inversion_polynomial(family, n)
        assert Jh.coeffs == brute_inversion_polynomial(family, n, root1=True)


def test_totals_and_degree(family):
    N = 12
    t = solve_tree_series(family, N)
    for n, (J, Jh) in enumerate(inversion_polynomials(family, N), start=1):
        Tn = t[n] * math.factorial(n)
        assert J.total() == Tn and J(1) == Tn
        assert Jh.total() == Tn / n
        assert max(J.coeffs) <= n * (n - 1) // 2


def test_budget():
    with pytest.raises(BudgetError, match="rational coefficients"):
        inversion_polynomials(builtin("ordered"), 41)


def test_mallows_riordan():
    assert mallows_riordan_residual(1) == 0
    assert mallows_riordan_residual(5) == 0
    assert mallows_riordan_residual(10) == 0


def test_increasing_trees():
    assert increasing_tree_count(builtin("unordered"), 4) == 6
    assert increasing_tree_count(builtin("ordered"), 3) == 3
    for name in ("binary", "ordered", "unordered", "cyclic"):
        assert increasing_tree_count(builtin(name), 1) == 1
    # ordered: (2n-3)!!
    for n in range(2, 9):
        assert increasing_tree_count(builtin("ordered"), n) == math.prod(range(1, 2 * n - 2, 2))


def test_commutation_rule():
    for j in range(4):
        for k in range(5):
            for n in range(7):
                left, right = commutation_sides(j, k, n)
                assert left == right


def test_stirling_conversion():
    assert factorial_to_raw([1, Fraction(3)]) == [1, 3]
    assert factorial_to_raw([1, Fraction(2), Fraction(5)]) == [1, 2, 7]
    q = Fraction(1, 4)
    assert factorial_to_raw([1, q, 0, 0]) == [1, q, q, q]
    raw = [Fraction(1), Fraction(2, 3), Fraction(7, 5), Fraction(11, 2)]
    assert factorial_to_raw(raw_to_factorial(raw)) == raw


def test_pumped_moments_match_polynomials(family):
    N = 12
    pm = pumped_factorial_moments(family, N, 3)
    polys = inversion_polynomials(family, N)
    for n in range(1, N + 1):
        J, Jh = polys[n - 1]
        assert pm[n - 1].factorial[0] == 1
        for r in range(4):
            assert pm[n - 1].factorial[r] == Jh.factorial_moment(r)
            assert transfer_moments(pm[n - 1], n).factorial[r] == J.factorial_moment(r)


def test_pumped_r4_ordered():
    pm = pumped_factorial_moments(builtin("ordered"), 9, 4)
    for n, (_, Jh) in enumerate(inversion_polynomials(builtin("ordered"), 9), start=1):
        assert pm[n - 1].factorial[4] == Jh.factorial_moment(4)
    with pytest.raises(ValueError):
        pumped_factorial_moments(builtin("ordered"), 5, 5)


def test_small_moments():
    o = builtin("ordered")
    assert pumped_factorial_moments(o, 3, 1)[2].factorial[1] == Fraction(1, 4)
    assert global_moments(o, 3, 1, backend="exact").raw[1] == Fraction(5, 4)
    assert global_moments(builtin("unordered"), 3, 1, backend="exact").raw[1] == Fraction(4, 3)
    t1 = MomentTable.from_factorial(1, [Fraction(1), Fraction(0), Fraction(0)])
    assert transfer_moments(t1, 1) == t1


def test_float_moments_agree_with_exact(family):
    ex = global_moments(family, 60, 2, backend="exact")
    fl = global_moments(family, 60, 2, backend="float")
    for r in (1, 2):
        assert fl.raw[r] == pytest.approx(float(ex.raw[r]), rel=1e-10)


def test_airy_convergence_ordered():
    o = builtin("ordered")
    c = solve_constants(o)
    n = 400
    mt = global_moments(o, n, 2)
    mu = airy_moments(2)
    assert 0.9 <= mt.raw[1] / (c.c_phi * mu[1] * n ** 1.5) <= 1.1
    assert 0.85 <= mt.raw[2] / (c.c_phi ** 2 * n ** 3 * mu[2]) <= 1.15
    hat = pumped_factorial_moments(o, n, 1, backend="float")[n - 1]
    assert 0.9 <= hat.raw[1] / (c.c_phi * mu[1] * n ** 1.5) <= 1.1


def test_as_json_roundtrip():
    J = inversion_polynomial(builtin("unordered"), 4)
    back = {int(k): Fraction(v) for k, v in J.as_json()["coeffs"].items()}
    assert back == J.coeffs
