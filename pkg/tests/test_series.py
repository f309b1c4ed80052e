import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from invlab.family import DegreeWeightSequence, builtin
from invlab.series import (FLOAT, BiSeries, UniSeries, bi_solve_F, compose, phi_of,
                           solve_tree_series)

fractions = st.fractions(min_value=-5, max_value=5, max_denominator=7)


def series(n=6, zero_const=False):
    return st.lists(fractions, min_size=n + 1, max_size=n + 1).map(
        lambda c: UniSeries.from_list([Fraction(0)] + c[1:] if zero_const else c))


def horner_only(fam):
    """Same weights, no closed-form series rule: phi(T) goes through generic composition."""
    return DegreeWeightSequence(fam.name + "-generic", fam.weight_rule, fam.radius_hint, None, None,
                                fam.max_degree)


def test_tree_series_examples():
    assert list(solve_tree_series(builtin("ordered"), 5).coeffs) == [0, 1, 1, 2, 5, 14]
    assert list(solve_tree_series(builtin("binary"), 4).coeffs) == [0, 1, 2, 5, 14]
    assert list(solve_tree_series(builtin("unordered"), 4).coeffs) == [0, 1, 1, Fraction(3, 2), Fraction(8, 3)]


def test_fixed_point_residual(family):
    N = 25
    t = solve_tree_series(family, N)
    resid = t - UniSeries.variable(N) * phi_of(family, t, 0)
    assert all(c == 0 for c in resid.coeffs)
    assert t[0] == 0 and t[1] == family.weight(0)


def test_closed_form_series_match_composition(family):
    t = solve_tree_series(family, 20)
    generic = horner_only(family)
    assert solve_tree_series(generic, 20).coeffs == t.coeffs
    for m in range(3):
        assert phi_of(family, t, m).coeffs == phi_of(generic, t, m).coeffs


def test_tree_counts_closed_forms():
    for n in range(1, 11):
        f = math.factorial(n)
        assert solve_tree_series(builtin("unordered"), 10)[n] * f == n ** (n - 1)
        assert solve_tree_series(builtin("ordered"), 10)[n] * f == f * math.comb(2 * n - 2, n - 1) // n
        assert solve_tree_series(builtin("binary"), 10)[n] * f == Fraction(f * math.comb(2 * n, n - 1), n)


def test_float_backend_agrees():
    ex = solve_tree_series(builtin("ordered"), 50)
    fl = solve_tree_series(builtin("ordered"), 50, FLOAT)
    for a, b in zip(ex.coeffs[1:], fl.coeffs[1:]):
        assert abs(float(a) - b) <= 1e-9 * abs(float(a))


def test_compose_examples():
    outer = UniSeries.from_list([1] * 4)  # 1/(1-t)
    inner = UniSeries.from_list([0, 1, 1, 2])
    # inner is the Catalan tree series T, and 1/(1 - T) = T/z
    assert list(compose(outer, inner).coeffs) == [1, 1, 2, 5]
    assert list(compose(outer, UniSeries.zero(3)).coeffs) == [1, 0, 0, 0]
    ident = UniSeries.from_list([0, 1, 0, 0])
    assert compose(ident, inner).coeffs == inner.coeffs
    with pytest.raises(ValueError):
        compose(outer, UniSeries.from_list([1, 1, 0, 0]))


def test_truncation_order_propagates():
    a = UniSeries.from_list([1, 2, 3])
    b = UniSeries.from_list([1, 1, 1, 1, 1])
    assert (a * b).order == 2 and (a + b).order == 2
    assert a.derive().order == 1 and a.integrate().order == 3


@settings(max_examples=40, deadline=None)
@given(series(), series(), series())
def test_ring_identities(a, b, c):
    assert (a * b).coeffs == (b * a).coeffs
    assert (a * (b + c)).coeffs == (a * b + a * c).coeffs
    assert ((a * b) * c).coeffs == (a * (b * c)).coeffs


@settings(max_examples=40, deadline=None)
@given(series(zero_const=True))
def test_derive_integrate_and_exp(g):
    assert g.integrate().derive().coeffs == g.coeffs
    e = g.exp()
    assert e.derive().coeffs == (g.derive() * e.truncate(g.order - 1)).coeffs


@settings(max_examples=40, deadline=None)
@given(series(), series(zero_const=True), series(zero_const=True))
def test_compose_associative(a, b, c):
    assert compose(compose(a, b), c).coeffs == compose(a, compose(b, c)).coeffs


@settings(max_examples=40, deadline=None)
@given(series())
def test_reciprocal(a):
    if a[0] == 0:
        with pytest.raises(ZeroDivisionError):
            a.reciprocal()
        return
    one = a * a.reciprocal()
    assert one.coeffs == UniSeries.constant(1, a.order).coeffs


@settings(max_examples=30, deadline=None)
@given(series(zero_const=True))
def test_log1m_inverts_exp(g):
    # log(1 - (1 - exp(-g))) = -g
    s = 1 - (-g).exp()
    assert (-s.log1m()).coeffs == g.coeffs


def test_bi_solve_F_ordered_3():
    F, Tq = bi_solve_F(builtin("ordered"), 3)
    assert {k: v * 6 for k, v in Tq.rows[3].items()} == {0: 3, 1: 4, 2: 4, 3: 1}
    assert {k: v * 6 for k, v in F.rows[3].items()} == {0: 3, 1: 1}


def test_bi_solve_F_slices(family):
    N = 7
    F, Tq = bi_solve_F(family, N)
    t = solve_tree_series(family, N)
    for n in range(1, N + 1):
        assert sum(Tq.rows[n].values(), Fraction(0)) == t[n]
        assert sum(F.rows[n].values(), Fraction(0)) == t[n] / n
        assert max(Tq.rows[n], default=0) <= n * (n - 1) // 2


def test_bi_H_operator():
    G = BiSeries(({}, {0: Fraction(1)}, {}, {1: Fraction(2)}))
    H = G.H()
    assert H.rows[1] == {0: 1} and H.rows[3] == {1: 2, 2: 2, 3: 2}
