from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from cohalab.commvar import count_commuting
from cohalab.errors import InfeasibleError, PreconditionError
from cohalab.factorization import closed_point_counts, mobius, power_structure_check, punctual_series
from cohalab.linalg import gl_order
from cohalab.series import (
    AFFINE_PLANE,
    PROJECTIVE_PLANE,
    BettiTable,
    LaurentBiSeries,
    ThetaBasisElement,
    WindowError,
    feit_fine_rational,
    feit_fine_series,
    feit_fine_value,
    pbw_series,
    sym_hilbert,
    theta_generators,
)

from oracles import sym_theta_multisets

betti_tables = st.tuples(*[st.integers(0, 2)] * 5).filter(any).map(BettiTable)


def test_feit_fine_low_coefficients():
    u = sympy.Symbol("u")
    r1, _ = feit_fine_rational(1)
    r2, _ = feit_fine_rational(2)
    assert sympy.simplify(r1 - u ** 2 / (u - 1)) == 0
    assert sympy.simplify(r2 - u ** 2 * (u ** 3 + u ** 2 - 1) / ((u - 1) ** 2 * (u + 1))) == 0


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("q", [2, 3, 5])
def test_feit_fine_value_is_groupoid_count(n, q):
    assert feit_fine_value(n, q) == Fraction(count_commuting("commuting", n, q), gl_order(n, q))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_rational_form_agrees_with_value(n):
    r, u = feit_fine_rational(n)
    for q in (2, 3, 7):
        assert sympy.Rational(feit_fine_value(n, q)) == r.subs(u, q)


def test_feit_fine_matches_multiset_enumeration():
    s = feit_fine_series(4, 6)
    oracle = sym_theta_multisets(4, 6)
    for t in range(5):
        for u in range(-6, 6):
            assert s.coefficient(t, u) == oracle.get((t, u), 0), (t, u)


def test_feit_fine_matches_sym_of_theta():
    assert feit_fine_series(4, 6).agrees_with(sym_hilbert(theta_generators(4, 6), 4, 6))


def test_theta_bidegrees():
    e = ThetaBasisElement(2, 3)
    assert e.bidegree == (2, -4)
    assert e.u_exponent == -2
    with pytest.raises(PreconditionError):
        ThetaBasisElement(0, 0)


def test_top_coefficients():
    s = feit_fine_series(3, 2)
    assert s.coefficient(2, 2) == 1
    assert s.coefficient(1, 1) == 1
    assert s.coefficient(3, 3) == 1
    assert s.coefficient(0, 0) == 1


def test_window_error_below_floor():
    s = feit_fine_series(2, 2)
    with pytest.raises(WindowError):
        s.coefficient(1, -3)


def test_pbw_affine_plane_is_feit_fine():
    assert pbw_series(AFFINE_PLANE, 3, 4).agrees_with(feit_fine_series(3, 4))


def test_pbw_projective_plane_first_coefficient():
    s = pbw_series(PROJECTIVE_PLANE, 1, 3)
    assert s.terms(1) == {2: 1, 0: 2, -2: 3, -4: 3, -6: 3}


@given(betti_tables, betti_tables)
def test_pbw_multiplicative_under_disjoint_union(a, b):
    lhs = pbw_series(a + b, 2, 2)
    rhs = pbw_series(a, 2, 2) * pbw_series(b, 2, 2)
    assert lhs.agrees_with(rhs)


def test_betti_parse_and_validation():
    assert BettiTable.parse("0,0,0,0,1") == AFFINE_PLANE
    with pytest.raises(PreconditionError):
        BettiTable.parse("0,0,0,0,0")
    with pytest.raises(PreconditionError):
        BettiTable.parse("1,2")


def test_sym_hilbert_odd_generator():
    s = sym_hilbert([(1, 1, "odd", 2)], 3, 0)
    assert s.terms(1) == {2: 2}
    assert s.terms(2) == {4: 1}
    assert s.terms(3) == {}
    with pytest.raises(PreconditionError):
        sym_hilbert([(0, 1, "even", 1)], 2, 0)


@given(st.integers(1, 3), st.integers(0, 3))
def test_inverse_round_trip(N, K):
    s = feit_fine_series(N, K)
    assert (s * s.inverse()).agrees_with(LaurentBiSeries.one(N))


@given(st.integers(1, 3), st.integers(0, 4))
def test_json_round_trip(N, K):
    s = feit_fine_series(N, K)
    assert LaurentBiSeries.from_json(s.to_json()) == s


def test_mobius_and_closed_points():
    assert [mobius(n) for n in range(1, 11)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]
    assert closed_point_counts(2, 2) == [4, 6]
    assert closed_point_counts(3, 3) == [9, 36, 240]


def test_punctual_series_over_f4():
    assert punctual_series(4, 2) == [1, Fraction(1, 3), Fraction(76, gl_order(2, 4))]


def test_power_structure_q2_n2():
    r = power_structure_check(2, 2)
    assert r.equal
    assert r.lhs == (1, 4, Fraction(44, 3))


@pytest.mark.parametrize("q", [2, 3, 5, 7])
def test_power_structure_first_order(q):
    assert power_structure_check(q, 1).equal


def test_power_structure_needs_f4_only():
    with pytest.raises(InfeasibleError):
        power_structure_check(3, 2)
    with pytest.raises(PreconditionError):
        power_structure_check(4, 1)
