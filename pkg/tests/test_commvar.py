import numpy as np
import pytest
from hypothesis import given, strategies as st

from cohalab.commvar import (
    CommPair,
    count_commuting,
    count_commuting_bruteforce,
    count_commuting_classes,
    count_commuting_kernel,
    count_nilpotent_classes,
    count_nilpotent_commuting,
    interpolate_count_polynomial,
)
from cohalab.errors import ExpectationFailure, InfeasibleError, PreconditionError
from cohalab.linalg import Matrix, general_linear_group
from cohalab.similarity import nilpotent_matrix_count, type_table

from oracles import commuting_pairs_naive


def c2(q):
    return q ** 6 + q ** 5 - q ** 3


def c3(q):
    return q ** 12 + q ** 11 + 2 * q ** 10 - 2 * q ** 8 - 2 * q ** 7 + q ** 5


def nc2(q):
    return q ** 3 + q ** 2 - q


def nc3(q):
    return q ** 8 + q ** 7 + q ** 6 - q ** 5 - q ** 4


@pytest.mark.parametrize("n,p", [(1, 2), (1, 3), (2, 2)])
def test_bruteforce_matches_naive_loop(n, p):
    assert count_commuting_bruteforce(n, p) == commuting_pairs_naive(n, p)


@pytest.mark.parametrize("n,p", [(1, 2), (1, 3), (2, 2), (2, 3)])
def test_kernel_matches_bruteforce(n, p):
    assert count_commuting_kernel(n, p) == count_commuting_bruteforce(n, p)


@pytest.mark.parametrize("n,p", [(1, 2), (1, 5), (2, 2), (2, 3), (2, 5), (2, 7), (3, 2), (3, 3)])
def test_class_sum_matches_kernel(n, p):
    assert count_commuting_classes(n, p) == count_commuting_kernel(n, p)


@pytest.mark.parametrize("n,p", [(2, 2), (2, 3), (2, 5), (3, 2), (3, 3)])
def test_nilpotent_class_sum_matches_enumeration(n, p):
    assert count_nilpotent_classes(n, p) == count_nilpotent_commuting(n, p)


def test_spot_values():
    assert count_commuting("commuting", 1, 2) == 4
    assert [count_commuting("commuting", 2, q) for q in (2, 3)] == [88, 945]
    assert [count_commuting("commuting", 3, q) for q in (2, 3)] == [7456, 809433]
    assert [count_commuting("nilcommuting", 2, q) for q in (2, 3)] == [10, 33]
    assert [count_commuting("nilcommuting", 3, q) for q in (2, 3)] == [400, 9153]


@pytest.mark.parametrize("q", [2, 3, 5, 7, 11, 13])
def test_known_polynomials_at_larger_primes(q):
    assert count_commuting_classes(2, q) == c2(q)
    assert count_commuting_classes(3, q) == c3(q)
    assert count_nilpotent_classes(2, q) == nc2(q)
    assert count_nilpotent_classes(3, q) == nc3(q)


def test_nilpotent_counts_over_f4():
    assert count_nilpotent_commuting(1, 4) == 1
    assert count_nilpotent_commuting(2, 4) == 76 == nc2(4)


@pytest.mark.parametrize("n,p", [(1, 3), (2, 2), (2, 3), (3, 2), (3, 3), (3, 5)])
def test_nilpotent_matrices_count_q_to_n2_minus_n(n, p):
    assert nilpotent_matrix_count(n, p) == p ** (n * n - n)


@pytest.mark.parametrize("n,p", [(2, 7), (3, 5), (3, 7)])
def test_similarity_types_cover_the_matrix_space(n, p):
    assert sum(r.class_count * r.orbit_size for r in type_table(n, p)) == p ** (n * n)


def test_interpolation_recovers_degree_two_variety():
    poly = interpolate_count_polynomial("commuting", 2, 8)
    assert poly.coefficients == (0, 0, 0, -1, 0, 1, 1)
    assert poly.degree == 6 and poly.leading_coefficient == 1
    assert poly(poly.held_out) == c2(poly.held_out)


def test_interpolation_nilpotent_n2():
    poly = interpolate_count_polynomial("nilcommuting", 2, 5)
    assert poly.coefficients == (0, -1, 1, 1)


def test_interpolation_detects_low_degree_bound():
    with pytest.raises(ExpectationFailure):
        interpolate_count_polynomial("commuting", 2, 4)


def test_interpolation_with_callable():
    poly = interpolate_count_polynomial(lambda n, p: p ** n + 3, 2, 3)
    assert poly.coefficients == (3, 0, 1)


def test_size_bounds():
    with pytest.raises(InfeasibleError):
        count_commuting_bruteforce(2, 11)
    with pytest.raises(InfeasibleError):
        count_commuting_kernel(3, 11)
    with pytest.raises(PreconditionError):
        count_commuting("triples", 1, 2)
    with pytest.raises(PreconditionError):
        count_commuting("commuting", 1, 2, method="magic")


def test_commpair_validation():
    CommPair.from_lists(2, [[1, 0], [0, 0]], [[0, 0], [0, 1]])
    with pytest.raises(PreconditionError):
        CommPair.from_lists(2, [[0, 1], [0, 0]], [[0, 0], [1, 0]])
    with pytest.raises(PreconditionError):
        CommPair(Matrix(2, [[1]]), Matrix(3, [[1]]))


@given(st.integers(0, 2 ** 8 - 1), st.integers(0, 5))
def test_commuting_is_conjugation_invariant(code, gi):
    from cohalab.linalg import decode, field

    F = field(2)
    A = decode(np.array([code]), 2, 4).reshape(2, 2)
    # polynomials in A commute with A
    B = F.add(F.matmul(A, A), A)
    M = CommPair(Matrix(F, A), Matrix(F, B))
    g, ginv = general_linear_group(2, 2)
    A2 = F.matmul(F.matmul(g[gi], A), ginv[gi])
    B2 = F.matmul(F.matmul(g[gi], B), ginv[gi])
    assert CommPair(Matrix(F, A2), Matrix(F, B2)).n == M.n


def test_parallel_kernel_count_is_deterministic():
    assert count_commuting_kernel(2, 5, workers=2) == count_commuting_kernel(2, 5) == c2(5)
