import numpy as np
import pytest
from hypothesis import given, strategies as st

from cohalab.commvar import CommPair, count_commuting_kernel
from cohalab.errors import PreconditionError
from cohalab.hallalg import (
    HallElement,
    ModuleClass,
    ModuleClassTable,
    automorphism_order,
    canonical_code,
    check_associativity,
    commutator_table,
    enumerate_classes,
    hall_number,
    hall_product,
    is_isomorphic,
    submodules,
)
from cohalab.linalg import Matrix, decode, field, general_linear_group, gl_order

from oracles import subspaces_naive

J2 = [[0, 1], [0, 0]]
Z2 = [[0, 0], [0, 0]]


def pair(p, A, B):
    return CommPair.from_lists(p, A, B)


@pytest.fixture(scope="module")
def t2():
    return enumerate_classes(3, 2)


def test_length_one_classes():
    t = enumerate_classes(1, 2)
    assert len(t.by_length[1]) == 4
    assert all(c.automorphism_order == 1 for c in t.by_length[1])
    t = enumerate_classes(1, 3)
    assert len(t.by_length[1]) == 9
    assert all(c.automorphism_order == 2 for c in t.by_length[1])


def test_class_counts_frozen(t2):
    assert [len(t2.by_length[n]) for n in range(4)] == [1, 4, 28, 144]


@pytest.mark.parametrize("p", [2, 3])
def test_orbit_stabilizer_completeness(p):
    t = enumerate_classes(3, p)
    for n, total in t.orbit_sums().items():
        assert total == (count_commuting_kernel(n, p) if n else 1)


def test_automorphism_orders_divide_group_order(t2):
    for c in t2.classes:
        assert gl_order(c.length, 2) % c.automorphism_order == 0


def test_class_names_and_representatives(t2):
    for n, cs in t2.by_length.items():
        assert [c.name for c in cs] == [f"n{n}-{i}" for i in range(len(cs))]
        for c in cs:
            assert canonical_code(c.representative) == c.key
    keys = [c.key for c in t2.by_length[2]]
    assert keys == sorted(keys)


def test_submodules_of_zero_pair():
    assert len(submodules(pair(2, Z2, Z2))) == 5


def test_submodules_of_jordan_block():
    subs = submodules(pair(2, J2, Z2))
    assert len(subs) == 3
    assert [s.sub.n for s in subs] == [0, 1, 2]
    assert subs[1].basis.tolist() == [[1, 0]]


def test_submodules_of_split_points():
    assert len(submodules(pair(2, [[0, 0], [0, 1]], Z2))) == 4


@given(st.integers(0, 2 ** 8 - 1), st.integers(0, 3))
def test_submodules_match_invariant_subspace_oracle(code, k):
    F = field(2)
    A = decode(np.array([code]), 2, 4).reshape(2, 2)
    B = F.matmul(A, A) if k % 2 else np.eye(2, dtype=np.int64) * (k // 2)
    M = CommPair(Matrix(F, A), Matrix(F, B))
    want = 0
    for U in subspaces_naive(2, 2):
        if all(tuple(F.matmul(X, np.array(u))) in U for u in U for X in (A, B)):
            want += 1
    assert len(submodules(M)) == want


def test_isomorphism_examples():
    M = pair(2, J2, Z2)
    assert is_isomorphic(M, M)
    assert not is_isomorphic(M, pair(2, Z2, J2))
    assert not is_isomorphic(pair(2, [[0, 0], [0, 1]], Z2), pair(2, [[1, 0], [0, 1]], Z2))
    assert is_isomorphic(pair(2, [[0, 0], [0, 1]], Z2), pair(2, [[1, 0], [0, 0]], Z2))
    with pytest.raises(PreconditionError):
        is_isomorphic(M, pair(2, [[0]], [[0]]))


@st.composite
def conjugate_triples(draw):
    p = 3
    F = field(p)
    a = draw(st.integers(0, p ** 4 - 1))
    A = decode(np.array([a]), p, 4).reshape(2, 2)
    c0, c1 = draw(st.integers(0, 2)), draw(st.integers(0, 2))
    B = F.add(F.mul(c0, np.eye(2, dtype=np.int64)), F.mul(c1, A))
    g, ginv = general_linear_group(2, p)
    out = [CommPair(Matrix(F, A), Matrix(F, B))]
    for _ in range(2):
        i = draw(st.integers(0, len(g) - 1))
        out.append(CommPair(Matrix(F, F.matmul(F.matmul(g[i], A), ginv[i])),
                            Matrix(F, F.matmul(F.matmul(g[i], B), ginv[i]))))
    other = draw(st.integers(0, p ** 4 - 1))
    C = decode(np.array([other]), p, 4).reshape(2, 2)
    return out, CommPair(Matrix(F, C), Matrix(F, np.zeros((2, 2), dtype=np.int64)))


@given(conjugate_triples())
def test_isomorphism_is_an_equivalence(data):
    (x, y, z), w = data
    assert is_isomorphic(x, x)
    assert is_isomorphic(x, y) and is_isomorphic(y, x)
    assert is_isomorphic(y, z) and is_isomorphic(x, z)
    assert is_isomorphic(x, w) == is_isomorphic(w, x)
    assert is_isomorphic(x, w) == (canonical_code(x) == canonical_code(w))


def test_hall_numbers(t2):
    k0, k1 = t2.point_class(0, 0), t2.point_class(1, 0)
    split = ModuleClass.of(pair(2, [[0, 0], [0, 1]], Z2))
    assert hall_number(split, k0, k1) == 1
    assert hall_number(split, k1, k0) == 1
    assert hall_number(ModuleClass.of(pair(2, Z2, Z2)), k0, k0) == 3
    assert hall_number(ModuleClass.of(pair(2, J2, Z2)), k0, k0) == 1
    assert hall_number(split, k0, t2.classes[0]) == 0


def test_table_constants_match_hall_number(t2):
    for (N, L), row in list(t2.structure_constants.items())[:60]:
        for M, g in row.items():
            assert hall_number(t2[M], t2[N], t2[L]) == g


def test_hall_product_split_points(t2):
    ka, kb = t2.point_class(0, 0), t2.point_class(1, 1)
    prod = hall_product(HallElement.basis(ka), HallElement.basis(kb), t2)
    (M, c), = prod.coefficients.items()
    assert c == 1
    assert is_isomorphic(M.representative, pair(2, [[0, 0], [0, 1]], [[0, 0], [0, 1]]))


def test_hall_product_origin_squared(t2):
    k0 = t2.point_class(0, 0)
    prod = hall_product(HallElement.basis(k0), HallElement.basis(k0), t2)
    zero = t2.classify(pair(2, Z2, Z2))
    assert prod.coefficients[zero] == 3
    # the other summands are the three curvilinear length-2 modules at the origin, once each
    others = {M: c for M, c in prod.coefficients.items() if M != zero}
    assert sorted(others.values()) == [1, 1, 1]
    assert all(c.fingerprint[1] == (0, 0, 1) for c in others)


def test_hall_product_linearity(t2):
    k0 = HallElement.basis(t2.point_class(0, 0))
    assert hall_product(HallElement(), k0, t2) == HallElement()
    two = k0.scale(2)
    assert hall_product(two, k0, t2) == hall_product(k0, k0, t2).scale(2)


def test_hall_product_grading(t2):
    for N in t2.by_length[1]:
        for L in t2.by_length[2]:
            prod = hall_product(HallElement.basis(N), HallElement.basis(L), t2)
            assert {M.length for M in prod.coefficients} <= {3}


def test_hall_product_needs_long_enough_table():
    t = enumerate_classes(1, 2)
    k0 = HallElement.basis(t.point_class(0, 0))
    with pytest.raises(PreconditionError):
        hall_product(k0, k0, t)


def test_submodule_partition_by_quotient(t2):
    for M in t2.by_length[2][::3] + t2.by_length[3][::24]:
        subs = submodules(M.representative)
        for N in t2.classes:
            if N.length > M.length:
                continue
            by_sub = sum(1 for s in subs if s.sub.n == N.length and is_isomorphic(s.sub, N.representative))
            by_pair = sum(hall_number(M, N, L) for L in t2.by_length[M.length - N.length])
            assert by_sub == by_pair


def test_associativity_length_three(t2):
    rep = check_associativity(t2, 3)
    assert rep.passed and rep.triples_checked > 1000


def test_commutator_table_shape(t2):
    entries = commutator_table(t2, 3)
    by_pair = {(e.left, e.right): e.defect for e in entries}
    k0, k1 = t2.point_class(0, 0).name, t2.point_class(1, 0).name
    assert by_pair[(k0, k1)] == 0
    assert by_pair[(k0, k0)] == 0
    assert all(by_pair[(a, b)] == by_pair[(b, a)] for a, b in by_pair)


def test_table_json_round_trip(t2):
    t = enumerate_classes(2, 3)
    back = ModuleClassTable.from_json(t.to_json())
    assert back.to_json() == t.to_json()
    assert back.classes == t.classes


def test_automorphism_order_of_zero_pair():
    assert automorphism_order(pair(3, Z2, Z2)) == gl_order(2, 3)


def test_size_preconditions():
    with pytest.raises(PreconditionError):
        enumerate_classes(4, 2)
    with pytest.raises(PreconditionError):
        enumerate_classes(2, 5)
