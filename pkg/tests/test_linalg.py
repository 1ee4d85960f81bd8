import numpy as np
import pytest
from hypothesis import given, strategies as st

from cohalab.errors import InfeasibleError, PreconditionError
from cohalab.linalg import (
    GF4,
    Matrix,
    adjoint_operator,
    batch_adjoint,
    batch_inverse,
    batch_rank,
    decode,
    encode,
    field,
    general_linear_group,
    gl_order,
    inverse,
    is_prime,
    kernel_basis,
    rank,
    rref,
)

FIELDS = [2, 3, 5, 7, 4]


@st.composite
def matrices(draw, q=None, n=None, m=None):
    q = draw(st.sampled_from(FIELDS)) if q is None else q
    n = draw(st.integers(1, 4)) if n is None else n
    m = n if m is None else m
    entries = draw(st.lists(st.integers(0, q - 1), min_size=n * m, max_size=n * m))
    return Matrix(q, np.array(entries).reshape(n, m))


def test_prime_detection():
    assert [k for k in range(20) if is_prime(k)] == [2, 3, 5, 7, 11, 13, 17, 19]


def test_field_rejects_composites():
    with pytest.raises(PreconditionError):
        field(6)


def test_gf4_is_a_field():
    F = GF4()
    xs = np.arange(4)
    a, b = np.meshgrid(xs, xs)
    # multiplicative group is cyclic of order 3 generated by z (= 2)
    assert {int(F.mul(2, 2)), int(F.mul(2, F.mul(2, 2)))} == {3, 1}
    assert (F.mul(a, b) == F.mul(b, a)).all()
    for x in range(1, 4):
        assert F.mul(x, F.inv(x)) == 1
    # distributivity on all triples
    for x in range(4):
        assert (F.mul(x, F.add(a, b)) == F.add(F.mul(x, a), F.mul(x, b))).all()


@given(matrices())
def test_rank_nullity(M):
    assert rank(M) + len(kernel_basis(M)) == M.shape[1]


@given(matrices())
def test_kernel_vectors_are_killed(M):
    for v in kernel_basis(M):
        assert not M.field.matmul(M.entries, np.array(v)).any()


@given(matrices())
def test_rref_is_idempotent(M):
    R, piv = rref(M)
    R2, piv2 = rref(R)
    assert R == R2 and piv == piv2


@given(matrices())
def test_inverse_when_full_rank(M):
    n = M.shape[0]
    if rank(M) == n:
        assert M @ inverse(M) == Matrix.identity(M.field, n)
        assert inverse(M) @ M == Matrix.identity(M.field, n)
    else:
        with pytest.raises(PreconditionError):
            inverse(M)


@given(st.sampled_from(FIELDS), st.integers(1, 3), st.data())
def test_batched_rank_and_inverse_agree(q, n, data):
    mats = [data.draw(matrices(q, n)) for _ in range(6)]
    F = field(q)
    arr = np.array([m.entries for m in mats])
    assert list(batch_rank(arr, F)) == [rank(m) for m in mats]
    full = arr[batch_rank(arr, F) == n]
    if len(full):
        inv = batch_inverse(full, F)
        assert (F.matmul(full, inv) == np.eye(n, dtype=np.int64)).all()


@given(matrices(), st.data())
def test_adjoint_kernel_is_the_centralizer(A, data):
    F = A.field
    n = A.shape[0]
    ad = adjoint_operator(A)
    assert (batch_adjoint(A.entries[None], F)[0] == ad.entries).all()
    X = data.draw(matrices(F.order, n))
    commutes = A @ X == X @ A
    killed = not F.matmul(ad.entries, X.entries.ravel()).any()
    assert commutes == killed


def test_adjoint_size_bound():
    with pytest.raises(InfeasibleError):
        adjoint_operator(Matrix.zeros(2, 5))


@given(st.sampled_from([2, 3, 5]), st.integers(1, 6), st.lists(st.integers(0, 10 ** 6), max_size=20))
def test_code_round_trip(q, k, raw):
    codes = np.array([c % q ** k for c in raw], dtype=np.int64)
    assert (encode(decode(codes, q, k), q) == codes).all()


@given(matrices(q=3, n=2))
def test_code_is_lexicographic(M):
    digits = decode(np.array([M.code()]), 3, 4)[0]
    assert tuple(digits) == M.flatten()


@pytest.mark.parametrize("n,q", [(1, 2), (2, 2), (2, 3), (3, 2), (2, 4), (2, 5)])
def test_general_linear_group_order(n, q):
    g, ginv = general_linear_group(n, q)
    assert len(g) == gl_order(n, q)
    F = field(q)
    assert (F.matmul(g, ginv) == np.eye(n, dtype=np.int64)).all()


def test_gl_orders():
    assert [gl_order(n, 2) for n in range(4)] == [1, 1, 6, 168]
    assert gl_order(3, 3) == 11232


def test_matrix_validation():
    with pytest.raises(PreconditionError):
        Matrix(3, [[0, 3]])
    with pytest.raises(PreconditionError):
        Matrix(2, [1, 0, 1])
    with pytest.raises(PreconditionError):
        Matrix(2, [[1, 0]]) @ Matrix(3, [[1], [0]])
