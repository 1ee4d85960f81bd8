"""Exact dense linear algebra over F_p (and over F_4).

Elements are stored as small non-negative integers in numpy ``int64``
arrays.  ``PrimeField`` does arithmetic modulo p; ``GF4`` encodes
``a + b*z`` (with ``z**2 = z + 1``) as the integer ``a + 2*b`` and uses
lookup tables.  Both expose the same vectorised operations, so the
matrix routines below are written once against that interface.

The batched helpers (``batch_rank``, ``batch_adjoint``, ...) operate on
arrays of shape ``(batch, rows, cols)`` and are the hot path of every
counting routine in the package.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import InfeasibleError, PreconditionError

MAX_MATRIX_SIZE = 4


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def primes(start: int = 2) -> Iterator[int]:
    """Yield primes >= start in increasing order."""
    k = max(start, 2)
    while True:
        if is_prime(k):
            yield k
        k += 1


class PrimeField:
    """The field Z/pZ."""

    def __init__(self, p: int):
        if not is_prime(p):
            raise PreconditionError(f"modulus {p} is not prime")
        self.order = p
        self.characteristic = p
        inv = np.zeros(p, dtype=np.int64)
        for a in range(1, p):
            inv[a] = pow(a, p - 2, p)
        self._inv = inv

    def __repr__(self):
        return f"GF({self.order})"

    def __eq__(self, other):
        return type(other) is type(self) and other.order == self.order

    def __hash__(self):
        return hash(("GF", self.order))

    def add(self, a, b):
        return (a + b) % self.order

    def sub(self, a, b):
        return (a - b) % self.order

    def neg(self, a):
        return (-a) % self.order

    def mul(self, a, b):
        return (a * b) % self.order

    def inv(self, a):
        if np.any(np.asarray(a) == 0):
            raise ZeroDivisionError("inverse of zero")
        return self._inv[a]

    def matmul(self, a, b):
        return np.matmul(a, b) % self.order

    def from_int(self, k: int) -> int:
        return k % self.order


class GF4:
    """The field F_2[z]/(z^2 + z + 1); element a + b*z is stored as a + 2b."""

    order = 4
    characteristic = 2

    def __init__(self):
        mul = np.zeros((4, 4), dtype=np.int64)
        for x in range(4):
            for y in range(4):
                a0, a1 = x & 1, x >> 1
                b0, b1 = y & 1, y >> 1
                # (a0 + a1 z)(b0 + b1 z) with z^2 = z + 1
                c0 = (a0 * b0 + a1 * b1) & 1
                c1 = (a0 * b1 + a1 * b0 + a1 * b1) & 1
                mul[x, y] = c0 + 2 * c1
        self._mul = mul
        inv = np.zeros(4, dtype=np.int64)
        for x in range(1, 4):
            inv[x] = next(y for y in range(1, 4) if mul[x, y] == 1)
        self._inv = inv

    def __repr__(self):
        return "GF(4)"

    def __eq__(self, other):
        return type(other) is type(self)

    def __hash__(self):
        return hash(("GF", 4))

    def add(self, a, b):
        return np.bitwise_xor(a, b)

    sub = add

    def neg(self, a):
        return np.asarray(a) + 0

    def mul(self, a, b):
        return self._mul[a, b]

    def inv(self, a):
        if np.any(np.asarray(a) == 0):
            raise ZeroDivisionError("inverse of zero")
        return self._inv[a]

    def matmul(self, a, b):
        a = np.asarray(a)
        b = np.asarray(b)
        if b.ndim == 1:
            return self.matmul(a, b[:, None])[..., 0]
        if a.ndim == 1:
            return self.matmul(a[None, :], b)[..., 0, :]
        prod = self._mul[a[..., :, :, None], b[..., None, :, :]]
        return np.bitwise_xor.reduce(prod, axis=-2)

    def from_int(self, k: int) -> int:
        return k & 1


@lru_cache(maxsize=None)
def field(q: int):
    """Return the field with q elements (q prime, or q = 4)."""
    if q == 4:
        return GF4()
    return PrimeField(q)


class Matrix:
    """Immutable dense matrix over a finite field."""

    __slots__ = ("field", "_a")

    def __init__(self, fld, entries):
        if isinstance(fld, int):
            fld = field(fld)
        a = np.array(entries, dtype=np.int64)
        if a.ndim == 1 and a.size == 0:
            a = a.reshape(0, 0)
        if a.ndim != 2:
            raise PreconditionError("matrix entries must be two-dimensional")
        if a.size and (a.min() < 0 or a.max() >= fld.order):
            raise PreconditionError(f"entries must lie in [0, {fld.order})")
        a.setflags(write=False)
        self.field = fld
        self._a = a

    @classmethod
    def zeros(cls, fld, rows: int, cols: int | None = None) -> "Matrix":
        return cls(fld, np.zeros((rows, rows if cols is None else cols), dtype=np.int64))

    @classmethod
    def identity(cls, fld, n: int) -> "Matrix":
        return cls(fld, np.eye(n, dtype=np.int64))

    @classmethod
    def _wrap(cls, fld, arr) -> "Matrix":
        m = object.__new__(cls)
        arr = np.ascontiguousarray(arr, dtype=np.int64)
        arr.setflags(write=False)
        m.field = fld
        m._a = arr
        return m

    @property
    def entries(self) -> np.ndarray:
        return self._a

    @property
    def shape(self) -> tuple[int, int]:
        return self._a.shape

    @property
    def modulus(self) -> int:
        return self.field.order

    def is_square(self) -> bool:
        return self._a.shape[0] == self._a.shape[1]

    def _check(self, other):
        if not isinstance(other, Matrix) or other.field != self.field:
            raise PreconditionError("matrices over different fields")

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.shape[1] != other.shape[0]:
            raise PreconditionError(f"shape mismatch {self.shape} @ {other.shape}")
        if self.shape[1] == 0:
            return Matrix.zeros(self.field, self.shape[0], other.shape[1])
        return Matrix._wrap(self.field, self.field.matmul(self._a, other._a))

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        return Matrix._wrap(self.field, self.field.add(self._a, other._a))

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        return Matrix._wrap(self.field, self.field.sub(self._a, other._a))

    def __neg__(self) -> "Matrix":
        return Matrix._wrap(self.field, self.field.neg(self._a))

    def scale(self, c: int) -> "Matrix":
        return Matrix._wrap(self.field, self.field.mul(np.int64(c), self._a))

    def transpose(self) -> "Matrix":
        return Matrix._wrap(self.field, self._a.T)

    T = property(transpose)

    def power(self, k: int) -> "Matrix":
        if not self.is_square():
            raise PreconditionError("power of a non-square matrix")
        result = Matrix.identity(self.field, self.shape[0])
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def is_zero(self) -> bool:
        return not self._a.any()

    def tolist(self) -> list[list[int]]:
        return self._a.tolist()

    def flatten(self) -> tuple[int, ...]:
        return tuple(int(v) for v in self._a.ravel())

    def code(self) -> int:
        """Row-major base-q integer code; numeric order is lexicographic order."""
        c = 0
        q = self.field.order
        for v in self._a.ravel():
            c = c * q + int(v)
        return c

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and other.field == self.field
            and other.shape == self.shape
            and np.array_equal(other._a, self._a)
        )

    def __hash__(self):
        return hash((self.field, self.shape, self._a.tobytes()))

    def __repr__(self):
        return f"Matrix({self.field!r}, {self.tolist()})"


PrimeFieldMatrix = Matrix


def rref(M: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    F = M.field
    a = np.array(M.entries)
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        a[r] = F.mul(F.inv(a[r, c]), a[r])
        for i in range(rows):
            if i != r and a[i, c]:
                a[i] = F.sub(a[i], F.mul(a[i, c], a[r]))
        pivots.append(c)
        r += 1
    return Matrix._wrap(F, a), pivots


def rank(M: Matrix) -> int:
    """Rank of M over its field."""
    return len(rref(M)[1])


def kernel_basis(M: Matrix) -> list[tuple[int, ...]]:
    """A basis of {v : M v = 0}, one vector per free column of the RREF."""
    F = M.field
    R, pivots = rref(M)
    cols = M.shape[1]
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = np.zeros(cols, dtype=np.int64)
        v[f] = 1
        for i, pc in enumerate(pivots):
            v[pc] = F.neg(R.entries[i, f])
        basis.append(tuple(int(x) for x in v))
    return basis


def inverse(M: Matrix) -> Matrix:
    n = M.shape[0]
    if not M.is_square():
        raise PreconditionError("inverse of a non-square matrix")
    aug = Matrix(M.field, np.hstack([M.entries, np.eye(n, dtype=np.int64)]))
    R, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise PreconditionError("matrix is singular")
    return Matrix._wrap(M.field, R.entries[:, n:])


def _check_square_size(A: Matrix) -> int:
    if not A.is_square():
        raise PreconditionError("expected a square matrix")
    n = A.shape[0]
    if n > MAX_MATRIX_SIZE:
        raise InfeasibleError(f"matrix size {n} exceeds the supported maximum {MAX_MATRIX_SIZE}")
    return n


def adjoint_operator(A: Matrix) -> Matrix:
    """The n^2 x n^2 matrix of X -> AX - XA acting on row-major flattenings."""
    n = _check_square_size(A)
    return Matrix._wrap(A.field, batch_adjoint(A.entries[None], A.field)[0])


def stack(mats: Sequence[Matrix]) -> Matrix:
    """Vertical concatenation."""
    F = mats[0].field
    return Matrix._wrap(F, np.vstack([m.entries for m in mats]))


def block_diag(F, blocks: Sequence[np.ndarray]) -> Matrix:
    n = sum(b.shape[0] for b in blocks)
    a = np.zeros((n, n), dtype=np.int64)
    k = 0
    for b in blocks:
        m = b.shape[0]
        a[k:k + m, k:k + m] = b
        k += m
    return Matrix(F, a)


# ---------------------------------------------------------------------------
# batched routines

def batch_adjoint(A: np.ndarray, F) -> np.ndarray:
    """ad_A = kron(A, I) - kron(I, A^T) for a stack of n x n matrices."""
    b, n, _ = A.shape
    eye = np.eye(n, dtype=np.int64)
    left = np.einsum("bik,jl->bijkl", A, eye)
    right = np.einsum("ik,blj->bijkl", eye, A)
    return F.sub(left, right).reshape(b, n * n, n * n)


def batch_rank(M: np.ndarray, F) -> np.ndarray:
    """Ranks of a stack of matrices, by simultaneous Gauss-Jordan elimination."""
    M = np.array(M, dtype=np.int64)
    B, m, n = M.shape
    rk = np.zeros(B, dtype=np.int64)
    rows = np.arange(m)
    for c in range(n):
        cand = (M[:, :, c] != 0) & (rows[None, :] >= rk[:, None])
        has = cand.any(axis=1)
        if not has.any():
            continue
        idx = np.nonzero(has)[0]
        piv = cand[idx].argmax(axis=1)
        r0 = rk[idx]
        prow = M[idx, piv].copy()
        M[idx, piv] = M[idx, r0]
        prow = F.mul(F.inv(prow[:, c])[:, None], prow)
        M[idx, r0] = prow
        fac = M[idx, :, c].copy()
        fac[np.arange(idx.size), r0] = 0
        M[idx] = F.sub(M[idx], F.mul(fac[:, :, None], prow[:, None, :]))
        rk[idx] += 1
    return rk


def batch_inverse(M: np.ndarray, F) -> np.ndarray:
    """Inverses of a stack of invertible n x n matrices."""
    B, n, _ = M.shape
    aug = np.concatenate([M, np.broadcast_to(np.eye(n, dtype=np.int64), (B, n, n))], axis=2)
    aug = np.array(aug)
    for c in range(n):
        cand = (aug[:, c:, c] != 0)
        if not cand.any(axis=1).all():
            raise PreconditionError("singular matrix in batch_inverse")
        piv = c + cand.argmax(axis=1)
        ar = np.arange(B)
        prow = aug[ar, piv].copy()
        aug[ar, piv] = aug[ar, c]
        prow = F.mul(F.inv(prow[:, c])[:, None], prow)
        aug[ar, c] = prow
        fac = aug[:, :, c].copy()
        fac[:, c] = 0
        aug = F.sub(aug, F.mul(fac[:, :, None], prow[:, None, :]))
    return aug[:, :, n:]


def batch_power_is_zero(M: np.ndarray, k: int, F) -> np.ndarray:
    """Boolean mask of matrices with M^k = 0."""
    n = M.shape[-1]
    P = np.broadcast_to(np.eye(n, dtype=np.int64), M.shape).copy()
    base = M
    while k:
        if k & 1:
            P = F.matmul(P, base)
        k >>= 1
        if k:
            base = F.matmul(base, base)
    return ~P.reshape(P.shape[0], -1).any(axis=1)


def decode(codes: np.ndarray, q: int, n_entries: int) -> np.ndarray:
    """Row-major digit vectors of base-q codes (most significant digit first)."""
    codes = np.asarray(codes, dtype=np.int64)
    out = np.empty(codes.shape + (n_entries,), dtype=np.int64)
    c = codes.copy()
    for k in range(n_entries - 1, -1, -1):
        out[..., k] = c % q
        c //= q
    return out


def encode(entries: np.ndarray, q: int) -> np.ndarray:
    """Inverse of ``decode`` on the last axis."""
    e = np.asarray(entries, dtype=np.int64)
    weights = q ** np.arange(e.shape[-1] - 1, -1, -1, dtype=np.int64)
    return e @ weights


def matrix_block(F, n: int, start: int, stop: int) -> np.ndarray:
    """All n x n matrices with codes in [start, stop), shape (stop-start, n, n)."""
    return decode(np.arange(start, stop, dtype=np.int64), F.order, n * n).reshape(-1, n, n)


def iter_matrix_blocks(F, n: int, chunk: int = 1 << 16) -> Iterator[np.ndarray]:
    total = F.order ** (n * n)
    for start in range(0, total, chunk):
        yield matrix_block(F, n, start, min(total, start + chunk))


def span_elements(F, basis: np.ndarray) -> np.ndarray:
    """All F-linear combinations of the rows of ``basis`` (shape (k, m))."""
    k, m = basis.shape
    if k == 0:
        return np.zeros((1, m), dtype=np.int64)
    coeffs = decode(np.arange(F.order ** k, dtype=np.int64), F.order, k)
    out = np.zeros((coeffs.shape[0], m), dtype=np.int64)
    for i in range(k):
        out = F.add(out, F.mul(coeffs[:, i:i + 1], basis[i][None, :]))
    return out


@lru_cache(maxsize=None)
def general_linear_group(n: int, q: int) -> tuple[np.ndarray, np.ndarray]:
    """All elements of GL_n(F_q) (in code order) and their inverses."""
    F = field(q)
    if q ** (n * n) > 10 ** 7:
        raise InfeasibleError(f"GL_{n}(F_{q}) enumeration too large")
    mats = matrix_block(F, n, 0, q ** (n * n))
    g = mats[batch_rank(mats, F) == n]
    ginv = batch_inverse(g, F)
    g.setflags(write=False)
    ginv.setflags(write=False)
    return g, ginv


def gl_order(n: int, q: int) -> int:
    """|GL_n(F_q)| = prod_{i<n} (q^n - q^i)."""
    if n < 0:
        raise PreconditionError("n must be non-negative")
    out = 1
    for i in range(n):
        out *= q ** n - q ** i
    return out


def coordinates(F, basis_cols: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    """Solve basis_cols @ X = vecs for X (columns of vecs lie in the span)."""
    m, k = basis_cols.shape
    aug = Matrix(F, np.hstack([basis_cols, vecs]))
    R, pivots = rref(aug)
    if pivots[:k] != list(range(k)) or any(p >= k for p in pivots):
        raise PreconditionError("vectors do not lie in the span of the basis")
    return np.array(R.entries[:k, k:])


def as_matrices(F, arr: Iterable) -> list[Matrix]:
    return [Matrix._wrap(F, a) for a in arr]
