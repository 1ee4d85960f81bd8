"""Point counts of commuting and nilpotent commuting varieties.

Three independent routes to |C_n(F_q)|:

``count_commuting_bruteforce``
    enumerate every ordered pair (A, B) and test AB = BA;
``count_commuting_kernel``
    sum q^(dim ker ad_A) over all A;
``count_commuting_classes``
    regroup that sum by similarity class of A (see ``cohalab.similarity``).

``interpolate_count_polynomial`` recovers the count as a polynomial in q by
exact Lagrange interpolation through prime values, with a held-out prime.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import similarity
from .errors import ExpectationFailure, InfeasibleError, PreconditionError
from .linalg import (
    Matrix,
    adjoint_operator,
    batch_adjoint,
    batch_power_is_zero,
    batch_rank,
    field,
    gl_order,
    iter_matrix_blocks,
    kernel_basis,
    matrix_block,
    primes,
    span_elements,
)

__all__ = [
    "CommPair",
    "CountPolynomial",
    "count_commuting",
    "count_commuting_bruteforce",
    "count_commuting_kernel",
    "count_commuting_classes",
    "count_nilpotent_commuting",
    "count_nilpotent_classes",
    "gl_order",
    "interpolate_count_polynomial",
]

BRUTE_LIMIT = 10 ** 7
KERNEL_LIMIT = 10 ** 8
CHUNK = 1 << 15


@dataclass(frozen=True)
class CommPair:
    """An ordered pair of commuting n x n matrices: a length-n module over k[x, y]."""

    A: Matrix
    B: Matrix

    def __post_init__(self):
        if self.A.field != self.B.field:
            raise PreconditionError("A and B live over different fields")
        if not (self.A.is_square() and self.A.shape == self.B.shape):
            raise PreconditionError("A and B must be square of the same size")
        if self.A @ self.B != self.B @ self.A:
            raise PreconditionError("A and B do not commute")

    @classmethod
    def from_lists(cls, q: int, A, B) -> "CommPair":
        F = field(q)
        n = len(A)
        return cls(Matrix(F, np.reshape(np.array(A, dtype=np.int64), (n, n))),
                   Matrix(F, np.reshape(np.array(B, dtype=np.int64), (n, n))))

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def modulus(self) -> int:
        return self.A.field.order

    @property
    def field(self):
        return self.A.field

    def code(self) -> tuple[int, int]:
        return self.A.code(), self.B.code()

    def to_json(self) -> dict:
        return {"p": self.modulus, "n": self.n, "A": self.A.tolist(), "B": self.B.tolist()}


def _need(ok: bool, msg: str):
    if not ok:
        raise InfeasibleError(msg)


def count_commuting_bruteforce(n: int, p: int) -> int:
    """Number of ordered pairs (A, B) over F_p with AB = BA, by full enumeration."""
    F = field(p)
    _need(p ** (2 * n * n) <= BRUTE_LIMIT, f"p^(2n^2) = {p ** (2 * n * n)} exceeds {BRUTE_LIMIT}")
    if n == 0:
        return 1
    total_mats = p ** (n * n)
    allm = matrix_block(F, n, 0, total_mats)
    step = max(1, 4_000_000 // (total_mats * n * n))
    count = 0
    for start in range(0, total_mats, step):
        A = allm[start:start + step]
        AB = F.matmul(A[:, None], allm[None])
        BA = F.matmul(allm[None], A[:, None])
        count += int((AB == BA).all(axis=(2, 3)).sum())
    return count


def _kernel_histogram(n: int, q: int, start: int, stop: int) -> np.ndarray:
    F = field(q)
    A = matrix_block(F, n, start, stop)
    nullity = n * n - batch_rank(batch_adjoint(A, F), F)
    return np.bincount(nullity, minlength=n * n + 1)


def count_commuting_kernel(n: int, p: int, workers: int = 1) -> int:
    """|C_n(F_p)| = sum over A of p^(dim ker ad_A)."""
    _need(n <= 4, "n must be at most 4")
    _need(p ** (n * n) <= KERNEL_LIMIT, f"p^(n^2) = {p ** (n * n)} exceeds {KERNEL_LIMIT}")
    field(p)
    if n == 0:
        return 1
    total = p ** (n * n)
    ranges = [(s, min(total, s + CHUNK)) for s in range(0, total, CHUNK)]
    hist = np.zeros(n * n + 1, dtype=np.int64)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            for h in ex.map(_kernel_histogram, *zip(*[(n, p, a, b) for a, b in ranges])):
                hist += h
    else:
        for a, b in ranges:
            hist += _kernel_histogram(n, p, a, b)
    return sum(int(c) * p ** k for k, c in enumerate(hist))


def count_nilpotent_commuting(n: int, q: int) -> int:
    """Pairs with AB = BA and A^n = B^n = 0, enumerating B inside ker ad_A.

    ``q`` may be a prime or 4.
    """
    _need(n <= 3, "n must be at most 3")
    F = field(q)
    _need(q ** (n * n) <= KERNEL_LIMIT, f"q^(n^2) = {q ** (n * n)} exceeds {KERNEL_LIMIT}")
    if n == 0:
        return 1
    count = 0
    for block in iter_matrix_blocks(F, n, CHUNK):
        for A in block[batch_power_is_zero(block, n, F)]:
            basis = np.array(kernel_basis(adjoint_operator(Matrix(F, A))), dtype=np.int64)
            _need(q ** len(basis) <= KERNEL_LIMIT, "centralizer too large to enumerate")
            for lo in range(0, q ** len(basis), 1 << 18):
                Bs = _span_slice(F, basis, lo, min(q ** len(basis), lo + (1 << 18)))
                count += int(batch_power_is_zero(Bs.reshape(-1, n, n), n, F).sum())
    return count


def _span_slice(F, basis: np.ndarray, lo: int, hi: int) -> np.ndarray:
    from .linalg import decode

    k = basis.shape[0]
    coeffs = decode(np.arange(lo, hi, dtype=np.int64), F.order, k)
    out = np.zeros((hi - lo, basis.shape[1]), dtype=np.int64)
    for i in range(k):
        out = F.add(out, F.mul(coeffs[:, i:i + 1], basis[i][None, :]))
    return out


def count_commuting_classes(n: int, p: int) -> int:
    """|C_n(F_p)| via the similarity-class decomposition; any prime p."""
    _need(n <= 3, "n must be at most 3")
    return similarity.count_commuting_classes(n, p)


def count_nilpotent_classes(n: int, p: int) -> int:
    """|NC_n(F_p)| via nilpotent Jordan types; any prime p."""
    _need(n <= 3, "n must be at most 3")
    return similarity.count_nilpotent_classes(n, p)


METHODS: dict[str, dict[str, Callable[[int, int], int]]] = {
    "commuting": {
        "brute": count_commuting_bruteforce,
        "kernel": count_commuting_kernel,
        "classes": count_commuting_classes,
    },
    "nilcommuting": {
        "kernel": count_nilpotent_commuting,
        "classes": count_nilpotent_classes,
    },
}


def count_commuting(variety: str, n: int, p: int, method: str = "auto") -> int:
    """Dispatch to a counting method; ``auto`` enumerates when cheap, else uses classes."""
    if variety not in METHODS:
        raise PreconditionError(f"unknown variety {variety!r}")
    if method == "auto":
        method = "kernel" if p ** (n * n) <= 10 ** 5 else "classes"
    try:
        fn = METHODS[variety][method]
    except KeyError:
        raise PreconditionError(f"method {method!r} not available for {variety}") from None
    return fn(n, p)


@dataclass(frozen=True)
class CountPolynomial:
    """Integer polynomial in q, coefficients listed from the constant term up."""

    coefficients: tuple[int, ...]
    primes: tuple[int, ...] = ()
    held_out: int | None = None
    values: tuple[int, ...] = dc_field(default=(), compare=False)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def leading_coefficient(self) -> int:
        return self.coefficients[-1]

    def __call__(self, q):
        out = 0
        for c in reversed(self.coefficients):
            out = out * q + c
        return out

    def to_json(self) -> dict:
        return {"coefficients": list(self.coefficients), "degree": self.degree,
                "leading_coefficient": self.leading_coefficient, "primes": list(self.primes),
                "held_out": self.held_out, "values": list(self.values), "polynomial": str(self)}

    @classmethod
    def from_json(cls, obj: dict) -> "CountPolynomial":
        return cls(tuple(obj["coefficients"]), tuple(obj.get("primes", ())), obj.get("held_out"),
                   tuple(obj.get("values", ())))

    def __str__(self):
        terms = []
        for k in range(self.degree, -1, -1):
            c = self.coefficients[k]
            if c:
                terms.append(f"{c}*q^{k}")
        return " + ".join(terms) or "0"


def lagrange_coefficients(xs, ys) -> list[Fraction]:
    """Monomial coefficients of the interpolating polynomial, via Newton divided differences."""
    m = len(xs)
    dd = [Fraction(y) for y in ys]
    for j in range(1, m):
        for i in range(m - 1, j - 1, -1):
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - j])
    coeffs = [Fraction(0)] * m
    for i in range(m - 1, -1, -1):
        # coeffs = coeffs * (q - xs[i]) + dd[i]
        new = [Fraction(0)] * m
        for k in range(m - 1):
            new[k + 1] += coeffs[k]
        for k in range(m):
            new[k] -= xs[i] * coeffs[k]
        new[0] += dd[i]
        coeffs = new
    return coeffs


def interpolate_count_polynomial(counter, n: int, degree_bound: int,
                                 method: str = "auto") -> CountPolynomial:
    """Interpolate p -> counter(n, p) through degree_bound + 1 primes, check one more.

    ``counter`` is a variety name (``"commuting"`` or ``"nilcommuting"``) or a
    callable ``(n, p) -> int``.  Primes that the counter rejects as infeasible
    are skipped.
    """
    if isinstance(counter, str):
        variety = counter

        def counter(n_, p_):
            return count_commuting(variety, n_, p_, method)

    xs, ys = [], []
    for p in primes():
        if len(xs) == degree_bound + 2:
            break
        if p > 1000:
            raise InfeasibleError("not enough feasible primes for interpolation")
        try:
            ys.append(counter(n, p))
        except InfeasibleError:
            continue
        xs.append(p)
    coeffs = lagrange_coefficients(xs[:-1], ys[:-1])
    if any(c.denominator != 1 for c in coeffs):
        raise ExpectationFailure("degree_bound too small or counting bug: non-integer coefficients")
    ints = [int(c) for c in coeffs]
    while len(ints) > 1 and ints[-1] == 0:
        ints.pop()
    poly = CountPolynomial(tuple(ints), tuple(xs[:-1]), xs[-1], tuple(ys))
    if poly(xs[-1]) != ys[-1]:
        raise ExpectationFailure("degree_bound too small or counting bug: held-out prime mismatch")
    return poly
