"""Counting over similarity classes of n x n matrices over F_q.

Enumerating every matrix costs q^(n^2); for n = 3 this stops being
feasible beyond q = 7.  Here the sum over matrices is regrouped by
similarity class.  A class is described by its primary decomposition: for
each monic irreducible g dividing the characteristic polynomial, a
partition giving the sizes of the g-primary cyclic summands.  Classes with
the same degrees and partitions ("types") share centralizer data, so every
quantity is computed once on a representative built from companion
matrices:

* the centralizer dimension, as the nullity of ad_A;
* the centralizer unit count, by restricting the centralizer of each
  primary block to the socle ker g(B) (an element commuting with B is
  invertible, resp. nilpotent, iff its restriction to the socle is);
* the number of classes of the type, from enumerated irreducible counts.

The orbit sizes are cross-checked on every call: summed over all types
they must give q^(n^2).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from math import factorial, prod

import numpy as np

from .errors import ExpectationFailure, PreconditionError
from .linalg import (
    Matrix,
    adjoint_operator,
    batch_power_is_zero,
    batch_rank,
    block_diag,
    coordinates,
    decode,
    field,
    gl_order,
    kernel_basis,
    rank,
    span_elements,
)

Poly = tuple  # coefficients, constant term first, monic


def poly_mul(f: Poly, g: Poly, p: int) -> Poly:
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        for j, b in enumerate(g):
            out[i + j] = (out[i + j] + a * b) % p
    return tuple(out)


def poly_pow(f: Poly, k: int, p: int) -> Poly:
    out: Poly = (1,)
    for _ in range(k):
        out = poly_mul(out, f, p)
    return out


def companion(f: Poly, p: int) -> np.ndarray:
    d = len(f) - 1
    c = np.zeros((d, d), dtype=np.int64)
    for i in range(1, d):
        c[i, i - 1] = 1
    for i in range(d):
        c[i, d - 1] = (-f[i]) % p
    return c


def poly_at_matrix(f: Poly, M: Matrix) -> Matrix:
    n = M.shape[0]
    out = Matrix.zeros(M.field, n)
    for c in reversed(f):
        out = out @ M + Matrix.identity(M.field, n).scale(c)
    return out


@lru_cache(maxsize=None)
def irreducible_polys(d: int, p: int) -> tuple[Poly, ...]:
    """Monic irreducible polynomials of degree d over F_p (d <= 3), in code order."""
    if d == 1:
        return tuple((a, 1) for a in range(p))
    if d > 3:
        raise PreconditionError("irreducibility test implemented for degree <= 3")
    # degree 2 and 3: irreducible iff no root
    low = decode(np.arange(p ** d, dtype=np.int64), p, d)[:, ::-1]
    xs = np.arange(p, dtype=np.int64)
    vals = np.ones((low.shape[0], p), dtype=np.int64)
    for k in range(d - 1, -1, -1):
        vals = (vals * xs[None, :] + low[:, k:k + 1]) % p
    ok = ~(vals == 0).any(axis=1)
    return tuple(tuple(int(c) for c in row) + (1,) for row in low[ok])


def partitions(n: int, max_part: int | None = None):
    if max_part is None:
        max_part = n
    if n == 0:
        yield ()
        return
    for k in range(min(n, max_part), 0, -1):
        for rest in partitions(n - k, k):
            yield (k,) + rest


Block = tuple  # (degree, partition)


def similarity_types(n: int) -> list[tuple[Block, ...]]:
    """All multisets of primary blocks (d, lambda) with sum of d*|lambda| = n."""
    blocks = [
        (d, lam)
        for d in range(1, n + 1)
        for size in range(1, n // d + 1)
        for lam in partitions(size)
    ]
    out = []
    for k in range(1, n + 1):
        for combo in combinations_with_replacement(blocks, k):
            if sum(d * sum(lam) for d, lam in combo) == n:
                out.append(combo)
    return out


@dataclass(frozen=True)
class TypeData:
    type: tuple
    class_count: int
    orbit_size: int
    centralizer_dim: int
    automorphism_order: int


def _centralizer_basis(B: Matrix) -> list[Matrix]:
    n = B.shape[0]
    return [Matrix(B.field, np.array(v).reshape(n, n)) for v in kernel_basis(adjoint_operator(B))]


def _socle_restriction(B: Matrix, g: Poly):
    """Centralizer dim, socle dim k and the restricted algebra R (basis of k x k matrices)."""
    F = B.field
    Z = _centralizer_basis(B)
    soc = kernel_basis(poly_at_matrix(g, B))
    K = np.array(soc, dtype=np.int64).T
    k = K.shape[1]
    images = []
    for z in Z:
        images.append(coordinates(F, K, F.matmul(z.entries, K)).ravel())
    imgs = Matrix(F, np.array(images))
    R_basis = [np.array(r) for r in _row_space(imgs)]
    return len(Z), k, [r.reshape(k, k) for r in R_basis]


def _row_space(M: Matrix) -> list[tuple[int, ...]]:
    from .linalg import rref

    R, piv = rref(M)
    return [tuple(int(x) for x in R.entries[i]) for i in range(len(piv))]


@lru_cache(maxsize=None)
def _block_structure(d: int, lam: tuple, g: Poly, p: int):
    F = field(p)
    B = block_diag(F, [companion(poly_pow(g, part, p), p) for part in lam])
    zdim, k, R = _socle_restriction(B, g)
    return zdim, k, R


def _block_units(d: int, lam: tuple, g: Poly, p: int) -> int:
    """Number of invertible elements in the centralizer of one primary block."""
    zdim, k, R = _block_structure(d, lam, g, p)
    if len(R) == k * k:
        units = gl_order(k, p)
    else:
        F = field(p)
        elems = span_elements(F, np.array([r.ravel() for r in R])).reshape(-1, k, k)
        units = int((batch_rank(elems, F) == k).sum())
    return p ** (zdim - len(R)) * units


def _block_nilpotents(d: int, lam: tuple, g: Poly, p: int) -> int:
    """Number of nilpotent elements in the centralizer of one primary block."""
    zdim, k, R = _block_structure(d, lam, g, p)
    if len(R) == k * k:
        nil = nilpotent_matrix_count(k, p)
    else:
        F = field(p)
        elems = span_elements(F, np.array([r.ravel() for r in R])).reshape(-1, k, k)
        nil = int(batch_power_is_zero(elems, k, F).sum())
    return p ** (zdim - len(R)) * nil


def _falling(a: int, k: int) -> int:
    return prod(range(a - k + 1, a + 1)) if k <= a else 0


@lru_cache(maxsize=None)
def type_table(n: int, p: int) -> tuple[TypeData, ...]:
    """Per-type class counts, orbit sizes and centralizer data for M_n(F_p)."""
    F = field(p)
    G = gl_order(n, p)
    rows = []
    for typ in similarity_types(n):
        by_degree: dict[int, list] = {}
        for d, lam in typ:
            by_degree.setdefault(d, []).append(lam)
        count = 1
        chosen = []
        for d, lams in by_degree.items():
            irr = irreducible_polys(d, p)
            count *= _falling(len(irr), len(lams))
            for lam in set(lams):
                count //= factorial(lams.count(lam))
            if len(irr) >= len(lams):
                chosen.extend((d, lam, irr[i]) for i, lam in enumerate(lams))
        if count == 0:
            continue
        aut = 1
        blocks = []
        for d, lam, g in chosen:
            aut *= _block_units(d, lam, g, p)
            blocks.extend(companion(poly_pow(g, part, p), p) for part in lam)
        A = block_diag(F, blocks)
        zdim = n * n - rank(adjoint_operator(A))
        if G % aut:
            raise ExpectationFailure(f"automorphism order {aut} does not divide |GL_{n}|")
        rows.append(TypeData(typ, count, G // aut, zdim, aut))
    total = sum(r.class_count * r.orbit_size for r in rows)
    if total != p ** (n * n):
        raise ExpectationFailure(f"similarity classes cover {total} matrices, expected {p ** (n * n)}")
    return tuple(rows)


@lru_cache(maxsize=None)
def nilpotent_matrix_count(n: int, p: int) -> int:
    """Number of nilpotent n x n matrices, summed over Jordan types."""
    if n == 0:
        return 1
    G = gl_order(n, p)
    total = 0
    for lam in partitions(n):
        total += G // _block_units(1, lam, (0, 1), p)
    return total


def count_commuting_classes(n: int, p: int) -> int:
    """|C_n(F_p)| = sum over similarity classes of |class| * p^(dim centralizer)."""
    if n == 0:
        return 1
    return sum(r.class_count * r.orbit_size * p ** r.centralizer_dim for r in type_table(n, p))


def count_nilpotent_classes(n: int, p: int) -> int:
    """|NC_n(F_p)| = sum over nilpotent Jordan types of |orbit| * #{nilpotent B in centralizer}."""
    if n == 0:
        return 1
    G = gl_order(n, p)
    total = 0
    for lam in partitions(n):
        total += (G // _block_units(1, lam, (0, 1), p)) * _block_nilpotents(1, lam, (0, 1), p)
    return total


def groupoid_count_classes(n: int, p: int) -> Fraction:
    return Fraction(count_commuting_classes(n, p), gl_order(n, p))
