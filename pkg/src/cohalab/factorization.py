"""Point-count factorization of the commuting-variety series over closed points.

The stacky count sum_n |C_n(F_q)| / |GL_n(F_q)| x^n of 0-dimensional
sheaves on the affine plane factors as a product over closed points: a
point of degree d contributes the punctual series at the residue field
F_(q^d) in the variable x^d, and there are N_d(q) such points.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .commvar import count_commuting, count_nilpotent_commuting
from .errors import ExpectationFailure, InfeasibleError, PreconditionError
from .linalg import gl_order, is_prime


def mobius(n: int) -> int:
    if n < 1:
        raise PreconditionError("mobius is defined for n >= 1")
    result = 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            result = -result
        d += 1
    if n > 1:
        result = -result
    return result


def closed_point_counts(d_max: int, q: int) -> list[int]:
    """N_1..N_dmax: closed points of degree d on the affine plane over F_q."""
    if d_max < 1:
        raise PreconditionError("d_max must be >= 1")
    out = []
    for d in range(1, d_max + 1):
        s = sum(mobius(d // e) * q ** (2 * e) for e in range(1, d + 1) if d % e == 0)
        if s % d:
            raise ExpectationFailure(f"N_{d} is not an integer")
        out.append(s // d)
    for m in range(1, d_max + 1):
        if sum(d * out[d - 1] for d in range(1, m + 1) if m % d == 0) != q ** (2 * m):
            raise ExpectationFailure(f"point counts fail sum_(d|{m}) d N_d = q^(2m)")
    return out


def _mul(a: list[Fraction], b: list[Fraction], N: int) -> list[Fraction]:
    out = [Fraction(0)] * (N + 1)
    for i, x in enumerate(a):
        if x:
            for j in range(N + 1 - i):
                out[i + j] += x * b[j]
    return out


def _pow(a: list[Fraction], k: int, N: int) -> list[Fraction]:
    result = [Fraction(1)] + [Fraction(0)] * N
    while k:
        if k & 1:
            result = _mul(result, a, N)
        a = _mul(a, a, N)
        k >>= 1
    return result


def punctual_series(Q: int, N: int) -> list[Fraction]:
    """sum_n |NC_n(F_Q)| / |GL_n(F_Q)| x^n up to x^N; Q prime or 4."""
    return [Fraction(count_nilpotent_commuting(n, Q), gl_order(n, Q)) for n in range(N + 1)]


@dataclass(frozen=True)
class PowerStructureReport:
    q: int
    N: int
    closed_points: tuple[int, ...]
    lhs: tuple[Fraction, ...]
    rhs: tuple[Fraction, ...]

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs

    def to_json(self) -> dict:
        def enc(xs):
            return [{"numerator": x.numerator, "denominator": x.denominator} for x in xs]

        return {"q": self.q, "N": self.N, "closed_points": list(self.closed_points),
                "lhs": enc(self.lhs), "rhs": enc(self.rhs), "equal": self.equal}


def power_structure_check(q: int, N: int) -> PowerStructureReport:
    """Compare both sides of the factorization coefficient-wise up to x^N.

    Residue fields F_(q^d) for d <= N must be available: every prime q works
    for N = 1, and q = 2 works for N = 2 via F_4.
    """
    if not is_prime(q) or N < 0:
        raise PreconditionError("q must be prime and N >= 0")
    for d in range(2, N + 1):
        if q ** d != 4:
            raise InfeasibleError(f"residue field F_{q}^{d} is not supported (only F_4)")
    lhs = [Fraction(count_commuting("commuting", n, q), gl_order(n, q)) for n in range(N + 1)]
    points = closed_point_counts(max(N, 1), q)
    rhs = [Fraction(1)] + [Fraction(0)] * N
    for d in range(1, N + 1):
        local = punctual_series(q ** d, N // d)
        spread = [Fraction(0)] * (N + 1)
        for n, c in enumerate(local):
            spread[n * d] = c
        rhs = _mul(rhs, _pow(spread, points[d - 1], N), N)
    return PowerStructureReport(q, N, tuple(points), tuple(lhs), tuple(rhs))
