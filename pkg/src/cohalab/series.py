"""Truncated bivariate Laurent series and the Sym(Theta) Hilbert series.

A ``LaurentBiSeries`` is a power series in t kept modulo t^(N+1), whose
t^n coefficient is a Laurent polynomial in u with exact rational
coefficients.  Laurent tails in u are infinite, so each t-degree carries a
*floor*: coefficients of u^e with e >= floor are exact, everything below
is unknown.  Reading below a floor raises ``WindowError``.

u-exponents are stored in half units (the integer 2e), so generators of
odd homological degree sit at half-integral exponents.

Bidegree dictionary: a basis element t^n q^(i-1) of Theta has bidegree
(n, 2 - 2i) and is recorded as the monomial t^n u^(1-i); u counts half
the homological degree.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Mapping, Sequence

from .errors import PreconditionError

# u-exponent of the Theta basis element t^n q^(i-1) is FEIT_FINE_U_SHIFT - i.
# Pinned by matching |C_n(F_q)| / |GL_n(F_q)| for n = 1, 2 (tests/test_series.py).
FEIT_FINE_U_SHIFT = 1


class WindowError(PreconditionError):
    """Coefficient requested outside the validity window of a series."""


def _num(v):
    """Normalise a coefficient: ints stay ints (fast path), everything else is a Fraction."""
    if isinstance(v, int):
        return v
    v = Fraction(v)
    return v.numerator if v.denominator == 1 else v


def _half(u) -> int:
    """Half-unit integer for a u-exponent given as int or Fraction."""
    twice = Fraction(u) * 2
    if twice.denominator != 1:
        raise PreconditionError(f"u-exponent {u} is not a multiple of 1/2")
    return int(twice)


class LaurentBiSeries:
    """Series in t (mod t^(N+1)) with Laurent-polynomial coefficients in u."""

    __slots__ = ("t_order", "floors", "_c")

    def __init__(self, t_order: int, coefficients: Mapping[int, Mapping[int, Fraction]],
                 floors: Sequence[int | None] | int | None = None):
        if t_order < 0:
            raise PreconditionError("t_order must be non-negative")
        if floors is None or isinstance(floors, int):
            floors = [floors] * (t_order + 1)
        if len(floors) != t_order + 1:
            raise PreconditionError("one floor per t-degree required")
        self.t_order = t_order
        self.floors = tuple(floors)
        c = []
        for n in range(t_order + 1):
            f = self.floors[n]
            terms = {}
            for u2, v in coefficients.get(n, {}).items():
                v = _num(v)
                if v and (f is None or u2 >= f):
                    terms[int(u2)] = v
            c.append(terms)
        self._c = tuple(c)

    # -- constructors -------------------------------------------------
    @classmethod
    def one(cls, t_order: int) -> "LaurentBiSeries":
        return cls(t_order, {0: {0: 1}})

    @classmethod
    def from_terms(cls, t_order: int, terms: Iterable[tuple[int, object, object]],
                   floors=None) -> "LaurentBiSeries":
        """Build from (t, u, coefficient) triples with u in ordinary units."""
        coeffs: dict[int, dict[int, Fraction]] = {}
        for t, u, v in terms:
            if t <= t_order:
                d = coeffs.setdefault(t, {})
                d[_half(u)] = d.get(_half(u), Fraction(0)) + Fraction(v)
        return cls(t_order, coeffs, floors)

    # -- access -------------------------------------------------------
    @property
    def u_floor(self) -> Fraction | None:
        """Uniform validity floor in u-units (None when exact everywhere)."""
        fs = [f for f in self.floors if f is not None]
        return Fraction(max(fs), 2) if fs else None

    def terms(self, t: int) -> dict[int, Fraction]:
        """Known terms of the t^n coefficient, keyed by 2 * u-exponent."""
        return dict(self._c[t])

    def coefficient(self, t: int, u) -> Fraction:
        if not 0 <= t <= self.t_order:
            raise WindowError(f"t-degree {t} outside [0, {self.t_order}]")
        u2 = _half(u)
        f = self.floors[t]
        if f is not None and u2 < f:
            raise WindowError(f"u^{u} below the validity floor u^{Fraction(f, 2)} at t^{t}")
        return Fraction(self._c[t].get(u2, 0))

    def _max_exp(self, t: int) -> int | None:
        """Upper bound for u2-exponents at t^n (None: coefficient is exactly zero)."""
        known = max(self._c[t]) if self._c[t] else None
        f = self.floors[t]
        cands = [x for x in (known, None if f is None else f - 1) if x is not None]
        return max(cands) if cands else None

    # -- arithmetic ---------------------------------------------------
    def __mul__(self, other: "LaurentBiSeries") -> "LaurentBiSeries":
        N = min(self.t_order, other.t_order)
        coeffs: dict[int, dict[int, Fraction]] = {}
        floors: list[int | None] = []
        for n in range(N + 1):
            acc: dict[int, Fraction] = {}
            floor = None
            for n1 in range(n + 1):
                a, b = self._c[n1], other._c[n - n1]
                for e1, v1 in a.items():
                    for e2, v2 in b.items():
                        acc[e1 + e2] = acc.get(e1 + e2, 0) + v1 * v2
                for fa, mb in ((self.floors[n1], other._max_exp(n - n1)),
                               (other.floors[n - n1], self._max_exp(n1))):
                    if fa is not None and mb is not None:
                        cand = fa + mb
                        floor = cand if floor is None else max(floor, cand)
            coeffs[n] = acc
            floors.append(floor)
        return LaurentBiSeries(N, coeffs, floors)

    def inverse(self) -> "LaurentBiSeries":
        """Multiplicative inverse; the t^0 coefficient must be an exact nonzero constant."""
        c0 = self._c[0]
        if self.floors[0] is not None or set(c0) != {0}:
            raise PreconditionError("t^0 coefficient must be an exact nonzero constant")
        inv0 = _num(Fraction(1) / c0[0])
        N = self.t_order
        out = LaurentBiSeries(N, {0: {0: inv0}})
        bc = [{0: inv0}]
        bf: list[int | None] = [None]
        for n in range(1, N + 1):
            acc: dict[int, Fraction] = {}
            floor = None
            for k in range(1, n + 1):
                for e1, v1 in self._c[k].items():
                    for e2, v2 in bc[n - k].items():
                        acc[e1 + e2] = acc.get(e1 + e2, 0) - inv0 * v1 * v2
                prev = LaurentBiSeries(n - k, {j: bc[j] for j in range(n - k + 1)}, bf[:n - k + 1])
                for fa, mb in ((self.floors[k], prev._max_exp(n - k)),
                               (bf[n - k], self._max_exp(k))):
                    if fa is not None and mb is not None:
                        floor = fa + mb if floor is None else max(floor, fa + mb)
            bc.append({e: v for e, v in acc.items() if v and (floor is None or e >= floor)})
            bf.append(floor)
        out = LaurentBiSeries(N, dict(enumerate(bc)), bf)
        return out

    def __pow__(self, k: int) -> "LaurentBiSeries":
        if k < 0:
            return self.inverse() ** (-k)
        result = LaurentBiSeries.one(self.t_order)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def restrict(self, u_floor) -> "LaurentBiSeries":
        """Drop terms below u_floor (u-units); floors only ever rise.

        An exact coefficient with no terms below u_floor stays exact.
        """
        return self.restrict_half([_half(u_floor)] * (self.t_order + 1))

    def restrict_half(self, floors2: Sequence[int]) -> "LaurentBiSeries":
        """Per-t-degree version of ``restrict`` with floors in half units."""
        floors = []
        for n, f2 in enumerate(floors2):
            f = self.floors[n]
            if f is None:
                floors.append(None if all(e >= f2 for e in self._c[n]) else f2)
            else:
                floors.append(max(f, f2))
        return LaurentBiSeries(self.t_order, dict(enumerate(self._c)), floors)

    def common_window(self, other: "LaurentBiSeries") -> list[int | None]:
        N = min(self.t_order, other.t_order)
        out = []
        for n in range(N + 1):
            fs = [f for f in (self.floors[n], other.floors[n]) if f is not None]
            out.append(max(fs) if fs else None)
        return out

    def agrees_with(self, other: "LaurentBiSeries") -> bool:
        """Coefficient-for-coefficient equality inside the common validity window."""
        return not self.differences(other)

    def differences(self, other: "LaurentBiSeries") -> list[tuple[int, Fraction, Fraction, Fraction]]:
        out = []
        for n, f in enumerate(self.common_window(other)):
            keys = set(self._c[n]) | set(other._c[n])
            for e in sorted(keys):
                if f is not None and e < f:
                    continue
                a = Fraction(self._c[n].get(e, 0))
                b = Fraction(other._c[n].get(e, 0))
                if a != b:
                    out.append((n, Fraction(e, 2), a, b))
        return out

    def __eq__(self, other):
        return (isinstance(other, LaurentBiSeries) and self.t_order == other.t_order
                and self.floors == other.floors and self._c == other._c)

    def __repr__(self):
        parts = []
        for n in range(self.t_order + 1):
            for e, v in sorted(self._c[n].items(), reverse=True):
                parts.append(f"{v}*t^{n}*u^{Fraction(e, 2)}")
        return f"LaurentBiSeries(N={self.t_order}, floor={self.u_floor}: {' + '.join(parts)})"

    # -- serialisation ------------------------------------------------
    def to_json(self) -> dict:
        floor = self.u_floor
        return {
            "t_order": self.t_order,
            "u_floor": None if floor is None else _json_number(floor),
            "u_floor_by_t": [None if f is None else _json_number(Fraction(f, 2)) for f in self.floors],
            "coefficients": [
                {"t": n, "terms": [{"u_times_2": e, "numerator": Fraction(v).numerator,
                                    "denominator": Fraction(v).denominator}
                                   for e, v in sorted(self._c[n].items(), reverse=True)]}
                for n in range(self.t_order + 1)
            ],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "LaurentBiSeries":
        N = obj["t_order"]
        if "u_floor_by_t" in obj:
            floors = [None if f is None else _half(f) for f in obj["u_floor_by_t"]]
        else:
            floors = None if obj["u_floor"] is None else _half(obj["u_floor"])
        coeffs = {
            row["t"]: {term["u_times_2"]: Fraction(term["numerator"], term["denominator"]) for term in row["terms"]}
            for row in obj["coefficients"]
        }
        return cls(N, coeffs, floors)


def _json_number(x: Fraction):
    return int(x) if x.denominator == 1 else float(x)


# ---------------------------------------------------------------------------
# graded data


@dataclass(frozen=True)
class BettiTable:
    """Borel-Moore Betti numbers b[k] = dim H_k^BM(S), k = 0..4."""

    b: tuple[int, int, int, int, int]

    def __post_init__(self):
        b = tuple(int(x) for x in self.b)
        if len(b) != 5 or any(x < 0 for x in b) or not any(b):
            raise PreconditionError("Betti table needs five non-negative entries, not all zero")
        object.__setattr__(self, "b", b)

    @classmethod
    def parse(cls, text: str) -> "BettiTable":
        return cls(tuple(int(x) for x in text.split(",")))

    def __add__(self, other: "BettiTable") -> "BettiTable":
        """Disjoint union of surfaces."""
        return BettiTable(tuple(x + y for x, y in zip(self.b, other.b)))


AFFINE_PLANE = BettiTable((0, 0, 0, 0, 1))
PROJECTIVE_PLANE = BettiTable((1, 0, 1, 0, 1))


@dataclass(frozen=True)
class ThetaBasisElement:
    """t^n q^(i-1), the class obtained by capping the n-th punctual class with ch_i."""

    n: int
    i: int

    def __post_init__(self):
        if self.n < 1 or self.i < 0:
            raise PreconditionError("need n >= 1 and i >= 0")

    @property
    def bidegree(self) -> tuple[int, int]:
        return self.n, 2 - 2 * self.i

    @property
    def u_exponent(self) -> int:
        return FEIT_FINE_U_SHIFT - self.i


Generator = tuple  # (t-degree, u-degree, parity, multiplicity)


def _generator_factor(a: int, u2: int, odd: bool, m: int, N: int) -> dict[int, dict[int, Fraction]]:
    out: dict[int, dict[int, Fraction]] = {}
    k = 0
    while a * k <= N:
        c = comb(m, k) if odd else comb(m + k - 1, k)
        if c:
            out[a * k] = {u2 * k: c}
        k += 1
    return out


def _product(gens: Sequence[tuple[int, int, bool, int]], N: int, K2: int) -> LaurentBiSeries:
    """Product of generator factors, pruned so that u^(K2/2) and above stay exact.

    A term at t^n below -K2 - (N - n) * top can never climb back above -K2,
    since each further unit of t-degree raises the u2-exponent by at most top.
    The window algebra of ``__mul__`` tracks the resulting floors; they are
    checked before returning.
    """
    top = max([0] + [u2 for _, u2, _, _ in gens])
    prune = [-K2 - (N - n) * top for n in range(N + 1)]
    acc = LaurentBiSeries.one(N)
    for a, u2, odd, m in gens:
        if m:
            acc = (acc * LaurentBiSeries(N, _generator_factor(a, u2, odd, m, N))).restrict_half(prune)
    if any(f is not None and f > -K2 for f in acc.floors):
        raise AssertionError("pruned product lost validity above the requested floor")
    return acc


def _parse_parity(parity) -> bool:
    if parity in ("even", 0, False):
        return False
    if parity in ("odd", 1, True):
        return True
    raise PreconditionError(f"parity must be 'even' or 'odd', got {parity!r}")


def sym_hilbert(generators: Iterable[Generator], N: int, K) -> LaurentBiSeries:
    """Hilbert series of the free graded-commutative algebra on the given generators.

    An even generator of bidegree (a, b) and multiplicity m contributes
    (1 - t^a u^b)^(-m); an odd one contributes (1 + t^a u^b)^m.  The result
    is exact for the finite generator list and is cut at u^(-K).
    """
    gens = []
    for a, b, parity, m in generators:
        if a < 1:
            raise PreconditionError("generators must have t-degree >= 1")
        if m < 0:
            raise PreconditionError("multiplicity must be non-negative")
        gens.append((int(a), _half(b), _parse_parity(parity), int(m)))
    return _product(gens, N, _half(K)).restrict(-Fraction(K))


def _family_series(families: Sequence[tuple[int, bool, int]], N: int, K) -> LaurentBiSeries:
    """Product over infinite families {t^n u^(top/2 - i): n >= 1, i >= 0}.

    Each family is (top u2-exponent, odd?, multiplicity).  Families are cut
    at the depth beyond which an omitted generator cannot reach u^(-K) in
    any t-degree <= N.
    """
    K2 = _half(K)
    live = [f for f in families if f[2] > 0]
    if not live:
        return LaurentBiSeries.one(N)
    top = max(0, max(f[0] for f in live))
    gens = []
    for u2_top, odd, m in live:
        # omitted generators sit at u2 <= u2_top - 2(i_max + 1)
        i_max = 0
        while u2_top - 2 * (i_max + 1) + (N - 1) * top >= -K2:
            i_max += 1
        for n in range(1, N + 1):
            for i in range(i_max + 1):
                gens.append((n, u2_top - 2 * i, odd, m))
    partial = _product(gens, N, K2)
    # the product of the finite list is exact above -K2; the omitted tail is below it
    return LaurentBiSeries(N, dict(enumerate(partial._c)), [None] + [-K2] * N)


def theta_generators(N: int, K) -> list[Generator]:
    """Theta basis elements (n, 1 - i, even, 1) for n <= N and i <= K + N."""
    return [(n, FEIT_FINE_U_SHIFT - i, "even", 1) for n in range(1, N + 1) for i in range(int(K) + N + 1)]


def pbw_series(betti: BettiTable, N: int, K) -> LaurentBiSeries:
    """Hilbert series of Sym(H^BM(S) (x) Theta').

    H_k^BM(S) (x) t^n q^(i+1) has homological degree k - 2 - 2i, i.e. the
    u-exponent (k - 2 - 2i)/2, and parity k mod 2.
    """
    if not isinstance(betti, BettiTable):
        betti = BettiTable(tuple(betti))
    families = [(k - 2, bool(k % 2), betti.b[k]) for k in range(5)]
    return _family_series(families, N, K)


def _euler_factor(m: int, N: int, floor2: int) -> LaurentBiSeries:
    """prod_{i>=0} (1 - t^m u^(s - i))^(-1) = sum_k t^(mk) u^(sk) / prod_{j<=k} (1 - u^(-j)).

    Each t^(mk) coefficient is u^(sk) times the generating function of
    partitions into parts <= k in u^(-1), expanded down to floor2 (half units).
    """
    s = FEIT_FINE_U_SHIFT
    coeffs: dict[int, dict[int, int]] = {0: {0: 1}}
    floors: list[int | None] = [None] * (N + 1)
    k = 1
    while m * k <= N:
        depth = (2 * s * k - floor2) // 2  # number of u^(-1) steps kept
        parts = [0] * (depth + 1)
        parts[0] = 1
        for j in range(1, k + 1):
            for w in range(j, depth + 1):
                parts[w] += parts[w - j]
        coeffs[m * k] = {2 * (s * k - w): c for w, c in enumerate(parts) if c}
        floors[m * k] = 2 * (s * k - depth)
        k += 1
    return LaurentBiSeries(N, coeffs, floors)


def feit_fine_series(N: int, K) -> LaurentBiSeries:
    """prod_{m>=1} prod_{i>=0} (1 - t^m u^(1-i))^(-1), valid for u-exponents >= -K.

    Built from the closed-form Euler expansion of each m-factor and the
    window algebra of ``LaurentBiSeries`` (independent of ``sym_hilbert``).
    """
    if N < 1 or K < 0:
        raise PreconditionError("need N >= 1 and K >= 0")
    K2 = _half(K)
    work = -K2 - 2 * N
    while True:
        acc = LaurentBiSeries.one(N)
        for m in range(1, N + 1):
            acc = acc * _euler_factor(m, N, work)
        if all(f is None or f <= -K2 for f in acc.floors):
            return acc.restrict(-Fraction(K))
        work -= 2 * N


# ---------------------------------------------------------------------------
# exact t^n coefficients as rational functions of u


def _partition_multiplicities(n: int):
    from .similarity import partitions

    for lam in partitions(n):
        mult: dict[int, int] = {}
        for part in lam:
            mult[part] = mult.get(part, 0) + 1
        yield mult


def feit_fine_value(n: int, q) -> Fraction:
    """t^n coefficient of the product series evaluated at u = q, exactly.

    Uses sum_{lambda |- n} prod_m u^(sk + k(k+1)/2) / prod_{j=1}^{k} (u^j - 1),
    k = multiplicity of m in lambda, s = FEIT_FINE_U_SHIFT.
    """
    q = Fraction(q)
    total = Fraction(0)
    for mult in _partition_multiplicities(n):
        term = Fraction(1)
        for k in mult.values():
            term *= q ** (FEIT_FINE_U_SHIFT * k + k * (k + 1) // 2)
            for j in range(1, k + 1):
                term /= q ** j - 1
        total += term
    return total


def feit_fine_rational(n: int):
    """The t^n coefficient as an exact sympy rational function of u."""
    import sympy

    u = sympy.Symbol("u")
    total = sympy.Integer(0)
    for mult in _partition_multiplicities(n):
        term = sympy.Integer(1)
        for k in mult.values():
            term *= u ** (FEIT_FINE_U_SHIFT * k + k * (k + 1) // 2)
            for j in range(1, k + 1):
                term /= u ** j - 1
        total += term
    return sympy.factor(sympy.together(total)), u
