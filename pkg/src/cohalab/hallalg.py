"""Counting Hall algebra of finite-length modules over F_p[x, y].

A length-n module is a commuting pair (A, B) of n x n matrices up to
simultaneous conjugacy.  Classes are enumerated by orbit marking: pairs are
visited in lexicographic code order, so the first pair of each orbit is its
lex-minimal element and serves as the canonical representative.  This also
gives a canonical form: the lex-minimal element of the GL_n orbit.

Hall numbers use the (sub, quotient) convention: g^M_{N,L} counts the
submodules U of M with U ~ N and M/U ~ L, and [N] * [L] = sum_M g^M_{N,L} [M].
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product

import numpy as np

from .commvar import CommPair, count_commuting_kernel
from .errors import ExpectationFailure, PreconditionError
from .linalg import (
    Matrix,
    adjoint_operator,
    decode,
    encode,
    field,
    general_linear_group,
    gl_order,
    inverse,
    kernel_basis,
    rank,
    span_elements,
)

MAX_LENGTH = 3
PRIMES = (2, 3)


def _check_size(n: int, p: int):
    if n < 0 or n > MAX_LENGTH:
        raise PreconditionError(f"module length must be in [0, {MAX_LENGTH}], got {n}")
    if p not in PRIMES:
        raise PreconditionError(f"p must be one of {PRIMES}, got {p}")


def _group(n: int, p: int):
    if n == 0:
        e = np.zeros((1, 0, 0), dtype=np.int64)
        return e, e
    return general_linear_group(n, p)


def _conjugate_all(F, G, Ginv, X: np.ndarray) -> np.ndarray:
    """g X g^-1 for every g, shape (|G|, n, n)."""
    return F.matmul(F.matmul(G, X[None]), Ginv)


def _pair_codes(F, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    n2 = A.shape[-1] * A.shape[-2]
    return encode(np.concatenate([A.reshape(-1, n2), B.reshape(-1, n2)], axis=1), F.order)


def canonical_code(M: CommPair) -> int:
    """Code of the lex-minimal pair simultaneously conjugate to M."""
    _check_size(M.n, M.modulus)
    if M.n == 0:
        return 0
    F = M.field
    G, Ginv = _group(M.n, M.modulus)
    codes = _pair_codes(F, _conjugate_all(F, G, Ginv, M.A.entries), _conjugate_all(F, G, Ginv, M.B.entries))
    return int(codes.min())


def _det(a: list[list[int]], p: int) -> int:
    n = len(a)
    if n == 0:
        return 1
    if n == 1:
        return a[0][0] % p
    return sum((-1) ** j * a[0][j] * _det([row[:j] + row[j + 1:] for row in a[1:]], p)
               for j in range(n)) % p


def charpoly(M: Matrix) -> tuple[int, ...]:
    """Coefficients of det(tI - M), constant term first, via principal minors."""
    a = M.tolist()
    n = len(a)
    p = M.field.order
    out = [0] * (n + 1)
    out[n] = 1
    for k in range(1, n + 1):
        s = 0
        for idx in combinations(range(n), k):
            s += _det([[a[i][j] for j in idx] for i in idx], p)
        out[n - k] = ((-1) ** k * s) % p
    return tuple(out)


def fingerprint(M: CommPair) -> tuple:
    """Cheap conjugacy invariant: char. polynomials of A, B, A+B, AB and joint eigenspace dims."""
    F = M.field
    n = M.n
    eig = []
    I = Matrix.identity(F, n)
    for a, b in product(range(F.order), repeat=2):
        stacked = Matrix(F, np.vstack([(M.A - I.scale(a)).entries, (M.B - I.scale(b)).entries]))
        eig.append(n - rank(stacked) if n else 0)
    return (n, charpoly(M.A), charpoly(M.B), charpoly(M.A + M.B), charpoly(M.A @ M.B), tuple(eig))


def is_isomorphic(M: CommPair, N: CommPair) -> bool:
    """True iff some g in GL_n has g A1 g^-1 = A2 and g B1 g^-1 = B2."""
    if M.n != N.n or M.modulus != N.modulus:
        raise PreconditionError("pairs must have the same size and field")
    _check_size(M.n, M.modulus)
    if M.n == 0:
        return True
    if fingerprint(M) != fingerprint(N):
        return False
    F = M.field
    G, _ = _group(M.n, M.modulus)
    ok = (F.matmul(G, M.A.entries[None]) == F.matmul(N.A.entries[None], G)).all(axis=(1, 2))
    G = G[ok]
    ok = (F.matmul(G, M.B.entries[None]) == F.matmul(N.B.entries[None], G)).all(axis=(1, 2))
    return bool(ok.any())


def automorphism_order(M: CommPair) -> int:
    """|{g in GL_n : gA = Ag, gB = Bg}|."""
    _check_size(M.n, M.modulus)
    if M.n == 0:
        return 1
    F = M.field
    G, _ = _group(M.n, M.modulus)
    ok = (F.matmul(G, M.A.entries[None]) == F.matmul(M.A.entries[None], G)).all(axis=(1, 2))
    ok &= (F.matmul(G, M.B.entries[None]) == F.matmul(M.B.entries[None], G)).all(axis=(1, 2))
    return int(ok.sum())


@dataclass(frozen=True, eq=False)
class ModuleClass:
    """Simultaneous-conjugacy class of a commuting pair, keyed by its canonical code."""

    representative: CommPair
    automorphism_order: int
    name: str = ""
    key: int = dc_field(default=-1)
    fingerprint: tuple = ()

    @classmethod
    def of(cls, M: CommPair, name: str = "") -> "ModuleClass":
        return cls(M, automorphism_order(M), name, canonical_code(M), fingerprint(M))

    @property
    def length(self) -> int:
        return self.representative.n

    @property
    def modulus(self) -> int:
        return self.representative.modulus

    def __eq__(self, other):
        if not isinstance(other, ModuleClass):
            return NotImplemented
        return (self.modulus, self.length, self.key) == (other.modulus, other.length, other.key)

    def __hash__(self):
        return hash((self.modulus, self.length, self.key))

    def __repr__(self):
        return f"ModuleClass({self.name or self.key}, n={self.length}, p={self.modulus})"

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "length": self.length,
            "p": self.modulus,
            "A": self.representative.A.tolist(),
            "B": self.representative.B.tolist(),
            "automorphism_order": self.automorphism_order,
            "fingerprint": _jsonable(self.fingerprint),
        }


def _jsonable(x):
    if isinstance(x, tuple):
        return [_jsonable(v) for v in x]
    return x


def _classes_of_length(n: int, p: int) -> list[ModuleClass]:
    F = field(p)
    if n == 0:
        rep = CommPair(Matrix.zeros(F, 0), Matrix.zeros(F, 0))
        return [ModuleClass(rep, 1, "n0-0", 0, fingerprint(rep))]
    G, Ginv = _group(n, p)
    order = gl_order(n, p)
    n2 = n * n
    seen_A = np.zeros(p ** n2, dtype=bool)
    out = []
    for a_code in range(p ** n2):
        if seen_A[a_code]:
            continue
        A = decode(np.array([a_code]), p, n2).reshape(n, n)
        conj = _conjugate_all(F, G, Ginv, A)
        seen_A[encode(conj.reshape(-1, n2), p)] = True
        Z = (conj == A[None]).all(axis=(1, 2))
        ZG, ZGinv = G[Z], Ginv[Z]
        basis = np.array(kernel_basis(adjoint_operator(Matrix(F, A))), dtype=np.int64)
        Bs = span_elements(F, basis)
        b_codes = np.sort(encode(Bs, p))
        seen_B = np.zeros(b_codes.size, dtype=bool)
        for i, b_code in enumerate(b_codes):
            if seen_B[i]:
                continue
            B = decode(np.array([b_code]), p, n2).reshape(n, n)
            orbit = _conjugate_all(F, ZG, ZGinv, B)
            orbit_codes = np.unique(encode(orbit.reshape(-1, n2), p))
            seen_B[np.searchsorted(b_codes, orbit_codes)] = True
            stab = int((orbit == B[None]).all(axis=(1, 2)).sum())
            if stab * orbit_codes.size != ZG.shape[0]:
                raise ExpectationFailure("orbit-stabilizer failed inside a centralizer")
            rep = CommPair(Matrix(F, A), Matrix(F, B))
            key = int(_pair_codes(F, A[None], B[None])[0])
            out.append(ModuleClass(rep, stab, f"n{n}-{len(out)}", key, fingerprint(rep)))
    total = sum(order // c.automorphism_order for c in out)
    expected = count_commuting_kernel(n, p)
    if total != expected:
        raise ExpectationFailure(f"class table covers {total} pairs, |C_{n}(F_{p})| = {expected}")
    return out


@dataclass(frozen=True)
class Submodule:
    basis: np.ndarray  # rows spanning U, in RREF
    sub: CommPair
    quotient: CommPair


def _rref_subspaces(n: int, k: int, p: int):
    """All k-dim subspaces of F_p^n as RREF row matrices."""
    for piv in combinations(range(n), k):
        free = [(i, j) for i in range(k) for j in range(piv[i] + 1, n) if j not in piv]
        for vals in product(range(p), repeat=len(free)):
            R = np.zeros((k, n), dtype=np.int64)
            for i, c in enumerate(piv):
                R[i, c] = 1
            for (i, j), v in zip(free, vals):
                R[i, j] = v
            yield R, piv


def submodules(M: CommPair) -> list[Submodule]:
    """All subspaces U with AU, BU inside U, with the induced sub and quotient pairs."""
    n, p = M.n, M.modulus
    _check_size(n, p)
    F = M.field
    out = []
    for k in range(n + 1):
        for R, piv in _rref_subspaces(n, k, p):
            U = R.T  # columns span U
            if k and any(rank(Matrix(F, np.hstack([U, F.matmul(X.entries, U)]))) != k for X in (M.A, M.B)):
                continue
            comp = [j for j in range(n) if j not in piv]
            P = np.hstack([U, np.eye(n, dtype=np.int64)[:, comp]])
            Pm = Matrix(F, P)
            Pinv = inverse(Pm)
            A2 = (Pinv @ M.A @ Pm).entries
            B2 = (Pinv @ M.B @ Pm).entries
            if A2[k:, :k].any() or B2[k:, :k].any():
                raise ExpectationFailure("invariant subspace did not give a block triangular form")
            sub = CommPair(Matrix(F, A2[:k, :k]), Matrix(F, B2[:k, :k]))
            quo = CommPair(Matrix(F, A2[k:, k:]), Matrix(F, B2[k:, k:]))
            out.append(Submodule(R, sub, quo))
    return out


def hall_number(M: ModuleClass, N: ModuleClass, L: ModuleClass) -> int:
    """g^M_{N,L}; 0 when the lengths do not add up."""
    if len({M.modulus, N.modulus, L.modulus}) != 1:
        raise PreconditionError("classes live over different fields")
    if N.length + L.length != M.length:
        return 0
    count = 0
    for S in submodules(M.representative):
        if S.sub.n == N.length and is_isomorphic(S.sub, N.representative) \
                and is_isomorphic(S.quotient, L.representative):
            count += 1
    return count


class ModuleClassTable:
    """All module classes of length <= n_max over F_p, with Hall structure constants."""

    def __init__(self, n_max: int, p: int):
        _check_size(n_max, p)
        self.n_max = n_max
        self.p = p
        self.by_length: dict[int, list[ModuleClass]] = {n: _classes_of_length(n, p) for n in range(n_max + 1)}
        self._by_key = {(c.length, c.key): c for cs in self.by_length.values() for c in cs}
        self._by_name = {c.name: c for cs in self.by_length.values() for c in cs}
        self._constants: dict[tuple[str, str], dict[str, int]] | None = None

    @property
    def classes(self) -> list[ModuleClass]:
        return [c for n in range(self.n_max + 1) for c in self.by_length[n]]

    def __getitem__(self, name: str) -> ModuleClass:
        try:
            return self._by_name[name]
        except KeyError:
            raise PreconditionError(f"no class named {name!r} in the table") from None

    def classify(self, M: CommPair) -> ModuleClass:
        if M.modulus != self.p or M.n > self.n_max:
            raise PreconditionError(f"pair of length {M.n} over F_{M.modulus} not covered; re-enumerate")
        return self._by_key[(M.n, canonical_code(M))]

    def point_class(self, a: int, b: int) -> ModuleClass:
        """The simple module k_(a,b) of length 1."""
        return self.classify(CommPair.from_lists(self.p, [[a % self.p]], [[b % self.p]]))

    @property
    def structure_constants(self) -> dict[tuple[str, str], dict[str, int]]:
        """(N, L) -> {M: g^M_{N,L}}, nonzero entries only."""
        if self._constants is None:
            consts: dict[tuple[str, str], dict[str, int]] = {}
            for M in self.classes:
                for S in submodules(M.representative):
                    key = (self.classify(S.sub).name, self.classify(S.quotient).name)
                    row = consts.setdefault(key, {})
                    row[M.name] = row.get(M.name, 0) + 1
            self._constants = consts
        return self._constants

    def orbit_sums(self) -> dict[int, int]:
        return {n: sum(gl_order(n, self.p) // c.automorphism_order for c in cs)
                for n, cs in self.by_length.items()}

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "n_max": self.n_max,
            "classes": [c.to_json() for c in self.classes],
            "structure_constants": [
                {"sub": N, "quotient": L, "middle": M, "count": g}
                for (N, L), row in sorted(self.structure_constants.items())
                for M, g in sorted(row.items())
            ],
        }


    @classmethod
    def from_json(cls, obj: dict) -> "ModuleClassTable":
        """Rebuild a table from ``to_json`` output without re-enumerating."""
        table = object.__new__(cls)
        table.n_max, table.p = obj["n_max"], obj["p"]
        F = field(table.p)
        table.by_length = {n: [] for n in range(table.n_max + 1)}
        for c in obj["classes"]:
            n = c["length"]
            rep = CommPair(Matrix(F, np.array(c["A"], dtype=np.int64).reshape(n, n)),
                           Matrix(F, np.array(c["B"], dtype=np.int64).reshape(n, n)))
            key = int(_pair_codes(F, rep.A.entries[None], rep.B.entries[None])[0]) if n else 0
            table.by_length[n].append(ModuleClass(rep, c["automorphism_order"], c["name"], key,
                                                  _tuplify(c["fingerprint"])))
        table._by_key = {(c.length, c.key): c for cs in table.by_length.values() for c in cs}
        table._by_name = {c.name: c for cs in table.by_length.values() for c in cs}
        consts: dict[tuple[str, str], dict[str, int]] = {}
        for row in obj["structure_constants"]:
            consts.setdefault((row["sub"], row["quotient"]), {})[row["middle"]] = row["count"]
        table._constants = consts
        return table


def _tuplify(x):
    if isinstance(x, list):
        return tuple(_tuplify(v) for v in x)
    return x


@lru_cache(maxsize=None)
def enumerate_classes(n_max: int, p: int) -> ModuleClassTable:
    """One canonical representative per simultaneous-conjugacy orbit, lengths 0..n_max."""
    return ModuleClassTable(n_max, p)


class HallElement:
    """Finitely supported Q-linear combination of module classes."""

    __slots__ = ("_c",)

    def __init__(self, coeffs=None):
        c = {}
        for k, v in (coeffs or {}).items():
            v = Fraction(v)
            if v:
                c[k] = v
        if len({k.modulus for k in c}) > 1:
            raise PreconditionError("support classes must share the modulus")
        self._c = c

    @classmethod
    def basis(cls, M: ModuleClass) -> "HallElement":
        return cls({M: 1})

    @property
    def coefficients(self) -> dict[ModuleClass, Fraction]:
        return dict(self._c)

    def __add__(self, other: "HallElement") -> "HallElement":
        c = dict(self._c)
        for k, v in other._c.items():
            c[k] = c.get(k, 0) + v
        return HallElement(c)

    def __sub__(self, other: "HallElement") -> "HallElement":
        return self + other.scale(-1)

    def scale(self, s) -> "HallElement":
        return HallElement({k: v * s for k, v in self._c.items()})

    def norm1(self) -> Fraction:
        return sum(abs(v) for v in self._c.values()) or Fraction(0)

    def __eq__(self, other):
        return isinstance(other, HallElement) and self._c == other._c

    def __bool__(self):
        return bool(self._c)

    def __repr__(self):
        terms = ", ".join(f"{k.name}: {v}" for k, v in sorted(self._c.items(), key=lambda kv: kv[0].name))
        return f"HallElement({{{terms}}})"

    def to_json(self) -> list[dict]:
        return [{"class": k.name, "numerator": v.numerator, "denominator": v.denominator}
                for k, v in sorted(self._c.items(), key=lambda kv: kv[0].name)]


def hall_product(a: HallElement, b: HallElement, table: ModuleClassTable) -> HallElement:
    """Bilinear extension of [N] * [L] = sum_M g^M_{N,L} [M]."""
    consts = table.structure_constants
    out: dict[ModuleClass, Fraction] = {}
    for N, x in a.coefficients.items():
        for L, y in b.coefficients.items():
            if N.length + L.length > table.n_max:
                raise PreconditionError(
                    f"product needs length {N.length + L.length} but the table stops at {table.n_max}; re-enumerate")
            row = consts.get((table.classify(N.representative).name, table.classify(L.representative).name), {})
            for M, g in row.items():
                cls = table[M]
                out[cls] = out.get(cls, 0) + x * y * g
    return HallElement(out)


def _triples(table: ModuleClassTable, L_max: int):
    cs = [c for c in table.classes if c.length <= L_max]
    for N in cs:
        for L in cs:
            if N.length + L.length > L_max:
                continue
            for P in cs:
                if N.length + L.length + P.length <= L_max:
                    yield N, L, P


@dataclass(frozen=True)
class AssociativityReport:
    L_max: int
    p: int
    triples_checked: int
    violations: tuple

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"L_max": self.L_max, "p": self.p, "triples_checked": self.triples_checked,
                "violations": [list(v) for v in self.violations]}


def check_associativity(table: ModuleClassTable, L_max: int = 3) -> AssociativityReport:
    """Compare ([N][L])[P] with [N]([L][P]) for all triples of total length <= L_max."""
    if L_max > table.n_max:
        raise PreconditionError(f"table covers lengths <= {table.n_max}, asked for {L_max}")
    violations = []
    checked = 0
    for N, L, P in _triples(table, L_max):
        e = [HallElement.basis(X) for X in (N, L, P)]
        lhs = hall_product(hall_product(e[0], e[1], table), e[2], table)
        rhs = hall_product(e[0], hall_product(e[1], e[2], table), table)
        checked += 1
        if lhs != rhs:
            violations.append((N.name, L.name, P.name))
    return AssociativityReport(L_max, table.p, checked, tuple(violations))


@dataclass(frozen=True)
class CommutatorEntry:
    left: str
    right: str
    defect: Fraction  # L1 norm of [N][L] - [L][N]


def commutator_table(table: ModuleClassTable, L_max: int = 3) -> list[CommutatorEntry]:
    """Defect norms |[N][L] - [L][N]|_1 for class pairs of total length <= L_max (reported only)."""
    if L_max > table.n_max:
        raise PreconditionError(f"table covers lengths <= {table.n_max}, asked for {L_max}")
    cs = [c for c in table.classes if 0 < c.length <= L_max]
    out = []
    for N in cs:
        for L in cs:
            if N.length + L.length <= L_max:
                eN, eL = HallElement.basis(N), HallElement.basis(L)
                d = hall_product(eN, eL, table) - hall_product(eL, eN, table)
                out.append(CommutatorEntry(N.name, L.name, d.norm1()))
    return out
