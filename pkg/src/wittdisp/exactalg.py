"""Exact arithmetic substrate.

Coefficient rings (integers, rationals, finite test algebras over F_p),
sparse multivariate polynomials over any of them, Buchberger Groebner
bases over prime fields, standard-monomial counting, linear parts and
point enumeration over finite test algebras.

Elements of a :class:`TestAlgebra` are plain ints: the index of the
coordinate vector in base ``p`` (coordinate 0 is the least significant
digit).  Addition and multiplication go through precomputed tables.
"""
from __future__ import annotations

import functools
import heapq
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import BudgetExceeded, ConstantTermNonzero, DomainMismatch, NotDivisible

INFINITE = math.inf

Exp = tuple  # exponent vector


# ---------------------------------------------------------------------------
# coefficient rings


class Ring:
    """Minimal commutative ring interface used by polynomials and Witt vectors."""

    char: int = 0
    name: str = "ring"

    zero: object
    one: object

    def add(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def from_int(self, k: int):
        raise NotImplementedError

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def is_zero(self, a) -> bool:
        return a == self.zero

    def pow(self, a, k: int):
        if k < 0:
            raise ValueError("negative exponent")
        result, base = self.one, a
        while k:
            if k & 1:
                result = self.mul(result, base)
            k >>= 1
            if k:
                base = self.mul(base, base)
        return result

    def sum(self, items: Iterable):
        acc = self.zero
        for x in items:
            acc = self.add(acc, x)
        return acc

    def descriptor(self) -> dict:
        return {"ring": self.name}


class IntegerRing(Ring):
    char = 0
    name = "ZZ"
    zero = 0
    one = 1

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def pow(self, a, k):
        return a**k

    def from_int(self, k):
        return int(k)


class RationalRing(Ring):
    char = 0
    name = "QQ"
    zero = Fraction(0)
    one = Fraction(1)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def pow(self, a, k):
        return a**k

    def from_int(self, k):
        return Fraction(k)


ZZ = IntegerRing()
QQ = RationalRing()


class TestAlgebra(Ring):
    """A finite commutative F_p-algebra given by structure constants.

    ``mult[i][j]`` is the coordinate vector of ``b_i * b_j`` in the basis
    ``b_0..b_{m-1}``; ``unit`` is the coordinate vector of 1.
    """

    __test__ = False  # keep pytest from collecting this class

    def __init__(self, p: int, mult, unit, name: str, generators: Sequence[str] = (),
                 relations: Sequence[str] = (), basis_names: Sequence[str] | None = None):
        self.p = int(p)
        self.char = self.p
        self.mult = np.asarray(mult, dtype=np.int64) % self.p
        self.m = int(self.mult.shape[0])
        self.unit_coords = tuple(int(c) % self.p for c in unit)
        self.name = name
        self.generators = tuple(generators)
        self.relations = tuple(relations)
        self.basis_names = tuple(basis_names) if basis_names else tuple(f"b{i}" for i in range(self.m))
        self.size = self.p**self.m
        self.enumerable = True
        self._check_axioms()
        self._build_tables()

    # -- construction -----------------------------------------------------

    def _basis_product(self, u, v):
        return np.einsum("i,j,ijk->k", u, v, self.mult) % self.p

    def _check_axioms(self):
        eye = np.eye(self.m, dtype=np.int64)
        unit = np.array(self.unit_coords, dtype=np.int64)
        for i in range(self.m):
            if not np.array_equal(self._basis_product(unit, eye[i]), eye[i]):
                raise ValueError(f"{self.name}: unit does not act as identity")
            for j in range(self.m):
                if not np.array_equal(self.mult[i, j], self.mult[j, i]):
                    raise ValueError(f"{self.name}: structure constants not commutative")
                for k in range(self.m):
                    left = self._basis_product(self._basis_product(eye[i], eye[j]), eye[k])
                    right = self._basis_product(eye[i], self._basis_product(eye[j], eye[k]))
                    if not np.array_equal(left, right):
                        raise ValueError(f"{self.name}: structure constants not associative")

    def _build_tables(self):
        p, m, n = self.p, self.m, self.size
        idx = np.arange(n)
        coords = np.stack([(idx // p**k) % p for k in range(m)], axis=1)
        self._coords = coords
        weights = p ** np.arange(m)
        add = ((coords[:, None, :] + coords[None, :, :]) % p) @ weights
        prod = np.einsum("ai,bj,ijk->abk", coords, coords, self.mult) % p
        mul = prod @ weights
        neg = ((-coords) % p) @ weights
        self._add = [list(map(int, row)) for row in add]
        self._mul = [list(map(int, row)) for row in mul]
        self._neg = list(map(int, neg))
        self._weights = [int(w) for w in weights]
        self.zero = 0
        self.one = int(np.dot(self.unit_coords, weights))
        self._from_int = [self._scalar(k) for k in range(p)]
        inv = [None] * n
        for a in range(n):
            for b in range(n):
                if self._mul[a][b] == self.one:
                    inv[a] = b
                    break
        self._inv = inv
        nil = [None] * n
        for a in range(n):
            x, e = a, 1
            while e <= m + 1:
                if x == 0:
                    nil[a] = e
                    break
                x = self._mul[x][a]
                e += 1
        self._nil = nil
        self.nilpotency = tuple(nil[self.basis_element(i)] for i in range(m))
        self.nil_index = self._compute_nil_index()

    def _scalar(self, k: int) -> int:
        k %= self.p
        c = [(k * u) % self.p for u in self.unit_coords]
        return int(sum(ci * w for ci, w in zip(c, self._weights)))

    def _compute_nil_index(self) -> int:
        """Smallest e such that any product of e nilpotent elements vanishes."""
        nils = [a for a in range(self.size) if self._nil[a] is not None]
        if nils == [0]:
            return 1
        span = set(nils)
        e = 1
        while span != {0}:
            span = {self._mul[a][b] for a in span for b in nils}
            e += 1
        return e

    # -- ring interface ---------------------------------------------------

    def add(self, a, b):
        return self._add[a][b]

    def neg(self, a):
        return self._neg[a]

    def sub(self, a, b):
        return self._add[a][self._neg[b]]

    def mul(self, a, b):
        return self._mul[a][b]

    def from_int(self, k):
        return self._from_int[int(k) % self.p]

    def is_zero(self, a):
        return a == 0

    def inverse(self, a) -> int | None:
        return self._inv[a]

    def is_unit(self, a) -> bool:
        return self._inv[a] is not None

    def nilpotency_of(self, a) -> int | None:
        """Smallest e with a^e = 0, or None if a is not nilpotent."""
        return self._nil[a]

    def is_nilpotent(self, a) -> bool:
        return self._nil[a] is not None

    def frobenius(self, a):
        return self.pow(a, self.p)

    # -- elements ---------------------------------------------------------

    def elements(self) -> range:
        return range(self.size)

    def element(self, coords: Sequence[int]) -> int:
        if len(coords) != self.m:
            raise DomainMismatch("coordinate vector has wrong length")
        return int(sum((int(c) % self.p) * w for c, w in zip(coords, self._weights)))

    def coords(self, a) -> tuple:
        return tuple(int(c) for c in self._coords[a])

    def basis_element(self, i: int) -> int:
        return self._weights[i]

    def nilpotents(self, kill_exponent: int | None = None) -> list:
        """Elements y with y^kill_exponent = 0 (all nilpotents if None)."""
        if kill_exponent is None:
            return [a for a in range(self.size) if self._nil[a] is not None]
        return [a for a in range(self.size) if self.pow(a, kill_exponent) == 0]

    def format(self, a) -> str:
        parts = []
        for c, b in zip(self.coords(a), self.basis_names):
            if c == 0:
                continue
            if b == "1":
                parts.append(str(c))
            else:
                parts.append(b if c == 1 else f"{c}{b}")
        return " + ".join(parts) if parts else "0"

    def descriptor(self) -> dict:
        return {
            "ring": "TestAlgebra",
            "name": self.name,
            "p": self.p,
            "dim": self.m,
            "generators": list(self.generators),
            "relations": list(self.relations),
        }

    def __repr__(self):
        return f"TestAlgebra({self.name})"


class PrimeField(TestAlgebra):
    """F_p with direct modular arithmetic (no table lookups)."""

    def __init__(self, p: int):
        super().__init__(p, [[[1]]], [1], name=f"F{p}", basis_names=["1"])

    def add(self, a, b):
        return (a + b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def pow(self, a, k):
        return pow(a, k, self.p)

    def from_int(self, k):
        return int(k) % self.p


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % q for q in range(2, int(math.isqrt(p)) + 1))


@functools.lru_cache(maxsize=None)
def prime_field(p: int) -> PrimeField:
    if not is_prime(p):
        from .errors import NotPrime

        raise NotPrime(p)
    return PrimeField(p)


def _fp2_constants(p: int):
    """x^2 = a + b x with x^2 - b x - a irreducible over F_p."""
    for b in range(p):
        for a in range(p):
            if all((x * x - b * x - a) % p for x in range(p)):
                return a, b
    raise AssertionError("no irreducible quadratic")


@functools.lru_cache(maxsize=None)
def zoo(p: int) -> dict:
    """The fixed collection of test algebras for the prime p, keyed by name."""
    if not is_prime(p):
        from .errors import NotPrime

        raise NotPrime(p)
    out = {}
    out[f"F{p}"] = prime_field(p)
    a, b = _fp2_constants(p)
    out[f"F{p}^2"] = TestAlgebra(
        p, [[[1, 0], [0, 1]], [[0, 1], [a, b]]], [1, 0], name=f"F{p}^2",
        generators=["w"], relations=[f"w^2 - {b}w - {a}"], basis_names=["1", "w"])
    out[f"F{p}[e]/(e^2)"] = TestAlgebra(
        p, [[[1, 0], [0, 1]], [[0, 1], [0, 0]]], [1, 0], name=f"F{p}[e]/(e^2)",
        generators=["e"], relations=["e^2"], basis_names=["1", "e"])
    m3 = np.zeros((3, 3, 3), dtype=np.int64)
    for i in range(3):
        for j in range(3):
            if i + j < 3:
                m3[i, j, i + j] = 1
    out[f"F{p}[e]/(e^3)"] = TestAlgebra(
        p, m3, [1, 0, 0], name=f"F{p}[e]/(e^3)", generators=["e"], relations=["e^3"],
        basis_names=["1", "e", "e^2"])
    md = np.zeros((3, 3, 3), dtype=np.int64)
    for i in range(3):
        md[0, i, i] = md[i, 0, i] = 1
    out[f"F{p}[e,d]/(e^2,d^2,ed)"] = TestAlgebra(
        p, md, [1, 0, 0], name=f"F{p}[e,d]/(e^2,d^2,ed)", generators=["e", "d"],
        relations=["e^2", "d^2", "ed"], basis_names=["1", "e", "d"])
    return out


def zoo_algebra(p: int, kind: str) -> TestAlgebra:
    """Look up a zoo member by a short kind: 'Fp', 'Fp2', 'eps2', 'eps3', 'epsdelta'."""
    names = {
        "Fp": f"F{p}",
        "Fp2": f"F{p}^2",
        "eps2": f"F{p}[e]/(e^2)",
        "eps3": f"F{p}[e]/(e^3)",
        "epsdelta": f"F{p}[e,d]/(e^2,d^2,ed)",
    }
    return zoo(p)[names.get(kind, kind)]


ZOO_KINDS = ("Fp", "Fp2", "eps2", "eps3", "epsdelta")


# ---------------------------------------------------------------------------
# monomial orders


def _grevlex_key(e):
    return (sum(e), tuple(-x for x in reversed(e)))


def _lex_key(e):
    return tuple(e)


ORDERS: dict[str, Callable] = {"grevlex": _grevlex_key, "lex": _lex_key}


def order_key(order: str) -> Callable:
    try:
        return ORDERS[order]
    except KeyError:
        raise ValueError(f"unknown monomial order {order!r}") from None


# ---------------------------------------------------------------------------
# sparse polynomials


class MPoly:
    """Sparse polynomial: a dict from exponent tuples to nonzero coefficients."""

    __slots__ = ("ring", "nvars", "terms", "_hash")

    def __init__(self, ring: Ring, nvars: int, terms: dict | None = None, _clean: bool = False):
        self.ring = ring
        self.nvars = nvars
        if terms is None:
            terms = {}
        elif not _clean:
            z = ring.is_zero
            terms = {tuple(e): c for e, c in terms.items() if not z(c)}
            for e in terms:
                if len(e) != nvars:
                    raise DomainMismatch("exponent vector arity mismatch")
        self.terms = terms
        self._hash = None

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, ring, nvars):
        return cls(ring, nvars, {}, _clean=True)

    @classmethod
    def const(cls, ring, nvars, c):
        if not isinstance(c, int) or isinstance(ring, (IntegerRing, RationalRing)):
            c = c if not isinstance(c, int) else ring.from_int(c)
        else:
            c = ring.from_int(c)
        return cls(ring, nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, ring, nvars, i, power=1):
        e = [0] * nvars
        e[i] = power
        return cls(ring, nvars, {tuple(e): ring.one}, _clean=True)

    @classmethod
    def gens(cls, ring, nvars):
        return [cls.var(ring, nvars, i) for i in range(nvars)]

    @classmethod
    def monomial(cls, ring, nvars, exp, coef=None):
        return cls(ring, nvars, {tuple(exp): ring.one if coef is None else coef})

    # -- helpers ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, MPoly):
            if other.ring is not self.ring or other.nvars != self.nvars:
                if other.nvars != self.nvars:
                    raise DomainMismatch("polynomials in different numbers of variables")
                if other.ring != self.ring:
                    raise DomainMismatch("polynomials over different coefficient rings")
            return other
        return MPoly.const(self.ring, self.nvars, other)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, MPoly):
            if isinstance(other, int) and other == 0:
                return not self.terms
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        R = self.ring
        out = dict(self.terms)
        for e, c in other.terms.items():
            if e in out:
                s = R.add(out[e], c)
                if R.is_zero(s):
                    del out[e]
                else:
                    out[e] = s
            else:
                out[e] = c
        return MPoly(R, self.nvars, out, _clean=True)

    __radd__ = __add__

    def __neg__(self):
        R = self.ring
        return MPoly(R, self.nvars, {e: R.neg(c) for e, c in self.terms.items()}, _clean=True)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c):
        R = self.ring
        if R.is_zero(c):
            return MPoly.zero(R, self.nvars)
        out = {}
        for e, a in self.terms.items():
            v = R.mul(a, c)
            if not R.is_zero(v):
                out[e] = v
        return MPoly(R, self.nvars, out, _clean=True)

    def __mul__(self, other):
        if not isinstance(other, MPoly):
            c = other if not isinstance(other, int) else self.ring.from_int(other)
            return self.scale(c)
        other = self._coerce(other)
        R = self.ring
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = R.mul(c1, c2)
                if e in out:
                    out[e] = R.add(out[e], v)
                else:
                    out[e] = v
        return MPoly(R, self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative exponent")
        result = MPoly.const(self.ring, self.nvars, self.ring.one)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # -- inspection -------------------------------------------------------

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, i: int) -> int:
        return max((e[i] for e in self.terms), default=-1)

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, self.ring.zero)

    def linear_part(self) -> dict:
        """Coefficients of the degree-one monomials, keyed by variable index."""
        out = {}
        for e, c in self.terms.items():
            if sum(e) == 1:
                out[e.index(1)] = c
        return out

    def variables(self) -> set:
        return {i for e in self.terms for i, a in enumerate(e) if a}

    def sorted_terms(self, order: str = "grevlex") -> list:
        key = order_key(order)
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)

    def leading_term(self, order: str = "grevlex"):
        key = order_key(order)
        e = max(self.terms, key=key)
        return e, self.terms[e]

    # -- transformations --------------------------------------------------

    def map_coeffs(self, f: Callable, ring: Ring) -> "MPoly":
        return MPoly(ring, self.nvars, {e: f(c) for e, c in self.terms.items()})

    def reduce_mod(self, field: TestAlgebra) -> "MPoly":
        """Image of an integer polynomial under ZZ -> field."""
        return self.map_coeffs(lambda c: field.from_int(c), field)

    def embed(self, nvars: int, positions: Sequence[int]) -> "MPoly":
        """Rename variable i to positions[i] inside a ring with nvars variables."""
        out = {}
        for e, c in self.terms.items():
            ne = [0] * nvars
            for i, a in enumerate(e):
                if a:
                    ne[positions[i]] += a
            out[tuple(ne)] = c
        return MPoly(self.ring, nvars, out, _clean=True)

    def substitute(self, images: Sequence["MPoly"]) -> "MPoly":
        """Replace variable i by images[i] (all in one common polynomial ring)."""
        if len(images) != self.nvars:
            raise DomainMismatch("substitution needs one image per variable")
        target = images[0] if images else None
        R = target.ring
        nv = target.nvars
        acc = MPoly.zero(R, nv)
        cache: dict = {}
        for e, c in self.terms.items():
            term = MPoly.const(R, nv, c if R is self.ring else R.from_int(c))
            for i, a in enumerate(e):
                if a:
                    key = (i, a)
                    if key not in cache:
                        cache[key] = images[i] ** a
                    term = term * cache[key]
            acc = acc + term
        return acc

    def evaluate(self, point: Sequence, target: Ring | None = None, coef_map: Callable | None = None):
        """Evaluate at a point whose entries live in ``target`` (default: own ring)."""
        T = target or self.ring
        if coef_map is None:
            if T is self.ring:
                coef_map = lambda c: c  # noqa: E731
            else:
                coef_map = T.from_int
        acc = T.zero
        for e, c in self.terms.items():
            v = coef_map(c)
            for i, a in enumerate(e):
                if a:
                    v = T.mul(v, T.pow(point[i], a))
                    if T.is_zero(v):
                        break
            acc = T.add(acc, v)
        return acc

    # -- io ---------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "nvars": self.nvars,
            "terms": [[list(e), int(c) if isinstance(c, int) else str(c)]
                      for e, c in self.sorted_terms("grevlex")],
        }

    @classmethod
    def from_json(cls, data: dict, ring: Ring) -> "MPoly":
        terms = {}
        for e, c in data["terms"]:
            terms[tuple(e)] = ring.from_int(int(c)) if not isinstance(ring, RationalRing) else Fraction(c)
        return cls(ring, int(data["nvars"]), terms)

    def __repr__(self):
        return self.format()

    def format(self, names: Sequence[str] | None = None) -> str:
        if not self.terms:
            return "0"
        names = names or [f"y{i}" for i in range(self.nvars)]
        parts = []
        for e, c in self.sorted_terms("grevlex"):
            mono = "*".join(n if a == 1 else f"{n}^{a}" for n, a in zip(names, e) if a)
            if isinstance(self.ring, TestAlgebra) and not isinstance(self.ring, PrimeField):
                cs = f"({self.ring.format(c)})"
            else:
                cs = str(c)
            if not mono:
                parts.append(cs)
            elif cs in ("1", "(1)"):
                parts.append(mono)
            else:
                parts.append(f"{cs}*{mono}")
        return " + ".join(parts)


class PolyRing(Ring):
    """The ring R[y_0..y_{n-1}] as a Ring, so Witt vectors can have polynomial entries."""

    def __init__(self, coeffs: Ring, nvars: int):
        self.coeffs = coeffs
        self.nvars = nvars
        self.char = coeffs.char
        self.name = f"{coeffs.name}[{nvars} vars]"
        self.zero = MPoly.zero(coeffs, nvars)
        self.one = MPoly.const(coeffs, nvars, coeffs.one)

    def __eq__(self, other):
        return isinstance(other, PolyRing) and other.coeffs is self.coeffs and other.nvars == self.nvars

    def __hash__(self):
        return hash((id(self.coeffs), self.nvars))

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def pow(self, a, k):
        if not a.terms:
            return self.one if k == 0 else self.zero
        if len(a.terms) == 1 and self.char and k % self.char == 0 and isinstance(self.coeffs, PrimeField):
            (e, c), = a.terms.items()
            return MPoly(self.coeffs, self.nvars, {tuple(x * k for x in e): self.coeffs.pow(c, k)}, _clean=True)
        if isinstance(self.coeffs, PrimeField) and self.char and k % self.char == 0:
            # Frobenius is additive in characteristic p with F_p coefficients
            p = self.char
            root = self.pow(a, k // p)
            return MPoly(self.coeffs, self.nvars,
                         {tuple(x * p for x in e): c for e, c in root.terms.items()}, _clean=True)
        return a**k

    def from_int(self, k):
        return MPoly.const(self.coeffs, self.nvars, self.coeffs.from_int(k))

    def is_zero(self, a):
        return not a.terms

    def var(self, i):
        return MPoly.var(self.coeffs, self.nvars, i)

    def const(self, c):
        return MPoly.const(self.coeffs, self.nvars, c)


class TruncatedPolyAlgebra(Ring):
    """A[z_0..z_{k-1}] / (z_j^{b_j}) over a finite test algebra A.

    Elements are MPoly over A with every exponent below its bound; this is
    the coordinate ring of an infinitesimal universal point, used to test
    characters scheme-theoretically rather than on A-points only.
    """

    def __init__(self, A: TestAlgebra, bounds: Sequence[int]):
        self.base = A
        self.bounds = tuple(int(b) for b in bounds)
        self.nvars = len(self.bounds)
        self.char = A.char
        self.p = A.p
        self.name = f"{A.name}[{self.nvars} truncated vars]"
        self.zero = MPoly.zero(A, self.nvars)
        self.one = MPoly.const(A, self.nvars, A.one)
        # any product of this many elements of the nilradical vanishes
        self.nil_index = (A.nil_index - 1) + sum(b - 1 for b in self.bounds) + 1

    def _trunc(self, f: MPoly) -> MPoly:
        b = self.bounds
        return MPoly(self.base, self.nvars,
                     {e: c for e, c in f.terms.items() if all(x < y for x, y in zip(e, b))}, _clean=True)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        A, bounds = self.base, self.bounds
        out: dict = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                if any(x >= y for x, y in zip(e, bounds)):
                    continue
                v = A.mul(c1, c2)
                if v:
                    out[e] = A.add(out.get(e, 0), v)
        return MPoly(A, self.nvars, out)

    def from_int(self, k):
        return MPoly.const(self.base, self.nvars, self.base.from_int(k))

    def is_zero(self, a):
        return not a.terms

    def var(self, i):
        return MPoly.var(self.base, self.nvars, i)

    def const(self, c):
        return MPoly(self.base, self.nvars, {(0,) * self.nvars: c})

    def is_nilpotent(self, a) -> bool:
        return self.base.is_nilpotent(a.constant_term())

    def nilpotency_of(self, a):
        if not self.is_nilpotent(a):
            return None
        x, e = a, 1
        while x.terms:
            x = self.mul(x, a)
            e += 1
        return e


def exact_div(f: MPoly, k: int) -> MPoly:
    """Divide an integer polynomial by k, demanding exact divisibility."""
    if k == 0:
        raise ZeroDivisionError("k must be nonzero")
    out = {}
    for e, c in f.terms.items():
        q, r = divmod(c, k)
        if r:
            raise NotDivisible(f"coefficient {c} of {e} is not a multiple of {k}")
        out[e] = q
    return MPoly(f.ring, f.nvars, out, _clean=True)


# ---------------------------------------------------------------------------
# Groebner bases over F_p
#
# Internally a polynomial is a dict exp -> int mod p.


def _lm(f: dict, key) -> tuple:
    return max(f, key=key)


def _divides(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _monic(f: dict, key, p) -> dict:
    e = _lm(f, key)
    inv = pow(f[e], -1, p)
    return {m: (c * inv) % p for m, c in f.items()}


def _sub_multiple(f: dict, g: dict, shift: tuple, c: int, p: int):
    """f -= c * x^shift * g, in place."""
    for e, a in g.items():
        m = tuple(x + y for x, y in zip(e, shift))
        v = (f.get(m, 0) - c * a) % p
        if v:
            f[m] = v
        else:
            f.pop(m, None)


def _neg_key(k):
    """Flattened, negated order key, so that heapq pops the largest monomial first."""
    out = []
    for x in k:
        if isinstance(x, tuple):
            out.extend(-y for y in x)
        else:
            out.append(-x)
    return tuple(out)


def _reduce(f: dict, G: list, lms: list, key, p: int, counter: list, budget: int) -> dict:
    """Full reduction of f modulo the monic list G."""
    f = dict(f)
    rem = {}
    # lazy max-heap of monomials; stale entries are skipped on pop
    heap = [(_neg_key(key(e)), e) for e in f]
    heapq.heapify(heap)
    while heap:
        _, e = heapq.heappop(heap)
        c = f.get(e)
        if not c:
            continue
        for g, lm in zip(G, lms):
            if _divides(lm, e):
                shift = tuple(x - y for x, y in zip(e, lm))
                for ge, a in g.items():
                    m = tuple(x + y for x, y in zip(ge, shift))
                    old = f.get(m, 0)
                    v = (old - c * a) % p
                    if v:
                        f[m] = v
                        if not old:
                            heapq.heappush(heap, (_neg_key(key(m)), m))
                    else:
                        f.pop(m, None)
                counter[0] += 1
                if counter[0] > budget:
                    raise BudgetExceeded("Groebner step budget exhausted")
                break
        else:
            rem[e] = c
            del f[e]
    return rem


@dataclass(frozen=True)
class GroebnerBasis:
    """A reduced Groebner basis of an ideal in F_p[y_0..y_{n-1}]."""

    p: int
    nvars: int
    order: str
    polys: tuple
    steps: int = field(default=0, compare=False)

    @property
    def field(self) -> PrimeField:
        return prime_field(self.p)

    def leading_monomials(self) -> list:
        key = order_key(self.order)
        return [max(g.terms, key=key) for g in self.polys]

    def is_unit_ideal(self) -> bool:
        return any(all(x == 0 for x in lm) for lm in self.leading_monomials())

    def normal_form(self, f: MPoly) -> MPoly:
        return normal_form(f, self)

    def contains(self, f: MPoly) -> bool:
        return normal_form(f, self).is_zero()

    def quotient_dim(self):
        return quotient_dim(self)

    def standard_monomials(self) -> list:
        return standard_monomials(self)

    def to_json(self) -> dict:
        return {"p": self.p, "nvars": self.nvars, "order": self.order,
                "basis": [g.to_json() for g in self.polys]}


def _as_fp_dict(f: MPoly, p: int) -> dict:
    R = f.ring
    if isinstance(R, PrimeField):
        if R.p != p:
            raise DomainMismatch("coefficient field mismatch")
        return dict(f.terms)
    if isinstance(R, IntegerRing):
        return {e: c % p for e, c in f.terms.items() if c % p}
    raise DomainMismatch("Groebner bases are only computed over prime fields")


def _field_of(gens: Sequence[MPoly], p: int | None) -> int:
    for g in gens:
        if isinstance(g.ring, PrimeField):
            if p is not None and g.ring.p != p:
                raise DomainMismatch("mixed characteristics")
            p = g.ring.p
    if p is None:
        raise DomainMismatch("cannot infer the coefficient field")
    return p


def groebner(gens: Sequence[MPoly], order: str = "grevlex", nvars: int | None = None,
             p: int | None = None, budget: int = 2_000_000) -> GroebnerBasis:
    """Reduced Groebner basis via Buchberger with the product and chain criteria."""
    gens = list(gens)
    if nvars is None:
        if not gens:
            raise ValueError("nvars is required for an empty generator list")
        nvars = gens[0].nvars
    p = _field_of(gens, p)
    Fp = prime_field(p)
    key = order_key(order)
    counter = [0]
    G: list = []
    lms: list = []
    pairs: list = []

    def add(h):
        h = _monic(h, key, p)
        lm = _lm(h, key)
        idx = len(G)
        G.append(h)
        lms.append(lm)
        for j in range(idx):
            if G[j] is not None:
                pairs.append((j, idx))

    for g in gens:
        if g.nvars != nvars:
            raise DomainMismatch("generator arity mismatch")
        f = _as_fp_dict(g, p)
        if not f:
            continue
        live = [(x, m) for x, m in zip(G, lms) if x is not None]
        r = _reduce(f, [x for x, _ in live], [m for _, m in live], key, p, counter, budget)
        if r:
            add(r)

    while pairs:
        pairs.sort(key=lambda ij: (sum(_lcm(lms[ij[0]], lms[ij[1]])), key(_lcm(lms[ij[0]], lms[ij[1]]))))
        i, j = pairs.pop(0)
        counter[0] += 1
        if counter[0] > budget:
            raise BudgetExceeded("Groebner step budget exhausted")
        if G[i] is None or G[j] is None:
            continue
        li, lj = lms[i], lms[j]
        lc = _lcm(li, lj)
        if all(a == 0 or b == 0 for a, b in zip(li, lj)):
            continue
        # chain criterion
        skip = False
        for k in range(len(G)):
            if k in (i, j) or G[k] is None:
                continue
            if _divides(lms[k], lc):
                a, b = (min(i, k), max(i, k)), (min(j, k), max(j, k))
                if a not in pairs and b not in pairs:
                    skip = True
                    break
        if skip:
            continue
        s: dict = {}
        _sub_multiple(s, G[i], tuple(x - y for x, y in zip(lc, li)), p - 1, p)
        _sub_multiple(s, G[j], tuple(x - y for x, y in zip(lc, lj)), 1, p)
        live = [(x, m) for x, m in zip(G, lms) if x is not None]
        r = _reduce(s, [x for x, _ in live], [m for _, m in live], key, p, counter, budget)
        if r:
            add(r)

    # minimise and interreduce
    live = [(g, m) for g, m in zip(G, lms) if g is not None]
    minimal = []
    for idx, (g, m) in enumerate(live):
        if any(_divides(m2, m) and (m2 != m or j < idx) for j, (_, m2) in enumerate(live) if j != idx):
            continue
        minimal.append((g, m))
    reduced = []
    for idx, (g, m) in enumerate(minimal):
        others = [x for j, (x, _) in enumerate(minimal) if j != idx]
        olms = [y for j, (_, y) in enumerate(minimal) if j != idx]
        tail = dict(g)
        del tail[m]
        r = _reduce(tail, others, olms, key, p, counter, budget)
        r[m] = 1
        reduced.append(r)
    reduced.sort(key=lambda f: key(_lm(f, key)))
    polys = tuple(MPoly(Fp, nvars, f, _clean=True) for f in reduced)
    return GroebnerBasis(p=p, nvars=nvars, order=order, polys=polys, steps=counter[0])


def normal_form(f: MPoly, gb: GroebnerBasis) -> MPoly:
    key = order_key(gb.order)
    fd = _as_fp_dict(f, gb.p)
    G = [dict(g.terms) for g in gb.polys]
    lms = [_lm(g, key) for g in G]
    r = _reduce(fd, G, lms, key, gb.p, [0], 10**12)
    return MPoly(prime_field(gb.p), gb.nvars, r, _clean=True)


def _pure_power_bounds(gb: GroebnerBasis):
    bounds = [None] * gb.nvars
    for lm in gb.leading_monomials():
        nz = [i for i, a in enumerate(lm) if a]
        if len(nz) == 1:
            i = nz[0]
            bounds[i] = lm[i] if bounds[i] is None else min(bounds[i], lm[i])
    return bounds


def standard_monomials(gb: GroebnerBasis, limit: int = 5_000_000) -> list:
    """Monomials outside the leading-term ideal; raises NotFinite if infinitely many."""
    from .errors import NotFinite

    lms = gb.leading_monomials()
    if any(all(a == 0 for a in lm) for lm in lms):
        return []
    bounds = _pure_power_bounds(gb)
    if any(b is None for b in bounds):
        raise NotFinite("quotient ring is infinite-dimensional")
    out: list = []
    n = gb.nvars

    def rec(i, prefix):
        if i == n:
            out.append(tuple(prefix))
            if len(out) > limit:
                raise BudgetExceeded("too many standard monomials")
            return
        for a in range(bounds[i]):
            prefix.append(a)
            # prune if some leading monomial already divides with zeros in the tail
            bad = False
            for lm in lms:
                if all(lm[k] <= prefix[k] for k in range(i + 1)) and all(lm[k] == 0 for k in range(i + 1, n)):
                    bad = True
                    break
            if not bad:
                rec(i + 1, prefix)
            prefix.pop()
            if bad:
                # larger exponents in position i stay divisible
                break

    rec(0, [])
    return out


def krull_dim(gb: GroebnerBasis) -> int:
    """Krull dimension of F_p[y]/I, read off the leading-term ideal.

    dim = nvars - (minimum number of variables meeting the support of every
    leading monomial); the hitting set is found by branch and bound.
    """
    lms = gb.leading_monomials()
    if any(all(a == 0 for a in lm) for lm in lms):
        return -1
    supports = {frozenset(i for i, a in enumerate(lm) if a) for lm in lms}
    # keep only minimal supports
    sets = [s for s in supports if not any(t < s for t in supports)]
    best = [len({i for s in sets for i in s})]

    def rec(remaining, chosen):
        if chosen >= best[0]:
            return
        if not remaining:
            best[0] = chosen
            return
        s = min(remaining, key=len)
        for v in sorted(s):
            rec([t for t in remaining if v not in t], chosen + 1)

    rec(sets, 0)
    return gb.nvars - best[0]


def quotient_dim(gb: GroebnerBasis):
    """Number of standard monomials, or INFINITE."""
    from .errors import NotFinite

    try:
        return len(standard_monomials(gb))
    except NotFinite:
        return INFINITE


# ---------------------------------------------------------------------------
# linearisation and points


def rank_mod_p(rows: Sequence[Sequence[int]], p: int) -> int:
    M = [list(int(x) % p for x in r) for r in rows]
    if not M:
        return 0
    ncols = len(M[0])
    rank = 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(M)) if M[r][col]), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        inv = pow(M[rank][col], -1, p)
        M[rank] = [(x * inv) % p for x in M[rank]]
        for r in range(len(M)):
            if r != rank and M[r][col]:
                c = M[r][col]
                M[r] = [(x - c * y) % p for x, y in zip(M[r], M[rank])]
        rank += 1
        if rank == len(M):
            break
    return rank


def nullspace_mod_p(rows: Sequence[Sequence[int]], ncols: int, p: int) -> list:
    """Basis of {v : rows . v = 0} over F_p."""
    M = [list(int(x) % p for x in r) for r in rows]
    pivots = []
    rank = 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(M)) if M[r][col]), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        inv = pow(M[rank][col], -1, p)
        M[rank] = [(x * inv) % p for x in M[rank]]
        for r in range(len(M)):
            if r != rank and M[r][col]:
                c = M[r][col]
                M[r] = [(x - c * y) % p for x, y in zip(M[r], M[rank])]
        pivots.append(col)
        rank += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        v = [0] * ncols
        v[fcol] = 1
        for r, pc in enumerate(pivots):
            v[pc] = (-M[r][fcol]) % p
        basis.append(v)
    return basis


def tangent_dim(equations: Sequence[MPoly], nvars: int | None = None) -> int:
    """Dimension of the kernel of the matrix of linear parts."""
    if nvars is None:
        if not equations:
            raise ValueError("nvars required for an empty system")
        nvars = equations[0].nvars
    rows = []
    p = None
    for f in equations:
        if not f.ring.is_zero(f.constant_term()):
            raise ConstantTermNonzero(repr(f))
        p = f.ring.char
        lin = f.linear_part()
        rows.append([lin.get(i, 0) for i in range(nvars)])
    if not rows:
        return nvars
    return nvars - rank_mod_p(rows, p)


def _compile(f: MPoly, A: TestAlgebra):
    """Turn f into a list of (coefficient in A, ((var, exp), ...)) for fast evaluation."""
    if isinstance(f.ring, TestAlgebra) and f.ring is A:
        cmap = lambda c: c  # noqa: E731
    else:
        cmap = A.from_int
    out = []
    for e, c in f.terms.items():
        out.append((cmap(c), tuple((i, a) for i, a in enumerate(e) if a)))
    return out


def eval_compiled(comp, point, A: TestAlgebra):
    add, mul = A._add, A._mul
    acc = 0
    for c, mono in comp:
        v = c
        for i, a in mono:
            x = point[i]
            if a == 1:
                v = mul[v][x]
            else:
                v = mul[v][A.pow(x, a)]
            if v == 0:
                break
        acc = add[acc][v]
    return acc


def enumerate_points(equations: Sequence[MPoly], A: TestAlgebra, arity: int | None = None,
                     budget: int = 2_000_000) -> list:
    """All solutions in A^arity, sorted.

    The system is first replaced by a lexicographic Groebner basis, which
    generates the same ideal and so has the same points over every F_p-algebra;
    the triangular shape lets the search prune level by level.
    """
    equations = [f for f in equations if not f.is_zero()]
    if arity is None:
        if not equations:
            raise ValueError("arity required for an empty system")
        arity = equations[0].nvars
    if equations:
        p = equations[0].ring.char
        if p != A.p:
            raise DomainMismatch("equations and test algebra have different characteristic")
        gb = groebner(equations, order="lex", nvars=arity, p=p)
        polys = list(gb.polys)
    else:
        polys = []
    # under lex with y_0 > y_1 > ..., elements free of y_0..y_{k-1} live at level k
    levels: list = [[] for _ in range(arity + 1)]
    for g in polys:
        vs = g.variables()
        lowest = min(vs) if vs else arity
        levels[lowest].append(_compile(g, A))
        if not vs:
            return []  # unit ideal
    elems = list(A.elements())
    out = []
    point = [0] * arity
    visited = [0]

    def rec(k):
        # assign y_k given y_{k+1}..y_{n-1}
        if k < 0:
            out.append(tuple(point))
            return
        for a in elems:
            visited[0] += 1
            if visited[0] > budget:
                raise BudgetExceeded("point enumeration budget exhausted")
            point[k] = a
            if all(eval_compiled(c, point, A) == 0 for c in levels[k]):
                rec(k - 1)
        point[k] = 0

    rec(arity - 1)
    out.sort()
    return out


def count_points(equations, A, arity=None, budget=2_000_000) -> int:
    return len(enumerate_points(equations, A, arity, budget))
