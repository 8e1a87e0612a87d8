"""Truncated p-typical Witt vectors in characteristic p.

Structure polynomials come from the ghost recursion over the integers and are
cached on disk, one file per (p, n).  Witt vectors evaluate those polynomials
over any :class:`~wittdisp.exactalg.Ring` of characteristic p: test algebras
for numerics, polynomial rings for symbolic equations.

The same module holds the formal group of Witt vectors with nilpotent,
finitely supported components, the Artin-Hasse embedding into big Witt
vectors (realised as power series with constant term 1), the canonical
character lambda(f) = f(1) and the resulting Cartier pairing.
"""
from __future__ import annotations

import functools
import hashlib
import itertools
import math
import os
import struct
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .errors import (BudgetExceeded, CacheCorrupt, DomainMismatch, NotPrime, NotUnit,
                     PrecisionTooSmall)
from .exactalg import (MPoly, PolyRing, PrimeField, Ring, TestAlgebra, ZZ, eval_compiled,
                       exact_div, is_prime, prime_field)

FORMAT_VERSION = 1
MAGIC = b"WITTLAW\x00"


# ---------------------------------------------------------------------------
# structure polynomials


def ghost_poly(p: int, k: int, nvars: int, offset: int = 0) -> MPoly:
    """w_k = sum_{j<=k} p^j x_j^{p^(k-j)} with x_j the variable offset+j."""
    acc = MPoly.zero(ZZ, nvars)
    for j in range(k + 1):
        acc = acc + MPoly.var(ZZ, nvars, offset + j, p ** (k - j)) * (p**j)
    return acc


def _solve_ghost(p: int, n: int, nvars: int, target) -> list:
    """Polynomials Q_0..Q_{n-1} with w_k(Q) = target(k), by the ghost recursion."""
    out: list = []
    for k in range(n):
        acc = target(k)
        for j in range(k):
            acc = acc - (out[j] ** (p ** (k - j))) * (p**j)
        out.append(exact_div(acc, p**k))
    return out


@dataclass(frozen=True)
class WittLaw:
    """Integral structure polynomials of W_n for one prime.

    ``add`` and ``mul`` live in 2n variables (x_0..x_{n-1}, y_0..y_{n-1}),
    ``neg`` in n variables, ``frob`` in n+1 variables (the integral lift of
    Frobenius W_{n+1} -> W_n).
    """

    p: int
    n: int
    add: tuple
    mul: tuple
    neg: tuple
    frob: tuple
    version: int = FORMAT_VERSION

    # compiled forms reduced mod p, built lazily
    def _compiled(self, which: str):
        return _compiled_law(self.p, self.n, which, id(self))

    def check_ghost_compatibility(self) -> bool:
        p, n = self.p, self.n
        for k in range(n):
            wx = ghost_poly(p, k, 2 * n, 0)
            wy = ghost_poly(p, k, 2 * n, n)
            xs = [MPoly.var(ZZ, 2 * n, i) for i in range(2 * n)]
            w_add = ghost_poly(p, k, n).substitute(list(self.add))
            w_mul = ghost_poly(p, k, n).substitute(list(self.mul))
            if w_add != wx + wy or w_mul != wx * wy:
                return False
            w_neg = ghost_poly(p, k, n).substitute(list(self.neg))
            if w_neg != -ghost_poly(p, k, n):
                return False
            w_frob = ghost_poly(p, k, n).substitute(list(self.frob))
            if w_frob != ghost_poly(p, k + 1, n + 1):
                return False
            del xs
        return True


_COMPILED: dict = {}


def _compiled_law(p, n, which, key):
    ck = (p, n, which)
    if ck not in _COMPILED:
        law = gen_witt_law(p, n)
        out = []
        for f in getattr(law, which):
            comp = []
            for e, c in f.terms.items():
                c %= p
                if c:
                    comp.append((c, tuple((i, a) for i, a in enumerate(e) if a)))
            out.append(comp)
        _COMPILED[ck] = out
    return _COMPILED[ck]


def _build_law(p: int, n: int) -> WittLaw:
    nv2 = 2 * n
    add = _solve_ghost(p, n, nv2, lambda k: ghost_poly(p, k, nv2, 0) + ghost_poly(p, k, nv2, n))
    mul = _solve_ghost(p, n, nv2, lambda k: ghost_poly(p, k, nv2, 0) * ghost_poly(p, k, nv2, n))
    neg = _solve_ghost(p, n, n, lambda k: -ghost_poly(p, k, n))
    frob = _solve_ghost(p, n, n + 1, lambda k: ghost_poly(p, k + 1, n + 1))
    return WittLaw(p, n, tuple(add), tuple(mul), tuple(neg), tuple(frob))


# -- disk cache -------------------------------------------------------------
#
# Layout (all integers little-endian):
#   magic "WITTLAW\0" | u32 version | u32 p | u32 n | u32 family count
#   per family: u32 poly count; per poly: u32 nvars, u32 term count;
#     per term: nvars x u32 exponents, u8 sign, u32 byte length, magnitude bytes
#   trailer: 32-byte SHA-256 of everything before it


def cache_dir() -> Path:
    env = os.environ.get("WITTDISP_CACHE")
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "wittdisp"


def cache_path(p: int, n: int, directory: Path | None = None) -> Path:
    return Path(directory or cache_dir()) / f"witt_p{p}_n{n}_v{FORMAT_VERSION}.bin"


def _pack_poly(f: MPoly) -> bytes:
    out = [struct.pack("<II", f.nvars, len(f.terms))]
    for e, c in sorted(f.terms.items()):
        out.append(struct.pack(f"<{f.nvars}I", *e))
        mag = abs(c)
        raw = mag.to_bytes(max(1, (mag.bit_length() + 7) // 8), "little")
        out.append(struct.pack("<BI", 1 if c < 0 else 0, len(raw)))
        out.append(raw)
    return b"".join(out)


def encode_law(law: WittLaw) -> bytes:
    fams = (law.add, law.mul, law.neg, law.frob)
    body = [MAGIC, struct.pack("<IIII", law.version, law.p, law.n, len(fams))]
    for fam in fams:
        body.append(struct.pack("<I", len(fam)))
        body.extend(_pack_poly(f) for f in fam)
    data = b"".join(body)
    return data + hashlib.sha256(data).digest()


def decode_law(data: bytes) -> WittLaw:
    if len(data) < len(MAGIC) + 16 + 32 or not data.startswith(MAGIC):
        raise CacheCorrupt("bad header")
    payload, digest = data[:-32], data[-32:]
    if hashlib.sha256(payload).digest() != digest:
        raise CacheCorrupt("checksum mismatch")
    pos = len(MAGIC)
    version, p, n, nfam = struct.unpack_from("<IIII", payload, pos)
    pos += 16
    if version != FORMAT_VERSION:
        raise CacheCorrupt(f"unsupported format version {version}")
    fams = []
    for _ in range(nfam):
        (count,) = struct.unpack_from("<I", payload, pos)
        pos += 4
        polys = []
        for _ in range(count):
            nvars, nterms = struct.unpack_from("<II", payload, pos)
            pos += 8
            terms = {}
            for _ in range(nterms):
                e = struct.unpack_from(f"<{nvars}I", payload, pos)
                pos += 4 * nvars
                sign, length = struct.unpack_from("<BI", payload, pos)
                pos += 5
                mag = int.from_bytes(payload[pos:pos + length], "little")
                pos += length
                terms[tuple(e)] = -mag if sign else mag
            polys.append(MPoly(ZZ, nvars, terms))
        fams.append(tuple(polys))
    if pos != len(payload):
        raise CacheCorrupt("trailing bytes")
    return WittLaw(p, n, *fams, version=version)


def _write_atomic(path: Path, data: bytes):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


@functools.lru_cache(maxsize=None)
def gen_witt_law(p: int, n: int, use_cache: bool = True) -> WittLaw:
    """Structure polynomials of W_n over F_p-algebras (and over Z), cached."""
    if not is_prime(p):
        raise NotPrime(p)
    if n < 1:
        raise ValueError("Witt length must be at least 1")
    if use_cache:
        path = cache_path(p, n)
        if path.exists():
            try:
                law = decode_law(path.read_bytes())
                if law.p == p and law.n == n:
                    return law
            except CacheCorrupt:
                pass
    law = _build_law(p, n)
    if use_cache:
        try:
            _write_atomic(cache_path(p, n), encode_law(law))
        except OSError:
            pass
    return law


def write_law_cache(p: int, n: int, directory: Path | None = None) -> Path:
    law = gen_witt_law(p, n, use_cache=False)
    path = cache_path(p, n, directory)
    _write_atomic(path, encode_law(law))
    return path


# ---------------------------------------------------------------------------
# evaluation


def _eval_generic(comp, args, R: Ring):
    acc = R.zero
    powers: dict = {}
    for c, mono in comp:
        v = R.from_int(c)
        for i, a in mono:
            key = (i, a)
            if key not in powers:
                powers[key] = R.pow(args[i], a)
            v = R.mul(v, powers[key])
            if R.is_zero(v):
                break
        acc = R.add(acc, v)
    return acc


def _eval_family(comp_family, args, R: Ring, upto: int):
    if isinstance(R, TestAlgebra) and not isinstance(R, PrimeField):
        table = [R.from_int(c) for c in range(R.p)]
        out = []
        for comp in comp_family[:upto]:
            conv = [(table[c], mono) for c, mono in comp]
            out.append(eval_compiled(conv, args, R))
        return out
    return [_eval_generic(comp, args, R) for comp in comp_family[:upto]]


class WittVec:
    """A length-n Witt vector with entries in a ring of characteristic p."""

    __slots__ = ("p", "ring", "entries")

    def __init__(self, p: int, ring: Ring, entries: Sequence):
        if ring.char != p:
            raise DomainMismatch(f"ring characteristic {ring.char} is not {p}")
        self.p = p
        self.ring = ring
        self.entries = tuple(entries)

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, p, ring, n):
        return cls(p, ring, [ring.zero] * n)

    @classmethod
    def one(cls, p, ring, n):
        return cls(p, ring, [ring.one] + [ring.zero] * (n - 1))

    @classmethod
    def teichmuller(cls, p, ring, n, a):
        return cls(p, ring, [a] + [ring.zero] * (n - 1))

    @classmethod
    def from_integer(cls, p, ring, n, k: int):
        """Image of the integer k under Z -> W_n(F_p) -> W_n(ring)."""
        digits = int_to_witt_digits(p, n, k)
        return cls(p, ring, [ring.from_int(c) for c in digits])

    # -- basic properties ---------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def law(self) -> WittLaw:
        return gen_witt_law(self.p, self.n)

    def _check(self, other: "WittVec"):
        if not isinstance(other, WittVec):
            raise DomainMismatch("expected a Witt vector")
        if other.p != self.p or other.n != self.n:
            raise DomainMismatch("Witt vectors of different primes or lengths")
        if other.ring is not self.ring and other.ring != self.ring:
            raise DomainMismatch("Witt vectors over different rings")

    def is_zero(self) -> bool:
        return all(self.ring.is_zero(a) for a in self.entries)

    def __eq__(self, other):
        if not isinstance(other, WittVec):
            return NotImplemented
        return self.p == other.p and self.entries == other.entries

    def __hash__(self):
        return hash((self.p, self.entries))

    def __repr__(self):
        R = self.ring
        fmt = R.format if isinstance(R, TestAlgebra) else repr
        return "W(" + ", ".join(fmt(a) for a in self.entries) + ")"

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        self._check(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        comp = _compiled_law(self.p, self.n, "add", None)
        return WittVec(self.p, self.ring, _eval_family(comp, self.entries + other.entries, self.ring, self.n))

    def __neg__(self):
        comp = _compiled_law(self.p, self.n, "neg", None)
        return WittVec(self.p, self.ring, _eval_family(comp, self.entries, self.ring, self.n))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale_int(other)
        self._check(other)
        if self.is_zero() or other.is_zero():
            return WittVec.zero(self.p, self.ring, self.n)
        comp = _compiled_law(self.p, self.n, "mul", None)
        return WittVec(self.p, self.ring, _eval_family(comp, self.entries + other.entries, self.ring, self.n))

    __rmul__ = __mul__

    def scale_int(self, k: int) -> "WittVec":
        """Multiplication by an integer (equivalently by an element of W_n(F_p))."""
        digits = int_to_witt_digits(self.p, self.n, k)
        return self.scale_fp_witt(digits)

    def scale_fp_witt(self, digits: Sequence[int]) -> "WittVec":
        """Multiply by the W_n(F_p)-element with components ``digits``.

        Uses c = sum_i V^i[c_i] and V^i[c] * x = V^i([c] * F^i x); for c in F_p
        the Teichmueller factor acts componentwise by c^(p^k) = c.
        """
        R = self.ring
        acc = WittVec.zero(self.p, R, self.n)
        fx = self
        for i, c in enumerate(digits[: self.n]):
            if i:
                fx = fx.frobenius()
            c %= self.p
            if c:
                cc = R.from_int(c)
                term = WittVec(self.p, R, [R.mul(cc, a) for a in fx.entries]).verschiebung(i)
                acc = acc + term
        return acc

    def teich_mul(self, a) -> "WittVec":
        """[a] * x = (a x_0, a^p x_1, a^{p^2} x_2, ...)."""
        R = self.ring
        out = []
        ap = a
        for k, x in enumerate(self.entries):
            out.append(R.mul(ap, x))
            ap = R.pow(ap, self.p)
        return WittVec(self.p, R, out)

    def __pow__(self, k: int):
        result = WittVec.one(self.p, self.ring, self.n)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # -- F, V, truncation -------------------------------------------------

    def frobenius(self, times: int = 1) -> "WittVec":
        R = self.ring
        e = self.p**times
        return WittVec(self.p, R, [R.pow(a, e) for a in self.entries])

    def verschiebung(self, times: int = 1) -> "WittVec":
        R = self.ring
        n = self.n
        times = min(times, n)
        return WittVec(self.p, R, [R.zero] * times + list(self.entries[: n - times]))

    F = frobenius
    V = verschiebung

    def truncate(self, k: int) -> "WittVec":
        """Image under W_n -> W_k (k <= n)."""
        if k > self.n:
            raise DomainMismatch("cannot truncate to a longer length")
        return WittVec(self.p, self.ring, self.entries[:k])

    def pad(self, k: int) -> "WittVec":
        """The set-theoretic section W_n -> W_k (k >= n) adding zero components."""
        if k < self.n:
            return self.truncate(k)
        return WittVec(self.p, self.ring, list(self.entries) + [self.ring.zero] * (k - self.n))

    def v_inverse(self) -> "WittVec":
        """Left-shift inverse I_n -> W_{n-1} of the injective V: W_{n-1} -> W_n."""
        if not self.ring.is_zero(self.entries[0]):
            raise DomainMismatch("V^{-1} is only defined on I_n")
        return WittVec(self.p, self.ring, self.entries[1:])

    def in_I(self) -> bool:
        """Membership in I_n = Ker(W_n -> W_1)."""
        return self.ring.is_zero(self.entries[0])

    def in_J(self) -> bool:
        """Membership in J_n = Ker(W_n -> W_{n-1})."""
        return all(self.ring.is_zero(a) for a in self.entries[:-1])

    def map_ring(self, f, ring: Ring) -> "WittVec":
        return WittVec(self.p, ring, [f(a) for a in self.entries])

    def to_json(self):
        return [int(a) if isinstance(a, int) else repr(a) for a in self.entries]


# -- W_n(F_p) = Z/p^n ---------------------------------------------------------


def teichmuller_int(p: int, n: int, c: int) -> int:
    """The Teichmueller representative of c mod p in Z/p^n."""
    c %= p
    return pow(c, p ** (n - 1), p**n) if c else 0


def witt_digits_to_int(p: int, digits: Sequence[int]) -> int:
    """Z/p^n value of the Witt vector (c_0..c_{n-1}) over F_p: sum p^i [c_i]."""
    n = len(digits)
    return sum(p**i * teichmuller_int(p, n, c) for i, c in enumerate(digits)) % p**n


def int_to_witt_digits(p: int, n: int, k: int) -> list:
    """Inverse of :func:`witt_digits_to_int`."""
    out = []
    mod = p**n
    k %= mod
    for i in range(n):
        c = (k // p**i) % p
        out.append(c)
        k = (k - p**i * teichmuller_int(p, n, c)) % mod
    return out


def witt_to_int(x: WittVec) -> int:
    if not isinstance(x.ring, PrimeField):
        raise DomainMismatch("integer form exists only over F_p")
    return witt_digits_to_int(x.p, x.entries)


def int_to_witt(p: int, n: int, k: int) -> WittVec:
    return WittVec(p, prime_field(p), int_to_witt_digits(p, n, k))


# ---------------------------------------------------------------------------
# the formal Witt group


class HatWittElement:
    """A Witt vector with finitely many nonzero, nilpotent components.

    ``support`` maps an index to a nonzero entry of the test algebra; ``kill``
    is the declared n with y_i^{p^n} = 0 for all entries (F^n y = 0).
    """

    __slots__ = ("p", "ring", "support", "kill")

    def __init__(self, p: int, ring: TestAlgebra, support: dict, kill: int):
        self.p = p
        self.ring = ring
        self.kill = kill
        supp = {int(i): a for i, a in support.items() if not ring.is_zero(a)}
        e = p**kill
        for i, a in supp.items():
            if not ring.is_zero(ring.pow(a, e)):
                raise DomainMismatch(f"entry at {i} is not killed by F^{kill}")
        self.support = supp

    @classmethod
    def from_entries(cls, p, ring, entries, kill):
        return cls(p, ring, dict(enumerate(entries)), kill)

    @classmethod
    def from_witt(cls, x: WittVec, kill: int):
        return cls(x.p, x.ring, dict(enumerate(x.entries)), kill)

    def bound(self) -> int:
        """One past the largest index in the support."""
        return max(self.support, default=-1) + 1

    def to_witt(self, length: int) -> WittVec:
        if self.bound() > length:
            raise PrecisionTooSmall("support exceeds requested length")
        R = self.ring
        return WittVec(self.p, R, [self.support.get(i, R.zero) for i in range(length)])

    def is_zero(self):
        return not self.support

    def __eq__(self, other):
        return isinstance(other, HatWittElement) and self.support == other.support and self.p == other.p

    def __hash__(self):
        return hash((self.p, tuple(sorted(self.support.items()))))

    def __repr__(self):
        R = self.ring
        inner = ", ".join(f"{i}: {R.format(a)}" for i, a in sorted(self.support.items()))
        return f"Hat({{{inner}}})"

    def _sum_length(self, other: "HatWittElement") -> int:
        # same weight count as in pairing_length, with both arguments nilpotent
        return pairing_length(self.p, self.ring, max(self.bound(), other.bound(), 1))

    def __add__(self, other):
        L = self._sum_length(other)
        z = self.to_witt(L) + other.to_witt(L)
        return HatWittElement.from_witt(z, max(self.kill, other.kill))

    def __neg__(self):
        L = pairing_length(self.p, self.ring, max(self.bound(), 1))
        return HatWittElement.from_witt(-self.to_witt(L), self.kill)

    def frobenius(self):
        R = self.ring
        return HatWittElement(self.p, R, {i: R.pow(a, self.p) for i, a in self.support.items()},
                              max(self.kill - 1, 0) if self.kill else 0)

    def verschiebung(self):
        return HatWittElement(self.p, self.ring, {i + 1: a for i, a in self.support.items()}, self.kill)


def _ceil_log(p: int, e: int) -> int:
    """Smallest k with p^k >= e."""
    k = 0
    while p**k < e:
        k += 1
    return k


def hat_enumerate(A: TestAlgebra, n: int, M: int, budget: int = 200_000) -> list:
    """All elements with support in [0, M) and entries killed by the p^n-th power."""
    entries = A.nilpotents(A.p**n)
    total = len(entries) ** M
    if total > budget:
        raise BudgetExceeded(f"{total} candidates exceed the budget {budget}")
    return [HatWittElement.from_entries(A.p, A, combo, n) for combo in itertools.product(entries, repeat=M)]


def witt_enumerate_killed(A: TestAlgebra, n: int, m: int, budget: int = 200_000) -> list:
    """W_n^{(F^m)}(A): length-n Witt vectors with every component killed by x -> x^{p^m}."""
    entries = A.nilpotents(A.p**m) if m >= 0 else list(A.elements())
    total = len(entries) ** n
    if total > budget:
        raise BudgetExceeded(f"{total} candidates exceed the budget {budget}")
    return [WittVec(A.p, A, combo) for combo in itertools.product(entries, repeat=n)]


# ---------------------------------------------------------------------------
# Artin-Hasse exponential and big Witt vectors


class ArtinHasseTable:
    """Coefficients of E(a, t) = exp(sum_j a^{p^j} t^{p^j} / p^j) = sum_k c_k a^k t^k.

    The c_k are computed in Q, checked to be p-integral, and reduced mod p.
    """

    def __init__(self, p: int, N: int):
        self.p = p
        self.N = N
        self.rational = _artin_hasse_rational(p, N)
        self.coeffs = []
        for k, c in enumerate(self.rational):
            if c.denominator % p == 0:
                raise AssertionError(f"Artin-Hasse coefficient {k} is not p-integral: {c}")
            self.coeffs.append(c.numerator * pow(c.denominator, -1, p) % p)
        self._check_ghosts()

    def _check_ghosts(self):
        # t d/dt log E(t) must be sum_j t^{p^j}: ghost components vanish away from powers of p
        E = self.rational
        N = self.N
        # log-derivative coefficients g_k from  k c_k = sum_{j=1..k} g_j c_{k-j}
        g = [Fraction(0)] * (N + 1)
        for k in range(1, N + 1):
            s = k * E[k] - sum(g[j] * E[k - j] for j in range(1, k))
            g[k] = s
        powers = {self.p**j for j in range(N.bit_length() + 1)}
        for k in range(1, N + 1):
            expected = 1 if k in powers else 0
            if g[k] != expected:
                raise AssertionError(f"Artin-Hasse ghost component {k} is {g[k]}")

    def series(self, a, R: Ring, degree_step: int = 1, N: int | None = None) -> list:
        """Coefficient list of E(a t^degree_step) truncated at t^N."""
        N = self.N if N is None else N
        out = [R.zero] * (N + 1)
        out[0] = R.one
        ak = R.one
        for k in range(1, N // degree_step + 1):
            ak = R.mul(ak, a)
            if R.is_zero(ak):
                break
            if k >= len(self.coeffs):
                raise PrecisionTooSmall("Artin-Hasse table too short")
            out[k * degree_step] = R.mul(R.from_int(self.coeffs[k]), ak)
        return out

    def value(self, a, R: Ring):
        """E(a) for nilpotent a."""
        acc = R.one
        ak = R.one
        k = 0
        while True:
            k += 1
            ak = R.mul(ak, a)
            if R.is_zero(ak):
                return acc
            if k >= len(self.coeffs):
                raise PrecisionTooSmall("Artin-Hasse table too short for this nilpotent")
            acc = R.add(acc, R.mul(R.from_int(self.coeffs[k]), ak))


@functools.lru_cache(maxsize=None)
def _artin_hasse_rational(p: int, N: int) -> tuple:
    # E = exp(L) with L = sum_j t^{p^j}/p^j; use k E_k = sum_m m L_m E_{k-m}
    L = [Fraction(0)] * (N + 1)
    q = 1
    while q <= N:
        L[q] = Fraction(1, q)
        q *= p
    E = [Fraction(0)] * (N + 1)
    E[0] = Fraction(1)
    for k in range(1, N + 1):
        E[k] = sum(m * L[m] * E[k - m] for m in range(1, k + 1) if L[m]) / k
    return tuple(E)


@functools.lru_cache(maxsize=None)
def artin_hasse_table(p: int, N: int) -> ArtinHasseTable:
    return ArtinHasseTable(p, N)


def _poly_mul(f: list, g: list, R: Ring, N: int) -> list:
    out = [R.zero] * (N + 1)
    for i, a in enumerate(f):
        if R.is_zero(a):
            continue
        for j in range(min(len(g), N + 1 - i)):
            b = g[j]
            if not R.is_zero(b):
                out[i + j] = R.add(out[i + j], R.mul(a, b))
    return out


class BigWittVec:
    """A big Witt vector truncated at t^N, stored as the series 1 + a_1 t + ... + a_N t^N.

    Addition is multiplication of series.  ``coordinates`` gives the x_d with
    f = prod_d (1 - x_d t^d)^{-1} mod t^{N+1}.
    """

    __slots__ = ("ring", "N", "coeffs")

    def __init__(self, ring: Ring, coeffs: Sequence, N: int | None = None):
        N = len(coeffs) - 1 if N is None else N
        if N < 1:
            raise ValueError("precision must be positive")
        c = list(coeffs[: N + 1]) + [ring.zero] * max(0, N + 1 - len(coeffs))
        if c[0] != ring.one:
            raise DomainMismatch("big Witt series must have constant term 1")
        self.ring = ring
        self.N = N
        self.coeffs = tuple(c)

    @classmethod
    def from_coordinates(cls, ring: Ring, xs: Sequence):
        N = len(xs)
        f = [ring.one] + [ring.zero] * N
        for d, x in enumerate(xs, start=1):
            if ring.is_zero(x):
                continue
            # multiply by (1 - x t^d)^{-1} = sum_k x^k t^{dk}
            geo = [ring.zero] * (N + 1)
            geo[0] = ring.one
            xk = ring.one
            for k in range(1, N // d + 1):
                xk = ring.mul(xk, x)
                geo[d * k] = xk
            f = _poly_mul(f, geo, ring, N)
        return cls(ring, f, N)

    def coordinates(self) -> list:
        R = self.ring
        f = list(self.coeffs)
        xs = []
        for d in range(1, self.N + 1):
            x = f[d]
            xs.append(x)
            if not R.is_zero(x):
                factor = [R.zero] * (self.N + 1)
                factor[0] = R.one
                factor[d] = R.neg(x)
                f = _poly_mul(f, factor, R, self.N)
        return xs

    def __add__(self, other):
        if other.N != self.N:
            raise DomainMismatch("big Witt vectors of different precision")
        return BigWittVec(self.ring, _poly_mul(list(self.coeffs), list(other.coeffs), self.ring, self.N), self.N)

    def __eq__(self, other):
        return isinstance(other, BigWittVec) and self.N == other.N and self.coeffs == other.coeffs

    def V(self, m: int) -> "BigWittVec":
        """V_m: f(t) -> f(t^m)."""
        R = self.ring
        out = [R.zero] * (self.N * m + 1)
        for i, c in enumerate(self.coeffs):
            out[i * m] = c
        return BigWittVec(R, out, self.N * m)

    def degree(self) -> int:
        return max((i for i, c in enumerate(self.coeffs) if not self.ring.is_zero(c)), default=0)

    def __repr__(self):
        R = self.ring
        fmt = R.format if isinstance(R, TestAlgebra) else repr
        parts = [fmt(c) + (f"*t^{i}" if i else "") for i, c in enumerate(self.coeffs) if not R.is_zero(c)]
        return " + ".join(parts)


def lambda_eval(f, ring: Ring | None = None):
    """The canonical character: f -> f(1), for f with constant term 1 and nilpotent higher terms."""
    if isinstance(f, BigWittVec):
        ring, coeffs = f.ring, f.coeffs
    else:
        coeffs = list(f)
    if coeffs[0] != ring.one:
        raise DomainMismatch("series must have constant term 1")
    val = ring.sum(coeffs)
    if isinstance(ring, TestAlgebra) and not ring.is_unit(val):
        raise NotUnit("lambda produced a non-unit")
    return val


def ah_precision(p: int, A: TestAlgebra, support_bound: int) -> int:
    """The degree bound e * p^{support bound} used for truncating AH images."""
    e = max(A.nil_index, 1)
    return e * p**support_bound


def ah_embed(x, N: int | None = None) -> BigWittVec:
    """Image of a Witt vector with nilpotent components: prod_i E(x_i t^{p^i})."""
    if isinstance(x, HatWittElement):
        p, R, items = x.p, x.ring, sorted(x.support.items())
        bound = x.bound()
    else:
        p, R = x.p, x.ring
        items = [(i, a) for i, a in enumerate(x.entries) if not R.is_zero(a)]
        bound = x.n
    for _, a in items:
        if not R.is_nilpotent(a):
            raise DomainMismatch("Artin-Hasse embedding needs nilpotent components")
    needed = 0
    for i, a in items:
        needed += (R.nilpotency_of(a) - 1) * p**i
    if N is None:
        N = max(ah_precision(p, R, bound), 1)
    if N < needed:
        raise PrecisionTooSmall(f"degree {needed} needed, precision {N} given")
    table = artin_hasse_table(p, max(R.nil_index, 2))
    f = [R.one] + [R.zero] * N
    for i, a in items:
        f = _poly_mul(f, table.series(a, R, p**i, N), R, N)
    return BigWittVec(R, f, N)


def pairing_length(p: int, A: TestAlgebra, support_bound: int) -> int:
    """Witt length large enough to hold x*y when y is supported below support_bound.

    A component k of x*y is bi-isobaric of weight p^k in y, so a monomial in
    y_0..y_{s-1} there has y-degree at least p^{k-s+1}; it vanishes once that
    reaches the nil index e of A.
    """
    return max(support_bound, support_bound - 1 + _ceil_log(p, max(A.nil_index, 2)))


def cartier_pairing(x: WittVec, y: HatWittElement):
    """<x, y> = lambda(AH(x * y)) for x in W_n and y killed by F^n."""
    if x.ring is not y.ring:
        raise DomainMismatch("pairing arguments over different rings")
    if y.kill > x.n and not y.is_zero():
        raise DomainMismatch("y must be killed by F^n for x in W_n")
    R = x.ring
    if y.is_zero():
        return R.one
    L = max(pairing_length(x.p, R, y.bound()), x.n)
    if len(y.support) == 1:
        # x * V^j[b] = V^j([b] * F^j x): no structure polynomials needed
        (j, b), = y.support.items()
        z = x.pad(L).frobenius(j).teich_mul(b).verschiebung(j)
    else:
        z = x.pad(L) * y.to_witt(L)
    return lambda_eval(ah_embed(z))


def lambda_ah(z: WittVec):
    """lambda(AH(z)) = prod_k E(z_k), the value at t = 1 of prod_k E(z_k t^{p^k})."""
    R = z.ring
    table = artin_hasse_table(z.p, max(getattr(R, "nil_index", 2), 2))
    acc = R.one
    for a in z.entries:
        if not R.is_zero(a):
            acc = R.mul(acc, table.value(a, R))
    return acc


def _char_on_generators(x: WittVec, R, gens_y) -> object:
    """prod_j <x, V^j[b_j]> for the universal point sum_j V^j[b_j] in R."""
    acc = R.one
    for j, b in gens_y:
        z = x.pad(max(x.n, j + 1)).frobenius(j).teich_mul(b).verschiebung(j)
        acc = R.mul(acc, lambda_ah(z))
    return acc


def pairing_kernels(A: TestAlgebra, left_len: int, left_kill: int, right_len: int,
                    right_kill: int) -> tuple:
    """Kernel sizes of the pairing W_{left_len}^{(F^left_kill)} x W_{right_len}^{(F^right_kill)} -> G_m.

    A point x of the left factor over A is in the left kernel when its
    character is trivial as a morphism of schemes, i.e. trivial on the
    universal point of the right factor, which lives over
    A[y_0..]/(y_j^{p^right_kill}).  That point is sum_j V^j[y_j], so by
    biadditivity its pairing with x is the product of <x, V^j[y_j]>, and
    x * V^j[b] = V^j([b] F^j x).  The right kernel is handled the same way.
    """
    from .exactalg import TruncatedPolyAlgebra

    p = A.p
    left_pts = witt_enumerate_killed(A, left_len, left_kill)
    right_pts = witt_enumerate_killed(A, right_len, right_kill)
    length = max(left_len, right_len)

    def kernel(points, k, kill):
        R = TruncatedPolyAlgebra(A, [p**kill] * k)
        gens = [(j, R.var(j)) for j in range(k)]
        return sum(1 for x in points
                   if _char_on_generators(x.pad(length).map_ring(R.const, R), R, gens) == R.one)

    return kernel(left_pts, right_len, right_kill), kernel(right_pts, left_len, left_kill)


def restricted_kernels(A: TestAlgebra, n: int, m: int) -> tuple:
    """Left and right kernel sizes of W_n^{(F^m)} x W_m^{(F^n)} -> G_m over A."""
    return pairing_kernels(A, n, m, m, n)


def pairing_teichmuller_expansion(x: WittVec, y: HatWittElement):
    """Independent evaluation of the pairing: prod_{i,j} E(x_i^{p^j} y_j^{p^i}).

    Writes x = sum V^i[x_i], y = sum V^j[y_j] and uses
    V^i[a] V^j[b] = p^{min} V^{|i-j|}[a^{p^{j-m}} b^{p^{i-m}}], lambda o V = lambda and
    lambda(p z) = lambda(z)^p, so the (i,j) term contributes E(x_i^{p^j} y_j^{p^i}).
    """
    R = x.ring
    table = artin_hasse_table(x.p, max(R.nil_index, 2) * x.p)
    acc = R.one
    p = x.p
    for i, a in enumerate(x.entries):
        if R.is_zero(a):
            continue
        for j, b in y.support.items():
            z = R.mul(R.pow(a, p**j), R.pow(b, p**i))
            acc = R.mul(acc, table.value(z, R))
    return acc
