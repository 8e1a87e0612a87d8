"""Finite commutative group schemes given by equations inside Witt-vector ambients.

A presentation is a list of blocks (block i is W_{k_i}, contributing k_i
coordinates) and a list of polynomial equations over F_p.  The group law is
blockwise Witt addition, so coproducts, kernels of F and V and all orders come
from Groebner bases of the equation ideal.
"""
from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

from .errors import BudgetExceeded, DomainMismatch, NotFinite
from .exactalg import (INFINITE, MPoly, PolyRing, TestAlgebra, enumerate_points, groebner,
                       normal_form, nullspace_mod_p, prime_field, rank_mod_p, tangent_dim)
from .wittcore import WittVec


def _log_p(q: int, p: int) -> int | None:
    e = 0
    while q > 1 and q % p == 0:
        q //= p
        e += 1
    return e if q == 1 else None


class EqGroupPresentation:
    """A subgroup of prod_i W_{k_i} over F_p cut out by polynomial equations."""

    def __init__(self, p: int, blocks: Sequence[int], equations: Sequence[MPoly],
                 names: Sequence[str] | None = None):
        self.p = p
        self.field = prime_field(p)
        self.blocks = tuple(int(k) for k in blocks)
        self.nvars = sum(self.blocks)
        eqs = []
        for f in equations:
            if f.nvars != self.nvars:
                raise DomainMismatch("equation arity does not match the blocks")
            if f.ring is not self.field:
                f = f.map_coeffs(self.field.from_int, self.field)
            if not f.is_zero():
                if f.constant_term() != 0:
                    raise DomainMismatch("equations must vanish at the origin")
                eqs.append(f)
        self.equations = tuple(eqs)
        self.names = tuple(names) if names else tuple(
            f"y{b}_{j}" for b, k in enumerate(self.blocks) for j in range(k))
        self._gb = None

    # -- coordinates ---------------------------------------------------------

    def offsets(self) -> list:
        out, acc = [], 0
        for k in self.blocks:
            out.append(acc)
            acc += k
        return out

    def var_index(self, block: int, comp: int) -> int:
        return self.offsets()[block] + comp

    def var(self, block: int, comp: int) -> MPoly:
        return MPoly.var(self.field, self.nvars, self.var_index(block, comp))

    def variables(self) -> list:
        return MPoly.gens(self.field, self.nvars)

    def with_equations(self, extra: Sequence[MPoly]) -> "EqGroupPresentation":
        return EqGroupPresentation(self.p, self.blocks, list(self.equations) + list(extra), self.names)

    # -- Groebner data --------------------------------------------------------

    def gb(self):
        if self._gb is None:
            self._gb = groebner(list(self.equations), nvars=self.nvars, p=self.p)
        return self._gb

    def quotient_dim(self):
        return self.gb().quotient_dim()

    def order(self) -> int:
        q = self.quotient_dim()
        if q == INFINITE:
            raise NotFinite("presentation is not finite")
        return q

    def order_exponent(self) -> int:
        e = _log_p(self.order(), self.p)
        if e is None:
            raise NotFinite("order is not a power of p")
        return e

    def lie_dim(self) -> int:
        """Tangent dimension at the origin: kernel of the linear parts."""
        return tangent_dim(list(self.equations), self.nvars)

    def standard_monomials(self) -> list:
        return self.gb().standard_monomials()

    def normal_form(self, f: MPoly) -> MPoly:
        return normal_form(f, self.gb())

    # -- group law ------------------------------------------------------------

    def coproduct_images(self) -> list:
        """Images of the coordinates under the coproduct, in 2*nvars variables."""
        R = PolyRing(self.field, 2 * self.nvars)
        out = []
        for b, k in enumerate(self.blocks):
            off = self.offsets()[b]
            x = WittVec(self.p, R, [R.var(off + j) for j in range(k)])
            y = WittVec(self.p, R, [R.var(self.nvars + off + j) for j in range(k)])
            out.extend((x + y).entries)
        return out

    def add_points(self, a: Sequence, b: Sequence, A: TestAlgebra) -> tuple:
        out = []
        for bl, k in enumerate(self.blocks):
            off = self.offsets()[bl]
            x = WittVec(self.p, A, a[off:off + k])
            y = WittVec(self.p, A, b[off:off + k])
            out.extend((x + y).entries)
        return tuple(out)

    def neg_point(self, a: Sequence, A: TestAlgebra) -> tuple:
        out = []
        for bl, k in enumerate(self.blocks):
            off = self.offsets()[bl]
            out.extend((-WittVec(self.p, A, a[off:off + k])).entries)
        return tuple(out)

    def is_point(self, a: Sequence, A: TestAlgebra) -> bool:
        return all(f.evaluate(a, A) == 0 for f in self.equations)

    def points(self, A: TestAlgebra, budget: int = 2_000_000) -> list:
        if A.p != self.p:
            raise DomainMismatch("test algebra of the wrong characteristic")
        return enumerate_points(list(self.equations), A, self.nvars, budget)

    def check_closure(self, A: TestAlgebra, samples: int = 100, rng=None, points=None) -> bool:
        """Sampled check that sums of solutions are solutions."""
        import random

        rng = rng or random.Random(0)
        pts = points if points is not None else self.points(A)
        for _ in range(samples):
            a, b = rng.choice(pts), rng.choice(pts)
            if not self.is_point(self.add_points(a, b, A), A):
                return False
        return True

    # -- io -------------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "base": self.field.descriptor(),
            "p": self.p,
            "blocks": list(self.blocks),
            "names": list(self.names),
            "equations": [f.to_json() for f in self.equations],
        }

    @classmethod
    def from_json(cls, data: dict) -> "EqGroupPresentation":
        F = prime_field(int(data["p"]))
        eqs = [MPoly.from_json(e, F) for e in data["equations"]]
        return cls(int(data["p"]), data["blocks"], eqs, data.get("names"))

    def __repr__(self):
        eqs = "; ".join(f.format(self.names) for f in self.equations)
        return f"EqGroupPresentation(p={self.p}, blocks={list(self.blocks)}, {{{eqs}}})"


# ---------------------------------------------------------------------------
# Hopf-algebra data over the standard-monomial basis


class HopfData:
    """Structure constants of O(G) in its standard-monomial basis.

    ``mult[a][b]`` and ``coprod[m]`` are coordinate vectors over F_p; the
    second indexes pairs (a, b) of basis monomials as a * dim + b.
    """

    def __init__(self, G: EqGroupPresentation, max_dim: int = 400):
        self.G = G
        self.p = G.p
        self.basis = G.standard_monomials()
        self.dim = len(self.basis)
        if self.dim > max_dim:
            raise BudgetExceeded(f"coordinate ring of dimension {self.dim} is too large")
        self.index = {m: i for i, m in enumerate(self.basis)}
        self.unit = self.index[(0,) * G.nvars]
        F = G.field
        N = G.nvars
        gb = G.gb()
        # double basis: GB in 2N variables is the union of the two copies
        left = [g.embed(2 * N, list(range(N))) for g in gb.polys]
        right = [g.embed(2 * N, list(range(N, 2 * N))) for g in gb.polys]
        from .exactalg import GroebnerBasis

        self._gb2 = GroebnerBasis(G.p, 2 * N, gb.order, tuple(left + right))
        images = G.coproduct_images()
        self.coprod = []
        for m in self.basis:
            f = MPoly.monomial(F, N, m).substitute(images)
            self.coprod.append(self._coords2(normal_form(f, self._gb2)))

    @functools.cached_property
    def mult(self) -> list:
        F, N, gb = self.G.field, self.G.nvars, self.G.gb()
        return [[self._coords(normal_form(MPoly.monomial(F, N, tuple(x + y for x, y in zip(a, b))), gb))
                 for b in self.basis] for a in self.basis]

    def _coords(self, f: MPoly) -> list:
        v = [0] * self.dim
        for e, c in f.terms.items():
            v[self.index[e]] = c
        return v

    def _coords2(self, f: MPoly) -> dict:
        N = self.G.nvars
        out = {}
        for e, c in f.terms.items():
            a, b = self.index[e[:N]], self.index[e[N:]]
            out[a * self.dim + b] = c
        return out

    def primitives(self) -> list:
        """Basis of {f : Delta f = f (x) 1 + 1 (x) f} as coordinate vectors over F_p."""
        d, u = self.dim, self.unit
        rows = []
        # for each pair index (a, b): sum_m f_m coprod[m][a,b] - f_a [b = u] - f_b [a = u] = 0
        for a in range(d):
            for b in range(d):
                idx = a * d + b
                row = [self.coprod[m].get(idx, 0) for m in range(d)]
                if b == u:
                    row[a] -= 1
                if a == u:
                    row[b] -= 1
                if any(x % self.p for x in row):
                    rows.append(row)
        return nullspace_mod_p(rows, d, self.p)

    def grouplike_points(self, R: TestAlgebra, budget: int = 2_000_000) -> list:
        """All u in O(G) (x) R with Delta u = u (x) u and counit 1.

        Backtracking over the basis coefficients: each equation (one per pair
        of basis monomials) is checked as soon as all coefficients in it are set.
        """
        d, u0 = self.dim, self.unit
        order = sorted(range(d), key=lambda i: (sum(self.basis[i]), self.basis[i]))
        order.remove(u0)
        pos = {m: k for k, m in enumerate(order)}
        pos[u0] = -1
        conv = [{k: R.from_int(c) for k, c in cp.items()} for cp in self.coprod]
        # equations indexed by the step at which their last variable is set
        eqs: dict = {}
        for a in range(d):
            for b in range(d):
                idx = a * d + b
                terms = [(m, conv[m][idx]) for m in range(d) if idx in conv[m]]
                last = max([pos[a], pos[b]] + [pos[m] for m, _ in terms])
                eqs.setdefault(last, []).append((a, b, terms))
        u = [0] * d
        u[u0] = R.one

        def holds(step):
            for a, b, terms in eqs.get(step, ()):
                lhs = 0
                for m, c in terms:
                    if u[m]:
                        lhs = R.add(lhs, R.mul(c, u[m]))
                if lhs != R.mul(u[a], u[b]):
                    return False
            return True

        if not holds(-1):
            return []
        out = []
        visited = 0

        def search(k):
            nonlocal visited
            if k == len(order):
                out.append(tuple(u))
                return
            m = order[k]
            for v in R.elements():
                visited += 1
                if visited > budget:
                    raise BudgetExceeded("grouplike search exceeded its budget")
                u[m] = v
                if holds(k):
                    search(k + 1)
            u[m] = 0

        search(0)
        return sorted(out)


@functools.lru_cache(maxsize=256)
def _hopf_cached(key):
    G = EqGroupPresentation.from_json(_KEYS[key])
    return HopfData(G)


_KEYS: dict = {}


def hopf_data(G: EqGroupPresentation) -> HopfData:
    import json

    key = json.dumps(G.to_json(), sort_keys=True)
    _KEYS[key] = G.to_json()
    return _hopf_cached(key)


def grouplike_points(G: EqGroupPresentation, R: TestAlgebra, budget: int = 2_000_000) -> list:
    """Points of the Cartier dual of G over R, as grouplike elements of O(G) (x) R."""
    return hopf_data(G).grouplike_points(R, budget)


def primitive_dim(G: EqGroupPresentation) -> int:
    """dim Hom(G, G_a): the primitive elements of the coordinate ring."""
    return len(hopf_data(G).primitives())


# ---------------------------------------------------------------------------
# p-linear pairs and A_{P, phi}


@dataclass(frozen=True)
class PLinearPair:
    """(P, phi) with P free of rank r and phi(e_j) = sum_i c[i][j] e_i."""

    p: int
    c: tuple

    def __post_init__(self):
        c = tuple(tuple(int(x) % self.p for x in row) for row in self.c)
        if any(len(row) != len(c) for row in c):
            raise DomainMismatch("matrix must be square")
        object.__setattr__(self, "c", c)

    @property
    def rank(self) -> int:
        return len(self.c)

    def to_json(self):
        return {"p": self.p, "rank": self.rank, "c": [list(r) for r in self.c]}


def a_group(pair: PLinearPair) -> EqGroupPresentation:
    """A_{P,phi}: xi(phi(e_j)) = xi(e_j)^p, i.e. y_j^p = sum_i c_ij y_i."""
    r, p = pair.rank, pair.p
    F = prime_field(p)
    ys = MPoly.gens(F, r)
    eqs = []
    for j in range(r):
        f = ys[j] ** p
        for i in range(r):
            if pair.c[i][j]:
                f = f - ys[i] * pair.c[i][j]
        eqs.append(f)
    return EqGroupPresentation(p, [1] * r, eqs, [f"y{j}" for j in range(r)])


def b_tensor(a: PLinearPair, b: PLinearPair) -> PLinearPair:
    if a.p != b.p:
        raise DomainMismatch("pairs over different primes")
    ra, rb = a.rank, b.rank
    c = [[a.c[i // rb][j // rb] * b.c[i % rb][j % rb] for j in range(ra * rb)] for i in range(ra * rb)]
    return PLinearPair(a.p, tuple(tuple(r) for r in c))


def b_hom(a: PLinearPair, b: PLinearPair, R: TestAlgebra | None = None, budget: int = 200_000) -> list:
    """All r x r' matrices C over R with C c' = c C^{[p]}."""
    R = R or prime_field(a.p)
    r, s = a.rank, b.rank
    total = R.size ** (r * s)
    if total > budget:
        raise BudgetExceeded(f"{total} candidate matrices exceed the budget")
    ca = [[R.from_int(x) for x in row] for row in a.c]
    cb = [[R.from_int(x) for x in row] for row in b.c]
    out = []
    for vals in itertools.product(range(R.size), repeat=r * s):
        C = [list(vals[i * s:(i + 1) * s]) for i in range(r)]
        Cp = [[R.pow(x, R.p) for x in row] for row in C]
        ok = True
        for i in range(r):
            for j in range(s):
                lhs = R.sum(R.mul(C[i][k], cb[k][j]) for k in range(s))
                rhs = R.sum(R.mul(ca[i][k], Cp[k][j]) for k in range(r))
                if lhs != rhs:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(tuple(tuple(row) for row in C))
    return out


def pair_of_cosmooth(G: EqGroupPresentation) -> PLinearPair:
    """The pair (Hom(G, G_a), composition with F) of a 1-cosmooth G.

    Uses the coordinates themselves as the basis of Hom(G, G_a); they must
    be primitive (single length-1 blocks) and independent in O(G).
    """
    if any(k != 1 for k in G.blocks):
        raise DomainMismatch("coordinates are primitive only for length-1 blocks")
    r = G.nvars
    ys = G.variables()
    gb = G.gb()
    c = [[0] * r for _ in range(r)]
    for j in range(r):
        nf = normal_form(ys[j] ** G.p, gb)
        for e, coef in nf.terms.items():
            if sum(e) != 1:
                raise DomainMismatch("y^p is not linear in the coordinates")
            c[e.index(1)][j] = coef
    return PLinearPair(G.p, tuple(tuple(row) for row in c))


# ---------------------------------------------------------------------------
# kernels, homomorphisms and complexes


def order_of(G: EqGroupPresentation) -> int:
    """Order exponent: log_p of the dimension of the coordinate ring."""
    return G.order_exponent()


def killed_by_Fm(G: EqGroupPresentation, m: int) -> bool:
    gb = G.gb()
    if gb.quotient_dim() == INFINITE:
        raise NotFinite("presentation is not finite")
    e = G.p**m
    return all(normal_form(y**e, gb).is_zero() for y in G.variables())


def killed_by_Vm(G: EqGroupPresentation, m: int) -> bool:
    """V^m shifts each block by m; it kills G when the surviving components vanish on G."""
    gb = G.gb()
    for b, k in enumerate(G.blocks):
        for j in range(max(k - m, 0)):
            if not normal_form(G.var(b, j), gb).is_zero():
                return False
    return True


def kernel_of_linear(G: EqGroupPresentation, conditions: Sequence[MPoly]) -> EqGroupPresentation:
    for f in conditions:
        if f.total_degree() > 1:
            raise DomainMismatch("kernel conditions must be linear")
    return G.with_equations(conditions)


def frobenius_map(G: EqGroupPresentation, m: int) -> list:
    """F^m as a coordinate substitution G -> G."""
    return [y ** (G.p**m) for y in G.variables()]


def verschiebung_map(G: EqGroupPresentation, m: int) -> list:
    """V^m as a coordinate substitution G -> G (blockwise shift)."""
    F = G.field
    out = []
    for b, k in enumerate(G.blocks):
        for j in range(k):
            out.append(G.var(b, j - m) if j >= m else MPoly.zero(F, G.nvars))
    return out


def kernel_of_map(source: EqGroupPresentation, images: Sequence[MPoly]) -> EqGroupPresentation:
    """Kernel of a homomorphism given by coordinate images: pull back the augmentation ideal."""
    return source.with_equations([f for f in images if not f.is_zero()])


@dataclass
class ComplexOfGroups:
    """G' --f--> G --h--> G'' with maps given by coordinate images."""

    source: EqGroupPresentation
    middle: EqGroupPresentation
    target: EqGroupPresentation
    f: list
    h: list

    def composite_vanishes(self) -> bool:
        comp = [g.substitute(self.f) for g in self.h]
        gb = self.source.gb()
        return all(normal_form(c, gb).is_zero() for c in comp)


def exactness(cx: ComplexOfGroups) -> bool:
    """|Ker h| * |Ker f| = |G'| (orders over the field base)."""
    if not cx.composite_vanishes():
        return False
    ker_h = kernel_of_map(cx.middle, cx.h).order()
    ker_f = kernel_of_map(cx.source, cx.f).order()
    return ker_h * ker_f == cx.source.order()


def v_complex(G: EqGroupPresentation, m: int, n: int) -> ComplexOfGroups:
    return ComplexOfGroups(G, G, G, verschiebung_map(G, m), verschiebung_map(G, n - m))


def f_complex(G: EqGroupPresentation, m: int, n: int) -> ComplexOfGroups:
    return ComplexOfGroups(G, G, G, frobenius_map(G, m), frobenius_map(G, n - m))


@dataclass
class GroupSchemeReport:
    order_exponent: int | None
    lie_dim: int
    f_kill: int | None
    v_kill: int | None
    n: int
    n_smooth: bool
    n_smooth_rank: int | None
    n_cosmooth: bool
    n_cosmooth_rank: int | None
    diagnostics: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "order_exponent": self.order_exponent,
            "lie_dim": self.lie_dim,
            "f_kill": self.f_kill,
            "v_kill": self.v_kill,
            "n": self.n,
            "n_smooth": self.n_smooth,
            "n_smooth_rank": self.n_smooth_rank,
            "n_cosmooth": self.n_cosmooth,
            "n_cosmooth_rank": self.n_cosmooth_rank,
            "diagnostics": self.diagnostics,
        }


def _smallest_kill(test, bound: int):
    for m in range(bound + 1):
        if test(m):
            return m
    return None


def smoothness_report(G: EqGroupPresentation, n: int) -> GroupSchemeReport:
    e = G.order_exponent()
    lie = G.lie_dim()
    f_kill = _smallest_kill(lambda m: killed_by_Fm(G, m), e)
    v_kill = _smallest_kill(lambda m: killed_by_Vm(G, m), max(max(G.blocks, default=0), e))
    diag: dict = {}
    r = e // n if e % n == 0 else None

    v_exact = {m: exactness(v_complex(G, m, n)) for m in range(1, n)}
    cosmooth = r is not None and killed_by_Vm(G, n) and all(v_exact.values())
    diag["v_complex_exact"] = {str(m): v for m, v in v_exact.items()}

    f_exact = {m: exactness(f_complex(G, m, n)) for m in range(1, n)}
    diag["f_complex_exact"] = {str(m): v for m, v in f_exact.items()}
    smooth_lemma = r is not None and killed_by_Fm(G, n) and lie == r
    smooth_messing = r is not None and killed_by_Fm(G, n) and all(f_exact.values())
    diag["n_smooth_by_lie_count"] = smooth_lemma
    diag["n_smooth_by_f_complexes"] = smooth_messing
    return GroupSchemeReport(
        order_exponent=e,
        lie_dim=lie,
        f_kill=f_kill,
        v_kill=v_kill,
        n=n,
        n_smooth=smooth_lemma,
        n_smooth_rank=r if smooth_lemma else None,
        n_cosmooth=cosmooth,
        n_cosmooth_rank=r if cosmooth else None,
        diagnostics=diag,
    )


# ---------------------------------------------------------------------------
# brute-force duality oracle


def biadditive_bruteforce(G1: EqGroupPresentation, G2: EqGroupPresentation, R: TestAlgebra,
                          budget: int = 200_000) -> tuple:
    """Count biadditive maps G1 x G2 -> G_m over R, and those killed by Frobenius.

    A candidate is u = 1 + sum u_ij m_i m'_j over nonconstant standard
    monomials (so u(0, y) = u(x, 0) = 1); biadditivity is checked in both
    slots through the coproduct and multiplication constants.  Frobenius of
    the Hom group raises the coefficients u_ij to the p-th power.
    """
    H1, H2 = hopf_data(G1), hopf_data(G2)
    d1, d2 = H1.dim, H2.dim
    i1 = [i for i in range(d1) if i != H1.unit]
    i2 = [j for j in range(d2) if j != H2.unit]
    slots = [(i, j) for i in i1 for j in i2]
    total = R.size ** len(slots)
    if total > budget:
        raise BudgetExceeded(f"{total} candidate characters exceed the budget")
    cp1 = [{k: R.from_int(c) for k, c in cp.items()} for cp in H1.coprod]
    cp2 = [{k: R.from_int(c) for k, c in cp.items()} for cp in H2.coprod]
    mu1 = [[[R.from_int(c) for c in v] for v in row] for row in H1.mult]
    mu2 = [[[R.from_int(c) for c in v] for v in row] for row in H2.mult]

    def check(u):
        # (Delta_1 (x) id) u = u_13 u_23 : coefficient of m_a (x) m_b (x) m'_j
        for a in range(d1):
            for b in range(d1):
                idx = a * d1 + b
                for j in range(d2):
                    lhs = 0
                    for i in range(d1):
                        c = cp1[i].get(idx)
                        if c is not None and u[i][j]:
                            lhs = R.add(lhs, R.mul(c, u[i][j]))
                    rhs = 0
                    for j1 in range(d2):
                        if not u[a][j1]:
                            continue
                        for j2 in range(d2):
                            w = mu2[j1][j2][j]
                            if w and u[b][j2]:
                                rhs = R.add(rhs, R.mul(w, R.mul(u[a][j1], u[b][j2])))
                    if lhs != rhs:
                        return False
        for a in range(d2):
            for b in range(d2):
                idx = a * d2 + b
                for i in range(d1):
                    lhs = 0
                    for j in range(d2):
                        c = cp2[j].get(idx)
                        if c is not None and u[i][j]:
                            lhs = R.add(lhs, R.mul(c, u[i][j]))
                    rhs = 0
                    for i1_ in range(d1):
                        if not u[i1_][a]:
                            continue
                        for i2_ in range(d1):
                            w = mu1[i1_][i2_][i]
                            if w and u[i2_][b]:
                                rhs = R.add(rhs, R.mul(w, R.mul(u[i1_][a], u[i2_][b])))
                    if lhs != rhs:
                        return False
        return True

    count = killed = 0
    for vals in itertools.product(range(R.size), repeat=len(slots)):
        u = [[0] * d2 for _ in range(d1)]
        u[H1.unit][H2.unit] = R.one
        for (i, j), v in zip(slots, vals):
            u[i][j] = v
        if check(u):
            count += 1
            if all(R.pow(v, R.p) == 0 for v in vals):
                killed += 1
    return count, killed
