"""The Lau group pipeline over the base F_p.

Three presentations of the Cartier dual of the Zink group of a display:

* ``adjoint``: the eta-equations written directly on the matrix units of gl(d);
* ``zink``: Cond_x / Cond_y for an arbitrary semidisplay (applied to the
  adjoint semidisplay it gives the same coordinates as the adjoint route);
* ``economic``: only the T-coordinates, after solving for the L-part.

Two presentations are compared by their point sets over the zoo of test
algebras and by their Groebner orders.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import BudgetExceeded, DomainMismatch, EliminationFailed, NotUnit
from .exactalg import MPoly, PolyRing, TestAlgebra, groebner, prime_field, zoo
from .grpscheme import (EqGroupPresentation, GroupSchemeReport, PLinearPair, b_tensor,
                        grouplike_points, pair_of_cosmooth, primitive_dim, smoothness_report)
from .semidisplay import (DisplayDatum, Semidisplay, WeightedCocharacter, adjoint_basis,
                          adjoint_matrix, adjoint_semidisplay, dual_display, inverse_mod,
                          semidisplay_of_display)
from .wittcore import HatWittElement, WittVec, hat_enumerate


# ---------------------------------------------------------------------------
# presentations


@dataclass
class ZinkDualPresentation:
    group: EqGroupPresentation
    provenance: str
    source: object
    labels: list
    elimination: dict | None = None

    @property
    def n(self) -> int:
        return self.group.blocks[0] if self.group.blocks else 0

    def order(self) -> int:
        return self.group.order()

    def order_exponent(self) -> int:
        return self.group.order_exponent()

    def points(self, A: TestAlgebra) -> list:
        return self.group.points(A)

    def to_json(self) -> dict:
        src = self.source.to_json() if hasattr(self.source, "to_json") else None
        return {"provenance": self.provenance, "labels": [list(x) if isinstance(x, tuple) else x for x in self.labels],
                "presentation": self.group.to_json(), "source": src, "elimination": self.elimination}


def _witt_vars(R: PolyRing, nblocks: int, n: int, p: int) -> list:
    return [WittVec(p, R, [R.var(b * n + k) for k in range(n)]) for b in range(nblocks)]


def _combo(coeffs, vecs, zero: WittVec) -> WittVec:
    """sum_k c_k v_k with integer coefficients c_k acting through W_n(F_p)."""
    acc = zero
    for c, v in zip(coeffs, vecs):
        c = int(c)
        if c:
            acc = acc + v.scale_int(c)
    return acc


def _equal(a: WittVec, b: WittVec) -> list:
    return [x - y for x, y in zip(a.entries, b.entries)]


def lau_dual_adjoint(D: DisplayDatum, mu: WeightedCocharacter | None = None) -> ZinkDualPresentation:
    """eta on the matrix units: F(eta x) = eta(Ad_U x) on g_1, eta x = p^{-i} V(eta(Ad_U x)) on g_i, i <= 0."""
    mu = mu or D.mu
    p, n, d = D.p, D.n, D.d
    basis = adjoint_basis(d, D.dprime)
    Ad = adjoint_matrix(D, basis)
    N = len(basis)
    R = PolyRing(prime_field(p), N * n)
    eta = _witt_vars(R, N, n, p)
    zero = WittVec.zero(p, R, n)
    eqs = []
    for col, (i, j) in enumerate(basis):
        g = mu.grade(i, j)
        image = _combo(Ad[:, col], eta, zero)
        if g == 1:
            eqs += _equal(eta[col].frobenius(), image)
        else:
            eqs += _equal(eta[col], image.verschiebung().scale_int(p ** (-g)))
    names = [f"eta{i + 1}{j + 1}_{k}" for (i, j) in basis for k in range(n)]
    G = EqGroupPresentation(p, [n] * N, eqs, names)
    return ZinkDualPresentation(G, "adjoint-route", D, basis)


def lau_dual_zink(S: Semidisplay) -> ZinkDualPresentation:
    """Cond_x on every basis vector of P; Cond_y on the L-basis and on p * t for the T-basis."""
    p, n, d, k = S.p, S.n, S.d, S.dprime
    F = S.F_full if S.F_full is not None else S.F_matrix()
    R = PolyRing(prime_field(p), d * n)
    eta = _witt_vars(R, d, n, p)
    zero = WittVec.zero(p, R, n)
    eqs = []
    for j in range(d):
        eqs += _equal(_combo(F[:, j], eta, zero), eta[j].frobenius())
    for j in range(k, d):
        eqs += _equal(eta[j], _combo(S.X[:, j], eta, zero).verschiebung())
    for j in range(k):
        # V(1) t_j = p t_j, and F_1(V(1) t_j) = F(t_j)
        eqs += _equal(eta[j].scale_int(p), _combo(F[:, j], eta, zero).verschiebung())
    names = [f"eta{_lab(S.labels[j])}_{c}" for j in range(d) for c in range(n)]
    G = EqGroupPresentation(p, [n] * d, eqs, names)
    return ZinkDualPresentation(G, "zink-route", S, list(S.labels))


def _lab(x) -> str:
    if isinstance(x, tuple):
        return "".join(_lab(y) for y in x)
    return str(x + 1) if isinstance(x, int) else str(x)


def economic_correction(S: Semidisplay, i: int) -> np.ndarray:
    """x12 x22^{i-1} x21 modulo p^{n-1}."""
    x11, x12, x21, x22 = S.blocks()
    q1 = S.p ** (S.n - 1)
    M = x12 % q1
    for _ in range(i - 1):
        M = (M @ x22) % q1
    return (M @ x21) % q1 if M.size and x21.size else np.zeros((S.dprime, S.dprime), dtype=np.int64)


def economic_presentation(S: Semidisplay) -> ZinkDualPresentation:
    """g on the T-basis: F(g t_j) = g(x11 t_j) + sum_{i=1}^{n-1} V^i(g(x12 x22^{i-1} x21 t_j)).

    The L-part h has been solved from h = V(h x22) + V(g x21) by iterating
    the contraction, which stops because V^n = 0 on W_n.
    """
    p, n, k = S.p, S.n, S.dprime
    R = PolyRing(prime_field(p), k * n)
    g = _witt_vars(R, k, n, p)
    zero = WittVec.zero(p, R, n)
    x11 = S.X[:k, :k]
    corrections = [economic_correction(S, i) for i in range(1, n)]
    eqs = []
    for j in range(k):
        rhs = _combo(x11[:, j], g, zero)
        for i, C in enumerate(corrections, start=1):
            rhs = rhs + _combo(C[:, j], g, zero).verschiebung(i)
        eqs += _equal(g[j].frobenius(), rhs)
    names = [f"g{_lab(S.labels[j])}_{c}" for j in range(k) for c in range(n)]
    G = EqGroupPresentation(p, [n] * k, eqs, names)
    record = {"eliminated": "L-coordinates h", "corrections": [c.tolist() for c in corrections]}
    return ZinkDualPresentation(G, "economic", S, list(S.labels[:k]), record)


def eliminate_to_g1(pres: ZinkDualPresentation) -> ZinkDualPresentation:
    """Lex elimination of the g_0 and g_{-1} coordinates of an adjoint-route presentation."""
    if pres.provenance != "adjoint-route":
        raise DomainMismatch("elimination is defined for adjoint-route presentations")
    D: DisplayDatum = pres.source
    G = pres.group
    n, N = D.n, G.nvars
    r = D.dprime * (D.d - D.dprime)
    keep = r * n
    order = list(range(keep, N)) + list(range(keep))  # new position -> old variable
    pos = {old: new for new, old in enumerate(order)}

    def permute(f: MPoly) -> MPoly:
        terms = {}
        for e, c in f.terms.items():
            ne = [0] * N
            for old, a in enumerate(e):
                ne[pos[old]] = a
            terms[tuple(ne)] = c
        return MPoly(G.field, N, terms)

    gb = groebner([permute(f) for f in G.equations], order="lex", nvars=N, p=G.p)
    if gb.is_unit_ideal():
        raise EliminationFailed("unit ideal")
    lms = gb.leading_monomials()
    elim = N - keep
    solved = {}
    for v in range(elim):
        unit = tuple(1 if i == v else 0 for i in range(N))
        hit = [g for g, lm in zip(gb.polys, lms) if lm == unit]
        if not hit:
            raise EliminationFailed(f"{G.names[order[v]]} is not solved linearly by the elimination ideal")
        solved[G.names[order[v]]] = hit[0]
    rest = []
    for g in gb.polys:
        if all(all(a == 0 for a in e[:elim]) for e in g.terms):
            rest.append(MPoly(G.field, keep, {e[elim:]: c for e, c in g.terms.items()}))
    new = EqGroupPresentation(G.p, [n] * r, rest, G.names[:keep])
    if new.order() != G.order():
        raise EliminationFailed("elimination changed the order")
    names = list(G.names[keep:]) + list(G.names[:keep])
    record = {"eliminated": list(G.names[keep:]),
              "solving_generators": {k: v.format(names) for k, v in solved.items()},
              "order_before": G.order(), "order_after": new.order()}
    return ZinkDualPresentation(new, "adjoint-eliminated", D, pres.labels[:r], record)


# ---------------------------------------------------------------------------
# route agreement


def _project(points: list, ncoords: int) -> list:
    return sorted({pt[:ncoords] for pt in points})


def compare_routes(D: DisplayDatum, algebras: Sequence[TestAlgebra] | None = None,
                   eliminate: bool = True) -> dict:
    """Point sets and orders of the adjoint, zink and economic presentations."""
    algebras = list(algebras) if algebras is not None else list(zoo(D.p).values())
    S = adjoint_semidisplay(D)
    adj = lau_dual_adjoint(D)
    zk = lau_dual_zink(S)
    eco = economic_presentation(S)
    keep = S.dprime * D.n
    out = {"orders": {"adjoint": adj.order(), "zink": zk.order(), "economic": eco.order()},
           "algebras": {}}
    elim = None
    if eliminate:
        elim = eliminate_to_g1(adj)
        out["orders"]["eliminated"] = elim.order()
    ok = len(set(out["orders"].values())) == 1
    for A in algebras:
        pa, pz, pe = adj.points(A), zk.points(A), eco.points(A)
        proj = _project(pz, keep)
        rec = {"adjoint=zink": pa == pz, "zink->economic": proj == pe and len(proj) == len(pz),
               "count": len(pa)}
        if elim is not None:
            rec["eliminated=economic"] = elim.points(A) == pe
        out["algebras"][A.name] = rec
        ok = ok and all(v for key, v in rec.items() if key != "count")
    out["agree"] = ok
    return out


# ---------------------------------------------------------------------------
# truncated Zink complex


@dataclass
class TruncatedZinkResult:
    algebra: str
    M: int
    kernel_size: int
    coker_size: int
    stabilized: bool
    sizes: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"algebra": self.algebra, "M": self.M, "kernel_size": self.kernel_size,
                "coker_size": self.coker_size, "stabilized": self.stabilized, "sizes": self.sizes}


def hat_subgroup(A: TestAlgebra, n: int, M: int, budget: int = 200_000) -> list:
    """Subgroup of W-hat^{(F^n)}(A) generated by the vectors of support < M."""
    gens = [x for x in hat_enumerate(A, n, M, budget) if not x.is_zero()]
    zero = HatWittElement(A.p, A, {}, n)
    seen = {zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = x + g
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
                    if len(seen) > budget:
                        raise BudgetExceeded("hat subgroup exceeds the budget")
        frontier = nxt
    return sorted(seen, key=lambda x: sorted(x.support.items()))


def _hat_scale(c: int, x: HatWittElement, p: int, n: int) -> HatWittElement:
    """c * x for c in Z/p^n, as sum_i c_i V^i F^i x with base-p digits c_i."""
    c %= p**n
    acc = HatWittElement(p, x.ring, {}, x.kill)
    y = x
    while c:
        c, digit = divmod(c, p)
        for _ in range(digit):
            acc = acc + y
        y = y.frobenius().verschiebung()
    return acc


def zink_complex_truncated(S: Semidisplay, A: TestAlgebra, M: int, budget: int = 200_000,
                           _recurse: bool = True) -> TruncatedZinkResult:
    """Coker and ker of 1 - Phi : C^{-1} -> C^0 restricted to support bound M.

    C^0 is (H_M)^d with H_M the subgroup of W-hat^{(F^n)}(A) generated by
    support < M; C^{-1} is the part whose T-coordinates have vanishing 0-th
    component.  Only x with (1 - Phi) x in C^0 are used, so the image is the
    image of a subgroup.
    """
    if A.p != S.p:
        raise DomainMismatch("characteristic mismatch")
    p, n, d, k = S.p, S.n, S.d, S.dprime
    H = hat_subgroup(A, n, M, budget)
    Hset = set(H)
    HV = [x for x in H if 0 not in x.support]
    total = len(HV) ** k * len(H) ** (d - k)
    if total > budget:
        raise BudgetExceeded(f"{total} elements of C^-1 exceed the budget")
    X = S.X
    image = set()
    kernel = 0
    zero = HatWittElement(p, A, {}, n)
    for x in itertools.product(*([HV] * k + [H] * (d - k))):
        # Phi(x)_j = sum_{k<d'} X_jk a'_k + sum_{k>=d'} X_jk F(x_k) with x_k = V(a'_k) on T
        sources = [HatWittElement(p, A, {i - 1: a for i, a in x[c].support.items()}, n) if c < k
                   else x[c].frobenius() for c in range(d)]
        y = []
        for j in range(d):
            acc = x[j]
            for c in range(d):
                coef = int(X[j, c])
                if coef:
                    acc = acc + (-_hat_scale(coef, sources[c], p, n))
            y.append(acc)
        if not all(v in Hset for v in y):
            continue
        t = tuple(y)
        if all(v.is_zero() for v in t):
            kernel += 1
        image.add(t)
    size0 = len(H) ** d
    if size0 % len(image):
        raise DomainMismatch("image is not a subgroup of the truncated complex")
    coker = size0 // len(image)
    stabilized = False
    sizes = {"C0": size0, "C-1": total, "image": len(image)}
    if _recurse:
        nxt = zink_complex_truncated(S, A, M + 1, budget, _recurse=False)
        stabilized = nxt.coker_size == coker
        sizes["coker_next"] = nxt.coker_size
        sizes["kernel_next"] = nxt.kernel_size
    return TruncatedZinkResult(A.name, M, kernel, coker, stabilized, sizes)


# ---------------------------------------------------------------------------
# the display group BP_n


class BPPair:
    """(g, h) in GL(d, W_n(F_p))^2 with g_ij = p^{i-j} F(h_ij) (j <= i) and h_12 = V(g_12).

    Block indices are 1 for the first d' rows/columns and 2 for the rest.
    Over F_p, F is the identity and V is multiplication by p.
    """

    def __init__(self, p: int, n: int, d: int, dprime: int, g, h, seed: int | None = None):
        self.p, self.n, self.d, self.dprime = p, n, d, dprime
        q = p**n
        self.g = np.array(g, dtype=np.int64).reshape(d, d) % q
        self.h = np.array(h, dtype=np.int64).reshape(d, d) % q
        self.seed = seed

    def block(self, i: int) -> int:
        return 1 if i < self.dprime else 2

    def equations_hold(self) -> bool:
        q, p = self.p**self.n, self.p
        for i in range(self.d):
            for j in range(self.d):
                bi, bj = self.block(i), self.block(j)
                if bj <= bi:
                    if self.g[i, j] % q != (p ** (bi - bj) * self.h[i, j]) % q:
                        return False
                elif self.h[i, j] % q != (p * self.g[i, j]) % q:
                    return False
        return True

    def invertible(self) -> bool:
        try:
            inverse_mod(self.g, self.p, self.n)
            inverse_mod(self.h, self.p, self.n)
        except NotUnit:
            return False
        return True

    def to_json(self) -> dict:
        out = {"p": self.p, "n": self.n, "d": self.d, "dprime": self.dprime,
               "g": self.g.tolist(), "h": self.h.tolist()}
        if self.seed is not None:
            out["seed"] = self.seed
        return out


def bp_member(pair: BPPair) -> bool:
    return pair.equations_hold() and pair.invertible()


def bp_sample(seed: int, p: int, d: int, dprime: int, n: int) -> BPPair:
    """h with invertible diagonal blocks and h_12 in I_n; g forced except for a J_n-coset in g_12."""
    rng = random.Random(seed)
    q = p**n
    k = dprime
    from .semidisplay import random_gl
    h = np.array([[rng.randrange(q) for _ in range(d)] for _ in range(d)], dtype=np.int64)
    if k:
        h[:k, :k] = random_gl(rng, k, p, n)
    if d - k:
        h[k:, k:] = random_gl(rng, d - k, p, n)
    h[:k, k:] = (p * h[:k, k:]) % q
    g = np.zeros_like(h)
    g[:k, :k] = h[:k, :k]
    g[k:, k:] = h[k:, k:]
    g[k:, :k] = (p * h[k:, :k]) % q
    # V-preimage of h_12: h_12 / p plus an element of J_n = p^{n-1} W_n
    g[:k, k:] = (h[:k, k:] // p + p ** (n - 1) * np.array(
        [[rng.randrange(p) for _ in range(d - k)] for _ in range(k)], dtype=np.int64).reshape(k, d - k)) % q
    pair = BPPair(p, n, d, dprime, g, h, seed)
    if not bp_member(pair):
        raise AssertionError("bp_sample produced a non-member")
    return pair


def bp_act(D: DisplayDatum, pair: BPPair) -> DisplayDatum:
    """U -> h U g^{-1}."""
    q = D.q
    ginv = inverse_mod(pair.g, D.p, D.n)
    return DisplayDatum(D.p, D.n, D.d, D.dprime, (pair.h @ D.U % q) @ ginv % q)


# eta_U = eta_{hUg^{-1}} o Ad_h; the other direction fails on some (3, 2, 1, 3) samples
TRANSPORT = "h"


def _transport(points: list, mat: np.ndarray, p: int, n: int, A: TestAlgebra) -> list:
    """eta -> eta o Ad: coordinate col of the image is sum_k mat[k, col] eta_k."""
    N = mat.shape[0]
    zero = WittVec.zero(p, A, n)
    out = []
    for pt in points:
        eta = [WittVec(p, A, pt[b * n:(b + 1) * n]) for b in range(N)]
        new = []
        for col in range(N):
            new.extend(_combo(mat[:, col], eta, zero).entries)
        out.append(tuple(new))
    return sorted(out)


def equivariance_check(D: DisplayDatum, pair: BPPair, algebras: Sequence[TestAlgebra] | None = None,
                       direction: str = TRANSPORT) -> dict:
    """Does eta -> eta o Ad_M carry solutions for hUg^{-1} onto solutions for U?"""
    if direction not in ("h", "h_inverse"):
        raise DomainMismatch("direction is 'h' or 'h_inverse'")
    algebras = list(algebras) if algebras is not None else list(zoo(D.p).values())
    if not pair.invertible():
        return {"member": False, "direction": direction, "algebras": {}, "equivariant": False,
                "reason": "g or h is not invertible"}
    D2 = bp_act(D, pair)
    M = pair.h if direction == "h" else inverse_mod(pair.h, D.p, D.n)
    Mdisp = DisplayDatum(D.p, D.n, D.d, D.dprime, M)
    Ad = adjoint_matrix(Mdisp)
    src, dst = lau_dual_adjoint(D2), lau_dual_adjoint(D)
    per = {}
    ok = True
    for A in algebras:
        moved = _transport(src.points(A), Ad, D.p, D.n, A)
        target = dst.points(A)
        good = moved == target
        per[A.name] = good
        ok = ok and good
    return {"member": bp_member(pair), "direction": direction, "algebras": per, "equivariant": ok}


# ---------------------------------------------------------------------------
# analysis


@dataclass
class LauAnalysis:
    datum: DisplayDatum
    report: GroupSchemeReport
    lie_dim: int
    tangent_dim_dual: int
    routes: dict
    expected: dict
    lie_pair: dict | None = None
    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        return {"datum": self.datum.to_json(), "report": self.report.to_json(),
                "lie_dim": self.lie_dim, "tangent_dim_dual": self.tangent_dim_dual,
                "routes": self.routes, "expected": self.expected, "lie_pair": self.lie_pair,
                "checks": self.checks, "passed": self.passed}


def lie_pair_check(D: DisplayDatum, pres: ZinkDualPresentation | None = None) -> dict:
    """At n = 1: the p-linear pair of Lau^* against the tensor of the two display pairs."""
    if D.n != 1:
        raise DomainMismatch("the restricted Lie pair is read off at n = 1")
    pres = pres or eliminate_to_g1(lau_dual_adjoint(D))
    got = pair_of_cosmooth(pres.group)
    a = semidisplay_of_display(D).weak_pair()
    b = semidisplay_of_display(dual_display(D)).weak_pair()
    want = b_tensor(a, b)
    return {"dual_pair": got.to_json(), "tensor_pair": want.to_json(), "equal": got == want}


def analyze_lau(D: DisplayDatum, algebras: Sequence[TestAlgebra] | None = None) -> LauAnalysis:
    r = D.dprime * (D.d - D.dprime)
    routes = compare_routes(D, algebras)
    elim = eliminate_to_g1(lau_dual_adjoint(D))
    rep = smoothness_report(elim.group, D.n)
    lie = primitive_dim(elim.group)
    expected = {"order_exponent": D.n * r, "lie_dim": r}
    checks = {
        "order_exponent": rep.order_exponent == D.n * r,
        "lie_dim": lie == r,
        "n_cosmooth": rep.n_cosmooth,
        "routes_agree": routes["agree"],
    }
    pair = None
    if D.n == 1:
        pair = lie_pair_check(D, elim)
        checks["lie_tensor"] = pair["equal"]
    return LauAnalysis(D, rep, lie, elim.group.lie_dim(), routes, expected, pair, checks)


def dual_is_etale(pres: ZinkDualPresentation) -> bool:
    return pres.group.lie_dim() == 0


def zink_dual_grouplike_count(S: Semidisplay, A: TestAlgebra) -> int:
    return len(grouplike_points(lau_dual_zink(S).group, A))
