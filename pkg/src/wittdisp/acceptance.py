"""Acceptance criteria 1-12 as plain functions.

Each ``criterion_k(profile)`` returns a :class:`CriterionResult` whose
``details`` holds the exact counts that were compared.  The CLI's
``suite acceptance`` and ``tests/test_acceptance.py`` both call these.
"""
from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field

import numpy as np

from .exactalg import MPoly, prime_field, zoo, zoo_algebra
from .grpscheme import (EqGroupPresentation, PLinearPair, a_group, b_tensor, biadditive_bruteforce,
                        exactness, grouplike_points, killed_by_Vm, primitive_dim, smoothness_report,
                        v_complex)
from .laupipe import (BPPair, _project, analyze_lau, bp_member, bp_sample, dual_is_etale,
                      economic_presentation, eliminate_to_g1, equivariance_check, lau_dual_adjoint, lau_dual_zink,
                      zink_complex_truncated, zink_dual_grouplike_count)
from .semidisplay import (DisplayDatum, Semidisplay, dimension_audit, random_gl, random_semidisplay,
                          unit_semidisplay)
from .wittcore import (HatWittElement, WittVec, cartier_pairing, pairing_teichmuller_expansion,
                       restricted_kernels)

LAU_CASES = ((2, 1, 1, 2), (2, 1, 1, 3), (2, 1, 2, 2), (3, 1, 1, 2), (3, 2, 1, 3))

PROFILES = {
    "desk": {"witt_samples": 200, "pair_samples": 200, "pair_rank": 3, "semidisplays": 50,
             "lau_samples": 10, "bp_samples": 50, "bp_negatives": 10, "zink_M": 4,
             "audit_dmax": 4, "audit_n": (1, 2)},
    # same code paths at a fraction of the cost, for smoke runs
    "quick": {"witt_samples": 10, "pair_samples": 10, "pair_rank": 2, "semidisplays": 5,
              "lau_samples": 1, "bp_samples": 2, "bp_negatives": 2, "zink_M": 3,
              "audit_dmax": 2, "audit_n": (1,)},
}

TITLES = {
    1: "Witt ring laws and F/V relations",
    2: "duality pairing",
    3: "p-linear pairs and their group schemes",
    4: "V-complex certifies n-cosmoothness",
    5: "Zink functor: Lie/rank law and economic presentation",
    6: "truncated Zink complex",
    7: "Lau group orders, Lie dimension, cosmoothness",
    8: "route agreement and elimination",
    9: "ordinary and supersingular fibers",
    10: "BP equivariance",
    11: "Lie tensor decomposition at n = 1",
    12: "dimension audit",
}


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"criterion {self.number:2d} {verdict}  {self.title} ({self.seconds:.1f} s)"

    def to_json(self) -> dict:
        return {"number": self.number, "title": self.title, "passed": self.passed,
                "details": self.details, "seconds": round(self.seconds, 3)}


def _profile(profile) -> dict:
    if isinstance(profile, dict):
        return profile
    return PROFILES[profile]


def _timed(number, fn):
    def run(profile="desk") -> CriterionResult:
        t0 = time.perf_counter()
        passed, details = fn(_profile(profile))
        return CriterionResult(number, TITLES[number], bool(passed), details, time.perf_counter() - t0)
    run.__name__ = f"criterion_{number}"
    run.__doc__ = fn.__doc__
    return run


# ---------------------------------------------------------------------------
# 1. Witt laws


def _c1(prof):
    """Ring laws, FV = VF = p and Teichmueller multiplicativity on random samples."""
    N = prof["witt_samples"]
    failures = []
    checked = 0
    for p in (2, 3):
        for n in (1, 2, 3):
            for A in zoo(p).values():
                rng = random.Random(1000 * p + 10 * n + A.size)
                for _ in range(N):
                    x, y, z = (WittVec(p, A, [rng.randrange(A.size) for _ in range(n)]) for _ in range(3))
                    a, b = rng.randrange(A.size), rng.randrange(A.size)
                    px = x
                    for _ in range(p - 1):
                        px = px + x
                    ok = {
                        "add_assoc": (x + y) + z == x + (y + z),
                        "mul_assoc": (x * y) * z == x * (y * z),
                        "add_comm": x + y == y + x,
                        "mul_comm": x * y == y * x,
                        "distrib": x * (y + z) == x * y + x * z,
                        "FV": x.verschiebung().frobenius() == px,
                        "VF": x.frobenius().verschiebung() == px,
                        "teich": WittVec.teichmuller(p, A, n, a) * WittVec.teichmuller(p, A, n, b)
                        == WittVec.teichmuller(p, A, n, A.mul(a, b)),
                    }
                    checked += 1
                    bad = [k for k, v in ok.items() if not v]
                    if bad:
                        failures.append({"p": p, "n": n, "algebra": A.name, "laws": bad})
    return not failures, {"samples": checked, "per_algebra": N, "failures": failures[:20]}


# ---------------------------------------------------------------------------
# 2. pairing


def _c2(prof):
    """Biadditivity, F/V adjointness and the two pairing routes; restricted nondegeneracy."""
    N = prof["pair_samples"]
    failures = []
    for p in (2, 3):
        algebras = [A for A in zoo(p).values() if A.nil_index > 1]
        rng = random.Random(p)
        for k in range(N):
            A = algebras[k % len(algebras)]
            n = 1 + (k // len(algebras)) % 2
            nil = A.nilpotents(p**n)
            x, x2 = (WittVec(p, A, [rng.randrange(A.size) for _ in range(n)]) for _ in range(2))
            y, y2 = (HatWittElement.from_entries(p, A, [rng.choice(nil), rng.choice(nil)], n)
                     for _ in range(2))
            v = cartier_pairing(x, y)
            ok = {
                "routes": v == pairing_teichmuller_expansion(x, y),
                "left": cartier_pairing(x + x2, y) == A.mul(v, cartier_pairing(x2, y)),
                "right": cartier_pairing(x, y + y2) == A.mul(v, cartier_pairing(x, y2)),
                "F_V": cartier_pairing(x.frobenius(), y) == cartier_pairing(x, y.verschiebung()),
                "V_F": cartier_pairing(x.verschiebung(), y) == cartier_pairing(x, y.frobenius()),
            }
            bad = [key for key, val in ok.items() if not val]
            if bad:
                failures.append({"p": p, "algebra": A.name, "n": n, "laws": bad})
    kernels = {}
    for p in (2, 3):
        for A in zoo(p).values():
            for n in (1, 2):
                for m in (1, 2):
                    kernels[f"{A.name} n={n} m={m}"] = list(restricted_kernels(A, n, m))
    nondeg = all(v == [1, 1] for v in kernels.values())
    return not failures and nondeg, {"samples_per_prime": N, "failures": failures[:20],
                                     "kernels": kernels, "nondegenerate": nondeg}


# ---------------------------------------------------------------------------
# 3. p-linear pairs


def _all_pairs(p, r):
    for ent in itertools.product(range(p), repeat=r * r):
        yield PLinearPair(p, tuple(tuple(ent[i * r:(i + 1) * r]) for i in range(r)))


def _c3(prof):
    """Orders and 1-cosmoothness of every A_{P,phi}; biadditive counts; tensor ranks."""
    rmax = prof["pair_rank"]
    exhaustive = {}
    ok = True
    for p in (2, 3):
        for r in range(1, rmax + 1):
            total = good = 0
            for P in _all_pairs(p, r):
                G = a_group(P)
                total += 1
                good += G.order() == p**r and smoothness_report(G, 1).n_cosmooth
            exhaustive[f"p={p} rank={r}"] = {"pairs": total, "good": good}
            ok = ok and good == total
    counts = {}
    gap_alpha = True
    for p in (2, 3):
        for R in (prime_field(p), zoo_algebra(p, "eps2")):
            for c1 in range(p):
                for c2 in range(p):
                    a, b = PLinearPair(p, ((c1,),)), PLinearPair(p, ((c2,),))
                    count, killed = biadditive_bruteforce(a_group(a), a_group(b), R)
                    dual = len(grouplike_points(a_group(b_tensor(a, b)), R))
                    counts[f"p={p} {R.name} ({c1},{c2})"] = [count, killed, dual]
                    ok = ok and killed == dual
                    if c1 == c2 == 0 and R.nil_index > 1:
                        gap_alpha = gap_alpha and count > killed
    ok = ok and gap_alpha
    tensor = {"checked": 0, "bad": 0}
    for p in (2, 3):
        small = [P for r in (1, 2) for P in _all_pairs(p, r)]
        rng = random.Random(30 + p)
        combos = (itertools.product(small, repeat=2) if p == 2
                  else ((rng.choice(small), rng.choice(small)) for _ in range(60)))
        for P, P2 in combos:
            T = b_tensor(P, P2)
            tensor["checked"] += 1
            if T.rank != P.rank * P2.rank or a_group(T).order() != p ** (P.rank * P2.rank):
                tensor["bad"] += 1
    ok = ok and tensor["bad"] == 0
    return ok, {"exhaustive": exhaustive, "biadditive": counts, "alpha_gap": gap_alpha,
                "tensor_rank": tensor}


# ---------------------------------------------------------------------------
# 4. V-complex exactness


def _witt_frobenius_kernel(p, blocks_kills):
    """Product of W_{n_i}[F^{m_i}], one block per (n_i, m_i)."""
    blocks = [n for n, _ in blocks_kills]
    F = prime_field(p)
    ys = MPoly.gens(F, sum(blocks))
    eqs, off = [], 0
    for n, m in blocks_kills:
        eqs.extend(ys[off + i] ** (p**m) for i in range(n))
        off += n
    return EqGroupPresentation(p, blocks, eqs)


def _v_families(p):
    """(name, group, n, truth) with truth fixed by construction."""
    F = prime_field(p)
    fam = []
    # W_n[F^m] is dual to W_m[F^n], which is n-smooth of rank m
    for n in (1, 2, 3, 4):
        for m in range(1, n + 1):
            # length-4 coproducts are large; keep only the smallest one
            if p ** (n * m) <= (400 if n < 4 else 16):
                fam.append((f"W_{n}[F^{m}]", _witt_frobenius_kernel(p, [(n, m)]), n, True))
    if p ** 6 <= 400:
        fam.append(("W_2[F] x W_2[F^2]", _witt_frobenius_kernel(p, [(2, 1), (2, 2)]), 2, True))
    fam.append(("W_2[F] x W_2[F]", _witt_frobenius_kernel(p, [(2, 1), (2, 1)]), 2, True))
    # length-two vectors supported in the top component: a copy of W_2[F] inside W_3
    y0, y1, y2 = MPoly.gens(F, 3)
    fam.append(("V W_2[F] in W_3", EqGroupPresentation(p, [3], [y0, y1**p, y2**p]), 2, True))
    # alpha_p^2 has order p^2 and is killed by V, but its dual has a 2-dimensional Lie algebra
    fam.append(("alpha_p^2", _witt_frobenius_kernel(p, [(1, 1), (1, 1)]), 2, False))
    a0, a1, b0, b1 = MPoly.gens(F, 4)
    fam.append(("V alpha_p^2 in W_2^2", EqGroupPresentation(p, [2, 2], [a0, b0, a1**p, b1**p]), 2, False))
    fam.append(("W_2[F] x alpha_p", _witt_frobenius_kernel(p, [(2, 1), (1, 1)]), 3, False))
    fam.append(("alpha_p^3", _witt_frobenius_kernel(p, [(1, 1)] * 3), 3, False))
    fam.append(("W_2[F] x alpha_p^2", _witt_frobenius_kernel(p, [(2, 1), (1, 1), (1, 1)]), 2, False))
    # Lau duals are n-cosmooth
    for seed in range(2):
        D = DisplayDatum.random(seed, p, 2, 2, 1)
        fam.append((f"Lau dual (2,1,2,{p}) seed {seed}", lau_dual_adjoint(D).group, 2, True))
    if p == 2:
        D = DisplayDatum.random(0, 2, 3, 2, 1)
        fam.append(("Lau dual (2,1,3,2) seed 0", lau_dual_adjoint(D).group, 3, True))
    return fam


def _c4(prof):
    """V-complex verdict against the dual Lie-count oracle and the construction label."""
    rows = {}
    ok = True
    single_m = {}
    for p in (2, 3):
        for name, G, n, truth in _v_families(p):
            rep = smoothness_report(G, n)
            e = rep.order_exponent
            r = e // n if e % n == 0 else None
            # dual form of the Lie-count test: G^* is n-smooth iff |G| = p^{nr},
            # V^n kills G and Hom(G, G_a) has dimension r
            oracle = r is not None and killed_by_Vm(G, n) and primitive_dim(G) == r
            v_exact = [exactness(v_complex(G, m, n)) for m in range(1, n)]
            key = f"p={p} {name} n={n}"
            rows[key] = {"v_complex": rep.n_cosmooth, "oracle": oracle, "truth": truth}
            ok = ok and rep.n_cosmooth == oracle == truth
            if n >= 3 and r is not None and killed_by_Vm(G, n):
                single_m[key] = v_exact
                ok = ok and (all(v_exact) or not any(v_exact))
    both = {row["truth"] for row in rows.values()} == {True, False}
    return ok and both and bool(single_m), {"families": rows, "single_m": single_m}


# ---------------------------------------------------------------------------
# 5. Zink functor


def _semidisplay_samples(count):
    rng = random.Random(5)
    out = []
    while len(out) < count:
        p, n, d = rng.choice((2, 3)), rng.choice((1, 2)), rng.choice((1, 2, 3))
        k = rng.randrange(d + 1)
        if p ** (n * k) > 400:  # coordinate ring beyond the Hopf-algebra budget
            continue
        out.append((rng.randrange(10**6), p, n, d, k))
    return out


def _c5(prof):
    """Lie(Z_P) = P/Q through primitives of the dual, order exponent, economic = Cond_x/Cond_y."""
    rows = []
    ok = True
    for seed, p, n, d, k in _semidisplay_samples(prof["semidisplays"]):
        S = random_semidisplay(seed, p, n, d, k)
        zk = lau_dual_zink(S)
        eco = economic_presentation(S)
        lie = primitive_dim(zk.group)
        agree = zk.order() == eco.order()
        for A in zoo(p).values():
            pz = zk.points(A)
            proj = _project(pz, n * k)
            agree = agree and len(proj) == len(pz) and proj == eco.points(A)
        row = {"seed": seed, "p": p, "n": n, "d": d, "dprime": k, "lie": lie,
               "order_exponent": zk.order_exponent(), "economic_agrees": agree}
        rows.append(row)
        ok = ok and lie == k and row["order_exponent"] == n * k and agree
    return ok, {"samples": rows}


# ---------------------------------------------------------------------------
# 6. truncated Zink complex


def _c6(prof):
    """ker(1 - Phi) trivial, coker stable by M and equal to the dual point count."""
    A = zoo_algebra(2, "eps2")
    Mmax = prof["zink_M"]
    cases = {"unit": unit_semidisplay(1, 2), "alpha": Semidisplay(2, 1, 1, 1, [[0]])}
    out = {}
    ok = True
    for name, S in cases.items():
        kernels = [zink_complex_truncated(S, A, M, _recurse=False).kernel_size for M in range(1, Mmax)]
        res = zink_complex_truncated(S, A, Mmax)
        kernels.append(res.kernel_size)
        dual = zink_dual_grouplike_count(S, A)
        out[name] = {"kernels": kernels, "coker": res.coker_size, "coker_next": res.sizes["coker_next"],
                     "stabilized": res.stabilized, "dual_points": dual}
        ok = ok and all(k == 1 for k in kernels) and res.stabilized and res.coker_size == dual == 2
    return ok, out


# ---------------------------------------------------------------------------
# 7, 8, 11. Lau analyses (shared)

_LAU_CACHE: dict = {}


def lau_analyses(samples: int) -> dict:
    """analyze_lau on ``samples`` random U per configuration, memoised."""
    out = {}
    for case in LAU_CASES:
        d, k, n, p = case
        for seed in range(samples):
            key = (case, seed)
            if key not in _LAU_CACHE:
                _LAU_CACHE[key] = analyze_lau(DisplayDatum.random(seed, p, n, d, k))
            out[key] = _LAU_CACHE[key]
    return out


def _case_name(case, seed):
    return "(%d,%d,%d,%d) seed %d" % (*case, seed)


def _c7(prof):
    """Order exponent n d'(d - d'), Lie dimension d'(d - d'), n-cosmooth dual."""
    rows = {}
    ok = True
    for (case, seed), an in lau_analyses(prof["lau_samples"]).items():
        d, k, n, p = case
        r = k * (d - k)
        rows[_case_name(case, seed)] = {"order_exponent": an.report.order_exponent, "lie_dim": an.lie_dim,
                                        "n_cosmooth": an.report.n_cosmooth}
        ok = ok and an.report.order_exponent == n * r and an.lie_dim == r and an.report.n_cosmooth
    return ok, {"cases": rows}


def _c8(prof):
    """Adjoint, zink, economic and eliminated presentations agree."""
    rows = {}
    ok = True
    for (case, seed), an in lau_analyses(prof["lau_samples"]).items():
        orders = an.routes["orders"]
        rows[_case_name(case, seed)] = {"orders": orders, "agree": an.routes["agree"]}
        ok = ok and an.routes["agree"] and orders["eliminated"] == orders["adjoint"]
    return ok, {"cases": rows}


def _c11(prof):
    """At n = 1 the restricted-Lie pair of the dual is the tensor of the two display pairs."""
    rows = {}
    ok = True
    for (case, seed), an in lau_analyses(prof["lau_samples"]).items():
        if case[2] != 1:
            continue
        rows[_case_name(case, seed)] = an.lie_pair["equal"]
        ok = ok and an.lie_pair["equal"]
    return ok and bool(rows), {"cases": rows}


# ---------------------------------------------------------------------------
# 9. fibers


def _c9(prof):
    """Identity: etale of order p; antidiagonal: alpha_p; Hasse block decides."""
    out = {}
    ok = True
    for p in (2, 3):
        ident = eliminate_to_g1(lau_dual_adjoint(DisplayDatum.identity(p, 1, 2, 1)))
        anti = eliminate_to_g1(lau_dual_adjoint(DisplayDatum.antidiagonal(p, 1, 2, 1)))
        etale_model = a_group(PLinearPair(p, ((1,),)))
        alpha_model = a_group(PLinearPair(p, ((0,),)))
        algebras = list(zoo(p).values())
        id_ok = (ident.order() == p and dual_is_etale(ident)
                 and all(ident.points(A) == etale_model.points(A) for A in algebras))
        anti_ok = (anti.order() == p and anti.group.lie_dim() == 1
                   and all(anti.points(A) == alpha_model.points(A) for A in algebras))
        total = agree = 0
        for ent in itertools.product(range(p), repeat=4):
            U = np.array(ent, dtype=np.int64).reshape(2, 2)
            if (U[0, 0] * U[1, 1] - U[0, 1] * U[1, 0]) % p == 0:
                continue
            D = DisplayDatum(p, 1, 2, 1, U)
            tangent = lau_dual_adjoint(D).group.lie_dim()
            ordinary = int(D.hasse_block()[0, 0]) % p != 0
            total += 1
            agree += tangent == (0 if ordinary else 1)
        out[f"p={p}"] = {"identity_etale": id_ok, "antidiagonal_alpha": anti_ok,
                         "gl2": total, "dichotomy_agrees": agree}
        ok = ok and id_ok and anti_ok and agree == total
    return ok, out


# ---------------------------------------------------------------------------
# 10. BP equivariance


def _has_power(D) -> bool:
    """The point-set comparison can only fail if some zoo algebra sees more than the origin."""
    pres = lau_dual_adjoint(D)
    return any(len(pres.points(A)) > 1 for A in zoo(D.p).values())


def _c10(prof):
    """Member pairs transport solution sets; pairs whose h has no BP partner do not.

    A control (1, h) with h_12 in I_n is not informative: (g', h) is a member
    for a suitable g', so the check only compares hU with hUg'^{-1}.  Controls
    therefore have a unit entry in h_12, and a datum with nontrivial points.
    """
    out = {}
    ok = True
    for case in LAU_CASES:
        d, k, n, p = case
        members = good = informative = 0
        for s in range(prof["bp_samples"]):
            D = DisplayDatum.random(500 + s, p, n, d, k)
            pair = bp_sample(2000 + s, p, d, k, n)
            res = equivariance_check(D, pair)
            members += res["member"]
            good += res["equivariant"]
            informative += _has_power(D)
        negatives = failed = 0
        rng = random.Random(sum(case))
        seed = 900
        while negatives < prof["bp_negatives"]:
            h = random_gl(rng, d, p, n)
            if np.all(h[:k, k:] % p == 0):
                continue
            seed += 1
            D = DisplayDatum.random(seed, p, n, d, k)
            if not _has_power(D):
                continue
            pair = BPPair(p, n, d, k, np.eye(d, dtype=np.int64), h)
            negatives += 1
            failed += not equivariance_check(D, pair)["equivariant"]
        # informational: non-members whose h does have a BP partner
        shaped = shaped_pass = 0
        for _ in range(50 * prof["bp_negatives"]):
            if shaped == prof["bp_negatives"]:
                break
            h = random_gl(rng, d, p, n)
            pair = BPPair(p, n, d, k, np.eye(d, dtype=np.int64), h)
            if bp_member(pair) or not np.all(h[:k, k:] % p == 0):
                continue
            shaped += 1
            shaped_pass += equivariance_check(DisplayDatum.random(700 + shaped, p, n, d, k), pair)["equivariant"]
        name = "(%d,%d,%d,%d)" % case
        out[name] = {"samples": prof["bp_samples"], "members": members, "equivariant": good,
                     "informative": informative, "negatives": negatives, "negatives_failed": failed,
                     "member_shaped_h": shaped, "member_shaped_h_equivariant": shaped_pass}
        ok = ok and members == good == prof["bp_samples"] and failed == negatives
    return ok, out


# ---------------------------------------------------------------------------
# 12. dimension audit


def _c12(prof):
    """sDisp stack dimension -(d - d')^2 and Disp stack dimension 0."""
    rows = {}
    ok = True
    for n in prof["audit_n"]:
        for d in range(1, prof["audit_dmax"] + 1):
            for k in range(d + 1):
                a = dimension_audit(d, k, n)
                rows[f"d={d} dprime={k} n={n}"] = [a["sdisp_stack"], a["disp_stack"]]
                ok = ok and a["sdisp_stack"] == -(d - k) ** 2 and a["disp_stack"] == 0
    return ok, {"audit": rows}


criterion_1 = _timed(1, _c1)
criterion_2 = _timed(2, _c2)
criterion_3 = _timed(3, _c3)
criterion_4 = _timed(4, _c4)
criterion_5 = _timed(5, _c5)
criterion_6 = _timed(6, _c6)
criterion_7 = _timed(7, _c7)
criterion_8 = _timed(8, _c8)
criterion_9 = _timed(9, _c9)
criterion_10 = _timed(10, _c10)
criterion_11 = _timed(11, _c11)
criterion_12 = _timed(12, _c12)

CRITERIA = {k: globals()[f"criterion_{k}"] for k in range(1, 13)}


def run_suite(profile="desk", only=None, progress=None) -> list:
    results = []
    for k, fn in CRITERIA.items():
        if only and k not in only:
            continue
        res = fn(profile)
        if progress:
            progress(res)
        results.append(res)
    return results
