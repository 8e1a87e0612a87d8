import json
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wittdisp.errors import (AxiomViolation, BaseMismatch, DomainMismatch, InvalidFrameElement,
                             NotUnit, WeightOutOfRange)
from wittdisp.exactalg import prime_field, zoo, zoo_algebra
from wittdisp.grpscheme import b_tensor
from wittdisp.laupipe import lau_dual_adjoint, lau_dual_zink
from wittdisp.semidisplay import (DisplayDatum, GradedModuleDatum, LauFrame, Semidisplay,
                                  WeightedCocharacter, WittOps, ZeroOps, adjoint_semidisplay,
                                  adjoint_vs_tensor_permutation, dimension_audit, dual_display,
                                  frame_add, frame_make, frame_mul, frame_sigma, frame_tau,
                                  graded_of_display, inverse_mod, lau_frame_generic, pi_a,
                                  random_gl, random_semidisplay, semidisplay_of_display,
                                  semidisplay_of_graded, tensor_basis_change, tensor_semidisplays,
                                  tensor_weights, unit_semidisplay, witt_frame)
from wittdisp.wittcore import WittVec, int_to_witt, witt_to_int


# -- matrices over Z/p^n ---------------------------------------------------------


@pytest.mark.parametrize("p,n,d", [(2, 1, 3), (2, 3, 2), (3, 2, 3), (5, 1, 2)])
def test_random_gl_certified_inverse(p, n, d):
    rng = random.Random(p * 100 + n * 10 + d)
    for _ in range(20):
        U = random_gl(rng, d, p, n)
        V = inverse_mod(U, p, n)
        assert np.array_equal(U @ V % p**n, np.eye(d, dtype=np.int64))


def test_singular_matrix_rejected():
    with pytest.raises(NotUnit):
        DisplayDatum(2, 2, 2, 1, [[1, 1], [1, 1]])
    with pytest.raises(NotUnit):
        DisplayDatum(3, 2, 2, 1, [[3, 0], [0, 1]])


def test_random_display_is_seeded():
    a = DisplayDatum.random(5, 3, 2, 3, 1)
    b = DisplayDatum.random(5, 3, 2, 3, 1)
    assert a == b
    assert a.to_json()["seed"] == 5
    assert DisplayDatum.from_json(json.loads(json.dumps(a.to_json()))) == a


def test_cocharacter_grades():
    mu = WeightedCocharacter(3, 1)
    assert mu.grade(0, 1) == 1 and mu.grade(1, 0) == -1 and mu.grade(1, 2) == 0
    with pytest.raises(DomainMismatch):
        WeightedCocharacter(2, 3)


# -- semidisplays of displays ---------------------------------------------------------


def test_identity_block_reading():
    S = semidisplay_of_display(DisplayDatum.identity(2, 2, 2, 1))
    x11, x12, x21, x22 = S.blocks()
    assert x11.tolist() == [[1]] and x21.tolist() == [[0]]
    assert x12.tolist() == [[0]] and x22.tolist() == [[1]]
    # the L-columns were truncated to W_1
    assert S.F1_matrix().max() < 2


def test_full_rank_type_is_the_matrix():
    D = DisplayDatum.random(3, 3, 2, 2, 2)
    S = semidisplay_of_display(D)
    assert np.array_equal(S.X, D.U)


def test_l_columns_are_truncated():
    D = DisplayDatum(2, 2, 2, 1, [[1, 3], [2, 1]])
    S = semidisplay_of_display(D)
    assert S.X.tolist() == [[1, 1], [2, 1]]
    assert S.F_matrix().tolist() == [[1, 2], [2, 2]]


@given(st.integers(0, 10**6), st.sampled_from([(2, 1, 2, 1), (2, 2, 3, 1), (3, 2, 2, 1), (3, 3, 3, 2)]))
@settings(max_examples=40, deadline=None)
def test_display_axioms(seed, case):
    p, n, d, k = case
    S = semidisplay_of_display(DisplayDatum.random(seed, p, n, d, k))
    assert S.check_axioms() == {"F_is_pF1_on_L": True, "F1_on_IT": True,
                                "F1_kills_JQ": True, "F_kills_JQ": True}


def test_axiom_check_detects_inconsistent_F():
    S = semidisplay_of_display(DisplayDatum.identity(2, 2, 2, 1))
    bad = Semidisplay(2, 2, 2, 1, S.X, F_full=[[1, 1], [0, 2]])
    assert not bad.check_axioms()["F_is_pF1_on_L"]


def test_semidisplay_json_round_trip():
    S = random_semidisplay(4, 3, 2, 3, 2)
    S2 = Semidisplay.from_json(json.loads(json.dumps(S.to_json())))
    assert S2.same_as(S)
    assert S.to_json()["base"]["name"] == "F3"


def test_unit_semidisplay():
    for n in (1, 2, 3):
        U = unit_semidisplay(n, prime_field(2))
        assert (U.d, U.dprime) == (1, 1) and U.X.tolist() == [[1]]
        assert U.is_valid()


def test_unit_dual_is_etale():
    G = lau_dual_zink(unit_semidisplay(2, 2)).group
    assert G.order() == 4
    assert G.lie_dim() == 0
    assert len(G.points(prime_field(2))) == 4


# -- tensor products ---------------------------------------------------------


def test_tensor_type():
    a = semidisplay_of_display(DisplayDatum.random(1, 2, 1, 2, 1))
    b = semidisplay_of_display(DisplayDatum.random(2, 2, 1, 2, 1))
    T = tensor_semidisplays(a, b)
    assert (T.d, T.dprime) == (4, 1)
    assert T.is_valid()


def test_tensor_rejects_mixed_bases():
    with pytest.raises(BaseMismatch):
        tensor_semidisplays(unit_semidisplay(1, 2), unit_semidisplay(1, 3))
    with pytest.raises(DomainMismatch):
        tensor_semidisplays(unit_semidisplay(1, 2), unit_semidisplay(2, 2))


@pytest.mark.parametrize("seed", range(6))
def test_unit_law(seed):
    S = semidisplay_of_display(DisplayDatum.random(seed, 2, 2, 3, 2))
    T = tensor_semidisplays(S, unit_semidisplay(2, 2))
    perm = tensor_basis_change(S, unit_semidisplay(2, 2))
    assert perm == list(range(3))
    assert np.array_equal(T.X, S.X)


@pytest.mark.parametrize("seed", range(10))
def test_weak_image_of_tensor(seed):
    rng = random.Random(seed)
    p = rng.choice([2, 3])
    a = random_semidisplay(seed, p, 1, rng.randint(1, 3), 1)
    b = random_semidisplay(seed + 50, p, 1, 2, rng.randint(1, 2))
    assert tensor_semidisplays(a, b).weak_pair() == b_tensor(a.weak_pair(), b.weak_pair())


@pytest.mark.parametrize("seed", range(4))
def test_tensor_associative_and_commutative_invariants(seed):
    rng = random.Random(seed)
    p = 2
    S = [random_semidisplay(seed * 3 + i, p, 1, rng.randint(1, 2), 1) for i in range(3)]
    left = tensor_semidisplays(tensor_semidisplays(S[0], S[1]), S[2])
    right = tensor_semidisplays(S[0], tensor_semidisplays(S[1], S[2]))
    swap = tensor_semidisplays(S[1], S[0])
    plain = tensor_semidisplays(S[0], S[1])
    for x, y in ((left, right), (plain, swap)):
        gx, gy = lau_dual_zink(x).group, lau_dual_zink(y).group
        assert gx.order() == gy.order()
        assert gx.lie_dim() == gy.lie_dim()
    assert left.is_valid() and right.is_valid()


# -- duality ---------------------------------------------------------------------


def test_dual_of_identity():
    Dt = dual_display(DisplayDatum.identity(3, 2, 3, 1))
    assert (Dt.d, Dt.dprime) == (3, 2)
    assert np.array_equal(Dt.U, np.eye(3, dtype=np.int64))


def test_dual_of_antidiagonal_keeps_hasse_block_zero():
    Dt = dual_display(DisplayDatum.antidiagonal(2, 1, 2, 1))
    assert Dt.hasse_block().tolist() == [[0]]


@pytest.mark.parametrize("seed", range(50))
def test_double_dual(seed):
    rng = random.Random(seed)
    p, n, d = rng.choice([2, 3]), rng.randint(1, 3), rng.randint(1, 3)
    D = DisplayDatum.random(seed, p, n, d, rng.randint(0, d))
    assert dual_display(dual_display(D)) == D


# -- graded modules ------------------------------------------------------------


def test_graded_identity_matches_display():
    M = GradedModuleDatum(2, 2, (1, 0), np.eye(2, dtype=np.int64), display=True)
    assert semidisplay_of_graded(M).same_as(semidisplay_of_display(DisplayDatum.identity(2, 2, 2, 1)))


@pytest.mark.parametrize("seed", range(10))
def test_graded_route_matches_display(seed):
    D = DisplayDatum.random(seed, 3, 2, 3, 1 + seed % 2)
    S1 = semidisplay_of_graded(graded_of_display(D))
    S2 = semidisplay_of_display(D)
    assert S1.same_as(S2)
    A = zoo_algebra(3, "eps2")
    assert lau_dual_zink(S1).points(A) == lau_dual_zink(S2).points(A)


def test_all_weights_zero_is_etale_type():
    M = GradedModuleDatum(2, 1, (0, 0), np.eye(2, dtype=np.int64))
    S = semidisplay_of_graded(M)
    assert (S.d, S.dprime) == (2, 2)
    assert lau_dual_zink(S).group.lie_dim() == 0


def test_weight_validation():
    with pytest.raises(WeightOutOfRange):
        semidisplay_of_graded(GradedModuleDatum(2, 1, (1, 1), np.eye(2, dtype=np.int64)))
    with pytest.raises(WeightOutOfRange):
        GradedModuleDatum(2, 1, (0, 1), np.eye(2, dtype=np.int64))
    with pytest.raises(WeightOutOfRange):
        GradedModuleDatum(2, 1, (2, 0), np.eye(2, dtype=np.int64))
    with pytest.raises(NotUnit):
        GradedModuleDatum(2, 1, (1, 0), np.zeros((2, 2), dtype=np.int64), display=True)


def test_pi_a():
    assert pi_a((0, 1), 1) == ((0, 1), (0, 0))
    assert pi_a((2,), 1) == ((1,), (1,))
    assert pi_a(tensor_weights((0, 1), (0, 1)), 1) == ((0, 1, 1, 1), (0, 0, 0, 1))
    with pytest.raises(WeightOutOfRange):
        pi_a((-1,), 0)


@given(st.lists(st.integers(0, 5), max_size=6), st.integers(0, 4))
def test_pi_a_is_idempotent_and_fixes_low_degrees(weights, a):
    new, trans = pi_a(weights, a)
    assert pi_a(new, a) == (new, tuple(0 for _ in new))
    for w, nw, t in zip(weights, new, trans):
        assert nw + t == w or (w <= a and nw == w and t == 0)
        assert nw <= a


# -- the adjoint semidisplay ----------------------------------------------------


def test_adjoint_type_and_rank():
    for (d, k) in [(2, 1), (3, 1), (3, 2), (4, 2)]:
        S = adjoint_semidisplay(DisplayDatum.identity(2, 1, d, k))
        assert (S.d, S.dprime) == (d * d, k * (d - k))


def test_adjoint_identity_small():
    S = adjoint_semidisplay(DisplayDatum.identity(2, 1, 2, 1))
    # basis E12 | E11, E22 | E21: F(E12) = E12, F_1 = Ad on the rest, reduced to W_0 = 0
    assert S.X.tolist() == [[1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]
    assert S.labels == [(0, 1), (0, 0), (1, 1), (1, 0)]


@pytest.mark.parametrize("case", [(2, 1, 1, 2), (2, 1, 2, 2), (3, 1, 1, 3)])
@pytest.mark.parametrize("seed", range(20))
def test_adjoint_equals_tensor_with_dual(case, seed):
    d, k, n, p = case
    D = DisplayDatum.random(seed, p, n, d, k)
    A = adjoint_semidisplay(D)
    T = tensor_semidisplays(semidisplay_of_display(D), semidisplay_of_display(dual_display(D)))
    T2 = T.permuted(adjoint_vs_tensor_permutation(D))
    assert A.same_as(T2)
    assert np.array_equal(A.F_full, T2.F_full)
    assert A.is_valid()


def test_adjoint_zink_equations_match_adjoint_route():
    D = DisplayDatum.identity(2, 1, 2, 1)
    zk = lau_dual_zink(adjoint_semidisplay(D)).group
    adj = lau_dual_adjoint(D).group
    A = zoo_algebra(2, "eps2")
    assert zk.points(A) == adj.points(A)
    assert zk.order() == adj.order() == 2


# -- frames -------------------------------------------------------------------------


def w(p, n, k, A=None):
    return int_to_witt(p, n, k) if A is None else WittVec.from_integer(p, A, n, k)


def test_t_and_u():
    F2 = prime_field(2)
    fr = witt_frame(F2, 2)
    t, u = fr.t(), fr.u()
    assert witt_to_int(frame_sigma(t)) == 2 and witt_to_int(frame_tau(t)) == 1
    assert witt_to_int(frame_sigma(u)) == 1 and witt_to_int(frame_tau(u)) == 2
    assert frame_mul(t, u) == frame_make(F2, 2, 0, w(2, 2, 2, F2))
    assert frame_mul(u, t) == frame_mul(t, u)


def test_degree_zero_sigma_tau():
    A = zoo_algebra(3, "Fp2")
    fr = witt_frame(A, 2)
    rng = random.Random(0)
    for _ in range(20):
        a = fr.ops.sample(rng)
        e = fr.make(0, a)
        assert e.sigma() == a.frobenius() and e.tau() == a


def test_frame_zero_and_invalid_pair():
    F3 = prime_field(3)
    z = frame_make(F3, 2, 0, WittVec.zero(3, F3, 2))
    assert z.x.is_zero() and z.y.is_zero()
    fr = witt_frame(F3, 2)
    with pytest.raises(InvalidFrameElement):
        fr.from_pair(1, WittVec.one(3, F3, 2), WittVec.one(3, F3, 2))
    with pytest.raises(DomainMismatch):
        frame_add(fr.t(), fr.u())


@pytest.mark.parametrize("kind", ["Fp", "eps2", "epsdelta"])
@pytest.mark.parametrize("p", [2, 3])
def test_frame_ring_laws(p, kind):
    A = zoo_algebra(p, kind)
    fr = witt_frame(A, 3)
    rng = random.Random(7)
    for _ in range(25):
        i, j = rng.randint(-3, 3), rng.randint(-3, 3)
        a, b, c = (fr.make(k, fr.ops.sample(rng)) for k in (i, j, j))
        prod = a * b
        assert prod.is_valid()
        assert (a * (b + c)) == a * b + a * c
        # sigma and tau are multiplicative
        assert prod.sigma() == a.sigma() * b.sigma()
        assert prod.tau() == a.tau() * b.tau()


def test_tau_identifies_t_with_one():
    A = zoo_algebra(2, "eps2")
    fr = witt_frame(A, 2)
    rng = random.Random(3)
    for _ in range(10):
        z = fr.make(0, fr.ops.sample(rng))
        tz = fr.t() * z
        assert tz.tau() - z.tau() == WittVec.zero(2, A, 2)


def test_degree_components():
    F2 = prime_field(2)
    fr = witt_frame(F2, 2)
    elems = list(fr.ops.elements())
    assert len({(tuple(e.x.entries), tuple(e.y.entries)) for e in fr.component(1, elems)}) == 4
    comp0 = fr.component(0, elems)
    assert all(e.y == e.x for e in comp0)  # F = id on W_n(F_p)


def test_zero_ring_frame():
    fr = lau_frame_generic(ZeroOps(), lambda a: 0, lambda a: 0)
    for i in (-2, 0, 3):
        assert list(fr.component(i, ZeroOps().elements()))[0].x == 0


def test_generic_frame_detects_bad_axioms():
    ops = WittOps(zoo_algebra(2, "eps2"), 2)
    with pytest.raises(AxiomViolation):
        # V replaced by the identity breaks F V = pp
        LauFrame(ops, lambda a: a.frobenius(), lambda a: a.frobenius())


def test_generic_frame_reproduces_witt_frame():
    A = zoo_algebra(3, "eps2")
    ops = WittOps(A, 2)
    gen = lau_frame_generic(ops, lambda a: a.frobenius(), lambda a: a.verschiebung())
    ref = witt_frame(A, 2)
    rng = random.Random(1)
    for _ in range(10):
        a = ops.sample(rng)
        for i in (-2, -1, 0, 1, 2):
            g, r = gen.make(i, a), ref.make(i, a)
            assert (g.x, g.y) == (r.x, r.y)


# -- dimension audit ---------------------------------------------------------------


@pytest.mark.parametrize("d", [1, 2, 3])
def test_dimension_audit_small(d):
    for k in range(d + 1):
        for n in (1, 2):
            r = dimension_audit(d, k, n)
            assert r["sdisp_stack"] == -(d - k) ** 2
            assert r["disp_stack"] == 0
            assert r["GL"] == r["BP_n"] == d * d * n
