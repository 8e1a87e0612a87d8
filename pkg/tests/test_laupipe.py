import itertools
import json
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wittdisp.errors import DomainMismatch, EliminationFailed
from wittdisp.exactalg import MPoly, prime_field, zoo, zoo_algebra
from wittdisp.grpscheme import EqGroupPresentation, grouplike_points, primitive_dim, smoothness_report
from wittdisp.laupipe import (BPPair, ZinkDualPresentation, analyze_lau, bp_act, bp_member,
                              bp_sample, compare_routes, economic_presentation, eliminate_to_g1,
                              equivariance_check, hat_subgroup, lau_dual_adjoint, lau_dual_zink,
                              lie_pair_check, zink_complex_truncated)
from wittdisp.semidisplay import (DisplayDatum, Semidisplay, adjoint_semidisplay,
                                  random_semidisplay, unit_semidisplay)


def eqs(pres):
    return sorted(f.format(pres.group.names) for f in pres.group.equations)


# -- adjoint route -----------------------------------------------------------------


def test_adjoint_ordinary_fiber():
    P = lau_dual_adjoint(DisplayDatum.identity(2, 1, 2, 1))
    assert eqs(P) == ["eta11_0", "eta12_0^2 + eta12_0", "eta21_0", "eta22_0"]
    assert P.order() == 2 and P.group.lie_dim() == 0


def test_adjoint_supersingular_fiber():
    P = lau_dual_adjoint(DisplayDatum.antidiagonal(2, 1, 2, 1))
    assert "eta12_0^2 + eta21_0" in eqs(P)
    E = eliminate_to_g1(P)
    assert eqs(E) == ["eta12_0^2"]
    assert P.group.lie_dim() == 1


@pytest.mark.parametrize("p", [2, 3])
def test_adjoint_identity_length_two(p):
    P = lau_dual_adjoint(DisplayDatum.identity(p, 2, 2, 1))
    E = eliminate_to_g1(P)
    y0, y1 = E.group.variables()
    assert set(E.group.equations) == {y0**p - y0, y1**p - y1}
    rep = smoothness_report(E.group, 2)
    assert P.order() == p**2
    assert rep.n_cosmooth and rep.n_cosmooth_rank == 1


# -- zink route -------------------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 3])
def test_zink_unit_is_etale(n):
    G = lau_dual_zink(unit_semidisplay(n, 2)).group
    ys = G.variables()
    assert G.order() == 2**n
    assert all(G.normal_form(y**2 - y).is_zero() for y in ys)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_zink_zero_frobenius(d):
    S = Semidisplay(3, 1, d, d, np.zeros((d, d), dtype=np.int64))
    G = lau_dual_zink(S).group
    assert G.order() == 3**d
    assert G.lie_dim() == d


@pytest.mark.parametrize("seed", range(5))
def test_zink_solutions_are_closed(seed):
    S = random_semidisplay(seed, 2, 2, 2, 1)
    G = lau_dual_zink(S).group
    assert G.points(prime_field(2))[0] == (0,) * G.nvars
    for A in zoo(2).values():
        assert G.check_closure(A, samples=30, rng=random.Random(seed))


@pytest.mark.parametrize("seed", range(6))
def test_zink_on_adjoint_equals_adjoint_route(seed):
    D = DisplayDatum.random(seed, 2, 2, 2, 1)
    a = lau_dual_adjoint(D)
    z = lau_dual_zink(adjoint_semidisplay(D))
    for A in zoo(2).values():
        assert a.points(A) == z.points(A)


# -- economic presentation ------------------------------------------------------------


def test_economic_unit():
    E = economic_presentation(unit_semidisplay(2, 3))
    assert E.order() == 9
    y0, y1 = E.group.variables()
    assert set(E.group.equations) == {y0**3 - y0, y1**3 - y1}


def test_economic_no_t_part():
    S = random_semidisplay(1, 2, 2, 2, 0)
    E = economic_presentation(S)
    assert E.group.nvars == 0 and E.order() == 1
    assert lau_dual_zink(S).order() == 1


@pytest.mark.parametrize("seed", range(10))
def test_economic_matches_zink(seed):
    S = random_semidisplay(seed, 2, 2, 2, 1)
    z, e = lau_dual_zink(S), economic_presentation(S)
    assert z.order() == e.order()
    for A in zoo(2).values():
        pz = z.points(A)
        proj = sorted({pt[:2] for pt in pz})
        assert len(proj) == len(pz)
        assert proj == e.points(A)


# -- elimination ------------------------------------------------------------------------


def test_elimination_ordinary_and_supersingular():
    E = eliminate_to_g1(lau_dual_adjoint(DisplayDatum.identity(2, 1, 2, 1)))
    (y,) = E.group.variables()
    assert E.group.equations == (y**2 + y,)
    assert E.elimination["eliminated"] == ["eta11_0", "eta22_0", "eta21_0"]
    E = eliminate_to_g1(lau_dual_adjoint(DisplayDatum.antidiagonal(2, 1, 2, 1)))
    (y,) = E.group.variables()
    assert E.group.equations == (y**2,)


@pytest.mark.parametrize("seed", range(20))
def test_elimination_preserves_order(seed):
    case = [(2, 1, 1, 2), (2, 1, 2, 2), (3, 1, 1, 2), (3, 2, 1, 3)][seed % 4]
    d, k, n, p = case
    P = lau_dual_adjoint(DisplayDatum.random(seed, p, n, d, k))
    E = eliminate_to_g1(P)
    assert E.order() == P.order()
    assert E.group.nvars == k * (d - k) * n


def test_elimination_requires_adjoint_provenance():
    S = unit_semidisplay(1, 2)
    with pytest.raises(DomainMismatch):
        eliminate_to_g1(lau_dual_zink(S))


def test_elimination_failure_is_reported():
    D = DisplayDatum.identity(2, 1, 2, 1)
    F = prime_field(2)
    y = MPoly.gens(F, 4)
    G = EqGroupPresentation(2, [1] * 4, [y[0] ** 2 + y[0], y[1] ** 2, y[2], y[3]],
                            ["eta12_0", "eta11_0", "eta22_0", "eta21_0"])
    with pytest.raises(EliminationFailed):
        eliminate_to_g1(ZinkDualPresentation(G, "adjoint-route", D, []))


# -- routes ---------------------------------------------------------------------------


@pytest.mark.parametrize("case", [(2, 1, 1, 2), (2, 1, 2, 2), (3, 2, 1, 3)])
def test_route_agreement(case):
    d, k, n, p = case
    out = compare_routes(DisplayDatum.random(11, p, n, d, k))
    assert out["agree"], out
    assert len(set(out["orders"].values())) == 1


# -- truncated Zink complex -----------------------------------------------------------------


def test_zink_complex_unit():
    A = zoo_algebra(2, "eps2")
    r = zink_complex_truncated(unit_semidisplay(1, 2), A, 3)
    assert (r.kernel_size, r.coker_size, r.stabilized) == (1, 2, True)
    assert r.coker_size == len(grouplike_points(lau_dual_zink(unit_semidisplay(1, 2)).group, A))


def test_zink_complex_alpha():
    A = zoo_algebra(2, "eps2")
    S = Semidisplay(2, 1, 1, 1, [[0]])
    r = zink_complex_truncated(S, A, 3)
    assert (r.kernel_size, r.coker_size, r.stabilized) == (1, 2, True)


@pytest.mark.parametrize("p", [2, 3])
def test_zink_complex_over_field(p):
    for seed in range(3):
        S = random_semidisplay(seed, p, 1, 2, 1)
        assert zink_complex_truncated(S, prime_field(p), 3).coker_size == 1


def test_hat_subgroup_square_zero():
    A = zoo_algebra(2, "eps2")
    assert len(hat_subgroup(A, 1, 4)) == 16


@pytest.mark.parametrize("seed", range(8))
def test_zink_complex_matches_dual_points(seed):
    rng = random.Random(seed)
    p, n, d = [(2, 1, 2), (2, 2, 2), (3, 1, 1), (2, 1, 1)][seed % 4]
    S = random_semidisplay(seed, p, n, d, rng.randint(1, d))
    A = zoo_algebra(p, "eps2")
    r = zink_complex_truncated(S, A, 2)
    assert r.kernel_size == 1 and r.stabilized
    assert r.coker_size == len(grouplike_points(lau_dual_zink(S).group, A))


# -- BP pairs --------------------------------------------------------------------------------


def test_bp_identity():
    I = np.eye(2, dtype=np.int64)
    assert bp_member(BPPair(2, 2, 2, 1, I, I))


@pytest.mark.parametrize("c", [0, 1])
def test_bp_n1_upper_corner_free(c):
    I = np.eye(2, dtype=np.int64)
    g = I.copy()
    g[0, 1] = c
    assert bp_member(BPPair(2, 1, 2, 1, g, I))


def test_bp_n1_lower_corner_forced():
    I = np.eye(2, dtype=np.int64)
    g = I.copy()
    g[1, 0] = 1
    assert not bp_member(BPPair(2, 1, 2, 1, g, I))


@given(st.integers(0, 10**6), st.sampled_from([(2, 1, 1, 2), (2, 1, 2, 2), (3, 1, 2, 3), (3, 2, 3, 2)]))
@settings(max_examples=40, deadline=None)
def test_bp_samples_are_members(seed, case):
    d, k, n, p = case
    pair = bp_sample(seed, p, d, k, n)
    assert bp_member(pair)
    assert json.loads(json.dumps(pair.to_json()))["seed"] == seed


# -- equivariance ---------------------------------------------------------------------------------


def test_equivariance_identity_pair():
    D = DisplayDatum.random(0, 2, 2, 2, 1)
    I = np.eye(2, dtype=np.int64)
    assert equivariance_check(D, BPPair(2, 2, 2, 1, I, I))["equivariant"]


@pytest.mark.parametrize("seed", range(5))
def test_equivariance_ordinary(seed):
    D = DisplayDatum.identity(2, 1, 2, 1)
    pair = bp_sample(seed, 2, 2, 1, 1)
    assert equivariance_check(D, pair)["equivariant"]
    assert lau_dual_adjoint(bp_act(D, pair)).order() == 2


def test_lower_corner_h_is_a_member_at_n1():
    # g_21 = p F(h_21) vanishes in W_1, so h_21 is unconstrained
    h = np.array([[1, 0], [1, 1]])
    pair = BPPair(2, 1, 2, 1, np.eye(2, dtype=np.int64), h)
    assert bp_member(pair)
    assert equivariance_check(DisplayDatum.random(100, 2, 1, 2, 1), pair)["equivariant"]


def test_equivariance_negative_controls_fail():
    from wittdisp.semidisplay import random_gl

    fails = 0
    for seed in range(6):
        D = DisplayDatum.random(100 + seed, 2, 1, 2, 1)
        h = random_gl(random.Random(seed), 2, 2, 1)
        pair = BPPair(2, 1, 2, 1, np.eye(2, dtype=np.int64), h)
        fails += not equivariance_check(D, pair)["equivariant"]
    assert fails == 6


def test_transport_direction_is_h():
    D = DisplayDatum.random(205, 3, 1, 3, 2)
    pair = bp_sample(1005, 3, 3, 2, 1)
    assert equivariance_check(D, pair, direction="h")["equivariant"]
    assert not equivariance_check(D, pair, direction="h_inverse")["equivariant"]


# -- analysis ---------------------------------------------------------------------------------------


def test_analyze_ordinary():
    an = analyze_lau(DisplayDatum.identity(2, 1, 2, 1))
    assert an.report.order_exponent == 1
    assert an.lie_dim == 1
    assert an.tangent_dim_dual == 0
    assert an.passed


def test_analyze_length_two():
    an = analyze_lau(DisplayDatum.identity(2, 2, 2, 1))
    assert an.report.order_exponent == 2
    assert an.report.n_cosmooth and an.report.n_cosmooth_rank == 1
    assert an.passed


def test_analyze_rank_two():
    an = analyze_lau(DisplayDatum.random(3, 3, 1, 3, 2))
    assert an.report.order_exponent == 2 and an.lie_dim == 2
    assert an.passed
    json.dumps(an.to_json())


@pytest.mark.parametrize("p", [2, 3])
def test_hasse_dichotomy_exhaustive(p):
    for entries in itertools.product(range(p), repeat=4):
        U = np.array(entries).reshape(2, 2)
        if (U[0, 0] * U[1, 1] - U[0, 1] * U[1, 0]) % p == 0:
            continue
        G = eliminate_to_g1(lau_dual_adjoint(DisplayDatum(p, 1, 2, 1, U))).group
        assert G.order() == p
        assert G.lie_dim() == (0 if U[0, 0] % p else 1)


def test_lie_pair_requires_n1():
    with pytest.raises(DomainMismatch):
        lie_pair_check(DisplayDatum.identity(2, 2, 2, 1))


@pytest.mark.parametrize("seed", range(6))
def test_lie_pair_matches_tensor(seed):
    D = DisplayDatum.random(seed, 2, 1, 3, 1)
    assert lie_pair_check(D)["equal"]
