import random

import pytest
from hypothesis import given, settings, strategies as st

from wittdisp.errors import BudgetExceeded, ConstantTermNonzero, NotDivisible
from wittdisp.exactalg import (INFINITE, MPoly, QQ, ZZ, TestAlgebra, TruncatedPolyAlgebra,
                               enumerate_points, exact_div, groebner, normal_form,
                               prime_field, quotient_dim, rank_mod_p, tangent_dim, zoo,
                               zoo_algebra)

from oracles import brute_points, sympy_quotient_dim


def zz(n):
    return MPoly.gens(ZZ, n)


def fp(p, n):
    return MPoly.gens(prime_field(p), n)


# -- exact division ---------------------------------------------------------


def test_exact_div_halves_coefficients():
    x, y = zz(2)
    assert exact_div(2 * x + 4 * y, 2) == x + 2 * y


def test_exact_div_rejects_odd_coefficient():
    (x,) = zz(1)
    with pytest.raises(NotDivisible):
        exact_div(x**2 + x, 2)


def test_exact_div_cross_term():
    x, y = zz(2)
    assert exact_div((x + y) ** 2 - x**2 - y**2, 2) == x * y


def test_exact_div_zero_divisor_rejected():
    (x,) = zz(1)
    with pytest.raises(ZeroDivisionError):
        exact_div(x, 0)


int_polys = st.dictionaries(
    st.tuples(st.integers(0, 3), st.integers(0, 3)), st.integers(-50, 50), max_size=6)


@given(int_polys, st.integers(-7, 7).filter(bool))
def test_exact_div_inverts_scaling(terms, k):
    f = MPoly(ZZ, 2, terms)
    assert exact_div(f * k, k) == f


# -- polynomial arithmetic -------------------------------------------------


@given(int_polys, int_polys, int_polys)
@settings(max_examples=60)
def test_mpoly_ring_laws(a, b, c):
    f, g, h = (MPoly(ZZ, 2, t) for t in (a, b, c))
    assert (f + g) * h == f * h + g * h
    assert (f * g) * h == f * (g * h)
    assert f - f == MPoly.zero(ZZ, 2)


def test_rational_coefficients_stay_reduced():
    (x,) = MPoly.gens(QQ, 1)
    f = x.scale(QQ.from_int(2) / 4)
    c = f.terms[(1,)]
    assert (c.numerator, c.denominator) == (1, 2)


def test_substitute_and_evaluate_agree():
    F = prime_field(3)
    x, y = fp(3, 2)
    f = x**2 * y + 2 * y + 1
    g = f.substitute([x + y, x * y])
    for a in range(3):
        for b in range(3):
            assert g.evaluate((a, b)) == f.evaluate(((a + b) % 3, (a * b) % 3))
    assert F.p == 3


# -- test algebras -----------------------------------------------------------


@pytest.mark.parametrize("p", [2, 3, 5])
def test_zoo_sizes_and_axioms(p):
    algebras = zoo(p)
    assert len(algebras) == 5
    for A in algebras.values():
        assert A.size == p**A.m
        elems = list(A.elements())
        rng = random.Random(p)
        for _ in range(50):
            a, b, c = (rng.choice(elems) for _ in range(3))
            assert A.mul(A.mul(a, b), c) == A.mul(a, A.mul(b, c))
            assert A.mul(a, A.add(b, c)) == A.add(A.mul(a, b), A.mul(a, c))
            assert A.mul(a, A.one) == a


def test_zoo_nilpotency_data():
    A = zoo_algebra(2, "eps3")
    e = A.basis_element(1)
    assert A.nilpotency_of(e) == 3
    assert A.nil_index == 3
    assert zoo_algebra(3, "epsdelta").nil_index == 2
    assert zoo_algebra(5, "Fp2").nilpotents() == [0]


def test_noncommutative_constants_rejected():
    mult = [[[1, 0], [0, 1]], [[0, 1], [1, 0]]]
    mult[0][1] = [0, 0]
    with pytest.raises(ValueError):
        TestAlgebra(2, mult, [1, 0], name="bad")


def test_fp2_is_a_field():
    for p in (2, 3, 5):
        A = zoo_algebra(p, "Fp2")
        assert all(A.is_unit(a) for a in A.elements() if a)


# -- Groebner bases ---------------------------------------------------------


@pytest.mark.parametrize("p", [2, 3, 5])
def test_artin_schreier_quotient(p):
    (y,) = fp(p, 1)
    gb = groebner([y**p - y])
    assert list(gb.polys) == [y**p - y]
    assert quotient_dim(gb) == p


def test_empty_ideal_is_infinite():
    gb = groebner([], nvars=1, p=2)
    assert gb.polys == ()
    assert quotient_dim(gb) == INFINITE


def test_origin_quotient():
    (y,) = fp(2, 1)
    assert quotient_dim(groebner([y])) == 1


@pytest.mark.parametrize("p", [2, 3, 5])
def test_two_step_quotient(p):
    y1, y2 = fp(p, 2)
    assert quotient_dim(groebner([y1**p, y2**p - y1])) == p * p


def test_unit_ideal_has_no_standard_monomials():
    x, y = fp(3, 2)
    gb = groebner([x - 1, x])
    assert gb.is_unit_ideal()
    assert quotient_dim(gb) == 0


def test_budget_is_enforced():
    x, y, z = fp(2, 3)
    with pytest.raises(BudgetExceeded):
        groebner([x**3 + y * z, y**3 + x * z + 1, z**3 + x * y], budget=1)


def random_fp_poly(rng, p, nvars, nterms, maxdeg):
    terms = {}
    for _ in range(nterms):
        e = tuple(rng.randrange(maxdeg + 1) for _ in range(nvars))
        terms[e] = rng.randrange(1, p)
    return MPoly(prime_field(p), nvars, terms)


@pytest.mark.parametrize("seed", range(12))
def test_groebner_matches_sympy(seed):
    rng = random.Random(seed)
    p = rng.choice([2, 3, 5])
    nv = rng.choice([2, 3])
    gens = [MPoly.var(prime_field(p), nv, i, rng.choice([2, 3])) for i in range(nv)]
    gens += [random_fp_poly(rng, p, nv, 3, 2) for _ in range(2)]
    gb = groebner(gens)
    assert quotient_dim(gb) == sympy_quotient_dim(gens, nv, p)
    # every generator reduces to zero, and the basis is autoreduced
    for g in gens:
        assert normal_form(g, gb).is_zero()
    for i, g in enumerate(gb.polys):
        others = [h for j, h in enumerate(gb.polys) if j != i]
        if others:
            sub = type(gb)(gb.p, gb.nvars, gb.order, tuple(others))
            lm = g.leading_term(gb.order)[0]
            assert lm in normal_form(MPoly.monomial(g.ring, nv, lm), sub).terms


@pytest.mark.parametrize("seed", range(8))
def test_quotient_dim_independent_of_generators(seed):
    rng = random.Random(100 + seed)
    p = 3
    x, y = fp(p, 2)
    base = [x**3 - y, y**3 + x * y, random_fp_poly(rng, p, 2, 2, 2)]
    gb = groebner(base)
    # regenerate the same ideal by invertible recombination and multiples
    a, b = random_fp_poly(rng, p, 2, 2, 1), random_fp_poly(rng, p, 2, 2, 1)
    regen = [base[0] + a * base[1], base[1], base[2] + b * base[0], base[0] * base[1]]
    gb2 = groebner(regen)
    assert quotient_dim(gb2) == quotient_dim(gb)
    assert gb2.polys == gb.polys


@given(st.integers(0, 10**6), st.integers(1, 2))
@settings(max_examples=40, deadline=None)
def test_normal_form_linear_and_idempotent(seed, c):
    rng = random.Random(seed)
    p = 3
    x, y = fp(p, 2)
    gb = groebner([x**3 - y, y**3 - x * y])
    f = random_fp_poly(rng, p, 2, 4, 4)
    g = random_fp_poly(rng, p, 2, 4, 4)
    nf = normal_form(f, gb)
    assert normal_form(nf, gb) == nf
    assert normal_form(f * c + g, gb) == normal_form(f, gb) * c + normal_form(g, gb)


# -- linearisation ------------------------------------------------------------


def test_tangent_dims():
    p = 3
    (y,) = fp(p, 1)
    y1, y2 = fp(p, 2)
    assert tangent_dim([y**p - y]) == 0
    assert tangent_dim([y**p]) == 1
    assert tangent_dim([y1**p, y2**p - y1]) == 1


def test_tangent_dim_requires_origin():
    (y,) = fp(2, 1)
    with pytest.raises(ConstantTermNonzero):
        tangent_dim([y + 1])


def test_rank_mod_p():
    assert rank_mod_p([[1, 2], [2, 4]], 3) == 1
    assert rank_mod_p([[1, 2], [2, 4]], 5) == 1
    assert rank_mod_p([[1, 1], [1, 2]], 2) == 2


# -- points ------------------------------------------------------------------


@pytest.mark.parametrize("p", [2, 3, 5])
def test_points_artin_schreier(p):
    (y,) = fp(p, 1)
    assert enumerate_points([y**p - y], prime_field(p)) == [(a,) for a in range(p)]
    assert enumerate_points([y**p], prime_field(p)) == [(0,)]


def test_points_square_zero():
    A = zoo_algebra(2, "eps2")
    (y,) = fp(2, 1)
    pts = enumerate_points([y**2], A)
    assert [A.format(a) for (a,) in pts] == ["0", "e"]


def test_point_budget():
    A = zoo_algebra(3, "eps3")
    ys = fp(3, 3)
    with pytest.raises(BudgetExceeded):
        enumerate_points([ys[0] ** 9], A, budget=100)


@pytest.mark.parametrize("seed", range(10))
def test_points_match_substitution_search(seed):
    rng = random.Random(seed)
    p = rng.choice([2, 3])
    A = rng.choice(list(zoo(p).values()))
    arity = rng.choice([1, 2]) if A.size > 9 else rng.choice([1, 2, 3])
    eqs = [random_fp_poly(rng, p, arity, 2, p) for _ in range(rng.choice([1, 2]))]
    eqs = [f - MPoly.const(f.ring, arity, f.constant_term()) for f in eqs]
    assert enumerate_points(eqs, A, arity) == brute_points(eqs, A, arity)


def test_truncated_poly_algebra():
    A = zoo_algebra(2, "eps2")
    B = TruncatedPolyAlgebra(A, [4])
    y = B.var(0)
    assert B.is_zero(B.pow(y, 4))
    assert not B.is_zero(B.pow(y, 3))
    assert B.nilpotency_of(y) == 4
