"""Rigidified truncated semidisplays and displays over F_p in matrix form.

Over the base F_p one has W_n(F_p) = Z/p^n with F = id and V = p, so a
rigidified object is an integer matrix.  Columns for the T-basis are images
under F and live in Z/p^n; columns for the L-basis are images under F_1 and
live in Z/p^{n-1}.  Test algebras only enter later, through points of the
group schemes attached to these matrices.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (AxiomViolation, BaseMismatch, DomainMismatch, InvalidFrameElement, NotUnit,
                     WeightOutOfRange)
from .exactalg import Ring, TestAlgebra, is_prime, prime_field
from .grpscheme import PLinearPair
from .wittcore import WittVec


# ---------------------------------------------------------------------------
# integer matrices modulo prime powers


def as_matrix(rows, q: int | None = None) -> np.ndarray:
    M = np.array(rows, dtype=np.int64)
    if M.ndim == 1 and M.size == 0:
        M = M.reshape(0, 0)
    return M % q if q else M


def inverse_mod(M: np.ndarray, p: int, n: int) -> np.ndarray:
    """Inverse over Z/p^n by Gauss-Jordan elimination with unit pivots."""
    q = p**n
    d = M.shape[0]
    A = np.concatenate([M % q, np.eye(d, dtype=np.int64)], axis=1)
    for col in range(d):
        piv = next((r for r in range(col, d) if A[r, col] % p), None)
        if piv is None:
            raise NotUnit("matrix is not invertible modulo p")
        A[[col, piv]] = A[[piv, col]]
        inv = pow(int(A[col, col]), -1, q)
        A[col] = (A[col] * inv) % q
        for r in range(d):
            if r != col and A[r, col]:
                A[r] = (A[r] - A[r, col] * A[col]) % q
    return A[:, d:] % q


def random_gl(rng: random.Random, d: int, p: int, n: int) -> np.ndarray:
    """Draw an invertible matrix mod p, then lift each entry by random higher digits."""
    while True:
        base = np.array([[rng.randrange(p) for _ in range(d)] for _ in range(d)], dtype=np.int64)
        try:
            inverse_mod(base, p, 1)
            break
        except NotUnit:
            continue
    lift = np.array([[rng.randrange(p ** (n - 1)) for _ in range(d)] for _ in range(d)], dtype=np.int64)
    return (base + p * lift) % (p**n)


def _rows(M: np.ndarray) -> list:
    return [[int(x) for x in row] for row in M]


# ---------------------------------------------------------------------------
# display data and cocharacters


@dataclass(frozen=True)
class WeightedCocharacter:
    """mu(lambda) = diag(lambda (d' times), 1 (d - d' times))."""

    d: int
    dprime: int

    def __post_init__(self):
        if not 0 <= self.dprime <= self.d:
            raise DomainMismatch("need 0 <= d' <= d")

    def weight(self, i: int) -> int:
        return 1 if i < self.dprime else 0

    def grade(self, i: int, j: int) -> int:
        """Weight of the matrix unit E_ij under the adjoint action."""
        return self.weight(i) - self.weight(j)


class DisplayDatum:
    """U in GL(d, W_n(F_p)) together with a certified inverse."""

    def __init__(self, p: int, n: int, d: int, dprime: int, U, seed: int | None = None):
        if not is_prime(p):
            raise DomainMismatch("p must be prime")
        if not 0 <= dprime <= d or n < 1:
            raise DomainMismatch("invalid type")
        self.p, self.n, self.d, self.dprime = p, n, d, dprime
        self.q = p**n
        self.U = as_matrix(U, self.q).reshape(d, d)
        self.Uinv = inverse_mod(self.U, p, n)
        if not np.array_equal((self.U @ self.Uinv) % self.q, np.eye(d, dtype=np.int64)):
            raise NotUnit("inverse certificate failed")
        self.seed = seed

    @property
    def base(self) -> TestAlgebra:
        return prime_field(self.p)

    @property
    def mu(self) -> WeightedCocharacter:
        return WeightedCocharacter(self.d, self.dprime)

    @classmethod
    def identity(cls, p, n, d, dprime):
        return cls(p, n, d, dprime, np.eye(d, dtype=np.int64))

    @classmethod
    def antidiagonal(cls, p, n, d, dprime):
        return cls(p, n, d, dprime, np.eye(d, dtype=np.int64)[::-1])

    @classmethod
    def random(cls, seed: int, p: int, n: int, d: int, dprime: int):
        rng = random.Random(seed)
        return cls(p, n, d, dprime, random_gl(rng, d, p, n), seed=seed)

    def blocks(self, M: np.ndarray | None = None):
        M = self.U if M is None else M
        k = self.dprime
        return M[:k, :k], M[:k, k:], M[k:, :k], M[k:, k:]

    def hasse_block(self) -> np.ndarray:
        return self.U[: self.dprime, : self.dprime] % self.p

    def __eq__(self, other):
        return (isinstance(other, DisplayDatum) and (self.p, self.n, self.d, self.dprime)
                == (other.p, other.n, other.d, other.dprime) and np.array_equal(self.U, other.U))

    def to_json(self) -> dict:
        out = {"p": self.p, "n": self.n, "d": self.d, "dprime": self.dprime,
               "U": _rows(self.U), "U_inverse": _rows(self.Uinv)}
        if self.seed is not None:
            out["seed"] = self.seed
        return out

    @classmethod
    def from_json(cls, data: dict):
        return cls(data["p"], data["n"], data["d"], data["dprime"], data["U"], data.get("seed"))

    def __repr__(self):
        return f"DisplayDatum(p={self.p}, n={self.n}, d={self.d}, d'={self.dprime}, U={_rows(self.U)})"


# ---------------------------------------------------------------------------
# semidisplays


class Semidisplay:
    """A rigidified n-truncated semidisplay over F_p.

    ``X`` is the block matrix: column j < d' is F(t_j) mod p^n, column
    j >= d' is F_1(l_j) mod p^{n-1}.  ``F_full``, when given, is an
    independently computed matrix of F on all of P; ``check_axioms``
    compares it with p * F_1 on L.
    """

    def __init__(self, p: int, n: int, d: int, dprime: int, X, F_full=None,
                 labels: Sequence | None = None, provenance: str = ""):
        if not 0 <= dprime <= d or n < 1:
            raise DomainMismatch("invalid type")
        self.p, self.n, self.d, self.dprime = p, n, d, dprime
        X = as_matrix(X).reshape(d, d)
        X = X.copy()
        X[:, :dprime] %= p**n
        X[:, dprime:] %= p ** (n - 1)
        self.X = X
        self.F_full = None if F_full is None else as_matrix(F_full, p**n).reshape(d, d)
        self.labels = list(labels) if labels is not None else list(range(d))
        self.provenance = provenance

    @property
    def base(self) -> TestAlgebra:
        return prime_field(self.p)

    @property
    def rank_T(self) -> int:
        return self.dprime

    def blocks(self):
        k = self.dprime
        X = self.X
        return X[:k, :k], X[:k, k:], X[k:, :k], X[k:, k:]

    def F_matrix(self) -> np.ndarray:
        """F on P: the T-columns, and p * F_1 on the L-basis."""
        q = self.p**self.n
        F = self.X.copy()
        F[:, self.dprime:] = (self.p * F[:, self.dprime:]) % q
        return F % q

    def F1_matrix(self) -> np.ndarray:
        """F_1 on the L-basis modulo p^{n-1}."""
        return self.X[:, self.dprime:] % (self.p ** (self.n - 1))

    def weak_pair(self) -> PLinearPair:
        """P/Q with the p-linear map induced by F (the n = 1 weak image)."""
        k = self.dprime
        c = self.X[:k, :k] % self.p
        return PLinearPair(self.p, tuple(tuple(int(x) for x in row) for row in c))

    def check_axioms(self) -> dict:
        """Symbolic checks on basis elements; every value should be True."""
        p, n, k = self.p, self.n, self.dprime
        q, q1 = p**n, p ** (n - 1)
        F = self.F_full if self.F_full is not None else self.F_matrix()
        out = {}
        # F = p F_1 on the L-basis
        out["F_is_pF1_on_L"] = bool(np.array_equal(F[:, k:] % q, (p * self.X[:, k:]) % q))
        # F_1(V(a) t) = a * Fbar(t): with a = 1 this reads F_1(p t) = F(t) mod p^{n-1};
        # the identity p * F_1(p t) = F(p t) then holds in Z/p^n
        out["F1_on_IT"] = bool(np.array_equal((p * (F[:, :k] % q1)) % q, (p * F[:, :k]) % q))
        # F_1 and F kill J_n Q: V^{n-1}(1) = p^{n-1}
        jn = p ** (n - 1)
        out["F1_kills_JQ"] = bool(np.all((jn * self.X[:, k:]) % q1 == 0))
        out["F_kills_JQ"] = bool(np.all((jn * F[:, k:]) % q == 0) and np.all((jn * p * F[:, :k]) % q == 0))
        return out

    def is_valid(self) -> bool:
        return all(self.check_axioms().values())

    def permuted(self, perm: Sequence[int]) -> "Semidisplay":
        """Relabel the basis: new basis vector i is old basis vector perm[i]."""
        P = np.array(perm)
        F = None if self.F_full is None else self.F_full[np.ix_(P, P)]
        return Semidisplay(self.p, self.n, self.d, self.dprime, self.X[np.ix_(P, P)], F,
                           [self.labels[i] for i in perm], self.provenance)

    def same_as(self, other: "Semidisplay") -> bool:
        return ((self.p, self.n, self.d, self.dprime) == (other.p, other.n, other.d, other.dprime)
                and np.array_equal(self.X, other.X))

    def to_json(self) -> dict:
        return {"p": self.p, "n": self.n, "d": self.d, "dprime": self.dprime,
                "base": self.base.descriptor(), "X": _rows(self.X),
                "labels": [list(x) if isinstance(x, tuple) else x for x in self.labels],
                "provenance": self.provenance}

    @classmethod
    def from_json(cls, data: dict):
        labels = [tuple(x) if isinstance(x, list) else x for x in data.get("labels", [])] or None
        return cls(data["p"], data["n"], data["d"], data["dprime"], data["X"], labels=labels,
                   provenance=data.get("provenance", ""))

    def __repr__(self):
        return (f"Semidisplay(p={self.p}, n={self.n}, d={self.d}, d'={self.dprime}, "
                f"X={_rows(self.X)})")


def random_semidisplay(seed: int, p: int, n: int, d: int, dprime: int) -> Semidisplay:
    """An arbitrary (not necessarily invertible) block matrix of the right shape."""
    rng = random.Random(seed)
    X = [[rng.randrange(p**n) if j < dprime else rng.randrange(p ** (n - 1)) for j in range(d)]
         for _ in range(d)]
    return Semidisplay(p, n, d, dprime, X, provenance=f"random:{seed}")


def semidisplay_of_display(D: DisplayDatum) -> Semidisplay:
    return Semidisplay(D.p, D.n, D.d, D.dprime, D.U, F_full=_display_F(D), provenance="display")


def _display_F(D: DisplayDatum) -> np.ndarray:
    F = D.U.copy()
    F[:, D.dprime:] *= D.p
    return F % D.q


def unit_semidisplay(n: int, base: TestAlgebra | int) -> Semidisplay:
    """(W_n, I_n, F, V^{-1}): F(1) = 1, and P/Q has rank one."""
    p = base if isinstance(base, int) else base.p
    return Semidisplay(p, n, 1, 1, [[1]], provenance="unit")


def tensor_semidisplays(S: Semidisplay, S2: Semidisplay) -> Semidisplay:
    """Tensor product with the normal decomposition T(x)T' + (T(x)L' + L(x)T' + L(x)L').

    Labels are pairs (a, b) of basis indices of the two factors, so the change
    of basis to the plain Kronecker ordering is recorded.
    """
    if S.p != S2.p:
        raise BaseMismatch("semidisplays over different bases")
    if S.n != S2.n:
        raise DomainMismatch("semidisplays of different truncation levels")
    p, n = S.p, S.n
    q, q1 = p**n, p ** (n - 1)
    k, k2 = S.dprime, S2.dprime
    TT = [(a, b) for a in range(k) for b in range(k2)]
    TL = [(a, b) for a in range(k) for b in range(k2, S2.d)]
    LT = [(a, b) for a in range(k, S.d) for b in range(k2)]
    LL = [(a, b) for a in range(k, S.d) for b in range(k2, S2.d)]
    basis = TT + TL + LT + LL
    index = {ab: i for i, ab in enumerate(basis)}
    F, F2 = S.F_matrix(), S2.F_matrix()
    X1, X2 = S.X, S2.X
    D = len(basis)
    X = np.zeros((D, D), dtype=np.int64)

    def put(col, v, w, mod):
        for a in range(S.d):
            for b in range(S2.d):
                X[index[(a, b)], col] = (int(v[a]) * int(w[b])) % mod

    for col, (a, b) in enumerate(basis):
        if (a, b) in TT or col < len(TT):
            put(col, F[:, a], F2[:, b], q)
        elif a < k:          # T (x) L': F (x) F'_1
            put(col, F[:, a], X2[:, b], q1)
        elif b < k2:         # L (x) T': F_1 (x) F'
            put(col, X1[:, a], F2[:, b], q1)
        else:                # L (x) L': p (F_1 (x) F'_1)
            put(col, X1[:, a], (p * X2[:, b]), q1)
    Ffull = np.zeros((D, D), dtype=np.int64)
    for col, (a, b) in enumerate(basis):
        for row, (c, e) in enumerate(basis):
            Ffull[row, col] = (int(F[c, a]) * int(F2[e, b])) % q
    labels = [(S.labels[a], S2.labels[b]) for a, b in basis]
    return Semidisplay(p, n, D, len(TT), X, F_full=Ffull, labels=labels, provenance="tensor")


def tensor_basis_change(S: Semidisplay, S2: Semidisplay) -> list:
    """Position in the plain Kronecker ordering of each basis vector of the tensor product."""
    T = tensor_semidisplays(S, S2)
    pos = {(a, b): a * S2.d + b for a in range(S.d) for b in range(S2.d)}
    lab = {(S.labels[a], S2.labels[b]): (a, b) for a in range(S.d) for b in range(S2.d)}
    return [pos[lab[x]] for x in T.labels]


def dual_display(D: DisplayDatum) -> DisplayDatum:
    """The display M^*{-1}, of type (d, d - d').

    Dualising complements the weights, so the dual basis of the old L part is
    the new T part; the structure map is the inverse transpose of U, written
    in that reordered basis.
    """
    d, k = D.d, D.dprime
    perm = list(range(k, d)) + list(range(k))
    inv_t = D.Uinv.T
    P = np.array(perm)
    return DisplayDatum(D.p, D.n, d, d - k, inv_t[np.ix_(P, P)])


# ---------------------------------------------------------------------------
# free graded modules


@dataclass
class GradedModuleDatum:
    """sum_k S{-i_k} with i_k in {0, 1}, and f : M^sigma -> M^tau as a matrix."""

    p: int
    n: int
    weights: tuple
    f: np.ndarray
    display: bool = False

    def __post_init__(self):
        self.weights = tuple(int(w) for w in self.weights)
        if any(w not in (0, 1) for w in self.weights):
            raise WeightOutOfRange("weights must lie in {0, 1}")
        if list(self.weights) != sorted(self.weights, reverse=True):
            raise WeightOutOfRange("weights must be sorted in descending order")
        self.f = as_matrix(self.f, self.p**self.n).reshape(len(self.weights), len(self.weights))
        if self.display:
            inverse_mod(self.f, self.p, self.n)


def graded_of_display(D: DisplayDatum) -> GradedModuleDatum:
    """Weight 1 for the L-basis (listed first), weight 0 for the T-basis."""
    perm = list(range(D.dprime, D.d)) + list(range(D.dprime))
    P = np.array(perm)
    weights = [1] * (D.d - D.dprime) + [0] * D.dprime
    return GradedModuleDatum(D.p, D.n, tuple(weights), D.U[np.ix_(P, P)], display=True)


def semidisplay_of_graded(M: GradedModuleDatum) -> Semidisplay:
    """P = M_0 and Q = t M_1.

    A weight-0 summand S e contributes e to P and t S_1 e = I_n e to Q (a T-vector);
    a weight-1 summand contributes t e with t M_1 = M_0 (an L-vector).  Since
    sigma(t) = p, F(t e) = p f(e), and F_1(t e) = f(e) modulo J_n.
    """
    if all(w == 1 for w in M.weights) and M.weights:
        raise WeightOutOfRange("all weights 1: rejected under the weight normalization in use")
    T = [i for i, w in enumerate(M.weights) if w == 0]
    L = [i for i, w in enumerate(M.weights) if w == 1]
    perm = np.array(T + L)
    X = M.f[np.ix_(perm, perm)]
    F = X.copy()
    F[:, len(T):] *= M.p
    return Semidisplay(M.p, M.n, len(perm), len(T), X, F_full=F, provenance="graded")


def pi_a(weights: Sequence[int], a: int) -> tuple:
    """Truncation Pi_a on a free graded module: S{-i} with i > a becomes S{-a} via t^{i-a}.

    Returns (new weights, t-exponents of the transition maps).
    """
    if any(w < 0 for w in weights):
        raise WeightOutOfRange("weights must be nonnegative")
    new = tuple(min(w, a) for w in weights)
    trans = tuple(max(w - a, 0) for w in weights)
    return new, trans


def tensor_weights(w1: Sequence[int], w2: Sequence[int]) -> tuple:
    return tuple(a + b for a in w1 for b in w2)


# ---------------------------------------------------------------------------
# the adjoint semidisplay


def adjoint_basis(d: int, dprime: int) -> list:
    """Matrix units ordered g_1 (upper right), g_0 (upper left, lower right), g_{-1}."""
    g1 = [(i, j) for i in range(dprime) for j in range(dprime, d)]
    g0 = [(i, j) for i in range(dprime) for j in range(dprime)]
    g0 += [(i, j) for i in range(dprime, d) for j in range(dprime, d)]
    gm = [(i, j) for i in range(dprime, d) for j in range(dprime)]
    return g1 + g0 + gm


def adjoint_matrix(D: DisplayDatum, basis: Sequence | None = None) -> np.ndarray:
    """Matrix of Ad_U on gl(d) in the given basis of matrix units, mod p^n."""
    basis = basis or adjoint_basis(D.d, D.dprime)
    idx = {e: i for i, e in enumerate(basis)}
    N = len(basis)
    A = np.zeros((N, N), dtype=np.int64)
    for col, (i, j) in enumerate(basis):
        for k in range(D.d):
            for l in range(D.d):
                A[idx[(k, l)], col] = (int(D.U[k, i]) * int(D.Uinv[j, l])) % D.q
    return A


def adjoint_semidisplay(D: DisplayDatum, mu: WeightedCocharacter | None = None) -> Semidisplay:
    """P = W_n (x) gl(d), Q = W_n (x) g_{<=0} + I_n (x) g_1.

    Phi(1 (x) x) = p^{1-i} Ad_U(x) and Phi'(1 (x) x) = p^{-i} Ad_U(x) for
    x in g_i (i <= 0); Phi'(V(1) (x) x) = Ad_U(x) for x in g_1.
    """
    mu = mu or D.mu
    if (mu.d, mu.dprime) != (D.d, D.dprime):
        raise DomainMismatch("cocharacter does not match the display type")
    basis = adjoint_basis(D.d, D.dprime)
    Ad = adjoint_matrix(D, basis)
    p, q = D.p, D.q
    grades = [mu.grade(i, j) for i, j in basis]
    F = np.zeros_like(Ad)
    X = np.zeros_like(Ad)
    for col, g in enumerate(grades):
        F[:, col] = (p ** (1 - g) * Ad[:, col]) % q
        X[:, col] = Ad[:, col] if g == 1 else (p ** (-g) * Ad[:, col])
    r = D.dprime * (D.d - D.dprime)
    return Semidisplay(p, D.n, D.d * D.d, r, X, F_full=F, labels=basis, provenance="adjoint")


def adjoint_vs_tensor_permutation(D: DisplayDatum) -> list:
    """Recorded isomorphism: tensor basis e_a (x) e_b^t  <->  matrix unit E_{a, b'}.

    The dual display lists the duals of the old L-basis first, so dual index
    b corresponds to old index d' + b for b < d - d' and to b - (d - d') otherwise.
    Returns, for each adjoint basis vector, its position in the tensor basis.
    """
    S = semidisplay_of_display(D)
    St = semidisplay_of_display(dual_display(D))
    T = tensor_semidisplays(S, St)
    k, d = D.dprime, D.d

    def old(b):
        return k + b if b < d - k else b - (d - k)

    where = {(a, old(b)): i for i, (a, b) in enumerate(T.labels)}
    return [where[e] for e in adjoint_basis(d, k)]


# ---------------------------------------------------------------------------
# frames


class LauFrame:
    """The graded ring attached to A_0 --F--> A_1, V : A_1 -> A_0.

    Degree-i elements are pairs (x t^{-i}, y u^i), x in A_0, y in A_1, with
    y = pp^{-i} F(x) for i <= 0 and x = V(pp^{i-1} y) for i > 0, where
    pp = F(V(1)).  ``ops`` supplies add, mul, zero, one, eq and sample(rng).
    """

    def __init__(self, ops, F: Callable, V: Callable, checks: int = 40, seed: int = 0):
        self.ops = ops
        self.F = F
        self.V = V
        self.pp = F(V(ops.one))
        self._check(checks, seed)

    def _check(self, checks, seed):
        o = self.ops
        rng = random.Random(seed)
        for _ in range(checks):
            a, b = o.sample(rng), o.sample(rng)
            x = o.sample(rng)
            if not o.eq(self.F(o.add(a, b)), o.add(self.F(a), self.F(b))):
                raise AxiomViolation("F is not additive")
            if not o.eq(self.F(o.mul(a, b)), o.mul(self.F(a), self.F(b))):
                raise AxiomViolation("F is not multiplicative")
            if not o.eq(self.V(o.add(a, b)), o.add(self.V(a), self.V(b))):
                raise AxiomViolation("V is not additive")
            if not o.eq(o.mul(a, self.V(x)), self.V(o.mul(self.F(a), x))):
                raise AxiomViolation("a V(x) != V(F(a) x)")
            if not o.eq(self.F(self.V(x)), o.mul(self.pp, x)):
                raise AxiomViolation("F V != pp")
        if not o.eq(self.F(o.one), o.one):
            raise AxiomViolation("F(1) != 1")

    def _pp_pow(self, k):
        o = self.ops
        r = o.one
        for _ in range(k):
            r = o.mul(r, self.pp)
        return r

    def make(self, i: int, value) -> "FrameElement":
        """Element of degree i from its free coordinate (x if i <= 0, y if i > 0)."""
        o = self.ops
        if i <= 0:
            return FrameElement(self, i, value, o.mul(self._pp_pow(-i), self.F(value)))
        return FrameElement(self, i, self.V(o.mul(self._pp_pow(i - 1), value)), value)

    def from_pair(self, i: int, x, y) -> "FrameElement":
        e = self.make(i, x if i <= 0 else y)
        if not (self.ops.eq(e.x, x) and self.ops.eq(e.y, y)):
            raise InvalidFrameElement(f"pair violates the degree-{i} relation")
        return e

    def t(self):
        return self.make(-1, self.ops.one)

    def u(self):
        return self.make(1, self.ops.one)

    def component(self, i: int, elements) -> list:
        return [self.make(i, v) for v in elements]


@dataclass
class FrameElement:
    frame: LauFrame
    degree: int
    x: object  # t-coordinate, in A_0
    y: object  # u-coordinate, in A_1

    def __mul__(self, other: "FrameElement") -> "FrameElement":
        o = self.frame.ops
        return FrameElement(self.frame, self.degree + other.degree, o.mul(self.x, other.x), o.mul(self.y, other.y))

    def __add__(self, other: "FrameElement") -> "FrameElement":
        if self.degree != other.degree:
            raise DomainMismatch("frame addition is graded")
        o = self.frame.ops
        return FrameElement(self.frame, self.degree, o.add(self.x, other.x), o.add(self.y, other.y))

    def sigma(self):
        """u = 1 projection."""
        return self.y

    def tau(self):
        """t = 1 projection."""
        return self.x

    def __eq__(self, other):
        o = self.frame.ops
        return (isinstance(other, FrameElement) and self.degree == other.degree
                and o.eq(self.x, other.x) and o.eq(self.y, other.y))

    def is_valid(self) -> bool:
        free = self.x if self.degree <= 0 else self.y
        return self.frame.make(self.degree, free) == self


class WittOps:
    """Ring interface on W_n(A) for the frame."""

    def __init__(self, A: TestAlgebra, n: int):
        self.A, self.n, self.p = A, n, A.p
        self.zero = WittVec.zero(A.p, A, n)
        self.one = WittVec.one(A.p, A, n)

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def eq(self, a, b):
        return a == b

    def sample(self, rng):
        return WittVec(self.p, self.A, [rng.randrange(self.A.size) for _ in range(self.n)])

    def elements(self):
        for combo in itertools.product(range(self.A.size), repeat=self.n):
            yield WittVec(self.p, self.A, combo)


class ZeroOps:
    """The zero ring."""

    zero = one = 0

    def add(self, a, b):
        return 0

    def mul(self, a, b):
        return 0

    def eq(self, a, b):
        return True

    def sample(self, rng):
        return 0

    def elements(self):
        yield 0


def witt_frame(A: TestAlgebra, n: int, checks: int = 40) -> LauFrame:
    """The n-truncated Witt frame W_n(A)^+ (with pp = p)."""
    return LauFrame(WittOps(A, n), lambda a: a.frobenius(), lambda a: a.verschiebung(), checks)


def lau_frame_generic(ops, F: Callable, V: Callable, checks: int = 40) -> LauFrame:
    return LauFrame(ops, F, V, checks)


def frame_make(A: TestAlgebra, n: int, i: int, value: WittVec) -> FrameElement:
    return witt_frame(A, n, checks=0).make(i, value)


def frame_mul(a: FrameElement, b: FrameElement) -> FrameElement:
    return a * b


def frame_add(a: FrameElement, b: FrameElement) -> FrameElement:
    return a + b


def frame_sigma(e: FrameElement):
    return e.sigma()


def frame_tau(e: FrameElement):
    return e.tau()


# ---------------------------------------------------------------------------
# dimension audit


def krull_dim_of_equations(equations, nvars: int, p: int) -> int:
    from .exactalg import groebner, krull_dim

    return krull_dim(groebner(list(equations), nvars=nvars, p=p))


def _witt_block_vars(R, start, n):
    return [R.var(start + k) for k in range(n)]


def dimension_audit(d: int, dprime: int, n: int, p: int = 2) -> dict:
    """Affine dimensions of the rigidified schemes and their symmetry groups.

    Each scheme is written as equations in Witt coordinates over F_p and its
    Krull dimension is read off a Groebner basis.  Invertibility is an open
    condition and does not change dimensions.
    """
    from .exactalg import MPoly, PolyRing

    F = prime_field(p)
    k, l = dprime, d - dprime
    # sDisp_rig: W_n entries in the first d' columns, W_{n-1} in the others
    n_sd = d * k * n + d * l * (n - 1)
    sdisp = krull_dim_of_equations([], n_sd, p) if n_sd else 0
    # H_n: all W_n entries, block h_12 in I_n (0-th component zero)
    nv = d * d * n
    R = PolyRing(F, nv)

    def coord(i, j, c, base=0):
        return base + (i * d + j) * n + c

    h_eqs = [R.var(coord(i, j, 0)) for i in range(k) for j in range(k, d)]
    hdim = krull_dim_of_equations(h_eqs, nv, p)
    # GL(d, W_n): open in Mat(d, W_n)
    gl = krull_dim_of_equations([], nv, p)
    # BP_n: pairs (g, h) with g_ij = p^{i-j} F(h_ij) for j <= i and h_12 = V(g_12)
    R2 = PolyRing(F, 2 * nv)
    eqs = []

    def wv(base, i, j):
        return WittVec(p, R2, [R2.var(coord(i, j, c, base)) for c in range(n)])

    block = lambda i: 1 if i < k else 2  # noqa: E731
    for i in range(d):
        for j in range(d):
            g, h = wv(0, i, j), wv(nv, i, j)
            bi, bj = block(i), block(j)
            if bj <= bi:
                rhs = h.frobenius()
                for _ in range(bi - bj):
                    rhs = rhs.frobenius().verschiebung()  # p = V F in characteristic p
                eqs.extend(a - b for a, b in zip(g.entries, rhs.entries))
            else:
                rhs = g.verschiebung()
                eqs.extend(a - b for a, b in zip(h.entries, rhs.entries))
    eqs = [e for e in eqs if not e.is_zero()]
    bp = krull_dim_of_equations(eqs, 2 * nv, p)
    return {
        "d": d, "dprime": dprime, "n": n, "p": p,
        "sdisp_rig": sdisp, "H_n": hdim, "GL": gl, "BP_n": bp,
        "sdisp_stack": sdisp - hdim, "disp_stack": gl - bp,
    }
