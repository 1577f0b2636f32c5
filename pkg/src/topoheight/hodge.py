"""Weighted discrete Hodge theory on chains: adjoints, Laplacians, harmonic
projection, Green operator, the form omega_Sigma and Abel-Jacobi points.

Chains double as forms.  A weight W_k(c) > 0 on each k-cell defines the inner
product <a, b> = sum W a b; the adjoint of the boundary is
del^+ = W_k^{-1} del^T W_{k-1}.  Dual-side weights are the reciprocals of the
primal weights on the same cells, which is what makes the primal and dual
Hodge decompositions orthogonal to each other under the intersection pairing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import lcm
from typing import Mapping, Sequence

import numpy as np
from flint import fmpq, fmpq_mat, fmpz_mat

from .complex import (DUAL, PRIMAL, Chain, SimplicialComplex, boundary_columns,
                      integrate, kronecker_intersection, n_cells, other_side)
from .homology import HomologyBasis, NotTrivialError, homology_basis

# solves above this size go through a fresh solve instead of a cached inverse
_INVERSE_LIMIT = 400


def _q(x: Fraction) -> fmpq:
    return fmpq(x.numerator, x.denominator)


def _f(x: fmpq) -> Fraction:
    return Fraction(int(x.p), int(x.q))


def _col(vec: Sequence[Fraction]) -> fmpq_mat:
    return fmpq_mat(len(vec), 1, [_q(Fraction(v)) for v in vec])


def _uncol(M: fmpq_mat) -> list[Fraction]:
    return [_f(M[i, 0]) for i in range(M.nrows())]


def _dot(a: Sequence, b: Sequence) -> Fraction:
    return sum((x * y for x, y in zip(a, b) if x and y), Fraction(0))


@dataclass(frozen=True)
class MetricWeights:
    """Positive rational weight per primal cell and degree.

    The weight of a dual j-cell is the reciprocal of the weight of the primal
    (m-j)-cell it is dual to.
    """

    primal: Mapping[int, tuple[Fraction, ...]]
    label: str = "unit"

    def __post_init__(self):
        for k, ws in self.primal.items():
            for w in ws:
                if not Fraction(w) > 0:
                    raise ValueError(f"non-positive weight {w} in degree {k}")

    @classmethod
    def unit(cls, X: SimplicialComplex) -> "MetricWeights":
        return cls({k: (Fraction(1),) * X.n_cells(k) for k in range(X.dim + 1)}, "unit")

    @classmethod
    def default(cls, X: SimplicialComplex) -> "MetricWeights":
        """The complex's shipped weights when present, else unit weights."""
        dw = getattr(X, "default_weights", None)
        if not dw:
            return cls.unit(X)
        ws = {k: tuple(Fraction(w) for w in dw.get(k, [1] * X.n_cells(k)))
              for k in range(X.dim + 1)}
        return cls(ws, "default")

    @classmethod
    def from_lists(cls, X: SimplicialComplex, lists: Mapping[int, Sequence],
                   label: str = "file") -> "MetricWeights":
        ws = {}
        for k in range(X.dim + 1):
            vals = lists.get(k)
            if vals is None:
                ws[k] = (Fraction(1),) * X.n_cells(k)
                continue
            if len(vals) != X.n_cells(k):
                raise ValueError(f"degree {k}: {len(vals)} weights for {X.n_cells(k)} cells")
            ws[k] = tuple(Fraction(v) for v in vals)
        return cls(ws, label)

    def get(self, m: int, k: int, side: str) -> tuple[Fraction, ...]:
        if side == PRIMAL:
            return tuple(self.primal[k])
        return tuple(1 / w for w in self.primal[m - k])

    def key(self) -> tuple:
        return tuple((k, tuple(self.primal[k])) for k in sorted(self.primal))

    def scaled(self, factors: Mapping[int, Fraction]) -> "MetricWeights":
        return MetricWeights({k: tuple(w * Fraction(factors.get(k, 1)) for w in ws)
                              for k, ws in self.primal.items()}, self.label + "*")


@dataclass
class _DegreeData:
    n: int
    weights: tuple[Fraction, ...]
    kernel: list[list[Fraction]]          # basis of harmonic chains
    gram_inv: fmpq_mat | None             # (B^T W B)^{-1}
    free: list[int]                       # coordinates kept in the grounded solve
    reduced: fmpq_mat | None              # (W Delta) restricted to free coordinates
    reduced_inv: fmpq_mat | None = None


class HodgeContext:
    """Hodge data of one complex and metric, built lazily per (degree, side)."""

    def __init__(self, X: SimplicialComplex, weights: MetricWeights | None = None):
        self.X = X
        self.weights = weights if weights is not None else MetricWeights.default(X)
        for k in range(X.dim + 1):
            if len(self.weights.primal[k]) != X.n_cells(k):
                raise ValueError(f"weights for degree {k} do not match the complex")
        self._data: dict[tuple[int, str], _DegreeData] = {}

    # basic operators ---------------------------------------------------

    def w(self, k: int, side: str) -> tuple[Fraction, ...]:
        if not 0 <= k <= self.X.dim:
            return ()
        return self.weights.get(self.X.dim, k, side)

    def inner(self, a: Chain, b: Chain) -> Fraction:
        a._check(b)
        W = self.w(a.degree, a.side)
        return sum((W[i] * c * b.coeffs[i] for i, c in a.coeffs.items() if i in b.coeffs),
                   Fraction(0))

    def _bd_vec(self, vec, k, side):
        """del_k on a coefficient vector."""
        out = [Fraction(0)] * n_cells(self.X, k - 1, side)
        for j, col in enumerate(boundary_columns(self.X, k, side)):
            c = vec[j]
            if c:
                for i, s in col:
                    out[i] += s * c
        return out

    def _adj_vec(self, vec, k, side):
        """del_k^+ : C_{k-1} -> C_k on a coefficient vector."""
        Wk, Wl = self.w(k, side), self.w(k - 1, side)
        out = []
        for j, col in enumerate(boundary_columns(self.X, k, side)):
            out.append(sum((s * Wl[i] * vec[i] for i, s in col if vec[i]), Fraction(0)) / Wk[j])
        return out

    def boundary(self, c: Chain) -> Chain:
        return c.boundary()

    def adjoint(self, c: Chain) -> Chain:
        """del^+ c, raising the degree by one."""
        k = c.degree + 1
        if k > self.X.dim:
            raise ValueError("no cells above the top degree")
        return Chain.from_vector(self.X, k, c.side, self._adj_vec(c.to_vector(), k, c.side))

    def laplacian(self, c: Chain) -> Chain:
        k, side, m = c.degree, c.side, self.X.dim
        v = c.to_vector()
        out = [Fraction(0)] * len(v)
        if k + 1 <= m:
            t = self._adj_vec(v, k + 1, side)
            out = [a + b for a, b in zip(out, self._bd_vec(t, k + 1, side))]
        if k >= 1:
            t = self._bd_vec(v, k, side)
            out = [a + b for a, b in zip(out, self._adj_vec(t, k, side))]
        return Chain.from_vector(self.X, k, side, out)

    # cached per-degree data ---------------------------------------------

    def _sym_laplacian(self, k: int, side: str) -> dict[tuple[int, int], Fraction]:
        """Entries of W_k Delta_k (a symmetric matrix), sparse."""
        m = self.X.dim
        S: dict[tuple[int, int], Fraction] = {}
        Wk = self.w(k, side)
        if k + 1 <= m:
            Wu = self.w(k + 1, side)
            for j, col in enumerate(boundary_columns(self.X, k + 1, side)):
                for a, s in col:
                    for b, t in col:
                        S[a, b] = S.get((a, b), 0) + Wk[a] * Wk[b] * s * t / Wu[j]
        if k >= 1:
            Wl = self.w(k - 1, side)
            cols = boundary_columns(self.X, k, side)
            rows: dict[int, list[tuple[int, int]]] = {}
            for j, col in enumerate(cols):
                for i, s in col:
                    rows.setdefault(i, []).append((j, s))
            for i, entries in rows.items():
                for a, s in entries:
                    for b, t in entries:
                        S[a, b] = S.get((a, b), 0) + Wl[i] * s * t
        return S

    def _degree(self, k: int, side: str) -> _DegreeData:
        key = (k, side)
        if key in self._data:
            return self._data[key]
        n = n_cells(self.X, k, side)
        W = self.w(k, side)
        S = self._sym_laplacian(k, side)
        den = 1
        for v in S.values():
            den = lcm(den, Fraction(v).denominator)
        Z = fmpz_mat(n, n)
        for (a, b), v in S.items():
            if v:
                Z[a, b] = int(v * den)
        K, nullity = Z.nullspace()
        kernel = [[Fraction(int(K[i, j])) for i in range(n)] for j in range(nullity)]
        gram_inv = None
        grounded: set[int] = set()
        if kernel:
            B = fmpq_mat(n, nullity, [_q(kernel[j][i]) for i in range(n) for j in range(nullity)])
            Wd = fmpq_mat(n, n)
            for i in range(n):
                Wd[i, i] = _q(W[i])
            gram_inv = (B.transpose() * Wd * B).inv()
            R, _ = B.transpose().rref()
            for r in range(nullity):
                for c in range(n):
                    if R[r, c] != 0:
                        grounded.add(c)
                        break
        free = [i for i in range(n) if i not in grounded]
        pos = {i: r for r, i in enumerate(free)}
        red = fmpq_mat(len(free), len(free))
        for (a, b), v in S.items():
            if v and a in pos and b in pos:
                red[pos[a], pos[b]] = _q(Fraction(v))
        red_inv = red.inv() if 0 < len(free) <= _INVERSE_LIMIT else None
        data = _DegreeData(n, W, kernel, gram_inv, free, red, red_inv)
        self._data[key] = data
        return data

    def harmonic_basis(self, k: int, side: str = PRIMAL) -> list[Chain]:
        return [Chain.from_vector(self.X, k, side, v) for v in self._degree(k, side).kernel]

    def kernel_dimension(self, k: int, side: str = PRIMAL) -> int:
        return len(self._degree(k, side).kernel)

    # projections ----------------------------------------------------------

    def _harmonic_vec(self, vec, k, side):
        d = self._degree(k, side)
        if not d.kernel:
            return [Fraction(0)] * d.n
        W = d.weights
        btw = [_dot(b, [W[i] * vec[i] for i in range(d.n)]) for b in d.kernel]
        coef = _uncol(d.gram_inv * _col(btw))
        out = [Fraction(0)] * d.n
        for c, b in zip(coef, d.kernel):
            if c:
                for i, x in enumerate(b):
                    if x:
                        out[i] += c * x
        return out

    def _green_vec(self, vec, k, side):
        d = self._degree(k, side)
        if not d.free:
            return [Fraction(0)] * d.n
        h = self._harmonic_vec(vec, k, side)
        rhs = [d.weights[i] * (vec[i] - h[i]) for i in d.free]
        if d.reduced_inv is not None:
            sol = _uncol(d.reduced_inv * _col(rhs))
        else:
            sol = _uncol(d.reduced.solve(_col(rhs)))
        x = [Fraction(0)] * d.n
        for i, s in zip(d.free, sol):
            x[i] = s
        hx = self._harmonic_vec(x, k, side)
        return [a - b for a, b in zip(x, hx)]

    def _check_chain(self, c: Chain) -> None:
        if c.complex is not self.X:
            raise ValueError("chain lives on a different complex")

    def harmonic(self, c: Chain) -> Chain:
        """Orthogonal projection onto the harmonic chains."""
        self._check_chain(c)
        return Chain.from_vector(self.X, c.degree, c.side,
                                 self._harmonic_vec(c.to_vector(), c.degree, c.side))

    def green(self, c: Chain) -> Chain:
        """G c: the solution of Delta x = c - h(c) orthogonal to harmonics."""
        self._check_chain(c)
        return Chain.from_vector(self.X, c.degree, c.side,
                                 self._green_vec(c.to_vector(), c.degree, c.side))

    def decomposition(self, c: Chain) -> tuple[Chain, Chain, Chain]:
        """(del del^+ G c, del^+ del G c, h c), summing to c."""
        self._check_chain(c)
        k, side, m = c.degree, c.side, self.X.dim
        g = self._green_vec(c.to_vector(), k, side)
        zero = [Fraction(0)] * len(g)
        exact = self._bd_vec(self._adj_vec(g, k + 1, side), k + 1, side) if k < m else zero
        coexact = self._adj_vec(self._bd_vec(g, k, side), k, side) if k >= 1 else zero
        mk = lambda v: Chain.from_vector(self.X, k, side, v)
        return mk(exact), mk(coexact), self.harmonic(c)

    def omega_form(self, sigma: Chain, gamma: Chain | None = None) -> Chain:
        """omega_Sigma = del^+ G Sigma, the co-exact chain with boundary Sigma."""
        self._check_chain(sigma)
        if not sigma.is_cycle():
            raise ValueError("Sigma is not a cycle")
        k, side = sigma.degree, sigma.side
        if k + 1 > self.X.dim:
            raise ValueError("Sigma has top degree")
        v = sigma.to_vector()
        if any(self._harmonic_vec(v, k, side)):
            raise NotTrivialError("Sigma has a nonzero harmonic part")
        if gamma is not None and gamma.boundary() != sigma:
            raise ValueError("boundary of Gamma differs from Sigma")
        om = Chain.from_vector(self.X, k + 1, side,
                               self._adj_vec(self._green_vec(v, k, side), k + 1, side))
        if om.boundary() != sigma:
            raise AssertionError("boundary of omega differs from Sigma")
        return om


_CONTEXTS: dict = {}


def hodge_context(X: SimplicialComplex, weights: MetricWeights | str | None = None) -> HodgeContext:
    """Cached HodgeContext; weights may be 'unit', 'default' or a MetricWeights."""
    if weights is None or weights == "default":
        weights = MetricWeights.default(X)
    elif weights == "unit":
        weights = MetricWeights.unit(X)
    key = (id(X), weights.key())
    hit = _CONTEXTS.get(key)
    if hit is not None and hit.X is X:
        return hit
    ctx = HodgeContext(X, weights)
    _CONTEXTS[key] = ctx
    return ctx


# Abel-Jacobi points ----------------------------------------------------------


@dataclass
class PeriodBases:
    """An integral basis a_j of H_{k+1} on one side and the dual-side basis b_j
    with kronecker(a_j, b_i) = delta_ij (primal a, dual b)."""

    primal: HomologyBasis
    dual: list[Chain]

    @property
    def rank(self) -> int:
        return self.primal.rank

    def change(self, A: Sequence[Sequence[int]]) -> "PeriodBases":
        """Primal basis A a, dual basis A^{-T} b (keeps the pairing the identity)."""
        new_primal = self.primal.change_basis(A)
        M = fmpz_mat([[int(x) for x in row] for row in A])
        Minv = M.inv()
        r = self.rank
        dual = []
        for i in range(r):
            c = Chain.zero(self.primal.complex, self.dual[0].degree, DUAL)
            for j in range(r):
                x = int(Minv[j, i])
                if x:
                    c = c + self.dual[j] * x
            dual.append(c)
        return PeriodBases(new_primal, dual)

    def dual_coordinates(self, cycle: Chain) -> tuple[Fraction, ...]:
        """Class of a dual cycle in the basis b."""
        return tuple(kronecker_intersection(a, cycle) for a in self.primal.representatives)

    def primal_coordinates(self, cycle: Chain) -> tuple[Fraction, ...]:
        return self.primal.coordinates(cycle)


def period_bases(X: SimplicialComplex, degree: int | None = None) -> PeriodBases:
    k1 = X.dim // 2 if degree is None else degree
    A = homology_basis(X, k1, PRIMAL)
    D = homology_basis(X, X.dim - k1, DUAL)
    r = A.rank
    if D.rank != r:
        raise AssertionError("primal and dual ranks differ")
    if r == 0:
        return PeriodBases(A, [])
    P = fmpz_mat([[int(kronecker_intersection(a, d)) for d in D.representatives]
                  for a in A.representatives])
    if abs(int(P.det())) != 1:
        raise AssertionError("intersection pairing is not unimodular")
    Pinv = P.inv()
    dual = []
    for i in range(r):
        c = Chain.zero(X, X.dim - k1, DUAL)
        for j in range(r):
            x = int(Pinv[j, i])
            if x:
                c = c + D.representatives[j] * x
        dual.append(c)
    return PeriodBases(A, dual)


def _mod1(x: Fraction) -> Fraction:
    return x - (x.numerator // x.denominator)


@dataclass(frozen=True)
class AJPoint:
    """Point of J(X) (kind 'alpha') or J(X)^dual (kind 'beta'), coordinates mod 1."""

    coords: tuple[Fraction, ...]
    kind: str
    side: str
    raw: tuple[Fraction, ...] = field(compare=False, default=())

    @classmethod
    def from_raw(cls, raw: Sequence[Fraction], kind: str, side: str) -> "AJPoint":
        raw = tuple(Fraction(x) for x in raw)
        return cls(tuple(_mod1(x) for x in raw), kind, side, raw)


def _basis_for(bases: PeriodBases, side: str) -> tuple[list[Chain], list[Chain]]:
    """(cycles on `side`, cycles on the other side) of the period bases."""
    if side == PRIMAL:
        return bases.primal.representatives, bases.dual
    return bases.dual, bases.primal.representatives


def aj_image(sigma: Chain, gamma: Chain, ctx: HodgeContext,
             bases: PeriodBases | None = None) -> AJPoint:
    """alpha_Sigma: the class of h(Gamma) in H_{k+1}(R)/H_{k+1}(Z)."""
    if gamma.boundary() != sigma:
        raise ValueError("boundary of Gamma differs from Sigma")
    bases = bases or period_bases(ctx.X, gamma.degree if gamma.side == PRIMAL
                                  else ctx.X.dim - gamma.degree)
    hg = ctx.harmonic(gamma)
    if gamma.side == PRIMAL:
        raw = bases.primal_coordinates(hg)
    else:
        raw = bases.dual_coordinates(hg)
    return AJPoint.from_raw(raw, "alpha", gamma.side)


def dual_aj_image(sigma: Chain, gamma: Chain | None, ctx: HodgeContext,
                  bases: PeriodBases | None = None, omega: Chain | None = None) -> AJPoint:
    """beta_Sigma: periods of omega_Sigma over the opposite-side integral basis."""
    if gamma is not None and gamma.boundary() != sigma:
        raise ValueError("boundary of Gamma differs from Sigma")
    k1 = sigma.degree + 1
    bases = bases or period_bases(ctx.X, k1 if sigma.side == PRIMAL else ctx.X.dim - k1)
    om = omega if omega is not None else ctx.omega_form(sigma)
    _, other = _basis_for(bases, sigma.side)
    raw = [integrate(b, om) for b in other]
    return AJPoint.from_raw(raw, "beta", sigma.side)


# float fast path --------------------------------------------------------------


class FloatHodge:
    """Double-precision mirror of HodgeContext for quick exploration."""

    def __init__(self, ctx: HodgeContext):
        self.ctx = ctx
        self._cache: dict = {}

    def _ops(self, k, side):
        key = (k, side)
        if key not in self._cache:
            X, m = self.ctx.X, self.ctx.X.dim
            n = n_cells(X, k, side)
            W = np.array([float(w) for w in self.ctx.w(k, side)])
            L = np.zeros((n, n))
            for (a, b), v in self.ctx._sym_laplacian(k, side).items():
                L[a, b] = float(v)
            L = L / W[:, None]  # Delta = W^{-1} (W Delta)
            B = np.array([[float(x) for x in b] for b in self.ctx._degree(k, side).kernel]).T
            if B.size:
                P = B @ np.linalg.solve(B.T @ (W[:, None] * B), B.T * W)
            else:
                P = np.zeros((n, n))
            G = np.linalg.inv(L + P) - P
            self._cache[key] = (P, G)
        return self._cache[key]

    def harmonic(self, vec, k, side=PRIMAL) -> np.ndarray:
        return self._ops(k, side)[0] @ np.asarray(vec, dtype=float)

    def green(self, vec, k, side=PRIMAL) -> np.ndarray:
        return self._ops(k, side)[1] @ np.asarray(vec, dtype=float)

    def omega(self, sigma: Chain) -> np.ndarray:
        k, side = sigma.degree, sigma.side
        g = self.green([float(x) for x in sigma.to_vector()], k, side)
        Wk = np.array([float(w) for w in self.ctx.w(k + 1, side)])
        Wl = np.array([float(w) for w in self.ctx.w(k, side)])
        out = np.zeros(len(Wk))
        for j, col in enumerate(boundary_columns(self.ctx.X, k + 1, side)):
            out[j] = sum(s * Wl[i] * g[i] for i, s in col) / Wk[j]
        return out
