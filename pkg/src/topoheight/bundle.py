"""Poincare circle bundle over J(X) x J(X)^dual, integral structures given by
period matrices, and the lift of (alpha_Sigma', beta_Sigma) by the height."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import floor
from typing import Sequence

from flint import fmpz_mat

from .complex import DUAL, PRIMAL, Chain, integrate
from .height import height
from .hodge import AJPoint, HodgeContext, PeriodBases, aj_image, dual_aj_image, period_bases

Vec = tuple[Fraction, ...]


def _vec(xs) -> Vec:
    return tuple(Fraction(x) for x in xs)


def _frac_part(x: Fraction) -> Fraction:
    return x - floor(x)


def _dot(a, b) -> Fraction:
    return sum((Fraction(x) * y for x, y in zip(a, b)), Fraction(0))


@dataclass(frozen=True)
class BundlePoint:
    """Representative (alpha, beta, r) of a point of the circle bundle.

    ``basis`` names the homology basis the coordinates refer to.
    """

    alpha: Vec
    beta: Vec
    r: Fraction
    basis: str = "reference"

    def __post_init__(self):
        if len(self.alpha) != len(self.beta):
            raise ValueError("alpha and beta have different lengths")

    @property
    def rank(self) -> int:
        return len(self.alpha)

    def canonical(self) -> "BundlePoint":
        """The representative with alpha, beta in [0,1) and r in [0,1)."""
        m = [-floor(a) for a in self.alpha]
        n = [-floor(b) for b in self.beta]
        p = act(m, n, self, reduce=False)
        return BundlePoint(p.alpha, p.beta, _frac_part(p.r), self.basis)

    def same_point(self, other: "BundlePoint") -> bool:
        return self.canonical() == other.canonical()

    def in_basis(self, A: Sequence[Sequence[int]], label: str = "reference") -> "BundlePoint":
        """Coordinates after moving from the basis A.a (dual A^{-T}.b) back to a."""
        M = fmpz_mat([[int(x) for x in row] for row in A])
        Minv = M.inv()
        r = self.rank
        alpha = tuple(sum((Fraction(int(Minv[i, j].p)) * self.alpha[j] for j in range(r)),
                          Fraction(0)) for i in range(r))
        beta = tuple(sum((Fraction(int(A[j][i])) * self.beta[j] for j in range(r)), Fraction(0))
                     for i in range(r))
        return BundlePoint(alpha, beta, self.r, label)


def act(m: Sequence[int], n: Sequence[int], p: BundlePoint, reduce: bool = True) -> BundlePoint:
    """(alpha, beta, r) -> (alpha + m, beta + n, r + n(alpha) + beta(m))."""
    if len(m) != p.rank or len(n) != p.rank:
        raise ValueError("lattice vectors have the wrong length")
    if any(Fraction(x).denominator != 1 for x in list(m) + list(n)):
        raise ValueError("m and n must be integer vectors")
    r = p.r + _dot(n, p.alpha) + _dot(p.beta, m)
    out = BundlePoint(tuple(a + x for a, x in zip(p.alpha, m)),
                      tuple(b + x for b, x in zip(p.beta, n)), r, p.basis)
    return out.canonical() if reduce else out


def chern_pairing(rank: int) -> list[list[int]]:
    """Pairing of lattice directions e_i (alpha) and f_j (beta) under
    d_alpha d_beta of beta(alpha): the second difference of the defining
    function along (e_i, f_j)."""
    def phi(a, b):
        return _dot(b, a)
    zero = (0,) * rank
    out = []
    for i in range(rank):
        row = []
        for j in range(rank):
            e = tuple(int(t == i) for t in range(rank))
            f = tuple(int(t == j) for t in range(rank))
            row.append(int(phi(e, f) - phi(e, zero) - phi(zero, f) + phi(zero, zero)))
        out.append(row)
    return out


def action_cocycle(g: tuple[Sequence[int], Sequence[int]],
                   h: tuple[Sequence[int], Sequence[int]]) -> int:
    """Integer discrepancy of act(g) then act(h) versus act(g + h)."""
    (m, n), (m2, n2) = g, h
    return int(_dot(n2, m) + _dot(n, m2))


def commutator_pairing(rank: int) -> list[list[int]]:
    """Antisymmetrized action cocycle on the basis of Z^rank x Z^rank.

    This is the class that detects a nontrivial circle bundle on the torus; for
    the symmetric rule above it vanishes identically (see ``global_section``).
    """
    gens = []
    for i in range(rank):
        gens.append((tuple(int(t == i) for t in range(rank)), (0,) * rank))
    for j in range(rank):
        gens.append(((0,) * rank, tuple(int(t == j) for t in range(rank))))
    return [[action_cocycle(g, h) - action_cocycle(h, g) for h in gens] for g in gens]


def global_section(alpha: Sequence, beta: Sequence) -> BundlePoint:
    """The point (alpha, beta, alpha . beta), equivariant under ``act``."""
    return BundlePoint(_vec(alpha), _vec(beta), _dot(alpha, beta))


def holonomy(beta: Sequence, m: Sequence[int]) -> Fraction:
    """Fibre rotation picked up along the loop m in J(X) x {beta}."""
    p = BundlePoint((Fraction(0),) * len(beta), _vec(beta), Fraction(0))
    q = act(m, [0] * len(m), p, reduce=False)
    return _frac_part(q.r - p.r)


# integral structures ----------------------------------------------------------


class StructureError(ValueError):
    pass


@dataclass(frozen=True)
class IntegralStructure:
    """(r+2)x(r+2) period matrix; rows (link of Sigma, dual basis b, Gamma'),
    columns (omega_Sigma, harmonic h_j dual to b, point class of Sigma')."""

    matrix: tuple[tuple[Fraction, ...], ...]
    basis: str = "reference"

    def __post_init__(self):
        n = len(self.matrix)
        if n < 2 or any(len(row) != n for row in self.matrix):
            raise StructureError("period matrix must be square of size >= 2")
        r = n - 2
        M = self.matrix
        for j in range(1, n):
            if M[0][j] != 0:
                raise StructureError(f"entry (1,{j + 1}) must vanish")
        for i in range(1, r + 1):
            if M[i][n - 1] != 0:
                raise StructureError(f"entry ({i + 1},{n}) must vanish")
        for x in [M[0][0], M[n - 1][n - 1]] + [M[i][j] for i in range(1, r + 1)
                                               for j in range(1, r + 1)]:
            if Fraction(x).denominator != 1:
                raise StructureError(f"diagonal block entry {x} is not an integer")

    @property
    def rank(self) -> int:
        return len(self.matrix) - 2

    @property
    def middle(self) -> list[list[int]]:
        r = self.rank
        return [[int(self.matrix[i][j]) for j in range(1, r + 1)] for i in range(1, r + 1)]

    @property
    def height(self) -> Fraction:
        return self.matrix[-1][0]

    def compose(self, mu: Sequence[Sequence[int]]) -> "IntegralStructure":
        """The structure zeta o mu, i.e. rows transformed by mu."""
        n = len(self.matrix)
        out = tuple(tuple(sum((Fraction(mu[i][k]) * self.matrix[k][j] for k in range(n)),
                              Fraction(0)) for j in range(n)) for i in range(n))
        return IntegralStructure(out, self.basis)

    def grid(self) -> list[list[str]]:
        return [[_fmt(x) for x in row] for row in self.matrix]


def _fmt(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def link_of(sigma: Chain) -> tuple[Chain, int]:
    """Boundary of the dual block of the first positively weighted cell of Sigma."""
    X = sigma.complex
    pos = [i for i in sigma.support() if sigma.coeffs[i] > 0]
    if not pos:
        raise ValueError("Sigma has no positively weighted cell")
    i = pos[0]
    side = DUAL if sigma.side == PRIMAL else PRIMAL
    block = Chain.cell(X, X.dim - sigma.degree, i, side)
    return block.boundary(), i


def _reference_cell(sigma_prime: Chain) -> int | None:
    pos = [i for i in sigma_prime.support() if sigma_prime.coeffs[i] > 0]
    return pos[0] if pos else None


def _check_shape(c: Chain, name: str) -> None:
    """The period matrix sees one link class: Sigma must have connected support,
    which for 0-cycles means exactly two points."""
    if c.is_zero():
        return
    if c.degree == 0:
        if len(c.support()) != 2:
            raise StructureError(f"{name} must be supported on two points")
        return
    from .homology import components
    if len(components(c.complex, c.primal_cells())) != 1:
        raise StructureError(f"{name} must have connected support")


def harmonic_columns(ctx: HodgeContext, bases: PeriodBases) -> list[Chain]:
    """Harmonic chains h_j with int_{b_i} h_j = delta_ij."""
    k1 = bases.primal.degree
    sign = (-1) ** (k1 * (ctx.X.dim - k1))
    return [ctx.harmonic(a) * sign for a in bases.primal.representatives]


def integral_structure(sigma: Chain, gamma: Chain, sigma_prime: Chain, gamma_prime: Chain,
                       ctx: HodgeContext, bases: PeriodBases | None = None,
                       basis_label: str = "reference") -> IntegralStructure:
    if sigma.side != PRIMAL or gamma_prime.side != DUAL:
        raise ValueError("expected primal Sigma and dual Gamma'")
    if gamma.boundary() != sigma or gamma_prime.boundary() != sigma_prime:
        raise ValueError("boundaries of Gamma, Gamma' differ from Sigma, Sigma'")
    _check_shape(sigma, "Sigma")
    _check_shape(sigma_prime, "Sigma'")
    X = ctx.X
    bases = bases or period_bases(X, sigma.degree + 1)
    r = bases.rank
    om = ctx.omega_form(sigma) if not sigma.is_zero() else Chain.zero(X, sigma.degree + 1)
    hs = harmonic_columns(ctx, bases)
    ref = _reference_cell(sigma_prime)
    link = None if sigma.is_zero() else link_of(sigma)[0]

    def eps(row: Chain) -> Fraction:
        # point class of Sigma' evaluated on the boundary of a relative chain
        if ref is None:
            return Fraction(int(row is gamma_prime))
        return row.boundary().coeffs.get(ref, Fraction(0))

    M = []
    if link is None:
        M.append([Fraction(1)] + [Fraction(0)] * (r + 1))
    else:
        M.append([integrate(link, om)] + [integrate(link, h) for h in hs] + [eps(link)])
    for row in list(bases.dual) + [gamma_prime]:
        M.append([integrate(row, om)] + [integrate(row, h) for h in hs] + [eps(row)])
    return IntegralStructure(tuple(tuple(x) for x in M), basis_label)


def extract_alpha_beta(zeta: IntegralStructure) -> tuple[AJPoint, AJPoint]:
    """(alpha_zeta, beta_zeta), read off after normalizing the middle block."""
    r = zeta.rank
    M = zeta.middle
    col = [zeta.matrix[i][0] for i in range(1, r + 1)]
    row = [zeta.matrix[r + 1][j] for j in range(1, r + 1)]
    if r and M != [[int(i == j) for j in range(r)] for i in range(r)]:
        Mi = fmpz_mat(M).inv()
        to = lambda x: Fraction(int(x.p), int(x.q))
        col = [sum((to(Mi[i, k]) * col[k] for k in range(r)), Fraction(0)) for i in range(r)]
        row = [sum((row[k] * to(Mi[k, j]) for k in range(r)), Fraction(0)) for j in range(r)]
    alpha = AJPoint.from_raw(row, "alpha", DUAL)
    beta = AJPoint.from_raw(col, "beta", PRIMAL)
    return alpha, beta


def structure_canonical(zeta: IntegralStructure) -> tuple:
    """Normal form under row operations preserving the filtration and acting
    trivially on its graded pieces."""
    r = zeta.rank
    if r and zeta.middle != [[int(i == j) for j in range(r)] for i in range(r)]:
        raise StructureError("middle block must be the identity for canonicalization")
    P11, Pnn = zeta.matrix[0][0], zeta.matrix[-1][-1]
    beta = [zeta.matrix[i][0] for i in range(1, r + 1)]
    alpha = [zeta.matrix[r + 1][j] for j in range(1, r + 1)]
    h = zeta.height
    # subtracting c * (row 1) from middle row i shifts beta_i by -c * P11
    beta_c = [b - P11 * floor(b / P11) for b in beta]
    # subtracting v_j * (middle row j) from the last row shifts alpha_j by -v_j
    v = [floor(a) for a in alpha]
    alpha_c = [a - x for a, x in zip(alpha, v)]
    h_c = h - _dot(v, beta_c)
    h_c = h_c - P11 * floor(h_c / P11)
    return (P11, Pnn, tuple(alpha_c), tuple(beta_c), h_c)


def structures_equivalent(z1: IntegralStructure, z2: IntegralStructure) -> bool:
    if z1.rank != z2.rank:
        raise StructureError("structures of different rank")
    return structure_canonical(z1) == structure_canonical(z2)


def unipotent_mu(c: Sequence[int], v: Sequence[int], w: int) -> list[list[int]]:
    """Filtration-preserving row operation, identity on graded pieces."""
    r = len(c)
    n = r + 2
    mu = [[int(i == j) for j in range(n)] for i in range(n)]
    for i in range(r):
        mu[i + 1][0] = int(c[i])
        mu[n - 1][i + 1] = int(v[i])
    mu[n - 1][0] = int(w)
    return mu


def brute_force_equivalent(z1: IntegralStructure, z2: IntegralStructure, bound: int = 2) -> bool:
    """Search unipotent mu with entries in [-bound, bound] for z2 = z1 o mu."""
    r = z1.rank
    rng = range(-bound, bound + 1)
    for c in itertools.product(rng, repeat=r):
        for v in itertools.product(rng, repeat=r):
            for w in rng:
                if z1.compose(unipotent_mu(c, v, w)).matrix == z2.matrix:
                    return True
    return False


def lift(sigma: Chain, gamma: Chain, sigma_prime: Chain, gamma_prime: Chain,
         ctx: HodgeContext, bases: PeriodBases | None = None,
         basis_label: str = "reference") -> BundlePoint:
    """(alpha_Sigma', beta_Sigma, (Sigma . Sigma')) as a bundle point."""
    if gamma.boundary() != sigma or gamma_prime.boundary() != sigma_prime:
        raise ValueError("boundaries of Gamma, Gamma' differ from Sigma, Sigma'")
    X = ctx.X
    bases = bases or period_bases(X, sigma.degree + 1)
    r = bases.rank
    if sigma.is_zero():
        beta, h = (Fraction(0),) * r, Fraction(0)
    else:
        om = ctx.omega_form(sigma)
        beta = dual_aj_image(sigma, gamma, ctx, bases, omega=om).raw
        h = height(sigma, gamma_prime, ctx, bases, omega=om).raw
    alpha = aj_image(sigma_prime, gamma_prime, ctx, bases).raw if r else ()
    return BundlePoint(tuple(alpha), tuple(beta), h, basis_label)
