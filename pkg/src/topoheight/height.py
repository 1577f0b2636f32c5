"""Topological height pairing, its ambiguity group, the identities relating it
to intersection numbers, and monodromy of crossing families."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Sequence

from .complex import DUAL, PRIMAL, Chain, integrate, intersect
from .hodge import HodgeContext, PeriodBases, period_bases


class IdentityError(AssertionError):
    """An identity that must hold exactly failed; ``value`` is the offender."""

    def __init__(self, message: str, value=None):
        super().__init__(message)
        self.value = value


def _mod(x: Fraction, q: Fraction) -> Fraction:
    return x - q * ((x / q).numerator // (x / q).denominator)


@dataclass(frozen=True)
class HeightValue:
    """A rational number modulo (1/q)Z, where (1/q)Z = G_Sigma + Z."""

    raw: Fraction
    q: int = 1

    @property
    def modulus(self) -> Fraction:
        return Fraction(1, self.q)

    @property
    def canonical(self) -> Fraction:
        return _mod(self.raw, self.modulus)

    def same_class(self, other: "HeightValue") -> bool:
        if self.q != other.q:
            return False
        return ((self.raw - other.raw) * self.q).denominator == 1

    def contains(self, delta: Fraction) -> bool:
        """Is delta in the ambiguity group?"""
        return (Fraction(delta) * self.q).denominator == 1

    def __neg__(self) -> "HeightValue":
        return HeightValue(-self.raw, self.q)


def _ambiguity_q(periods: Sequence[Fraction]) -> int:
    q = 1
    for p in periods:
        q = lcm(q, Fraction(p).denominator)
    return q


def ambiguity_lattice(sigma: Chain, ctx: HodgeContext, bases: PeriodBases | None = None,
                      omega: Chain | None = None) -> Fraction:
    """Generator 1/q of G_Sigma + Z, G_Sigma the periods of omega_Sigma."""
    X = ctx.X
    om = omega if omega is not None else ctx.omega_form(sigma)
    k1 = sigma.degree + 1
    bases = bases or period_bases(X, k1 if sigma.side == PRIMAL else X.dim - k1)
    other = bases.dual if sigma.side == PRIMAL else bases.primal.representatives
    return Fraction(1, _ambiguity_q([integrate(b, om) for b in other]))


def check_disjoint(sigma: Chain, sigma_prime: Chain) -> None:
    """Raise if the dual blocks of Sigma' meet the closed primal cells of Sigma."""
    if sigma.side == sigma_prime.side:
        raise ValueError("expected chains on opposite sides")
    p, d = (sigma, sigma_prime) if sigma.side == PRIMAL else (sigma_prime, sigma)
    X = p.complex
    prim = [set(X.cells[p.degree][i]) for i in p.support()]
    dd = X.dim - d.degree
    for j in d.support():
        tau = set(X.cells[dd][j])
        if any(tau <= s for s in prim):
            raise ValueError("supports of Sigma and Sigma' overlap")


def height(sigma: Chain, gamma_prime: Chain, ctx: HodgeContext,
           bases: PeriodBases | None = None, omega: Chain | None = None) -> HeightValue:
    """(Sigma . Sigma') = integral of omega_Sigma over Gamma', with dSigma' = Gamma'."""
    if sigma.side == gamma_prime.side:
        raise ValueError("Sigma and Gamma' must live on opposite sides")
    if gamma_prime.degree != sigma.degree + 1 or sigma.degree + 1 + gamma_prime.degree != ctx.X.dim:
        raise ValueError("degrees of Sigma and Gamma' do not fit")
    sigma_prime = gamma_prime.boundary()
    check_disjoint(sigma, sigma_prime)
    om = omega if omega is not None else ctx.omega_form(sigma)
    mod = ambiguity_lattice(sigma, ctx, bases, om)
    return HeightValue(integrate(gamma_prime, om), mod.denominator)


def _as_int(x: Fraction, what: str) -> int:
    if x.denominator != 1:
        raise IdentityError(f"{what} is not an integer: {x}", x)
    return int(x)


def zee_check(sigma: Chain, gamma: Chain, theta_prime: Chain, ctx: HodgeContext,
              omega: Chain | None = None) -> int:
    """Gamma . Theta' = -int_{Theta'} omega_Sigma + int_Gamma h(Theta'), exactly."""
    if gamma.boundary() != sigma:
        raise ValueError("boundary of Gamma differs from Sigma")
    if not theta_prime.is_cycle():
        raise ValueError("Theta' is not a cycle")
    om = omega if omega is not None else ctx.omega_form(sigma)
    rhs = -integrate(theta_prime, om) + integrate(gamma, ctx.harmonic(theta_prime))
    value = _as_int(rhs, "right side of the identity")
    lhs = intersect(gamma, theta_prime)
    if lhs != rhs:
        raise IdentityError(f"intersection {lhs} differs from {rhs}", rhs)
    return value


def zee_prime_terms(sigma, gamma, sigma_prime, gamma_prime, ctx: HodgeContext,
                    omega=None, omega_prime=None) -> tuple[Fraction, Fraction, Fraction]:
    """(int_Gamma omega_Sigma', int_Gamma' omega_Sigma, int_Gamma h(Gamma'))."""
    om = omega if omega is not None else ctx.omega_form(sigma)
    omp = omega_prime if omega_prime is not None else ctx.omega_form(sigma_prime)
    return (integrate(gamma, omp), integrate(gamma_prime, om),
            integrate(gamma, ctx.harmonic(gamma_prime)))


def zee_prime_check(sigma: Chain, gamma: Chain, sigma_prime: Chain, gamma_prime: Chain,
                    ctx: HodgeContext, omega=None, omega_prime=None) -> int:
    """Gamma . Gamma' = int_Gamma omega_Sigma' - int_Gamma' omega_Sigma + int_Gamma h(Gamma')."""
    if gamma.boundary() != sigma or gamma_prime.boundary() != sigma_prime:
        raise ValueError("boundaries of Gamma, Gamma' differ from Sigma, Sigma'")
    check_disjoint(sigma, sigma_prime)
    a, b, c = zee_prime_terms(sigma, gamma, sigma_prime, gamma_prime, ctx, omega, omega_prime)
    rhs = a - b + c
    value = _as_int(rhs, "right side of the symmetry relation")
    lhs = intersect(gamma, gamma_prime)
    if lhs != rhs:
        raise IdentityError(f"intersection {lhs} differs from {rhs}", rhs)
    return value


@dataclass
class CrossingFamily:
    """Closed discrete path of cycles Sigma'_0, ..., Sigma'_N = Sigma'_0 with
    chains H_i bounding Sigma'_{i+1} - Sigma'_i."""

    cycles: list[Chain]
    steps: list[Chain]

    def __post_init__(self):
        if len(self.cycles) != len(self.steps) + 1:
            raise ValueError("need one step per consecutive pair of cycles")
        if self.cycles[0] != self.cycles[-1]:
            raise ValueError("family is not closed")
        for i, h in enumerate(self.steps):
            if h.boundary() != self.cycles[i + 1] - self.cycles[i]:
                raise ValueError(f"step {i} does not bound the cycle difference")

    @classmethod
    def from_steps(cls, start: Chain, steps: Sequence[Chain]) -> "CrossingFamily":
        cycles = [start]
        for h in steps:
            cycles.append(cycles[-1] + h.boundary())
        return cls(cycles, list(steps))

    def swept(self) -> Chain:
        total = Chain.zero(self.steps[0].complex, self.steps[0].degree, self.steps[0].side)
        for h in self.steps:
            total = total + h
        return total


@dataclass
class SweepResult:
    """Lifted heights f_0..f_N, the jump f_N - f_0, and the crossing count of
    the swept cycle with Gamma (sign fixed so that jump == crossing whenever
    the swept cycle is null-homologous)."""

    trace: list[Fraction]
    jump: Fraction
    crossing: int
    harmonic_defect: Fraction


def monodromy_sweep(sigma: Chain, gamma: Chain, family: CrossingFamily,
                    ctx: HodgeContext, omega: Chain | None = None) -> SweepResult:
    """Continuous lift f_{i+1} = f_i + int_{H_i} omega_Sigma around a closed family.

    The jump is the integral of omega_Sigma over the swept cycle Z, which is
    -Gamma.Z + int_Gamma h(Z); for null-homologous Z it is an integer.
    """
    if gamma.boundary() != sigma:
        raise ValueError("boundary of Gamma differs from Sigma")
    om = omega if omega is not None else ctx.omega_form(sigma)
    start = family.cycles[0]
    f = [Fraction(0) if start.is_zero() else height(sigma, _bounding(start), ctx, omega=om).raw]
    for h in family.steps:
        f.append(f[-1] + integrate(h, om))
    Z = family.swept()
    jump = f[-1] - f[0]
    crossing = -intersect(gamma, Z)
    defect = integrate(gamma, ctx.harmonic(Z))
    if jump != crossing + defect:
        raise IdentityError(f"jump {jump} differs from {crossing} + {defect}", jump)
    if defect == 0:
        _as_int(jump, "monodromy jump")
    return SweepResult(f, jump, int(crossing), defect)


def _bounding(cycle: Chain) -> Chain:
    from .homology import trivialize
    return trivialize(cycle)
