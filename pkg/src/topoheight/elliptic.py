"""Genus one: differentials of the third kind on C/(Z + tau Z) with real
periods, the holomorphic height pairing, holomorphy and Abel checks, and the
comparison with the discrete pairing on flat torus triangulations.

Normalization: psi = (1/2 pi i) (zeta(z - t) - zeta(z - t0) + c) dz, so a small
counterclockwise loop around t integrates to +1 and around t0 to -1.  The real
part of an integral of psi is then the topological height (jumping by integers
across poles) and e^{2 pi i int psi} has divisor {t} - {t0}.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Sequence

import mpmath as mp

DEFAULT_DPS = int(os.environ.get("TOPOHEIGHT_PRECISION", "30"))


class AnalyticError(ValueError):
    pass


def _c(x) -> mp.mpc:
    return mp.mpc(x)


@dataclass
class EllipticCurve:
    """C / (Z + tau Z) with Weierstrass data built from the theta function."""

    tau: complex
    dps: int = DEFAULT_DPS
    q: mp.mpc = field(init=False, repr=False)
    eta1: mp.mpc = field(init=False)
    eta2: mp.mpc = field(init=False)
    _t1p0: mp.mpc = field(init=False, repr=False)

    def __post_init__(self):
        mp.mp.dps = max(mp.mp.dps, self.dps)
        self.tau = _c(self.tau)
        if not mp.im(self.tau) > 0:
            raise AnalyticError("tau must lie in the upper half plane")
        if mp.im(self.tau) < 0.05:
            raise AnalyticError("lattice too degenerate (Im tau < 0.05)")
        self.q = mp.exp(1j * mp.pi * self.tau)
        self._t1p0 = mp.jtheta(1, 0, self.q, 1)
        t1ppp = mp.jtheta(1, 0, self.q, 3)
        self.eta1 = -mp.pi ** 2 * t1ppp / (3 * self._t1p0)
        self.eta2 = self.eta1 * self.tau - 2j * mp.pi

    @property
    def legendre_defect(self) -> float:
        """|eta1 tau - eta2 - 2 pi i| with eta2 measured from zeta directly."""
        z = mp.mpc("0.123", "0.0456")
        eta2 = self.zeta(z + self.tau) - self.zeta(z)
        return float(abs(self.eta1 * self.tau - eta2 - 2j * mp.pi))

    def theta(self, z) -> mp.mpc:
        return mp.jtheta(1, mp.pi * z, self.q)

    def zeta(self, z) -> mp.mpc:
        v = mp.pi * z
        return self.eta1 * z + mp.pi * mp.jtheta(1, v, self.q, 1) / mp.jtheta(1, v, self.q)

    def sigma(self, z) -> mp.mpc:
        return mp.exp(self.eta1 * z * z / 2) * self.theta(z) / (mp.pi * self._t1p0)

    def reduce(self, z) -> mp.mpc:
        """Representative of z in the fundamental parallelogram [0,1) + [0,1) tau."""
        z = _c(z)
        b = mp.floor(mp.im(z) / mp.im(self.tau))
        z -= b * self.tau
        return z - mp.floor(mp.re(z))

    def congruent(self, z, w, tol=1e-12) -> bool:
        d = self.reduce(_c(z) - _c(w))
        return min(abs(d), abs(d - 1), abs(d - self.tau), abs(d - 1 - self.tau)) < tol


@dataclass
class ThirdKindDifferential:
    """psi = (1/2 pi i)(zeta(z - t) - zeta(z - t0) + c) dz with real periods."""

    E: EllipticCurve
    t: mp.mpc
    t0: mp.mpc
    c: mp.mpc

    def coefficient(self, z) -> mp.mpc:
        E = self.E
        return (E.zeta(z - self.t) - E.zeta(z - self.t0) + self.c) / (2j * mp.pi)

    def periods(self) -> tuple[mp.mpc, mp.mpc]:
        """Integrals over the lattice generators 1 and tau, modulo integers."""
        E, d = self.E, self.t0 - self.t
        p1 = (E.eta1 * d + self.c) / (2j * mp.pi)
        p2 = (E.eta2 * d + self.c * E.tau) / (2j * mp.pi)
        return p1, p2

    def log_ratio(self, z) -> mp.mpc:
        """A branch of log(sigma(z - t)/sigma(z - t0)) + c z (the antiderivative
        of 2 pi i psi); continuation along paths is done by the caller."""
        E = self.E
        a, b = z - self.t, z - self.t0
        return (E.eta1 * (a * a - b * b) / 2 + mp.log(E.theta(a)) - mp.log(E.theta(b))
                + self.c * z)

    def section(self, z) -> mp.mpc:
        """e^{2 pi i int psi} up to a constant: sigma(z-t)/sigma(z-t0) e^{cz}."""
        E = self.E
        return E.sigma(z - self.t) / E.sigma(z - self.t0) * mp.exp(self.c * z)

    def poles(self) -> list[mp.mpc]:
        return [self.t, self.t0]


def third_kind(E: EllipticCurve, t, t0) -> ThirdKindDifferential:
    """The unique psi with real periods, loop integral +1 at t and -1 at t0."""
    t, t0 = _c(t), _c(t0)
    if E.congruent(t, t0):
        raise AnalyticError("t and t0 coincide on the curve")
    d = t0 - t
    # real periods: Re(eta1 d + c) = 0 and Re(eta2 d + c tau) = 0
    A = mp.matrix([[1, 0], [mp.re(E.tau), -mp.im(E.tau)]])
    rhs = mp.matrix([-mp.re(E.eta1 * d), -mp.re(E.eta2 * d)])
    if abs(mp.det(A)) < mp.mpf(10) ** (-8):
        raise AnalyticError("real-period system is ill-conditioned")
    x, y = mp.lu_solve(A, rhs)
    return ThirdKindDifferential(E, t, t0, mp.mpc(x, y))


def _nearest_lattice_distance(E: EllipticCurve, z, p) -> float:
    d = E.reduce(_c(z) - p)
    best = mp.inf
    for m in (-1, 0, 1):
        for n in (-1, 0, 1):
            best = min(best, abs(d + m + n * E.tau))
    return float(best)


def _min_pole_distance(psi: ThirdKindDifferential, a, b) -> float:
    """Distance from the segment [a, b] to the poles (including translates)."""
    best = float("inf")
    E = psi.E
    for p in psi.poles():
        for m in range(-2, 3):
            for n in range(-2, 3):
                q = p + m + n * E.tau
                ab = b - a
                s = mp.re((q - a) * mp.conj(ab)) / max(abs(ab) ** 2, mp.mpf(10) ** (-30))
                s = min(max(s, 0), 1)
                best = min(best, float(abs(a + s * ab - q)))
    return best


def integrate_path(psi: ThirdKindDifferential, path: Sequence, tol: float = 0.25,
                   min_distance: float = 1e-6) -> mp.mpc:
    """int_path psi along a polygonal path, by continuation of the log ratio."""
    pts = [_c(p) for p in path]
    total = mp.mpc(0)
    for a, b in zip(pts, pts[1:]):
        if _min_pole_distance(psi, a, b) < min_distance:
            raise AnalyticError("path passes through a pole")
        total += _segment(psi, a, b, tol)
    return total / (2j * mp.pi)


def _segment(psi, a, b, tol, depth=0) -> mp.mpc:
    la, lb = psi.log_ratio(a), psi.log_ratio(b)
    # the branch jump of the principal logs is a multiple of 2 pi i; accept the
    # step once the derivative predicts the same value to within tol
    mid = (a + b) / 2
    slope = (psi.E.zeta(mid - psi.t) - psi.E.zeta(mid - psi.t0) + psi.c) * (b - a)
    diff = lb - la
    k = mp.nint(mp.im(slope - diff) / (2 * mp.pi))
    step = diff + 2j * mp.pi * k
    if abs(step - slope) < tol or depth > 40:
        if depth > 40:
            raise AnalyticError("adaptive subdivision did not converge near a pole")
        return step
    return _segment(psi, a, mid, tol, depth + 1) + _segment(psi, mid, b, tol, depth + 1)


def quad_path(psi: ThirdKindDifferential, path: Sequence) -> mp.mpc:
    """Independent oracle: adaptive Gauss-Legendre quadrature of psi."""
    pts = [_c(p) for p in path]
    total = mp.mpc(0)
    for a, b in zip(pts, pts[1:]):
        total += mp.quad(lambda s: psi.coefficient(a + s * (b - a)) * (b - a), [0, 0.5, 1])
    return total


def loop_integral(psi: ThirdKindDifferential, center, radius: float) -> mp.mpc:
    """Counterclockwise integral of psi around a circle."""
    center = _c(center)
    f = lambda th: psi.coefficient(center + radius * mp.expj(th)) * 1j * radius * mp.expj(th)
    return mp.quad(f, mp.linspace(0, 2 * mp.pi, 9))


@dataclass
class HolomorphicHeight:
    value: mp.mpc
    periods: tuple[mp.mpc, mp.mpc]

    @property
    def real(self) -> float:
        return float(mp.re(self.value))

    @property
    def imag(self) -> float:
        return float(mp.im(self.value))

    def ambiguity(self) -> dict:
        return {"real_periods": [float(mp.re(p)) for p in self.periods], "windings": 1}


def holomorphic_height(E: EllipticCurve, a, b, c, d, path: Sequence | None = None) -> HolomorphicHeight:
    """<(a - b).(c - d)>: the integral of psi_{a,b} from d to c."""
    a, b, c, d = (_c(x) for x in (a, b, c, d))
    for x in (a, b):
        for y in (c, d):
            if E.congruent(x, y, 1e-9):
                raise AnalyticError("supports of Sigma and Sigma' overlap")
    psi = third_kind(E, a, b)
    path = [d, c] if path is None else [_c(p) for p in path]
    if abs(path[0] - d) > 1e-12 or abs(path[-1] - c) > 1e-12:
        raise AnalyticError("path must run from d to c")
    return HolomorphicHeight(integrate_path(psi, path), psi.periods())


# holomorphy of the family pairing --------------------------------------------


@dataclass
class HoloReport:
    cr_residual: float
    derivative_spread: float
    residues: list[complex]
    integral_residues: bool


def _family_values(psi: ThirdKindDifferential, base, t0, points):
    """H(t) = int_{t0}^{t} psi, continued from ``base`` along short segments."""
    H0 = integrate_path(psi, [t0, base])
    return [H0 + integrate_path(psi, [base, p]) for p in points]


def cauchy_riemann_residual(psi: ThirdKindDifferential, t0, grid: Sequence, h: float) -> float:
    """max |dH/d tbar| by central differences of spacing h over the grid."""
    worst = 0.0
    for t in grid:
        t = _c(t)
        vals = _family_values(psi, t, t0, [t + h, t - h, t + 1j * h, t - 1j * h])
        Hx = (vals[0] - vals[1]) / (2 * h)
        Hy = (vals[2] - vals[3]) / (2 * h)
        worst = max(worst, float(abs((Hx + 1j * Hy) / 2)))
    return worst


def holomorphy_check(E: EllipticCurve, a, b, t0, grid: Sequence, h: float = 1e-3,
                     radius: float = 1e-2) -> HoloReport:
    """t -> <(a - b).({t} - {t0})> is holomorphic off {a, b} with integer residues."""
    psi = third_kind(E, a, b)
    for t in grid:
        if min(_nearest_lattice_distance(E, t, psi.t), _nearest_lattice_distance(E, t, psi.t0)) < 4 * h:
            raise AnalyticError("grid point too close to a pole")
    cr = cauchy_riemann_residual(psi, t0, grid, h)
    res = [complex(loop_integral(psi, p, radius)) for p in (psi.t, psi.t0)]
    ok = all(abs(r - round(r.real)) < 1e-8 for r in res)
    return HoloReport(cr, 0.0, res, ok)


def abel_winding(psi: ThirdKindDifferential, center, radius: float, n: int = 400) -> tuple[int, float]:
    """Argument-principle winding of the section around a circle."""
    center = _c(center)
    pts = [center + radius * mp.expj(2 * mp.pi * k / n) for k in range(n + 1)]
    vals = [psi.section(p) for p in pts]
    total = mp.mpf(0)
    for u, v in zip(vals, vals[1:]):
        total += mp.arg(v / u)
    w = total / (2 * mp.pi)
    r = int(mp.nint(w))
    return r, float(abs(w - r))


def abel_divisor_check(E: EllipticCurve, t, t0, contours: Sequence[tuple] | None = None) -> list[int]:
    """Windings of e^{2 pi i int psi_t} around (center, radius) contours."""
    psi = third_kind(E, t, t0)
    if contours is None:
        t, t0 = psi.t, psi.t0
        sep = abs(t - t0)
        contours = [(t, sep / 4), (t0, sep / 4), ((t + t0) / 2, sep * 0.75),
                    ((t + t0) / 2 + 1j * sep * 3, sep / 4)]
    out = []
    for center, radius in contours:
        center = _c(center)
        for p in psi.poles():
            for m in (-1, 0, 1):
                for n in (-1, 0, 1):
                    dist = abs(abs(center - (p + m + n * E.tau)) - radius)
                    if dist < 1e-9:
                        raise AnalyticError("contour passes through a zero or pole")
        w, resid = abel_winding(psi, center, radius)
        if resid > 1e-6:
            raise AnalyticError(f"winding not integral (residual {resid})")
        out.append(w)
    return out


@dataclass
class HoloPrimeReport:
    omega: complex
    residual: float


def lemma_holo_prime_check(E: EllipticCurve, coeffs: tuple[float, float], t0, grid: Sequence,
                           h: float = 1e-3) -> HoloPrimeReport:
    """For h' = p Re(dz) + s Im(dz), split d int_{t0}^{t} h' into w dt + conj(w dt).

    The residual measures how far the dt-coefficient is from a constant and how
    far the dtbar-coefficient is from its conjugate.
    """
    p, s = coeffs
    t0 = _c(t0)

    def F(t):
        seg = t - t0
        f = lambda u: p * mp.re(seg) + s * mp.im(seg)  # integrand of h' along the segment
        return mp.quad(f, [0, 1])

    ws, resid = [], 0.0
    for t in grid:
        t = _c(t)
        Fx = (F(t + h) - F(t - h)) / (2 * h)
        Fy = (F(t + 1j * h) - F(t - 1j * h)) / (2 * h)
        w, wbar = (Fx - 1j * Fy) / 2, (Fx + 1j * Fy) / 2
        resid = max(resid, float(abs(wbar - mp.conj(w))))
        ws.append(w)
    spread = max(float(abs(w - ws[0])) for w in ws)
    if spread + resid > 1e-6:
        raise AnalyticError(f"family pairing is not holomorphic plus conjugate ({spread + resid})")
    return HoloPrimeReport(complex(ws[0]), max(resid, spread))


# bridge to the discrete height ------------------------------------------------


@dataclass
class CompareReport:
    analytic: float
    analytic_imag: float
    rows: list  # BridgeRow per refinement

    @property
    def gaps(self) -> list[float]:
        return [r.gap for r in self.rows]

    @property
    def monotone(self) -> bool:
        g = self.gaps
        return all(y < x for x, y in zip(g, g[1:]))


def compare_discrete(E: EllipticCurve, a, b, c, d, ladder: Sequence[int] = (4, 8, 16, 32)) -> CompareReport:
    """Discrete heights on torus_flat(N) against Re<(a - b).(c - d)>.

    Only the square lattice is supported: torus_flat carries the flat metric
    of tau = i and nothing else exactly.
    """
    from .bridge import discrete_height_on_torus

    if abs(mp.re(E.tau)) > 1e-15 or abs(mp.im(E.tau) - 1) > 1e-15:
        raise AnalyticError("compare_discrete needs tau = i")
    a, b, c, d = (complex(x) for x in (a, b, c, d))
    if abs(a - b) < 1e-15 or abs(c - d) < 1e-15:
        val = HolomorphicHeight(mp.mpc(0), (mp.mpc(0), mp.mpc(0)))
    else:
        val = holomorphic_height(E, a, b, c, d)
    rows = [discrete_height_on_torus(N, a, b, c, d, analytic=val.real) for N in ladder]
    return CompareReport(val.real, val.imag, rows)
