"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v`` (the summary lines are
printed at the end of the session) or ``python tests/test_acceptance.py``.
"""

import itertools
import random
import time
from fractions import Fraction

import mpmath as mp
import pytest

from topoheight.bridge import BridgeConfig, discrete_height_on_torus
from topoheight.builders import genus_surface, sphere_oct, torus_flat
from topoheight.bundle import (BundlePoint, act, chern_pairing, extract_alpha_beta, holonomy,
                               integral_structure, lift)
from topoheight.complex import DUAL, PRIMAL, Chain, intersect
from topoheight.elliptic import (EllipticCurve, abel_divisor_check, cauchy_riemann_residual,
                                 holomorphic_height, loop_integral, third_kind)
from topoheight.height import monodromy_sweep, zee_check, zee_prime_check
from topoheight.hodge import aj_image, dual_aj_image, hodge_context, period_bases
from topoheight.homology import complement_pair, trivialize
from topoheight.sampling import (loop_family, random_boundary, random_chain, random_cycle,
                                 random_point_pair, unimodular)

RESULTS: list[str] = []


def record(n: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {title} ({detail})"
    RESULTS.append(line)
    print(line)


def _complexes():
    return [sphere_oct()] + [torus_flat(n) for n in range(3, 9)] + [genus_surface(2)]


def _far_triangle(X, verts):
    return next(t for t, c in enumerate(X.cells[2]) if not set(c) & set(verts))


# 1 -------------------------------------------------------------------------


def check_hodge_decomposition(per_complex=200, budget=60.0):
    t0 = time.perf_counter()
    rng = random.Random(1)
    bad, total = 0, 0
    for X in _complexes():
        ctx = hodge_context(X)
        for i in range(per_complex):
            side, k = (PRIMAL, DUAL)[i % 2], (i // 2) % 3
            c = random_chain(X, k, side, rng, rational=True)
            g = ctx.green(c)
            parts = ctx.harmonic(c)
            if k + 1 <= X.dim:
                parts = parts + ctx.adjoint(g).boundary()          # del del^+ G c
            if k >= 1:
                parts = parts + ctx.adjoint(g.boundary())          # del^+ del G c
            bad += parts != c
            total += 1
    dt = time.perf_counter() - t0
    return bad == 0 and dt < budget, f"{total} chains, {bad} mismatches, {dt:.1f}s of {budget:.0f}s"


# 2, 3 ------------------------------------------------------------------------


def check_zee(per_complex=100):
    rng = random.Random(2)
    bad, total = 0, 0
    for X in _complexes():
        ctx = hodge_context(X)
        for _ in range(per_complex):
            sigma, gamma = random_boundary(X, 0, PRIMAL, rng)
            theta = random_cycle(X, 1, DUAL, rng)
            try:
                v = zee_check(sigma, gamma, theta, ctx)
                bad += not (isinstance(v, int) and v == intersect(gamma, theta))
            except AssertionError:
                bad += 1
            total += 1
    return bad == 0, f"{total} instances, {bad} failures"


def check_zee_prime(per_complex=100):
    rng = random.Random(3)
    bad, total = 0, 0
    for X in _complexes():
        ctx = hodge_context(X)
        for _ in range(per_complex):
            sigma, gamma = random_boundary(X, 0, PRIMAL, rng)
            sp, gp = random_boundary(X, 0, DUAL, rng)
            try:
                v = zee_prime_check(sigma, gamma, sp, gp, ctx)
                bad += v != intersect(gamma, gp)
            except AssertionError:
                bad += 1
            total += 1
    return bad == 0, f"{total} instances, {bad} failures"


# 4 -------------------------------------------------------------------------


def check_monodromy():
    bad, total = 0, 0
    for X in (sphere_oct(), torus_flat(3), torus_flat(4), genus_surface(2)):
        ctx = hodge_context(X)
        n0 = X.n_cells(0)
        for mult in (1, 2):
            sigma = Chain(X, 0, PRIMAL, {0: mult, n0 - 1: -mult})
            gamma = trivialize(sigma)
            anchor = _far_triangle(X, [0, n0 - 1])
            for times in (1, -1, 2, -2, 3):
                fam = loop_family(X, 0, anchor, times)
                res = monodromy_sweep(sigma, gamma, fam, ctx)
                ok = (abs(res.jump) == mult * abs(times) and res.harmonic_defect == 0
                      and res.jump == res.crossing == -intersect(gamma, fam.swept()))
                bad += not ok
                total += 1
    return bad == 0, f"{total} families (single, k-fold, weighted), {bad} failures"


# 5 -------------------------------------------------------------------------


def check_lifting_invariance(changes=60):
    rng = random.Random(5)
    X = torus_flat(3)
    ctx = hodge_context(X)
    pb = period_bases(X, 1)
    bad = 0
    for _ in range(changes // 6):
        sigma, gamma = random_point_pair(X, PRIMAL, rng)
        sp, gp = random_point_pair(X, DUAL, rng)
        ref = lift(sigma, gamma, sp, gp, ctx, pb).canonical()
        z = integral_structure(sigma, gamma, sp, gp, ctx, pb)
        a, b = extract_alpha_beta(z)
        bad += (a, b) != (aj_image(sp, gp, ctx, pb), dual_aj_image(sigma, gamma, ctx, pb))
        for _ in range(6):
            g2 = gamma + random_cycle(X, 1, PRIMAL, rng)
            gp2 = gp + random_cycle(X, 1, DUAL, rng)
            A = unimodular(pb.rank, rng)
            p = lift(sigma, g2, sp, gp2, ctx, pb.change(A), basis_label="A")
            bad += p.in_basis(A).canonical() != ref
    return bad == 0, f"{changes} randomized changes, {bad} failures"


# 6 -------------------------------------------------------------------------


def check_weight_filtration():
    bad, seen = 0, []
    for X, g in ((sphere_oct(), 0), (torus_flat(3), 1), (torus_flat(4), 1), (genus_surface(2), 2)):
        n0 = X.n_cells(0)
        sigma = Chain(X, 0, PRIMAL, {0: 1, n0 - 1: -1})
        t1 = _far_triangle(X, [0, n0 - 1])
        t2 = max(t for t, c in enumerate(X.cells[2]) if not set(c) & {0, n0 - 1})
        ranks = complement_pair(sigma, Chain(X, 0, DUAL, {t1: 1, t2: -1})).filtration.ranks
        bad += ranks != (1, 1 + 2 * g, 2 + 2 * g)
        seen.append(f"g={g}:{ranks}")
    return bad == 0, ", ".join(seen)


# 7 -------------------------------------------------------------------------


def check_poincare_bundle():
    F = Fraction
    bad = 0
    p = BundlePoint((F(1, 3), F(-2, 5)), (F(3, 4), F(1, 6)), F(1, 7))
    vecs = list(itertools.product(range(-1, 2), repeat=2))
    for m, n, m2, n2 in itertools.product(vecs, repeat=4):
        once = act([a + b for a, b in zip(m, m2)], [a + b for a, b in zip(n, n2)], p)
        bad += once != act(m2, n2, act(m, n, p, reduce=False))
    bad += act((0, 0), (0, 0), p) != p.canonical()
    for r in (1, 2, 3, 4):
        bad += chern_pairing(r) != [[int(i == j) for j in range(r)] for i in range(r)]
    for beta in ((F(1, 3), F(1, 2)), (F(-2, 7), F(5, 4))):
        for m in vecs:
            expected = mp.exp(2j * mp.pi * float(sum(b * x for b, x in zip(beta, m))))
            bad += abs(mp.exp(2j * mp.pi * float(holonomy(beta, m))) - expected) > 1e-12
    return bad == 0, f"{len(vecs) ** 4} action pairs, chern ranks 1-4, holonomy; {bad} failures"


# 8 -------------------------------------------------------------------------


def check_analytic():
    worst_res, worst_im = 0.0, 0.0
    for tau in (1j, 0.3 + 1.1j, -0.2 + 0.8j):
        E = EllipticCurve(tau)
        for t, t0 in ((0.5, 0), (0.3 + 0.2j, 0.6 + 0.5j), (0.1 + 0.7j, 0.8 + 0.3j)):
            psi = third_kind(E, t, t0)
            r = abs(t - t0) / 4
            worst_res = max(worst_res, float(abs(loop_integral(psi, t, r) - 1)),
                            float(abs(loop_integral(psi, t0, r) + 1)))
            worst_im = max(worst_im, *(float(abs(mp.im(x))) for x in psi.periods()))
    windings = abel_divisor_check(EllipticCurve(1j), 0.3 + 0.2j, 0.6 + 0.5j)[:3]
    psi = third_kind(EllipticCurve(1j), 0, 0.5 + 0.5j)
    grid = [0.25 + 0.1j, 0.7 + 0.3j, 0.2 + 0.8j]
    r3 = cauchy_riemann_residual(psi, 0.25j, grid, 1e-3)
    r4 = cauchy_riemann_residual(psi, 0.25j, grid, 1e-4)
    ok = worst_res < 1e-8 and worst_im < 1e-10 and windings == [1, -1, 0] and r3 >= 5 * r4
    return ok, (f"residue err {worst_res:.1e}, Im periods {worst_im:.1e}, windings {windings}, "
                f"CR {r3:.1e} -> {r4:.1e} (x{r3 / r4:.0f})")


# 9 -------------------------------------------------------------------------


def check_bridge(budget=600.0):
    cfg = BridgeConfig()
    t0 = time.perf_counter()
    analytic = holomorphic_height(EllipticCurve(1j), cfg.a, cfg.b, cfg.c, cfg.d).real
    rows = [discrete_height_on_torus(N, cfg.a, cfg.b, cfg.c, cfg.d, analytic=analytic)
            for N in cfg.ladder]
    dt = time.perf_counter() - t0
    gaps = [r.gap for r in rows]
    monotone = all(y < x for x, y in zip(gaps, gaps[1:]))
    ok = monotone and gaps[-1] < cfg.gap_threshold and dt < budget
    return ok, (f"Re<S.S'> = {analytic:.6f}, gaps " + ", ".join(f"N={r.N}:{r.gap:.2e}" for r in rows)
                + f", threshold {cfg.gap_threshold:.0e}, {dt:.0f}s")


CRITERIA = [
    (1, "exact Hodge decomposition", check_hodge_decomposition),
    (2, "zee integrality", check_zee),
    (3, "zee-prime symmetry relation", check_zee_prime),
    (4, "crossing monodromy", check_monodromy),
    (5, "lifting invariance", check_lifting_invariance),
    (6, "weight filtration ranks", check_weight_filtration),
    (7, "Poincare bundle", check_poincare_bundle),
    (8, "analytic genus one", check_analytic),
    (9, "discrete to analytic bridge", check_bridge),
]


@pytest.mark.parametrize("n,title,check", CRITERIA, ids=[f"criterion{n}" for n, _, _ in CRITERIA])
def test_criterion(n, title, check):
    ok, detail = check()
    record(n, title, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    for n, title, check in CRITERIA:
        record(n, title, *check())
