import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from topoheight.builders import genus_surface, sphere_oct, torus_flat
from topoheight.complex import DUAL, PRIMAL, Chain, integrate, intersect
from topoheight.height import (CrossingFamily, HeightValue, IdentityError, ambiguity_lattice, height,
                               monodromy_sweep, zee_check, zee_prime_check, zee_prime_terms)
from topoheight.hodge import hodge_context
from topoheight.homology import trivialize
from topoheight.sampling import loop_family, random_boundary, random_chain, random_cycle

BUILDERS = [sphere_oct, lambda: torus_flat(3), lambda: genus_surface(2)]


def _far_triangles(X, verts):
    return [t for t, c in enumerate(X.cells[2]) if not set(c) & set(verts)]


@given(st.integers(0, 10_000))
def test_zee_identity_random(seed):
    rng = random.Random(seed)
    for build in BUILDERS:
        X = build()
        ctx = hodge_context(X)
        sigma, gamma = random_boundary(X, 0, PRIMAL, rng)
        theta = random_cycle(X, 1, DUAL, rng)
        assert zee_check(sigma, gamma, theta, ctx) == intersect(gamma, theta)


@given(st.integers(0, 10_000))
def test_zee_prime_identity_random(seed):
    rng = random.Random(seed)
    for build in BUILDERS:
        X = build()
        ctx = hodge_context(X)
        sigma, gamma = random_boundary(X, 0, PRIMAL, rng)
        sp, gp = random_boundary(X, 0, DUAL, rng)
        assert zee_prime_check(sigma, gamma, sp, gp, ctx) == intersect(gamma, gp)


@given(st.integers(0, 10_000))
def test_height_symmetry_modulo_integers(seed):
    """(Sigma.Sigma') and (Sigma'.Sigma) agree up to the harmonic correction and integers."""
    rng = random.Random(seed)
    X = torus_flat(3)
    ctx = hodge_context(X)
    sigma, gamma = random_boundary(X, 0, PRIMAL, rng)
    sp, gp = random_boundary(X, 0, DUAL, rng)
    a, b, c = zee_prime_terms(sigma, gamma, sp, gp, ctx)
    assert (a - b + c).denominator == 1
    assert height(sigma, gp, ctx).raw == b
    assert height(sp, gamma, ctx).raw == a
    assert (height(sp, gamma, ctx).raw - height(sigma, gp, ctx).raw + c).denominator == 1


@given(st.integers(0, 10_000))
def test_height_changes_by_ambiguity(seed):
    rng = random.Random(seed)
    X = genus_surface(2)
    ctx = hodge_context(X)
    sigma, _ = random_boundary(X, 0, PRIMAL, rng)
    sp, gp = random_boundary(X, 0, DUAL, rng)
    h1 = height(sigma, gp, ctx)
    h2 = height(sigma, gp + random_cycle(X, 1, DUAL, rng), ctx)
    assert h1.same_class(h2)
    assert h1.contains(h1.raw - h2.raw)
    assert h1.modulus == ambiguity_lattice(sigma, ctx)


def test_height_golden_torus():
    X = torus_flat(3)
    ctx = hodge_context(X)
    sigma = Chain(X, 0, PRIMAL, {0: 1, 4: -1})
    gp = trivialize(Chain(X, 0, DUAL, {10: 1, 5: -1}))
    hv = height(sigma, gp, ctx)
    assert hv.raw == Fraction(-54629, 55917)
    assert hv.modulus == Fraction(1, 9)
    assert hv.canonical == Fraction(1288, 55917)


def test_sphere_has_integer_ambiguity():
    X = sphere_oct()
    ctx = hodge_context(X)
    sigma = Chain(X, 0, PRIMAL, {0: 1, 1: -1})
    assert ambiguity_lattice(sigma, ctx) == 1


def test_height_value_arithmetic():
    h = HeightValue(Fraction(7, 3), 3)
    assert h.canonical == 0
    assert h.same_class(HeightValue(Fraction(1, 3), 3))
    assert not h.same_class(HeightValue(Fraction(1, 2), 3))
    assert (-h).raw == Fraction(-7, 3)


def test_height_preconditions():
    X = torus_flat(3)
    ctx = hodge_context(X)
    sigma = Chain(X, 0, PRIMAL, {0: 1, 4: -1})
    with pytest.raises(ValueError):
        height(sigma, trivialize(sigma), ctx)  # same side
    with pytest.raises(ValueError):
        height(sigma, Chain.cell(X, 2, 0, DUAL), ctx)  # wrong degree


@pytest.mark.parametrize("build", BUILDERS)
@pytest.mark.parametrize("times", [1, -1, 2, -3])
def test_crossing_monodromy(build, times):
    X = build()
    ctx = hodge_context(X)
    n0 = X.n_cells(0)
    sigma = Chain(X, 0, PRIMAL, {0: 1, n0 - 1: -1})
    gamma = trivialize(sigma)
    fam = loop_family(X, 0, _far_triangles(X, [0, n0 - 1])[0], times)
    res = monodromy_sweep(sigma, gamma, fam, ctx)
    assert res.jump == times
    assert res.crossing == -intersect(gamma, fam.swept())
    assert res.harmonic_defect == 0
    # the lift is continuous: consecutive values differ by the step integral
    om = ctx.omega_form(sigma)
    for f0, f1, h in zip(res.trace, res.trace[1:], fam.steps):
        assert f1 - f0 == integrate(h, om)


def test_monodromy_around_a_far_vertex_is_zero():
    X = torus_flat(4)
    ctx = hodge_context(X)
    sigma = Chain(X, 0, PRIMAL, {0: 1, 5: -1})
    v = 10
    anchor = _far_triangles(X, [0, 5, v])[0]
    res = monodromy_sweep(sigma, trivialize(sigma), loop_family(X, v, anchor), ctx)
    assert res.jump == 0 and res.crossing == 0


def test_weighted_vertex_gives_k_fold_jump():
    X = genus_surface(2)
    ctx = hodge_context(X)
    n0 = X.n_cells(0)
    sigma = Chain(X, 0, PRIMAL, {0: 2, 1: -1, n0 - 1: -1})
    anchor = _far_triangles(X, [0, 1, n0 - 1])[0]
    res = monodromy_sweep(sigma, trivialize(sigma), loop_family(X, 0, anchor), ctx)
    assert res.jump == 2


def test_non_null_homologous_sweep_reports_defect():
    X = torus_flat(3)
    ctx = hodge_context(X)
    sigma = Chain(X, 0, PRIMAL, {0: 1, 4: -1})
    from topoheight.hodge import period_bases
    b = period_bases(X, 1).dual[0]
    steps = [Chain.cell(X, 1, e, DUAL) * c for e, c in sorted(b.coeffs.items())]
    start = Chain(X, 0, DUAL, {0: 1, 1: -1})
    res = monodromy_sweep(sigma, trivialize(sigma), CrossingFamily.from_steps(start, steps), ctx)
    assert res.jump == res.crossing + res.harmonic_defect
    assert res.harmonic_defect != 0


def test_crossing_family_validation():
    X = sphere_oct()
    with pytest.raises(ValueError):
        CrossingFamily([Chain.zero(X, 0, DUAL), Chain.cell(X, 0, 0, DUAL)],
                       [Chain.zero(X, 1, DUAL)])
