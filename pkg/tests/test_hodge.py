import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from topoheight.builders import genus_surface, sphere_oct, torus_flat
from topoheight.complex import DUAL, PRIMAL, Chain, boundary_matrix, integrate, kronecker_intersection
from topoheight.hodge import (FloatHodge, HodgeContext, MetricWeights, aj_image, dual_aj_image,
                              hodge_context, period_bases)
from topoheight.homology import betti, homology_basis, trivialize
from topoheight.sampling import random_boundary, random_chain, random_cycle, unimodular

CASES = [sphere_oct, lambda: torus_flat(3), lambda: genus_surface(2)]


@pytest.mark.parametrize("build", CASES)
def test_harmonic_dimension_is_betti(build):
    X = build()
    ctx = hodge_context(X)
    for side in (PRIMAL, DUAL):
        for k in range(3):
            assert ctx.kernel_dimension(k, side) == betti(X, k, side)


@pytest.mark.parametrize("build", CASES)
@pytest.mark.parametrize("weights", ["unit", "default"])
def test_decomposition_is_exact_and_orthogonal(build, weights):
    X = build()
    ctx = hodge_context(X, weights)
    rng = random.Random(7)
    for side in (PRIMAL, DUAL):
        for k in range(3):
            c = random_chain(X, k, side, rng, rational=True)
            ex, co, h = ctx.decomposition(c)
            assert ex + co + h == c
            assert ctx.inner(ex, co) == ctx.inner(ex, h) == ctx.inner(co, h) == 0
            assert ctx.laplacian(h).is_zero()
            assert ctx.laplacian(ctx.green(c)) + h == c


def _dense_green(ctx, k, side):
    """Green operator from a float pseudoinverse of the symmetrized Laplacian."""
    X = ctx.X
    W = np.array([float(w) for w in ctx.w(k, side)])
    n = len(W)
    L = np.zeros((n, n))
    if k + 1 <= X.dim:
        B = boundary_matrix(X, k + 1, side).astype(float)
        Wu = np.array([float(w) for w in ctx.w(k + 1, side)])
        L += B @ np.diag(1 / Wu) @ B.T @ np.diag(W)
    if k >= 1:
        B = boundary_matrix(X, k, side).astype(float)
        Wl = np.array([float(w) for w in ctx.w(k - 1, side)])
        L += np.diag(1 / W) @ B.T @ np.diag(Wl) @ B
    s = np.sqrt(W)
    S = np.diag(s) @ L @ np.diag(1 / s)  # symmetric
    return np.diag(1 / s) @ np.linalg.pinv(S) @ np.diag(s)


@pytest.mark.parametrize("build", CASES)
def test_green_matches_pseudoinverse_oracle(build):
    X = build()
    ctx = hodge_context(X)
    rng = random.Random(3)
    for side in (PRIMAL, DUAL):
        for k in range(3):
            G = _dense_green(ctx, k, side)
            c = random_chain(X, k, side, rng, rational=True)
            exact = np.array([float(x) for x in ctx.green(c).to_vector()])
            assert np.allclose(G @ np.array([float(x) for x in c.to_vector()]), exact, atol=1e-9)


@pytest.mark.parametrize("build", CASES)
def test_float_path_matches_exact(build):
    X = build()
    ctx = hodge_context(X)
    fh = FloatHodge(ctx)
    rng = random.Random(5)
    sigma, _ = random_boundary(X, 0, PRIMAL, rng)
    exact = np.array([float(x) for x in ctx.omega_form(sigma).to_vector()])
    assert np.allclose(fh.omega(sigma), exact, atol=1e-9)


@given(st.integers(0, 10_000))
def test_omega_properties(seed):
    rng = random.Random(seed)
    X = genus_surface(2)
    ctx = hodge_context(X)
    for side in (PRIMAL, DUAL):
        sigma, gamma = random_boundary(X, 0, side, rng)
        om = ctx.omega_form(sigma, gamma)
        assert om.boundary() == sigma
        # co-exact: orthogonal to every 1-cycle
        z = random_cycle(X, 1, side, rng)
        assert ctx.inner(om, z) == 0
        # omega differs from any bounding chain by a cycle
        assert (gamma - om).is_cycle()


def test_omega_golden_sphere():
    X = sphere_oct()
    ctx = hodge_context(X, "unit")
    om = ctx.omega_form(Chain(X, 0, PRIMAL, {0: 1, 1: -1}))
    assert om.to_vector() == [Fraction(-1, 4)] * 4 + [Fraction(1, 4)] * 4 + [0] * 4


def test_omega_rejects_nontrivial_and_non_cycles():
    X = torus_flat(3)
    ctx = hodge_context(X)
    with pytest.raises(ValueError):
        ctx.omega_form(Chain.cell(X, 0, 0))
    with pytest.raises(ValueError):
        ctx.omega_form(Chain.cell(X, 1, 0))
    with pytest.raises(ValueError):
        ctx.omega_form(homology_basis(X, 1).representatives[0])


def test_dual_weights_are_reciprocal():
    X = torus_flat(3)
    w = MetricWeights.default(X)
    for k in range(3):
        assert w.get(2, k, DUAL) == tuple(1 / x for x in w.get(2, 2 - k, PRIMAL))
    with pytest.raises(ValueError):
        MetricWeights({0: (Fraction(-1),)})


@pytest.mark.parametrize("build", CASES)
def test_period_bases_are_dual(build):
    X = build()
    pb = period_bases(X, 1)
    for i, a in enumerate(pb.primal.representatives):
        for j, b in enumerate(pb.dual):
            assert kronecker_intersection(a, b) == int(i == j)
    A = unimodular(pb.rank, random.Random(1))
    pb2 = pb.change(A)
    for i, a in enumerate(pb2.primal.representatives):
        for j, b in enumerate(pb2.dual):
            assert kronecker_intersection(a, b) == int(i == j)


@given(st.integers(0, 10_000))
def test_aj_image_independent_of_gamma(seed):
    rng = random.Random(seed)
    X = torus_flat(3)
    ctx = hodge_context(X)
    sigma, gamma = random_boundary(X, 0, PRIMAL, rng)
    g2 = gamma + random_cycle(X, 1, PRIMAL, rng)
    a1, a2 = aj_image(sigma, gamma, ctx), aj_image(sigma, g2, ctx)
    assert a1 == a2
    assert all((x - y).denominator == 1 for x, y in zip(a1.raw, a2.raw))
    b = dual_aj_image(sigma, gamma, ctx)
    assert b == dual_aj_image(sigma, None, ctx)


def test_aj_image_of_exact_gamma_vanishes():
    X = genus_surface(2)
    ctx = hodge_context(X)
    rng = random.Random(11)
    gamma = random_chain(X, 2, PRIMAL, rng).boundary()  # Sigma = 0, Gamma exact
    a = aj_image(Chain.zero(X, 0), gamma, ctx)
    assert all(x == 0 for x in a.coords)
