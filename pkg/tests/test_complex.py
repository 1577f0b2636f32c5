import itertools
import random

import pytest
from hypothesis import given, strategies as st

from topoheight.builders import from_name, genus_surface, sphere_oct, torus_flat
from topoheight.complex import (DUAL, PRIMAL, Chain, ComplexError, SimplicialComplex,
                                boundary_matrix, integrate, intersect, kronecker_intersection)
from topoheight.sampling import random_chain

BUILDERS = [sphere_oct, lambda: torus_flat(3), lambda: genus_surface(2)]


@pytest.mark.parametrize("build", BUILDERS)
def test_boundary_squares_to_zero(build):
    X = build()
    for side in (PRIMAL, DUAL):
        for k in range(2, X.dim + 1):
            d1 = boundary_matrix(X, k - 1, side)
            d2 = boundary_matrix(X, k, side)
            assert not (d1 @ d2).any()


@pytest.mark.parametrize("build", BUILDERS)
def test_dual_boundary_is_signed_transpose(build):
    X = build()
    m = X.dim
    for j in range(1, m + 1):
        dual = boundary_matrix(X, j, DUAL)
        primal = boundary_matrix(X, m - j + 1, PRIMAL)
        assert (dual == (-1) ** (m - j + 1) * primal.T).all()


def test_euler_characteristics():
    assert sphere_oct().euler_characteristic() == 2
    assert torus_flat(5).euler_characteristic() == 0
    assert genus_surface(2).euler_characteristic() == -2
    assert genus_surface(3).euler_characteristic() == -4


def test_manifold_check_rejects_open_surface():
    with pytest.raises(ComplexError):
        SimplicialComplex.from_top_simplices(2, [(0, 1, 2), (0, 2, 3)])


def test_manifold_check_rejects_inconsistent_orientation():
    tops = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]  # boundary of a tetrahedron, badly oriented
    with pytest.raises(ComplexError):
        SimplicialComplex.from_top_simplices(2, tops)


def test_from_name():
    assert from_name("torus_flat(4)").f_vector == (16, 48, 32)
    assert from_name("genus_surface(2)").euler_characteristic() == -2
    assert from_name("nonsense") is None


@given(st.integers(0, 10_000))
def test_leibniz_rule(seed):
    """kron(d a, b) = (-1)^p kron(a, d b) for primal p-chains a and dual chains b."""
    X = torus_flat(3)
    rng = random.Random(seed)
    for p in (1, 2):
        a = random_chain(X, p, PRIMAL, rng)
        b = random_chain(X, X.dim - p + 1, DUAL, rng)
        assert kronecker_intersection(a.boundary(), b) == (-1) ** p * kronecker_intersection(a, b.boundary())


@given(st.integers(0, 10_000))
def test_graded_commutativity(seed):
    X = genus_surface(2)
    rng = random.Random(seed)
    a = random_chain(X, 1, PRIMAL, rng)
    b = random_chain(X, 1, DUAL, rng)
    assert intersect(b, a) == -intersect(a, b)
    assert integrate(b, a) == intersect(b, a)
    a0 = random_chain(X, 0, PRIMAL, rng)
    b2 = random_chain(X, 2, DUAL, rng)
    assert intersect(b2, a0) == intersect(a0, b2)


@given(st.integers(0, 10_000))
def test_chain_arithmetic(seed):
    X = sphere_oct()
    rng = random.Random(seed)
    a, b = (random_chain(X, 1, PRIMAL, rng, rational=True) for _ in range(2))
    assert (a + b) - b == a
    assert (a * 3).boundary() == a.boundary() * 3
    assert Chain.from_vector(X, 1, PRIMAL, a.to_vector()) == a


def test_subdivision_embedding_is_a_chain_map():
    """Dual blocks realized in sd(X) have the dual boundary as their boundary."""
    X = sphere_oct()
    sd = X.subdivision
    for k in range(X.dim + 1):
        for i in range(X.n_cells(k)):
            for side in (PRIMAL, DUAL):
                deg = k if side == PRIMAL else X.dim - k
                if deg == 0:
                    continue
                c = Chain.cell(X, deg, i, side)
                assert sd.embed(c.boundary()) == sd.embed(c).boundary()


def test_subdivided_intersection_matches_kronecker():
    """In sd(X) a primal edge and its dual edge share only the edge barycenter."""
    X = torus_flat(3)
    sd = X.subdivision
    for i in range(X.n_cells(1)):
        e = sd.embed(Chain.cell(X, 1, i, PRIMAL))
        d = sd.embed(Chain.cell(X, 1, i, DUAL))
        shared = set()
        for j in e.support():
            shared |= set(sd.complex.cells[1][j])
        verts = set()
        for j in d.support():
            verts |= set(sd.complex.cells[1][j])
        assert shared & verts == {sd.vertex((1, i))}


def test_chain_validation():
    X = sphere_oct()
    with pytest.raises(ValueError):
        Chain(X, 1, PRIMAL, {10_000: 1})
    with pytest.raises(ValueError):
        Chain(X, 1, "sideways", {})
    with pytest.raises(ValueError):
        Chain.cell(X, 1, 0) + Chain.cell(X, 1, 0, DUAL)
    with pytest.raises(ValueError):
        kronecker_intersection(Chain.cell(X, 1, 0), Chain.cell(X, 2, 0, DUAL))
