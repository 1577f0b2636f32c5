from fractions import Fraction

import pytest

from topoheight.bridge import (BridgeConfig, discrete_height_on_torus, dual_path, dual_positions,
                               nearest_triangle, nearest_vertex)
from topoheight.builders import torus_flat, torus_positions
from topoheight.complex import DUAL, Chain


def test_nearest_cells_hit_half_lattice_points():
    N = 8
    pos = torus_positions(N)
    assert pos[nearest_vertex(N, 0.5 + 0.5j)] == (Fraction(1, 2), Fraction(1, 2))
    X = torus_flat(N)
    x, y = dual_positions(X, N)[nearest_triangle(X, N, 0.5j)]
    assert abs(float(x)) + abs(float(y) - 0.5) < 1.0 / N


def test_dual_positions_are_circumcenters():
    N = 4
    X = torus_flat(N)
    pos = torus_positions(N)
    for t, c in zip(dual_positions(X, N), X.cells[2]):
        d = []
        for v in c:
            dx = (float(pos[v][0]) - float(t[0]) + 0.5) % 1 - 0.5
            dy = (float(pos[v][1]) - float(t[1]) + 0.5) % 1 - 0.5
            d.append(dx * dx + dy * dy)
        assert max(d) - min(d) < 1e-12


def test_dual_path_has_the_right_boundary():
    N = 8
    X = torus_flat(N)
    s, e = nearest_triangle(X, N, 0.5), nearest_triangle(X, N, 0.5j)
    g = dual_path(X, N, s, e, 0.5, 0.5j)
    assert g.boundary() == Chain(X, 0, DUAL, {e: 1, s: -1})
    with pytest.raises(ValueError):
        dual_path(X, N, s, e, 0.5, 0.5j, width=1e-6)


def test_ladder_goldens():
    cfg = BridgeConfig()
    r4 = discrete_height_on_torus(4, cfg.a, cfg.b, cfg.c, cfg.d, analytic=cfg.analytic)
    r8 = discrete_height_on_torus(8, cfg.a, cfg.b, cfg.c, cfg.d, analytic=cfg.analytic)
    assert r4.discrete == Fraction(733, 3280)
    assert r8.discrete == Fraction(34127627, 140164320)
    assert r4.ambiguity == r8.ambiguity == Fraction(1, 2)
    assert r8.gap < r4.gap
    # second order: halving the mesh divides the gap by about four
    assert 3.5 < r4.gap / r8.gap < 4.5


def test_zero_cycle_gives_zero():
    r = discrete_height_on_torus(4, 0, 0, 0.5j, 0.5, analytic=0.0)
    assert r.discrete == 0 and r.gap == 0
