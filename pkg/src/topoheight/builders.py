"""Test-corpus surfaces: octahedral sphere, flat square torus, genus-g surfaces."""

from __future__ import annotations

import re
from fractions import Fraction

from .complex import ComplexError, SimplicialComplex


def sphere_oct() -> SimplicialComplex:
    """Boundary of the octahedron, outward orientation."""
    pos = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]
    tris = []
    for a in (0, 1):
        for b in (2, 3):
            for c in (4, 5):
                p, q, r = pos[a], pos[b], pos[c]
                det = (p[0] * (q[1] * r[2] - q[2] * r[1])
                       - p[1] * (q[0] * r[2] - q[2] * r[0])
                       + p[2] * (q[0] * r[1] - q[1] * r[0]))
                tris.append((a, b, c) if det > 0 else (a, c, b))
    return SimplicialComplex.from_top_simplices(2, tris, 6, name="sphere_oct")


def _torus_layout(N: int):
    """Vertex positions and oriented triangles of the sheared square-torus grid.

    Row k is shifted right by k*delta columns, delta = 1/2 (N even) or
    (N+1)/(2N) (N odd); crossing the top row twists the columns by N*delta.
    All triangles are acute, so the circumcentric weights are positive.
    """
    delta = Fraction(1, 2) if N % 2 == 0 else Fraction(N + 1, 2 * N)
    twist = int(N * delta)

    def vid(j, k):
        if k == N:
            return (j + twist) % N
        return (j % N) + N * k

    tris = []  # (vertex ids, unwrapped positions in grid units)
    for k in range(N):
        for j in range(N):
            p00 = (Fraction(j) + k * delta, Fraction(k))
            p10 = (p00[0] + 1, p00[1])
            p01 = (p00[0] + delta, p00[1] + 1)
            p11 = (p00[0] + 1 + delta, p00[1] + 1)
            tris.append(((vid(j, k), vid(j + 1, k), vid(j, k + 1)), (p00, p10, p01)))
            tris.append(((vid(j + 1, k), vid(j + 1, k + 1), vid(j, k + 1)), (p10, p11, p01)))
    return tris, delta


def torus_positions(N: int) -> list[tuple[Fraction, Fraction]]:
    """Positions of the torus_flat(N) vertices in the unit square, x mod 1."""
    delta = Fraction(1, 2) if N % 2 == 0 else Fraction(N + 1, 2 * N)
    out = []
    for k in range(N):
        for j in range(N):
            x = (Fraction(j) + k * delta) / N
            out.append((x - (x.numerator // x.denominator), Fraction(k, N)))
    return out


def _cot(p, q, r) -> Fraction:
    ux, uy = q[0] - p[0], q[1] - p[1]
    vx, vy = r[0] - p[0], r[1] - p[1]
    return (ux * vx + uy * vy) / abs(ux * vy - uy * vx)


def torus_flat(N: int = 3) -> SimplicialComplex:
    """N x N triangulation of the flat unit-square torus C/(Z + iZ).

    Carries ``default_weights`` from the circumcentric dual: w0 = 1/|D(v)|,
    w1 = |e|/|D(e)|, w2 = |t|; all exact rationals.
    """
    if N < 3:
        raise ComplexError("degenerate", f"torus_flat needs N >= 3, got {N}")
    tris, _ = _torus_layout(N)
    X = SimplicialComplex.from_top_simplices(2, [t for t, _ in tris], N * N,
                                             name=f"torus_flat({N})")
    if X.f_vector != (N * N, 3 * N * N, 2 * N * N):
        raise ComplexError("degenerate", f"unexpected f-vector {X.f_vector}")
    h = Fraction(1, N)
    cond = [Fraction(0)] * X.n_cells(1)
    for verts, pts in tris:
        pts = [(x * h, y * h) for x, y in pts]
        for a in range(3):
            b, c = (a + 1) % 3, (a + 2) % 3
            e = X.index[1][tuple(sorted((verts[b], verts[c])))]
            cond[e] += _cot(pts[a], pts[b], pts[c]) / 2
    X.default_weights = {
        0: [Fraction(N * N)] * X.n_cells(0),
        1: [1 / c for c in cond],
        2: [h * h / 2] * X.n_cells(2),
    }
    return X


def genus_surface(g: int) -> SimplicialComplex:
    """Closed oriented surface of genus g: connected sum of g copies of torus_flat(3)."""
    if g < 1:
        raise ComplexError("degenerate", f"genus must be >= 1, got {g}")
    base, _ = _torus_layout(3)
    base = [t for t, _ in base]
    cut_in, cut_out = (0, 1, 3), (4, 5, 7)  # vertex-disjoint, both listed positively
    tris = [t for t in base]
    free = cut_out
    nxt = 9
    for _ in range(1, g):
        relabel = {cut_in[0]: free[0], cut_in[2]: free[1], cut_in[1]: free[2]}
        for v in range(9):
            if v not in relabel:
                relabel[v] = nxt
                nxt += 1
        tris = [t for t in tris if sorted(t) != sorted(free)]
        tris += [tuple(relabel[v] for v in t) for t in base if sorted(t) != sorted(cut_in)]
        free = tuple(relabel[v] for v in cut_out)
    return SimplicialComplex.from_top_simplices(2, tris, nxt, name=f"genus_surface({g})")


_BUILDER = re.compile(r"^\s*(sphere_oct|torus_flat|genus_surface)\s*(?:\(\s*(\d*)\s*\))?\s*$")


def from_name(spec: str) -> SimplicialComplex | None:
    """Parse builder expressions such as ``torus_flat(3)``; None if not one."""
    mt = _BUILDER.match(spec)
    if not mt:
        return None
    name, arg = mt.group(1), mt.group(2)
    if name == "sphere_oct":
        return sphere_oct()
    if name == "torus_flat":
        return torus_flat(int(arg) if arg else 3)
    return genus_surface(int(arg) if arg else 2)
