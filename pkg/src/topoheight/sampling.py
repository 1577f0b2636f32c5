"""Random chains and crossing families for property tests and experiments."""

from __future__ import annotations

import random
from fractions import Fraction

from .complex import DUAL, PRIMAL, Chain, SimplicialComplex, n_cells
from .height import CrossingFamily
from .homology import homology_basis


def random_chain(X: SimplicialComplex, k: int, side: str, rng: random.Random,
                 density: float = 0.3, lo: int = -3, hi: int = 3,
                 rational: bool = False) -> Chain:
    n = n_cells(X, k, side)
    coeffs = {}
    for i in range(n):
        if rng.random() < density:
            c = rng.randint(lo, hi)
            if rational:
                c = Fraction(c, rng.randint(1, 5))
            if c:
                coeffs[i] = Fraction(c)
    if not coeffs and n:
        coeffs[rng.randrange(n)] = Fraction(1)
    return Chain(X, k, side, coeffs)


def random_boundary(X: SimplicialComplex, k: int, side: str, rng: random.Random,
                    density: float = 0.2) -> tuple[Chain, Chain]:
    """(Sigma, Gamma) with Sigma = boundary of the random integral (k+1)-chain Gamma."""
    while True:
        g = random_chain(X, k + 1, side, rng, density)
        s = g.boundary()
        if not s.is_zero():
            return s, g


def random_cycle(X: SimplicialComplex, k: int, side: str, rng: random.Random,
                 density: float = 0.1) -> Chain:
    """Random integral boundary plus a random combination of homology classes."""
    c = random_boundary(X, k, side, rng, density)[0] if k < X.dim else Chain.zero(X, k, side)
    for rep in homology_basis(X, k, side).representatives:
        c = c + rep * rng.randint(-2, 2)
    return c


def unimodular(r: int, rng: random.Random, steps: int = 6) -> list[list[int]]:
    """Random integer matrix of determinant +-1 from elementary operations."""
    A = [[int(i == j) for j in range(r)] for i in range(r)]
    if r == 0:
        return A
    for _ in range(steps):
        i, j = rng.randrange(r), rng.randrange(r)
        if i != j:
            q = rng.choice([-2, -1, 1, 2])
            A[i] = [a + q * b for a, b in zip(A[i], A[j])]
        elif rng.random() < 0.3:
            A[i] = [-a for a in A[i]]
    rng.shuffle(A)
    return A


def loop_around(X: SimplicialComplex, v: int) -> list[tuple[int, int, int]]:
    """Dual edges circling the dual 2-cell of vertex v of a surface, in cyclic
    order, as (edge, sign, triangle reached) with sign*boundary(edge) = next - prev."""
    if X.dim != 2:
        raise ValueError("loops around vertices are built on surfaces")
    loop = Chain.cell(X, 2, v, DUAL).boundary()
    succ = {}
    for e, s in loop.coeffs.items():
        bd = Chain.cell(X, 1, e, DUAL).boundary() * int(s)
        (t_to,) = [t for t, c in bd.coeffs.items() if c > 0]
        (t_from,) = [t for t, c in bd.coeffs.items() if c < 0]
        succ[t_from] = (e, int(s), t_to)
    start = min(succ)
    out, t = [], start
    while True:
        e, s, nxt = succ[t]
        out.append((e, s, nxt))
        t = nxt
        if t == start:
            break
    if len(out) != len(succ):
        raise AssertionError("link of the vertex is not a single loop")
    return out


def loop_family(X: SimplicialComplex, v: int, anchor: int, times: int = 1) -> CrossingFamily:
    """Sigma'_i = p_i - anchor with p_i walking ``times`` around vertex v
    (backwards for negative ``times``)."""
    loop = loop_around(X, v)
    p0 = loop[-1][2]
    if anchor == p0:
        raise ValueError("anchor coincides with the moving point")
    start = Chain(X, 0, DUAL, {p0: 1, anchor: -1})
    steps = []
    for _ in range(abs(times)):
        for e, s, _t in (loop if times > 0 else reversed(loop)):
            steps.append(Chain.cell(X, 1, e, DUAL) * (s if times > 0 else -s))
    return CrossingFamily.from_steps(start, steps)


def random_point_pair(X: SimplicialComplex, side: str, rng: random.Random,
                      mult: int = 1) -> tuple[Chain, Chain]:
    """(Sigma, Gamma) with Sigma = mult * (p - q) for two random distinct points;
    points are vertices (primal) or triangle centres (dual) of a surface."""
    from .homology import trivialize
    n = n_cells(X, 0, side)
    p, q = rng.sample(range(n), 2)
    sigma = Chain(X, 0, side, {p: mult, q: -mult})
    return sigma, trivialize(sigma)
