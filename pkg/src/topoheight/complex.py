"""Oriented simplicial complexes, sparse chains, dual blocks and the
primal/dual intersection pairing.

Conventions
-----------
* A k-simplex is stored as its sorted vertex tuple.  Below the top degree the
  orientation is the sorted order; top simplices carry an explicit sign
  (``orient[m][i]``) recording the listed orientation.
* Dual k-cells are the blocks D(tau) of primal (m-k)-simplices, so a dual
  k-chain is indexed by the primal (m-k)-simplices.
* kronecker(sigma, D(sigma)) = +1 for every simplex.  The dual boundary is
  then forced by the geometric orientation of the blocks inside the barycentric
  subdivision (checked in the tests):

      boundary_dual_j = (-1)**(m-j+1) * boundary_primal_(m-j+1).T

  which is the same as the Leibniz rule
  kronecker(da, b) = (-1)**p kronecker(a, db).
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

PRIMAL = "primal"
DUAL = "dual"
SIDES = (PRIMAL, DUAL)


class ComplexError(ValueError):
    """Raised for malformed complexes. ``kind`` is a short machine tag."""

    def __init__(self, kind: str, message: str):
        super().__init__(f"{kind}: {message}")
        self.kind = kind


def permutation_sign(seq: Sequence[int]) -> int:
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        while seq[i] != i:
            j = seq[i]
            seq[i], seq[j] = seq[j], seq[i]
            sign = -sign
    return sign


def _relative_sign(order: Sequence[int]) -> int:
    """Sign of the permutation taking sorted(order) to order."""
    ranks = {v: r for r, v in enumerate(sorted(order))}
    return permutation_sign([ranks[v] for v in order])


def other_side(side: str) -> str:
    return DUAL if side == PRIMAL else PRIMAL


class SimplicialComplex:
    """Finite oriented simplicial complex, immutable after construction.

    ``cells[k]`` is the sorted list of sorted vertex tuples of dimension k and
    ``orient[k][i]`` in {+1, -1} is the orientation of cell i relative to the
    sorted order (only ever -1 in the top degree).
    """

    def __init__(self, dim: int, cells: Sequence[Sequence[tuple]],
                 orient: Sequence[Sequence[int]] | None = None,
                 *, check_manifold: bool = False, name: str = ""):
        if dim < 0:
            raise ComplexError("dimension", f"bad dimension {dim}")
        self.dim = dim
        self.name = name
        self.cells = tuple(tuple(sorted(tuple(c) for c in cs)) for cs in cells)
        if len(self.cells) != dim + 1:
            raise ComplexError("dimension", "need one cell list per degree")
        if orient is None:
            self.orient = tuple(tuple(1 for _ in cs) for cs in self.cells)
        else:
            self.orient = tuple(tuple(int(s) for s in o) for o in orient)
        self.index = tuple({c: i for i, c in enumerate(cs)} for cs in self.cells)
        for k in range(1, dim + 1):
            for c in self.cells[k]:
                for f in itertools.combinations(c, k):
                    if f not in self.index[k - 1]:
                        raise ComplexError("faces", f"face {f} of {c} missing")
        self.closed_oriented_manifold_checked = False
        if check_manifold:
            self._check_closed_oriented()
            self.closed_oriented_manifold_checked = True

    # construction -------------------------------------------------------

    @classmethod
    def from_top_simplices(cls, dim: int, tops: Iterable[Sequence[int]],
                           n_vertices: int | None = None, name: str = "",
                           check: bool = True) -> "SimplicialComplex":
        """Closed oriented m-manifold from its listed (oriented) top simplices."""
        tops = [tuple(int(v) for v in t) for t in tops]
        if not tops:
            raise ComplexError("non-manifold", "no simplices")
        used = sorted({v for t in tops for v in t})
        if n_vertices is None:
            n_vertices = used[-1] + 1
        for t in tops:
            if len(t) != dim + 1 or len(set(t)) != dim + 1:
                raise ComplexError("non-manifold", f"simplex {t} is not a {dim}-simplex")
            if any(v < 0 or v >= n_vertices for v in t):
                raise ComplexError("dangling", f"simplex {t} references a missing vertex")
        if len(used) != n_vertices:
            missing = sorted(set(range(n_vertices)) - set(used))
            raise ComplexError("non-manifold", f"isolated vertices {missing}")
        signs = {}
        for t in tops:
            key = tuple(sorted(t))
            if key in signs:
                raise ComplexError("non-manifold", f"simplex {key} listed twice")
            signs[key] = _relative_sign(t)
        cells = [set() for _ in range(dim + 1)]
        for key in signs:
            for k in range(dim + 1):
                cells[k].update(itertools.combinations(key, k + 1))
        cells = [sorted(c) for c in cells]
        orient = [[1] * len(c) for c in cells]
        orient[dim] = [signs[c] for c in cells[dim]]
        return cls(dim, cells, orient, check_manifold=check, name=name)

    def _check_closed_oriented(self) -> None:
        m = self.dim
        if m == 0:
            return
        incid = [[] for _ in self.cells[m - 1]]
        for j, col in enumerate(self._bd[m]):
            for i, s in col:
                incid[i].append(s)
        for i, signs in enumerate(incid):
            if len(signs) != 2:
                raise ComplexError(
                    "non-manifold",
                    f"face {self.cells[m - 1][i]} lies in {len(signs)} top simplices")
            if signs[0] + signs[1] != 0:
                raise ComplexError(
                    "orientation",
                    f"face {self.cells[m - 1][i]} gets the same induced orientation twice")

    # combinatorics ------------------------------------------------------

    def n_cells(self, k: int) -> int:
        if 0 <= k <= self.dim:
            return len(self.cells[k])
        return 0

    @property
    def f_vector(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.cells)

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * n for k, n in enumerate(self.f_vector))

    @cached_property
    def _bd(self) -> tuple:
        """Sparse boundary columns: _bd[k][j] = [(face index, sign), ...]."""
        out = [()]
        for k in range(1, self.dim + 1):
            idx = self.index[k - 1]
            cols = []
            for j, c in enumerate(self.cells[k]):
                o = self.orient[k][j]
                cols.append(tuple((idx[c[:i] + c[i + 1:]], o * (-1) ** i)
                                  for i in range(k + 1)))
            out.append(tuple(cols))
        return tuple(out)

    @cached_property
    def _cobd(self) -> tuple:
        """_cobd[k][i] = [(coface index in degree k+1, sign), ...]."""
        out = []
        for k in range(self.dim + 1):
            rows = [[] for _ in self.cells[k]]
            if k < self.dim:
                for j, col in enumerate(self._bd[k + 1]):
                    for i, s in col:
                        rows[i].append((j, s))
            out.append(tuple(tuple(r) for r in rows))
        return tuple(out)

    def faces(self, k: int, i: int) -> list[tuple[int, int]]:
        """All faces (degree, index) of cell (k, i), including itself."""
        c = self.cells[k][i]
        return [(d, self.index[d][f]) for d in range(k + 1)
                for f in itertools.combinations(c, d + 1)]

    def cofaces(self, k: int, i: int) -> list[tuple[int, int]]:
        """All cells (degree, index) having cell (k, i) as a face."""
        c = set(self.cells[k][i])
        return [(d, j) for d in range(k, self.dim + 1)
                for j, s in enumerate(self.cells[d]) if c.issubset(s)]

    def __repr__(self) -> str:
        label = self.name or "SimplicialComplex"
        return f"<{label} dim={self.dim} f={self.f_vector}>"

    # dual/subdivision ---------------------------------------------------

    @cached_property
    def subdivision(self) -> "BarycentricSubdivision":
        return BarycentricSubdivision(self)


def n_cells(X: SimplicialComplex, k: int, side: str = PRIMAL) -> int:
    if side == PRIMAL:
        return X.n_cells(k)
    if side == DUAL:
        return X.n_cells(X.dim - k) if 0 <= k <= X.dim else 0
    raise ValueError(f"unknown side {side!r}")


def dual_sign(m: int, j: int) -> int:
    """Sign relating the dual boundary in degree j to the primal transpose."""
    return -1 if (m - j + 1) % 2 else 1


def boundary_columns(X: SimplicialComplex, k: int, side: str):
    """Sparse columns of the boundary map C_k -> C_{k-1} on the given side."""
    if side == PRIMAL:
        return X._bd[k]
    s = dual_sign(X.dim, k)
    return tuple(tuple((i, s * t) for i, t in col) for col in X._cobd[X.dim - k])


def boundary_matrix(X: SimplicialComplex, k: int, side: str = PRIMAL) -> np.ndarray:
    """Integer matrix of the boundary C_k -> C_{k-1}; columns index k-cells."""
    if not 1 <= k <= X.dim:
        raise ValueError(f"degree {k} out of range 1..{X.dim}")
    if side not in SIDES:
        raise ValueError(f"unknown side {side!r}")
    cols = boundary_columns(X, k, side)
    A = np.zeros((n_cells(X, k - 1, side), n_cells(X, k, side)), dtype=np.int64)
    for j, col in enumerate(cols):
        for i, s in col:
            A[i, j] += s
    return A


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("chains hold exact coefficients; got a float")
    return Fraction(x)


class Chain:
    """Sparse formal sum of oriented cells with exact rational coefficients."""

    __slots__ = ("complex", "degree", "side", "coeffs")

    def __init__(self, complex: SimplicialComplex, degree: int, side: str = PRIMAL,
                 coeffs: Mapping[int, object] | None = None):
        if side not in SIDES:
            raise ValueError(f"unknown side {side!r}")
        n = n_cells(complex, degree, side)
        clean = {}
        for i, c in (coeffs or {}).items():
            i = int(i)
            if not 0 <= i < n:
                raise ValueError(f"cell {i} out of range for {side} degree {degree}")
            c = _frac(c)
            if c:
                clean[i] = c
        self.complex = complex
        self.degree = degree
        self.side = side
        self.coeffs = clean

    @classmethod
    def zero(cls, X, degree, side=PRIMAL) -> "Chain":
        return cls(X, degree, side, {})

    @classmethod
    def cell(cls, X, degree, index, side=PRIMAL, coeff=1) -> "Chain":
        return cls(X, degree, side, {index: coeff})

    @classmethod
    def from_vector(cls, X, degree, side, vec) -> "Chain":
        return cls(X, degree, side, {i: c for i, c in enumerate(vec) if c})

    def to_vector(self) -> list[Fraction]:
        v = [Fraction(0)] * n_cells(self.complex, self.degree, self.side)
        for i, c in self.coeffs.items():
            v[i] = c
        return v

    def support(self) -> list[int]:
        return sorted(self.coeffs)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs.values())

    def is_zero(self) -> bool:
        return not self.coeffs

    def _check(self, other: "Chain") -> None:
        if (other.complex is not self.complex or other.degree != self.degree
                or other.side != self.side):
            raise ValueError("chains live in different groups")

    def __add__(self, other: "Chain") -> "Chain":
        self._check(other)
        out = dict(self.coeffs)
        for i, c in other.coeffs.items():
            out[i] = out.get(i, 0) + c
        return Chain(self.complex, self.degree, self.side, out)

    def __neg__(self) -> "Chain":
        return Chain(self.complex, self.degree, self.side,
                     {i: -c for i, c in self.coeffs.items()})

    def __sub__(self, other: "Chain") -> "Chain":
        return self + (-other)

    def __mul__(self, scalar) -> "Chain":
        s = _frac(scalar)
        return Chain(self.complex, self.degree, self.side,
                     {i: s * c for i, c in self.coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, Chain):
            return NotImplemented
        return (self.complex is other.complex and self.degree == other.degree
                and self.side == other.side and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((id(self.complex), self.degree, self.side,
                     frozenset(self.coeffs.items())))

    def __repr__(self) -> str:
        terms = " ".join(f"{c}*[{i}]" for i, c in sorted(self.coeffs.items()))
        return f"Chain({self.side}, deg={self.degree}: {terms or '0'})"

    def boundary(self) -> "Chain":
        if self.degree == 0:
            raise ValueError("boundary of a 0-chain")
        cols = boundary_columns(self.complex, self.degree, self.side)
        out: dict[int, Fraction] = {}
        for j, c in self.coeffs.items():
            for i, s in cols[j]:
                out[i] = out.get(i, 0) + s * c
        return Chain(self.complex, self.degree - 1, self.side, out)

    def is_cycle(self) -> bool:
        return self.degree == 0 or self.boundary().is_zero()

    def primal_cells(self) -> list[tuple[int, int]]:
        """Primal cells (dimension, index) labelling the support."""
        d = self.degree if self.side == PRIMAL else self.complex.dim - self.degree
        return [(d, i) for i in self.support()]


def kronecker_intersection(a: Chain, b: Chain) -> Fraction:
    """Intersection number of a primal p-chain with a dual (m-p)-chain."""
    if a.complex is not b.complex:
        raise ValueError("chains on different complexes")
    if a.side != PRIMAL or b.side != DUAL:
        raise ValueError("expected (primal, dual) chains")
    if a.degree + b.degree != a.complex.dim:
        raise ValueError(f"degrees {a.degree} and {b.degree} are not complementary")
    small, big = (a, b) if len(a.coeffs) <= len(b.coeffs) else (b, a)
    return sum((c * big.coeffs[i] for i, c in small.coeffs.items() if i in big.coeffs),
               Fraction(0))


def intersect(x: Chain, y: Chain) -> Fraction:
    """Graded-commutative intersection number x . y of chains on opposite sides.

    For a primal a and dual b, a . b = kronecker(a, b) and
    b . a = (-1)**(deg a * deg b) a . b.
    """
    if x.side == PRIMAL:
        return kronecker_intersection(x, y)
    return (-1) ** (x.degree * y.degree) * kronecker_intersection(y, x)


def integrate(domain: Chain, form: Chain) -> Fraction:
    """Integral of a chain-valued form over a domain chain on the other side."""
    return intersect(domain, form)


# --------------------------------------------------------------------------
# barycentric subdivision and dual blocks


class BarycentricSubdivision:
    """sd(X) as a SimplicialComplex whose vertices are the cells of X.

    Vertex numbering follows (dimension, index), so a sorted vertex tuple of
    sd(X) is a flag of cells with increasing dimension.
    """

    def __init__(self, X: SimplicialComplex):
        self.parent = X
        m = X.dim
        self.offset = [0]
        for k in range(m + 1):
            self.offset.append(self.offset[-1] + X.n_cells(k))
        self.cell_of = [(k, i) for k in range(m + 1) for i in range(X.n_cells(k))]
        # all flags via downward extension from every cell
        down = {}
        for k in range(m + 1):
            for i in range(X.n_cells(k)):
                down[(k, i)] = [f for f in X.faces(k, i) if f[0] < k]
        flags = [[((k, i),) for k in range(m + 1) for i in range(X.n_cells(k))]]
        for _ in range(m):
            nxt = []
            for fl in flags[-1]:
                for f in down[fl[0]]:
                    nxt.append((f,) + fl)
            flags.append(nxt)
        cells = [sorted(tuple(self.vertex(c) for c in fl) for fl in fs) for fs in flags]
        orient = [[1] * len(cs) for cs in cells]
        orient[m] = [self._top_sign(c) for c in cells[m]]
        self.complex = SimplicialComplex(m, cells, orient, check_manifold=False,
                                         name=f"sd({X.name})")

    def vertex(self, cell: tuple[int, int]) -> int:
        return self.offset[cell[0]] + cell[1]

    def flag(self, sd_simplex: Sequence[int]) -> list[tuple[int, int]]:
        return [self.cell_of[v] for v in sd_simplex]

    def _added_vertices(self, flag) -> list[int]:
        X = self.parent
        seq, prev = [], set()
        for k, i in flag:
            new = [v for v in X.cells[k][i] if v not in prev]
            seq.extend(sorted(new))
            prev = set(X.cells[k][i])
        return seq

    def _top_sign(self, sd_simplex) -> int:
        X = self.parent
        fl = self.flag(sd_simplex)
        verts = self._added_vertices(fl)
        k, i = fl[-1]
        return _relative_sign(verts) * X.orient[k][i]

    def dual_block(self, k: int, i: int) -> Chain:
        """D(sigma) for primal (k, i), as an (m-k)-chain of sd(X).

        Oriented so that sigma followed by D(sigma) gives the orientation of X.
        """
        X, sd = self.parent, self.complex
        m = X.dim
        start = self.vertex((k, i))
        a = X.orient[k][i]
        coeffs = {}
        for j, c in enumerate(sd.cells[m - k]):
            if c[0] != start:
                continue
            fl = [(k2, i2) for k2, i2 in self.flag(c)]
            # complete downward with the sorted vertices of sigma
            full = [(d, X.index[d][X.cells[k][i][:d + 1]]) for d in range(k)] + fl
            verts = self._added_vertices(full)
            top = fl[-1]
            x = _relative_sign(verts) * X.orient[top[0]][top[1]]
            coeffs[j] = x * a * sd.orient[m - k][j]
        return Chain(sd, m - k, PRIMAL, coeffs)

    def primal_cell(self, k: int, i: int) -> Chain:
        """sigma itself as a k-chain of sd(X), orientation preserved."""
        X, sd = self.parent, self.complex
        coeffs = {}
        target = set(X.cells[k][i])
        for j, c in enumerate(sd.cells[k]):
            fl = self.flag(c)
            if len(fl) != k + 1 or fl[-1] != (k, i):
                continue
            verts = self._added_vertices(fl)
            coeffs[j] = _relative_sign(verts) * X.orient[k][i] * sd.orient[k][j]
            assert set(verts) == target
        return Chain(sd, k, PRIMAL, coeffs)

    def embed(self, c: Chain) -> Chain:
        """Realize a primal or dual chain of X as a chain of sd(X)."""
        X = self.parent
        out = Chain.zero(self.complex, c.degree)
        for i, coef in c.coeffs.items():
            if c.side == PRIMAL:
                piece = self.primal_cell(c.degree, i)
            else:
                piece = self.dual_block(X.dim - c.degree, i)
            out = out + piece * coef
        return out


def closure(X: SimplicialComplex, cells: Iterable[tuple[int, int]]) -> set[tuple[int, int]]:
    out = set()
    for k, i in cells:
        out.update(X.faces(k, i))
    return out


def full_subcomplex(K: SimplicialComplex, keep_vertices: set[int], name: str = "") -> SimplicialComplex:
    cells, orient = [], []
    for k in range(K.dim + 1):
        cs, os_ = [], []
        for j, c in enumerate(K.cells[k]):
            if all(v in keep_vertices for v in c):
                cs.append(c)
                os_.append(K.orient[k][j])
        cells.append(cs)
        orient.append(os_)
    return SimplicialComplex(K.dim, cells, orient, name=name)


def complement_subcomplex(X: SimplicialComplex, S) -> SimplicialComplex:
    """Deformation retract of X - |S| inside sd(X).

    ``S`` is a primal Chain or an iterable of primal cells (dimension, index).
    Keeps the full subcomplex of sd(X) on the barycenters of cells outside the
    closure of S; its cells keep their sd(X) vertex labels.
    """
    cells = S.primal_cells() if isinstance(S, Chain) else list(S)
    if isinstance(S, Chain) and S.side != PRIMAL:
        raise ValueError("complement of a primal support expected")
    sd = X.subdivision
    bad = {sd.vertex(c) for c in closure(X, cells)}
    keep = set(range(sd.offset[-1])) - bad
    if not keep:
        raise ComplexError("empty", "S covers all of X")
    return full_subcomplex(sd.complex, keep, name=f"{X.name}-|S|")


def dual_support_subcomplex(X: SimplicialComplex, c: Chain, within: SimplicialComplex | None = None) -> SimplicialComplex:
    """Closed support of a dual chain inside sd(X): union of closed dual blocks."""
    if c.side != DUAL:
        raise ValueError("dual chain expected")
    sd = X.subdivision
    roots = [sd.vertex(cell) for cell in c.primal_cells()]
    root_sets = [set(X.cells[sd.cell_of[r][0]][sd.cell_of[r][1]]) for r in roots]
    keep = set()
    for v in range(sd.offset[-1]):
        k, i = sd.cell_of[v]
        s = set(X.cells[k][i])
        if any(r.issubset(s) for r in root_sets):
            keep.add(v)
    A = full_subcomplex(sd.complex, keep, name="|dual support|")
    if within is not None:
        for k in range(A.dim + 1):
            for cell in A.cells[k]:
                if cell not in within.index[k]:
                    raise ComplexError("support", "subcomplex not contained in the complement")
    return A
