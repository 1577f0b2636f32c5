"""Integer homology modulo torsion, trivializing chains, relative homology of
complement pairs and the three-step weight filtration."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .complex import (DUAL, PRIMAL, Chain, SimplicialComplex, boundary_columns,
                      closure, complement_subcomplex, dual_support_subcomplex, n_cells)
from .snf import identity, matmul, smith


class NotTrivialError(ValueError):
    """A cycle that is not a boundary; ``certificate`` pairs nontrivially with it."""

    def __init__(self, message: str, certificate=None, pairing=None):
        super().__init__(message)
        self.certificate = certificate
        self.pairing = pairing


def _dense(cols, row_index: dict[int, int] | None, col_ids: Sequence[int], n_rows: int):
    A = [[0] * len(col_ids) for _ in range(n_rows)]
    for jj, j in enumerate(col_ids):
        for i, s in cols[j]:
            if row_index is None:
                A[i][jj] += s
            elif i in row_index:
                A[row_index[i]][jj] += s
    return A


@dataclass
class _Homology:
    """Homology of C_{k+1} -> C_k -> C_{k-1} computed from two Smith forms."""

    n: int
    coord_rows: list[list[int]]      # rank x n: class coordinates of a cycle
    reps: list[list[int]]            # rank vectors of length n
    torsion: list[int]
    kernel_rows: list[list[int]]     # z x n: kernel coordinates of a cycle
    P: list[list[int]]
    Q: list[list[int]]
    invariants: list[int]
    kernel_rank: int

    @classmethod
    def compute(cls, d_k, d_k1, n: int, n_km1: int, n_kp1: int) -> "_Homology":
        if n_km1 and n:
            s1 = smith(d_k, n_km1, n)
            r = s1.rank
            kernel_rows = s1.Vinv[r:]
            K = [row[r:] for row in s1.V]
        else:
            r = 0
            kernel_rows = identity(n)
            K = identity(n)
        z = n - r
        if n_kp1 and z:
            Y = matmul(kernel_rows, d_k1)
            s2 = smith(Y, z, n_kp1)
            s, P, Pi, Q, inv = s2.rank, s2.U, s2.Uinv, s2.V, s2.invariants
        else:
            s, P, Pi, Q, inv = 0, identity(z), identity(z), identity(n_kp1), []
        coord_rows = matmul(P[s:], kernel_rows) if z > s else []
        reps_cols = matmul(K, [row[s:] for row in Pi]) if z > s else []
        reps = [list(col) for col in zip(*reps_cols)] if reps_cols else []
        return cls(n, coord_rows, reps, [d for d in inv if d > 1],
                   kernel_rows, P, Q, inv, z)

    @property
    def rank(self) -> int:
        return len(self.reps)

    def coordinates(self, vec: Sequence) -> list[Fraction]:
        return [sum((Fraction(a) * b for a, b in zip(row, vec) if a and b), Fraction(0))
                for row in self.coord_rows]

    def bound(self, vec: Sequence[int]) -> list[int] | None:
        """Integer x with d_{k+1} x = vec for a boundary vec, else None."""
        y = [sum(a * b for a, b in zip(row, vec) if a and b) for row in self.kernel_rows]
        w = [sum(a * b for a, b in zip(row, y) if a and b) for row in self.P]
        s = len(self.invariants)
        if any(w[s:]):
            return None
        u = []
        for i, d in enumerate(self.invariants):
            if w[i] % d:
                return None
            u.append(w[i] // d)
        n1 = len(self.Q)
        return [sum(self.Q[r][i] * u[i] for i in range(s)) for r in range(n1)]


@dataclass
class HomologyBasis:
    """Basis of H_k(X; Z)/torsion by integral cycle representatives."""

    complex: SimplicialComplex
    degree: int
    side: str
    representatives: list[Chain]
    torsion: list[int]
    _h: _Homology = field(repr=False)

    @property
    def rank(self) -> int:
        return len(self.representatives)

    def coordinates(self, cycle: Chain) -> tuple[Fraction, ...]:
        """Class of a (rational) cycle in the basis."""
        if cycle.degree != self.degree or cycle.side != self.side:
            raise ValueError("cycle of the wrong degree/side")
        if not cycle.is_cycle():
            raise ValueError("not a cycle")
        return tuple(self._h.coordinates(cycle.to_vector()))

    def cocycle(self, j: int) -> list[int]:
        """Integer cochain dual to representative j (vanishes on boundaries)."""
        return list(self._h.coord_rows[j])

    def change_basis(self, A: Sequence[Sequence[int]]) -> "HomologyBasis":
        """New basis b'_i = sum_j A[i][j] b_j for unimodular integer A."""
        from flint import fmpz_mat
        M = fmpz_mat([[int(a) for a in row] for row in A])
        if abs(int(M.det())) != 1:
            raise ValueError("basis change must be unimodular")
        Minv = M.inv()  # exact rational; integral since det = +-1
        inv_rows = [[int(Minv[i, j]) for j in range(M.ncols())] for i in range(M.nrows())]
        reps = []
        for row in A:
            c = Chain.zero(self.complex, self.degree, self.side)
            for a, b in zip(row, self.representatives):
                if a:
                    c = c + b * a
            reps.append(c)
        # new coordinates x' satisfy x = A^T x', so x' = A^{-T} x
        invT = [list(col) for col in zip(*inv_rows)]
        h = self._h
        new_rows = matmul(invT, h.coord_rows)
        h2 = _Homology(h.n, new_rows, [r.to_vector() for r in reps], h.torsion,
                       h.kernel_rows, h.P, h.Q, h.invariants, h.kernel_rank)
        return HomologyBasis(self.complex, self.degree, self.side, reps, self.torsion, h2)


def _complex_homology(X: SimplicialComplex, k: int, side: str) -> _Homology:
    n = n_cells(X, k, side)
    nm, np_ = n_cells(X, k - 1, side), n_cells(X, k + 1, side)
    d_k = _dense(boundary_columns(X, k, side), None, range(n), nm) if k >= 1 and nm else None
    d_k1 = _dense(boundary_columns(X, k + 1, side), None, range(np_), n) if np_ else None
    return _Homology.compute(d_k, d_k1, n, nm if k >= 1 else 0, np_)


_CACHE: dict = {}


def homology_basis(X: SimplicialComplex, k: int, side: str = PRIMAL) -> HomologyBasis:
    key = (id(X), k, side)
    if key not in _CACHE or _CACHE[key][0] is not X:
        h = _complex_homology(X, k, side)
        reps = [Chain.from_vector(X, k, side, v) for v in h.reps]
        _CACHE[key] = (X, HomologyBasis(X, k, side, reps, h.torsion, h))
    return _CACHE[key][1]


def betti(X: SimplicialComplex, k: int, side: str = PRIMAL) -> int:
    return homology_basis(X, k, side).rank


def trivialize(sigma: Chain) -> Chain:
    """Integral chain Gamma with boundary(Gamma) == sigma.

    Raises NotTrivialError carrying an integer cocycle that pairs nonzero with
    sigma when sigma is not a boundary.
    """
    if not sigma.is_integral():
        raise ValueError("trivialize expects an integral cycle")
    if not sigma.is_cycle():
        raise ValueError("not a cycle")
    X, k, side = sigma.complex, sigma.degree, sigma.side
    if sigma.is_zero():
        return Chain.zero(X, k + 1, side)
    H = homology_basis(X, k, side)
    coords = H.coordinates(sigma)
    for j, c in enumerate(coords):
        if c:
            raise NotTrivialError(f"cycle has homology coordinate {c} on generator {j}",
                                  certificate=H.cocycle(j), pairing=c)
    x = H._h.bound([int(c) for c in sigma.to_vector()])
    if x is None:
        raise NotTrivialError("cycle is torsion in homology; no integral trivialization")
    gamma = Chain.from_vector(X, k + 1, side, x)
    assert gamma.boundary() == sigma
    return gamma


# --------------------------------------------------------------------------
# relative homology of (X - |Sigma|, |Sigma'|)


def _transfer(c: Chain, L: SimplicialComplex) -> Chain:
    """Move a chain of a complex K onto a complex L sharing vertex labels."""
    K = c.complex
    out = {}
    for i, a in c.coeffs.items():
        cell = K.cells[c.degree][i]
        j = L.index[c.degree].get(cell)
        if j is None:
            raise ValueError(f"cell {cell} not in target complex")
        sign = K.orient[c.degree][i] * L.orient[c.degree][j]
        out[j] = out.get(j, 0) + sign * a
    return Chain(L, c.degree, PRIMAL, out)


@dataclass
class RelativeHomology:
    """M_Z = H_k(L, A; Z)/torsion with its connecting map to H_{k-1}(A; Z)."""

    L: SimplicialComplex
    A: SimplicialComplex
    degree: int
    representatives: list[Chain]
    connecting: list[list[Fraction]]     # rank M x rank H_{k-1}(A)
    boundary_basis: HomologyBasis | None
    _h: _Homology = field(repr=False)
    _cells: list[int] = field(repr=False)

    @property
    def rank(self) -> int:
        return len(self.representatives)

    def coordinates(self, c: Chain) -> tuple[Fraction, ...]:
        """Class of a relative cycle (a chain of L with boundary in A)."""
        if c.complex is not self.L:
            c = _transfer(c, self.L)
        vec = c.to_vector()
        sub = [vec[i] for i in self._cells]
        return tuple(self._h.coordinates(sub))


def relative_homology(L: SimplicialComplex, A: SimplicialComplex, k: int) -> RelativeHomology:
    """H_k(L, A) for a subcomplex A of L sharing vertex labels."""
    sel = []
    for d in (k - 1, k, k + 1):
        if 0 <= d <= L.dim:
            inA = set(A.cells[d]) if d <= A.dim else set()
            for cell in inA:
                if cell not in L.index[d]:
                    raise ValueError("A is not contained in L")
            sel.append([i for i, c in enumerate(L.cells[d]) if c not in inA])
        else:
            sel.append([])
    rows_km1 = {i: r for r, i in enumerate(sel[0])}
    rows_k = {i: r for r, i in enumerate(sel[1])}
    n, nm, np_ = len(sel[1]), len(sel[0]), len(sel[2])
    d_k = _dense(L._bd[k], rows_km1, sel[1], nm) if k >= 1 and nm else None
    d_k1 = _dense(L._bd[k + 1], rows_k, sel[2], n) if np_ else None
    h = _Homology.compute(d_k, d_k1, n, nm if k >= 1 else 0, np_)
    reps = []
    for v in h.reps:
        reps.append(Chain(L, k, PRIMAL, {sel[1][r]: a for r, a in enumerate(v) if a}))
    HA = None
    connecting = [[] for _ in reps]
    if k >= 1 and A.n_cells(k - 1):
        HA = homology_basis(A, k - 1)
        connecting = [list(HA.coordinates(_transfer(r.boundary(), A))) for r in reps]
    return RelativeHomology(L, A, k, reps, connecting, HA, h, sel[1])


def _saturate(vectors: list[list[Fraction]], n: int) -> list[list[int]]:
    """Z-basis of (span_Q vectors) intersected with Z^n."""
    rows = []
    for v in vectors:
        den = 1
        for a in v:
            den = den * Fraction(a).denominator // _gcd(den, Fraction(a).denominator)
        rows.append([int(Fraction(a) * den) for a in v])
    rows = [r for r in rows if any(r)]
    if not rows:
        return []
    s = smith(rows, len(rows), n)
    return [list(r) for r in s.Vinv[:s.rank]]


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def _left_kernel(C: list[list[Fraction]], n: int) -> list[list[int]]:
    """Saturated Z-basis of {x in Z^n : x C = 0}."""
    if not C or not C[0]:
        return identity(n)
    cols = len(C[0])
    den = 1
    for row in C:
        for a in row:
            den = den * Fraction(a).denominator // _gcd(den, Fraction(a).denominator)
    Ct = [[int(Fraction(C[i][j]) * den) for i in range(n)] for j in range(cols)]
    s = smith(Ct, cols, n)
    return [[s.V[i][j] for i in range(n)] for j in range(s.rank, n)]


@dataclass
class WeightFiltration:
    """W0 <= W1 <= W2 = M as saturated sublattices, bases in M-coordinates."""

    M: RelativeHomology
    W0: list[list[int]]
    W1: list[list[int]]
    W2: list[list[int]]

    @property
    def ranks(self) -> tuple[int, int, int]:
        return len(self.W0), len(self.W1), len(self.W2)


def weight_filtration(M: RelativeHomology, w0_generators: Sequence[Chain]) -> WeightFiltration:
    """W1 = kernel of the connecting map, W0 = saturated image of the link classes."""
    r = M.rank
    W2 = identity(r)
    W1 = _left_kernel(M.connecting, r) if M.boundary_basis is not None else identity(r)
    gens = [list(M.coordinates(g)) for g in w0_generators]
    W0 = _saturate(gens, r)
    # consistency: W0 inside W1
    for w in W0:
        img = [sum(Fraction(w[i]) * M.connecting[i][j] for i in range(r))
               for j in range(len(M.connecting[0]) if M.connecting and M.connecting[0] else 0)]
        if any(img):
            raise ValueError("link classes are not in the kernel of the connecting map")
    return WeightFiltration(M, W0, W1, W2)


def components(X: SimplicialComplex, cells) -> list[list[tuple[int, int]]]:
    """Connected components (as cell lists) of the closure of the given cells."""
    cells = list(cells)
    parent = {}

    def find(v):
        while parent.setdefault(v, v) != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for k, i in cells:
        vs = X.cells[k][i]
        for v in vs[1:]:
            parent[find(v)] = find(vs[0])
    groups: dict[int, list] = {}
    for k, i in cells:
        groups.setdefault(find(X.cells[k][i][0]), []).append((k, i))
    return [sorted(g) for _, g in sorted(groups.items())]


@dataclass
class ComplementPair:
    """The pair (X - |Sigma|, |Sigma'|) realized inside sd(X)."""

    X: SimplicialComplex
    sigma: Chain
    sigma_prime: Chain
    Xc: SimplicialComplex
    A: SimplicialComplex
    M: RelativeHomology
    link_cycles: list[Chain]
    filtration: WeightFiltration


def link_cycle(X: SimplicialComplex, k: int, i: int) -> Chain:
    """Boundary of the dual block of a primal k-cell, as a chain of sd(X).

    Oriented as the boundary of a small ball meeting the cell positively
    (so its integral against a form with boundary sigma is +1).
    """
    sd = X.subdivision
    return sd.dual_block(k, i).boundary() * ((-1) ** (k + 1))


def complement_pair(sigma: Chain, sigma_prime: Chain) -> ComplementPair:
    """Build M_Z = H_{k+1}(X - |Sigma|, |Sigma'|) and its weight filtration."""
    X = sigma.complex
    if sigma.side != PRIMAL or sigma_prime.side != DUAL:
        raise ValueError("expected primal Sigma and dual Sigma'")
    k = sigma.degree
    Xc = complement_subcomplex(X, sigma)
    if sigma_prime.is_zero():
        A = SimplicialComplex(X.dim, [[] for _ in range(X.dim + 1)])
    else:
        A = dual_support_subcomplex(X, sigma_prime, within=Xc)
    M = relative_homology(Xc, A, k + 1)
    links = []
    for comp in components(X, sigma.primal_cells()):
        kk, ii = comp[0]
        links.append(_transfer(link_cycle(X, kk, ii), Xc))
    W = weight_filtration(M, links)
    return ComplementPair(X, sigma, sigma_prime, Xc, A, M, links, W)
