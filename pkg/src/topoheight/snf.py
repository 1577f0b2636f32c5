"""Smith normal form over the integers with unimodular transforms."""

from __future__ import annotations

from typing import NamedTuple, Sequence

import flint


class SmithForm(NamedTuple):
    U: list[list[int]]
    D: list[list[int]]
    V: list[list[int]]
    Uinv: list[list[int]]
    Vinv: list[list[int]]
    rank: int

    @property
    def invariants(self) -> list[int]:
        return [self.D[i][i] for i in range(self.rank)]


def identity(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def matmul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> list[list[int]]:
    if not A:
        return []
    if not B or not B[0]:
        return [[] for _ in A]
    C = flint.fmpz_mat([list(r) for r in A]) * flint.fmpz_mat([list(r) for r in B])
    return [[int(x) for x in row] for row in C.tolist()]


def smith(A: Sequence[Sequence[int]], nrows: int | None = None, ncols: int | None = None) -> SmithForm:
    """U*A*V = D with D diagonal, d1 | d2 | ..., d_i > 0; U, V unimodular."""
    m = len(A) if nrows is None else nrows
    n = (len(A[0]) if m else 0) if ncols is None else ncols
    A = [list(map(int, row)) for row in A] if m else []
    U, Ui, V, Vi = identity(m), identity(m), identity(n), identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]
        for row in Ui:
            row[i], row[j] = row[j], row[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]
        Vi[i], Vi[j] = Vi[j], Vi[i]

    def row_axpy(i, t, q):
        # row_i += q * row_t
        ra, rt = A[i], A[t]
        for c in range(n):
            if rt[c]:
                ra[c] += q * rt[c]
        ru, rt = U[i], U[t]
        for c in range(m):
            if rt[c]:
                ru[c] += q * rt[c]
        for row in Ui:
            if row[i]:
                row[t] -= q * row[i]

    def col_axpy(j, t, q):
        # col_j += q * col_t
        for row in A:
            if row[t]:
                row[j] += q * row[t]
        for row in V:
            if row[t]:
                row[j] += q * row[t]
        vj, vt = Vi[j], Vi[t]
        for c in range(n):
            if vj[c]:
                vt[c] -= q * vj[c]

    rank = 0
    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            row = A[i]
            for j in range(t, n):
                a = row[j]
                if a and (best is None or abs(a) < best[0]):
                    best = (abs(a), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, pi, pj = best
        if pi != t:
            swap_rows(t, pi)
        if pj != t:
            swap_cols(t, pj)
        while True:
            p = A[t][t]
            restart = False
            for i in range(t + 1, m):
                a = A[i][t]
                if a:
                    row_axpy(i, t, -(a // p))
                    if A[i][t]:
                        swap_rows(i, t)
                        restart = True
                        break
            if restart:
                continue
            for j in range(t + 1, n):
                a = A[t][j]
                if a:
                    col_axpy(j, t, -(a // p))
                    if A[t][j]:
                        swap_cols(j, t)
                        restart = True
                        break
            if restart:
                continue
            if abs(p) != 1:
                bad = next((i for i in range(t + 1, m)
                            if any(A[i][j] % p for j in range(t + 1, n))), None)
                if bad is not None:
                    row_axpy(t, bad, 1)
                    continue
            break
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
            for row in Ui:
                row[t] = -row[t]
        rank += 1
    return SmithForm(U, A, V, Ui, Vi, rank)


def smith_normal_form(A: Sequence[Sequence[int]]):
    """Return (U, D, V) with U*A*V = D in Smith normal form."""
    s = smith(A)
    return s.U, s.D, s.V


def is_smith_normal_form(D: Sequence[Sequence[int]]) -> bool:
    prev = None
    for i, row in enumerate(D):
        for j, a in enumerate(row):
            if i != j and a:
                return False
    diag = [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0))]
    for d in diag:
        if d < 0:
            return False
        if prev is not None:
            if prev == 0 and d != 0:
                return False
            if prev and d % prev:
                return False
        prev = d
    return True
