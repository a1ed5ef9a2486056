"""Exact integer linear algebra: Smith normal form and what it buys.

Matrices are lists of integer rows.  Nothing here allocates anything fancier
than Python ints, which are arbitrary precision already.
"""

from __future__ import annotations

import math
from typing import Sequence

from .errors import NoSolution, NotUnimodular

Matrix = list[list[int]]


def as_matrix(A: Sequence[Sequence[int]]) -> Matrix:
    rows = [[int(x) for x in row] for row in A]
    if not rows or not rows[0]:
        raise ValueError("matrix dimensions must be positive")
    if any(len(r) != len(rows[0]) for r in rows):
        raise ValueError("ragged matrix")
    return rows


def identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> Matrix:
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def mat_vec(A: Sequence[Sequence[int]], x: Sequence[int]) -> list[int]:
    return [sum(a * b for a, b in zip(row, x)) for row in A]


def transpose(A: Sequence[Sequence[int]]) -> Matrix:
    return [list(col) for col in zip(*A)]


def determinant(A: Sequence[Sequence[int]]) -> int:
    """Fraction-free Bareiss elimination."""
    M = as_matrix(A)
    n = len(M)
    if any(len(r) != n for r in M):
        raise ValueError("determinant of a non-square matrix")
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def lattice_index(A: Sequence[Sequence[int]]) -> int | float:
    """|det A|, the index of the lattice spanned by the rows; ``math.inf`` if singular."""
    d = determinant(A)
    return abs(d) if d else math.inf


def smith_normal_form(A: Sequence[Sequence[int]], with_inverse: bool = False):
    """Return ``(U, D, V)`` with ``U A V = D`` diagonal and d1 | d2 | ...

    With ``with_inverse`` the tuple also carries ``V^{-1}``.
    """
    D = as_matrix(A)
    m, n = len(D), len(D[0])
    U, V, Vi = identity(m), identity(n), identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]
        Vi[i], Vi[j] = Vi[j], Vi[i]

    def add_row(dst, src, c):  # row_dst += c * row_src
        D[dst] = [a + c * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + c * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, c):  # col_dst += c * col_src
        for row in D:
            row[dst] += c * row[src]
        for row in V:
            row[dst] += c * row[src]
        Vi[src] = [a - c * b for a, b in zip(Vi[src], Vi[dst])]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    x = D[i][j]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), i, j)
            if best is None:
                break
            _, i, j = best
            swap_rows(t, i)
            swap_cols(t, j)
            p = D[t][t]
            done = True
            for i in range(t + 1, m):
                q = D[i][t] // p
                if q:
                    add_row(i, t, -q)
                if D[i][t]:
                    done = False
            for j in range(t + 1, n):
                q = D[t][j] // p
                if q:
                    add_col(j, t, -q)
                if D[t][j]:
                    done = False
            if not done:
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
    if with_inverse:
        return U, D, V, Vi
    return U, D, V


def diagonal(D: Sequence[Sequence[int]]) -> list[int]:
    return [D[i][i] for i in range(min(len(D), len(D[0])))]


def complete_unimodular_row(k: Sequence[int]) -> Matrix:
    """A square unimodular matrix whose first row is ``k``."""
    k = [int(x) for x in k]
    if not k:
        raise ValueError("empty row")
    U, D, V, Vi = smith_normal_form([k], with_inverse=True)
    if D[0][0] != 1:
        raise NotUnimodular(f"row {k} has gcd {D[0][0]}", row=k)
    # k = U^{-1} e1 V^{-1}, and U = (+-1)
    M = [list(r) for r in Vi]
    M[0] = [U[0][0] * x for x in M[0]]
    assert M[0] == k
    return M


def inverse_unimodular(A: Sequence[Sequence[int]]) -> Matrix:
    U, D, V = smith_normal_form(A)
    n = len(D)
    if len(D[0]) != n or any(D[i][i] != 1 for i in range(n)):
        raise NotUnimodular("matrix is not unimodular")
    return mat_mul(V, U)


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def solve_linear(A: Sequence[Sequence[int]], b: Sequence[int], modulus: int | None = None) -> list[int]:
    """One canonical solution of ``A x = b`` over Z, or over Z/m with ``modulus``.

    Free SNF parameters are set to zero; over Z/m each determined parameter is
    the least residue.  On failure :class:`NoSolution` carries ``obstruction``:
    the least k > 0 with ``k b`` in the image (0 when no multiple works).
    """
    A = as_matrix(A)
    b = [int(x) for x in b]
    if len(b) != len(A):
        raise ValueError("dimension mismatch between A and b")
    U, D, V = smith_normal_form(A)
    c = mat_vec(U, b)
    n = len(A[0])
    y = [0] * n
    obstruction = 1
    ok = True
    for i, ci in enumerate(c):
        d = D[i][i] if i < n else 0
        if modulus is None:
            if d == 0:
                if ci:
                    ok, obstruction = False, 0
                continue
            if ci % d:
                ok = False
                if obstruction:
                    obstruction = _lcm(obstruction, d // math.gcd(d, ci))
                continue
            y[i] = ci // d
        else:
            m = modulus
            g = math.gcd(d, m)
            if ci % g:
                ok = False
                if obstruction:
                    obstruction = _lcm(obstruction, g // math.gcd(g, ci % m))
                continue
            if d % m == 0:
                continue
            mg = m // g
            y[i] = (ci // g) * pow((d // g) % mg, -1, mg) % mg if mg > 1 else 0
    if not ok:
        raise NoSolution("linear system has no solution", obstruction=obstruction,
                         invariants=diagonal(D))
    x = mat_vec(V, y)
    if modulus is not None:
        x = [v % modulus for v in x]
        assert all((r - t) % modulus == 0 for r, t in zip(mat_vec(A, x), b))
    else:
        assert mat_vec(A, x) == b
    return x


def image_gcd(A: Sequence[Sequence[int]]) -> int:
    """The first invariant factor: generator of the ideal spanned by all entries."""
    g = 0
    for row in A:
        for x in row:
            g = math.gcd(g, x)
    return g
