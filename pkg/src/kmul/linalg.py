"""Dense Gaussian elimination over a finite field F_q (entries are GF labels).

Matrices are lists of rows.  Nothing here is clever: the sizes in this package
are a few dozen rows at most.
"""

from __future__ import annotations

from .errors import InconsistentSystemError
from .field import GF


def zeros(rows: int, cols: int) -> list[list[int]]:
    return [[0] * cols for _ in range(rows)]


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(A) -> list[list[int]]:
    return [list(col) for col in zip(*A)] if A else []


def matvec(F: GF, A, v) -> list[int]:
    add, mul = F.add_table, F.mul_table
    out = []
    for row in A:
        acc = 0
        for a, x in zip(row, v):
            if a and x:
                acc = add[acc][mul[a][x]]
        out.append(acc)
    return out


def vecmat(F: GF, v, A) -> list[int]:
    """Row vector times matrix."""
    add, mul = F.add_table, F.mul_table
    cols = len(A[0]) if A else 0
    out = [0] * cols
    for x, row in zip(v, A):
        if x:
            mrow = mul[x]
            for j, a in enumerate(row):
                if a:
                    out[j] = add[out[j]][mrow[a]]
    return out


def matmul(F: GF, A, B) -> list[list[int]]:
    return [vecmat(F, row, B) for row in A]


def rref(F: GF, A) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    M = [list(r) for r in A]
    rows = len(M)
    cols = len(M[0]) if rows else 0
    add, mul, neg = F.add_table, F.mul_table, F.neg_table
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = F.inv(M[r][c])
        if inv != 1:
            M[r] = [mul[inv][x] for x in M[r]]
        pr = M[r]
        for i in range(rows):
            if i != r and M[i][c]:
                f = mul[neg[M[i][c]]]
                Mi = M[i]
                M[i] = [add[x][f[y]] if y else x for x, y in zip(Mi, pr)]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return M, pivots


def rank(F: GF, A) -> int:
    if not A:
        return 0
    return len(rref(F, A)[1])


def solve(F: GF, A, b) -> list[int]:
    """One solution of A x = b (free variables set to zero).

    Overdetermined consistent systems are accepted; an inconsistent system
    raises InconsistentSystemError.
    """
    cols = len(A[0]) if A else 0
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    R, pivots = rref(F, aug)
    if cols in pivots:
        raise InconsistentSystemError("linear system has no solution")
    x = [0] * cols
    for i, c in enumerate(pivots):
        x[c] = R[i][cols]
    return x


def inverse(F: GF, A) -> list[list[int]]:
    n = len(A)
    aug = [list(row) + e for row, e in zip(A, identity(n))]
    R, pivots = rref(F, aug)
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in R]


def left_inverse(F: GF, A) -> list[list[int]]:
    """L with L A = I, built from a maximal independent set of rows of A.

    A must have full column rank.  Rows outside the chosen set get zero
    columns in L.
    """
    rows = len(A)
    cols = len(A[0]) if rows else 0
    _, chosen = rref(F, transpose(A))
    if len(chosen) != cols:
        raise ValueError("matrix does not have full column rank")
    inv = inverse(F, [A[i] for i in chosen])
    L = zeros(cols, rows)
    for j, i in enumerate(chosen):
        for r in range(cols):
            L[r][i] = inv[r][j]
    return L
