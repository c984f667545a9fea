"""Exact dense linear algebra over a finite field.

Matrices are lists of equal-length lists of canonical field integers.
Everything here is plain Gaussian elimination; over an exact field there
are no tolerance questions, and the instances in this library are small
enough that asymptotics do not matter.
"""

from __future__ import annotations

from .errors import InconsistentSystem, RankDeficient
from .fields import Field


def mat_rank(field: Field, rows) -> int:
    """Rank by forward elimination; does not modify the input."""
    mul, sub, inv = field.mul, field.sub, field.inv
    m = [list(r) for r in rows]
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    rank = 0
    for col in range(ncols):
        if rank == nrows:
            break
        piv = None
        for r in range(rank, nrows):
            if m[r][col]:
                piv = r
                break
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        prow = m[rank]
        pinv = inv(prow[col])
        if pinv != 1:
            prow = m[rank] = [mul(pinv, v) for v in prow]
        for r in range(rank + 1, nrows):
            f = m[r][col]
            if f:
                row = m[r]
                for c in range(col, ncols):
                    if prow[c]:
                        row[c] = sub(row[c], mul(f, prow[c]))
        rank += 1
    return rank


def rref(field: Field, rows):
    """Reduced row echelon form; returns (new_rows, pivot_columns)."""
    mul, sub, inv = field.mul, field.sub, field.inv
    m = [list(r) for r in rows]
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    pivots = []
    rank = 0
    for col in range(ncols):
        if rank == nrows:
            break
        piv = None
        for r in range(rank, nrows):
            if m[r][col]:
                piv = r
                break
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        prow = m[rank]
        pinv = inv(prow[col])
        if pinv != 1:
            prow = m[rank] = [mul(pinv, v) for v in prow]
        for r in range(nrows):
            if r != rank and m[r][col]:
                f = m[r][col]
                row = m[r]
                for c in range(col, ncols):
                    if prow[c]:
                        row[c] = sub(row[c], mul(f, prow[c]))
        pivots.append(col)
        rank += 1
    return m, pivots


def row_space_basis(field: Field, rows):
    """Basis (RREF rows) of the row space."""
    m, pivots = rref(field, rows)
    return m[: len(pivots)]


def row_spaces_equal(field: Field, a, b) -> bool:
    return row_space_basis(field, a) == row_space_basis(field, b)


def solve_unique(field: Field, a, b):
    """Solve A x = b for the unique x; A is m x n with m >= n.

    Raises RankDeficient if A has column rank < n and InconsistentSystem
    if the equations are contradictory.
    """
    n = len(a[0]) if a else 0
    aug = [list(row) + [bv] for row, bv in zip(a, b)]
    m, pivots = rref(field, aug)
    if len(aug[0]) - 1 in pivots:
        raise InconsistentSystem("no solution: inconsistent right-hand side")
    if len(pivots) < n:
        raise RankDeficient(f"column rank {len(pivots)} < {n}")
    x = [0] * n
    for r, col in enumerate(pivots):
        x[col] = m[r][-1]
    return x


def solve_any(field: Field, a, b):
    """A particular solution of A x = b with free variables set to 0.

    Returns None if the system is inconsistent.
    """
    n = len(a[0]) if a else 0
    aug = [list(row) + [bv] for row, bv in zip(a, b)]
    m, pivots = rref(field, aug)
    if n in pivots:
        return None
    x = [0] * n
    for r, col in enumerate(pivots):
        x[col] = m[r][-1]
    return x


def left_kernel_basis(field: Field, rows):
    """Basis of {x : x A = 0} via elimination on [A | I]."""
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    aug = []
    for i, row in enumerate(rows):
        ident = [0] * nrows
        ident[i] = 1
        aug.append(list(row) + ident)
    m, _ = rref(field, aug)
    basis = []
    for row in m:
        if all(v == 0 for v in row[:ncols]):
            tail = row[ncols:]
            if any(tail):
                basis.append(tail)
    return basis


def intersect_row_spaces(field: Field, a, b):
    """Basis of rowspace(A) ∩ rowspace(B)."""
    if not a or not b:
        return []
    stacked = [list(r) for r in a] + [list(r) for r in b]
    na = len(a)
    basis = []
    for ker in left_kernel_basis(field, stacked):
        u = ker[:na]
        vec = vec_mat(field, u, a)
        if any(vec):
            basis.append(vec)
    return row_space_basis(field, basis) if basis else []


def vec_mat(field: Field, x, a):
    """Row vector times matrix."""
    mul, add = field.mul, field.add
    ncols = len(a[0])
    out = [0] * ncols
    for xi, row in zip(x, a):
        if xi:
            for c in range(ncols):
                if row[c]:
                    out[c] = add(out[c], mul(xi, row[c]))
    return out


def mat_vec(field: Field, a, x):
    """Matrix times column vector."""
    mul, add = field.mul, field.add
    out = []
    for row in a:
        acc = 0
        for v, xv in zip(row, x):
            if v and xv:
                acc = add(acc, mul(v, xv))
        out.append(acc)
    return out


def star(field: Field, u, v):
    """Coordinate-wise (star) product of two equal-length vectors."""
    mul = field.mul
    return [mul(a, b) for a, b in zip(u, v)]
