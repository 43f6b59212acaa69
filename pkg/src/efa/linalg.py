"""Linear algebra over number fields and over K(z).

Kernels over K are computed by restriction of scalars: every entry becomes its
d x d multiplication matrix, flint finds the rational kernel, and the result
is row-reduced back to a canonical K-basis.  A modular rank test screens
matrices whose kernel is obviously trivial before any exact work happens.
"""

from __future__ import annotations

from math import lcm

from flint import fmpq, fmpz_mat, nmod_mat

from .arith import KElement, NumberField, multiplication_matrix
from .poly import KRatFun

PRIMES = (2**61 - 1, 2**31 - 1, 1_000_000_007, 998_244_353)


def _int_rows(rows: list[list[fmpq]]) -> list[list[int]]:
    out = []
    for row in rows:
        den = lcm(*(int(x.q) for x in row)) if row else 1
        out.append([int(x.p) * (den // int(x.q)) for x in row])
    return out


def q_nullspace(rows: list[list[fmpq]], ncols: int) -> list[list[fmpq]]:
    """Basis of the right kernel of a rational matrix, in reduced echelon form."""
    if not rows:
        return [[fmpq(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    M = fmpz_mat(_int_rows(rows))
    X, nullity = M.nullspace()
    basis = [[fmpq(X[i, j]) for i in range(ncols)] for j in range(nullity)]
    return q_rref(basis)[0]


def q_rref(rows: list[list[fmpq]]) -> tuple[list[list[fmpq]], list[int]]:
    """Reduced row echelon form (zero rows dropped) and pivot columns."""
    rows = [list(r) for r in rows]
    pivots = []
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def k_rref(rows: list[list[KElement]], field: NumberField) -> tuple[list[list[KElement]], list[int]]:
    rows = [list(r) for r in rows]
    pivots = []
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if not rows[i][c].is_zero()), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = rows[r][c].inverse()
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and not rows[i][c].is_zero():
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def _restrict(rows: list[list[KElement]], field: NumberField) -> list[list[fmpq]]:
    d = field.degree
    ncols = len(rows[0]) if rows else 0
    out = []
    for row in rows:
        blocks = [multiplication_matrix(x) if not x.is_zero() else None for x in row]
        for a in range(d):
            qrow = []
            for j in range(ncols):
                b = blocks[j]
                qrow.extend(b[a] if b is not None else [fmpq(0)] * d)
            out.append(qrow)
    return out


def k_nullspace(rows: list[list[KElement]], field: NumberField, ncols: int | None = None) -> list[list[KElement]]:
    """Canonical K-basis of the right kernel (rows of a reduced echelon form)."""
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    d = field.degree
    if d == 1:
        qrows = [[x.rational() for x in row] for row in rows]
        return [[field(x) for x in v] for v in q_nullspace(qrows, ncols)]
    qbasis = q_nullspace(_restrict(rows, field), ncols * d)
    kvecs = [[field(v[j * d:(j + 1) * d]) for j in range(ncols)] for v in qbasis]
    if not kvecs:
        return []
    return k_rref(kvecs, field)[0]


def _mod(x: fmpq, p: int) -> int | None:
    q = int(x.q) % p
    if q == 0:
        return None
    return int(x.p) * pow(q, -1, p) % p


def nullity_mod_p(rows: list[list[KElement]], field: NumberField, ncols: int | None = None) -> int | None:
    """Kernel dimension over K of the reduction mod a large prime.

    This is an upper bound for the true kernel dimension; ``None`` means every
    prime tried divides a denominator.
    """
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    if not rows:
        return ncols
    qrows = [[x.rational() for x in row] for row in rows] if field.degree == 1 else _restrict(rows, field)
    for p in PRIMES:
        vals = []
        ok = True
        for row in qrows:
            for x in row:
                v = _mod(x, p)
                if v is None:
                    ok = False
                    break
                vals.append(v)
            if not ok:
                break
        if not ok:
            continue
        M = nmod_mat(len(qrows), len(qrows[0]), vals, p)
        return (ncols * field.degree - M.rank()) // field.degree
    return None


# matrices over K(z)

def rf_identity(n: int, field: NumberField) -> list[list[KRatFun]]:
    return [[KRatFun.constant(field, int(i == j)) for j in range(n)] for i in range(n)]


def rf_matmul(A: list[list[KRatFun]], B: list[list[KRatFun]]) -> list[list[KRatFun]]:
    n, m, k = len(A), len(B[0]), len(B)
    field = A[0][0].field
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = KRatFun.zero(field)
            for t in range(k):
                a, b = A[i][t], B[t][j]
                if not a.is_zero() and not b.is_zero():
                    acc = acc + a * b
            row.append(acc)
        out.append(row)
    return out


def rf_matvec(A: list[list[KRatFun]], v: list[KRatFun]) -> list[KRatFun]:
    return [r[0] for r in rf_matmul(A, [[x] for x in v])]


def rf_derivative(A: list[list[KRatFun]]) -> list[list[KRatFun]]:
    return [[x.derivative() for x in row] for row in A]


def rf_sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def rf_inverse(A: list[list[KRatFun]]) -> list[list[KRatFun]]:
    """Gauss-Jordan inverse over K(z); raises ZeroDivisionError when singular."""
    n = len(A)
    field = A[0][0].field
    M = [list(A[i]) + [KRatFun.constant(field, int(i == j)) for j in range(n)] for i in range(n)]
    for c in range(n):
        piv = None
        for i in range(c, n):
            if not M[i][c].is_zero():
                if piv is None or (M[i][c].num.degree + M[i][c].den.degree
                                   < M[piv][c].num.degree + M[piv][c].den.degree):
                    piv = i
        if piv is None:
            raise ZeroDivisionError("singular matrix over K(z)")
        M[c], M[piv] = M[piv], M[c]
        inv = M[c][c].inverse()
        M[c] = [x * inv for x in M[c]]
        for i in range(n):
            if i != c and not M[i][c].is_zero():
                f = M[i][c]
                M[i] = [a - f * b if not b.is_zero() else a for a, b in zip(M[i], M[c])]
    return [row[n:] for row in M]


def rf_rank_nullspace(rows: list[list[KRatFun]], ncols: int) -> list[list[KRatFun]]:
    """Right kernel basis over K(z)."""
    if not rows:
        raise ValueError("empty matrix")
    field = rows[0][0].field
    M = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(M)) if not M[i][c].is_zero()), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = M[r][c].inverse()
        M[r] = [x * inv for x in M[r]]
        for i in range(len(M)):
            if i != r and not M[i][c].is_zero():
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        v = [KRatFun.zero(field) for _ in range(ncols)]
        v[fcol] = KRatFun.constant(field, 1)
        for i, pc in enumerate(pivots):
            v[pc] = -M[i][fcol]
        basis.append(v)
    return basis


__all__ = [
    "k_nullspace",
    "k_rref",
    "nullity_mod_p",
    "q_nullspace",
    "q_rref",
    "rf_derivative",
    "rf_identity",
    "rf_inverse",
    "rf_matmul",
    "rf_matvec",
    "rf_rank_nullspace",
    "rf_sub",
]
