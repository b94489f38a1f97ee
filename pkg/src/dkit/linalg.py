"""Elimination-based linear algebra over both scalar modes.

Exact mode runs Gauss-Jordan over rationals; the reduced row echelon form
of a matrix is unique, so every kernel basis and every particular solution
produced here is canonical and reproducible.  Float mode uses the same
routines with partial pivoting and a relative rank threshold
``tol * (largest entry magnitude)``.
"""

from __future__ import annotations

from .matrices import Matrix, hstack
from .scalars import Mode, one, zero

DEFAULT_RANK_TOL = 1e-9


def _threshold(mat: Matrix, tol: float | None) -> float:
    if tol is None:
        tol = DEFAULT_RANK_TOL
    scale = float(abs(mat.max_abs()))
    return tol * scale


def _rref_data(data: list[list], mode: Mode, thr: float) -> list[int]:
    """In-place reduced row echelon form; returns pivot column indices."""
    nrows = len(data)
    ncols = len(data[0]) if nrows else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = None
        if mode is Mode.EXACT:
            for i in range(r, nrows):
                if data[i][c] != 0:
                    piv = i
                    break
        else:
            best_mag = thr
            for i in range(r, nrows):
                m = abs(data[i][c])
                if m > best_mag:
                    piv, best_mag = i, m
        if piv is None:
            continue
        if piv != r:
            data[piv], data[r] = data[r], data[piv]
        inv = one(mode) / data[r][c]
        row_r = data[r]
        for j in range(c, ncols):
            row_r[j] = row_r[j] * inv
        row_r[c] = one(mode)
        for i in range(nrows):
            if i == r:
                continue
            f = data[i][c]
            if f == 0:
                continue
            row_i = data[i]
            for j in range(c, ncols):
                row_i[j] = row_i[j] - f * row_r[j]
            row_i[c] = zero(mode)
        pivots.append(c)
        r += 1
    return pivots


def rref(mat: Matrix, tol: float | None = None) -> tuple[Matrix, list[int]]:
    data = mat.to_lists()
    thr = _threshold(mat, tol) if mat.mode is Mode.FLOAT else 0.0
    pivots = _rref_data(data, mat.mode, thr)
    out = Matrix(data, mat.mode) if data else Matrix.zeros(mat.rows, mat.cols, mat.mode)
    return out, pivots


def rank(mat: Matrix, tol: float | None = None) -> int:
    return len(rref(mat, tol)[1])


def kernel_basis(mat: Matrix, tol: float | None = None) -> Matrix:
    """Canonical null-space basis, one column per free variable of the RREF."""
    red, pivots = rref(mat, tol)
    free = [c for c in range(mat.cols) if c not in pivots]
    cols = []
    for f in free:
        v = [zero(mat.mode)] * mat.cols
        v[f] = one(mat.mode)
        for row_idx, pc in enumerate(pivots):
            v[pc] = -red[row_idx, f]
        cols.append(v)
    if not cols:
        return Matrix.zeros(mat.cols, 0, mat.mode)
    return Matrix([[cols[j][i] for j in range(len(cols))] for i in range(mat.cols)],
                  mat.mode)


def solve(a: Matrix, b: Matrix, tol: float | None = None) -> Matrix | None:
    """Particular solution of ``a x = b`` with free variables set to zero.

    Returns None when the system is inconsistent.  ``b`` may have several
    columns; consistency is required for all of them.
    """
    if a.rows != b.rows:
        raise ValueError("row counts differ")
    aug = hstack([a, b])
    data = aug.to_lists()
    thr = _threshold(aug, tol) if a.mode is Mode.FLOAT else 0.0
    pivots = _rref_data(data, a.mode, thr)
    if any(pc >= a.cols for pc in pivots):
        return None
    x = [[zero(a.mode)] * b.cols for _ in range(a.cols)]
    for row_idx, pc in enumerate(pivots):
        for j in range(b.cols):
            x[pc][j] = data[row_idx][a.cols + j]
    if a.cols == 0:
        return Matrix.zeros(0, b.cols, a.mode)
    return Matrix(x, a.mode)


def solve_unique(a: Matrix, b: Matrix, tol: float | None = None) -> Matrix:
    """Solution of ``a x = b`` requiring full column rank and consistency."""
    if a.rows != b.rows:
        raise ValueError("row counts differ")
    aug = hstack([a, b])
    data = aug.to_lists()
    thr = _threshold(aug, tol) if a.mode is Mode.FLOAT else 0.0
    pivots = _rref_data(data, a.mode, thr)
    if any(pc >= a.cols for pc in pivots):
        raise ValueError("inconsistent system")
    if len(pivots) != a.cols:
        raise ValueError("solution is not unique (rank deficient)")
    x = [[data[row_idx][a.cols + j] for j in range(b.cols)] for row_idx in range(a.cols)]
    if a.cols == 0:
        return Matrix.zeros(0, b.cols, a.mode)
    return Matrix(x, a.mode)


def inverse(mat: Matrix, tol: float | None = None) -> Matrix:
    if not mat.is_square:
        raise ValueError("inverse of a non-square matrix")
    n = mat.rows
    aug = hstack([mat, Matrix.identity(n, mat.mode)])
    data = aug.to_lists()
    thr = _threshold(mat, tol) if mat.mode is Mode.FLOAT else 0.0
    pivots = _rref_data(data, mat.mode, thr)
    if pivots != list(range(n)):
        raise ValueError("matrix is singular")
    return Matrix([row[n:] for row in data], mat.mode) if n else Matrix.zeros(0, 0, mat.mode)


def det(mat: Matrix, tol: float | None = None):
    """Determinant by elimination; tolerance governs float pivot rejection."""
    if not mat.is_square:
        raise ValueError("determinant of a non-square matrix")
    n = mat.rows
    if n == 0:
        return one(mat.mode)
    data = mat.to_lists()
    thr = _threshold(mat, tol) if mat.mode is Mode.FLOAT else 0.0
    sign = 1
    result = one(mat.mode)
    for c in range(n):
        piv = None
        if mat.mode is Mode.EXACT:
            for i in range(c, n):
                if data[i][c] != 0:
                    piv = i
                    break
        else:
            best_mag = thr
            for i in range(c, n):
                m = abs(data[i][c])
                if m > best_mag:
                    piv, best_mag = i, m
        if piv is None:
            return zero(mat.mode)
        if piv != c:
            data[piv], data[c] = data[c], data[piv]
            sign = -sign
        pv = data[c][c]
        result = result * pv
        for i in range(c + 1, n):
            f = data[i][c] / pv
            if f == 0:
                continue
            row_i, row_c = data[i], data[c]
            for j in range(c, n):
                row_i[j] = row_i[j] - f * row_c[j]
    return result if sign > 0 else -result


def matrix_power(mat: Matrix, k: int) -> Matrix:
    if not mat.is_square:
        raise ValueError("power of a non-square matrix")
    if k < 0:
        raise ValueError("negative power")
    acc = Matrix.identity(mat.rows, mat.mode)
    for _ in range(k):
        acc = acc @ mat
    return acc


def least_squares(a: Matrix, b: Matrix, tol: float | None = None) -> Matrix:
    """Normal-equations solution; requires ``a`` to have full column rank."""
    ah = a.conj_T()
    return solve_unique(ah @ a, ah @ b, tol)


def column_space_basis(mat: Matrix, tol: float | None = None) -> Matrix:
    """Canonical basis of the column space (RREF rows of the transpose)."""
    red, pivots = rref(mat.T, tol)
    if not pivots:
        return Matrix.zeros(mat.rows, 0, mat.mode)
    rows = [red.row_list(i) for i in range(len(pivots))]
    return Matrix([[rows[j][i] for j in range(len(rows))] for i in range(mat.rows)],
                  mat.mode)


def is_nonsingular(mat: Matrix, tol: float | None = None) -> bool:
    return mat.is_square and rank(mat, tol) == mat.rows


def poly_eval(coeffs, x):
    """Horner evaluation of an ascending-coefficient polynomial."""
    acc = None
    for c in reversed(list(coeffs)):
        acc = c if acc is None else acc * x + c
    return 0 * x if acc is None else acc
