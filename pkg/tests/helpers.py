"""Random system generators and independent oracles shared by the tests.

Everything here is deliberately separate from the library's computation
paths: the brute-force characteristic polynomial expands cofactors over
coefficient lists, and the stacked-step solvability check works on the raw
system matrices.
"""

from __future__ import annotations

import random
from fractions import Fraction

from dkit import (
    DescriptorSystem,
    InputSignal,
    JordanBlockSpec,
    Matrix,
    NilpotentBlockSpec,
    Pencil,
    assemble_Hq,
    assemble_Jp,
    block_diag,
    compute_Dk,
    decompose,
    transform_input,
    vstack,
)
from dkit import linalg
from dkit.scalars import Mode

EIGENVALUE_PALETTE = [Fraction(v) for v in (-3, -2, -1, 0, 1, 2, 3)] + [
    Fraction(1, 2),
    Fraction(-1, 2),
    Fraction(3, 2),
    Fraction(1, 3),
]


def unimodular(rng: random.Random, n: int) -> Matrix:
    """Random integer matrix with determinant +-1 (elementary operations)."""
    m = [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]
    for _ in range(2 * n + 3):
        i, j = rng.randrange(n), rng.randrange(n)
        if i != j:
            lam = rng.choice([-2, -1, 1, 2])
            for c in range(n):
                m[i][c] += lam * m[j][c]
        if rng.random() < 0.25:
            a, b = rng.randrange(n), rng.randrange(n)
            m[a], m[b] = m[b], m[a]
    return Matrix(m, Mode.EXACT)


def rational_nonsingular(rng: random.Random, n: int) -> Matrix:
    """Unimodular matrix with a couple of rows rescaled by +-1/2 or +-2."""
    m = unimodular(rng, n).to_lists()
    for _ in range(max(1, n // 2)):
        i = rng.randrange(n)
        s = rng.choice([Fraction(1, 2), Fraction(-1, 2), Fraction(2), Fraction(-2)])
        m[i] = [s * x for x in m[i]]
    return Matrix(m, Mode.EXACT)


def random_partition(rng: random.Random, total: int) -> list[int]:
    parts = []
    left = total
    while left:
        s = rng.randint(1, left)
        parts.append(s)
        left -= s
    return parts


def small_int_matrix(rng: random.Random, rows: int, cols: int, lo=-3, hi=3) -> Matrix:
    if rows == 0 or cols == 0:
        return Matrix.zeros(rows, cols, Mode.EXACT)
    return Matrix([[rng.randint(lo, hi) for _ in range(cols)] for _ in range(rows)],
                  Mode.EXACT)


def planted_pencil(rng: random.Random, n: int, *, q: int | None = None,
                   min_q: int = 0):
    """Regular pencil with known canonical structure, hidden by unimodular
    conjugation.  Returns (pencil, jordan specs, nilpotent specs)."""
    if q is None:
        q = rng.randint(min_q, n)
    p = n - q
    jblocks = [JordanBlockSpec(rng.choice(EIGENVALUE_PALETTE), sz)
               for sz in (random_partition(rng, p) if p else [])]
    nblocks = [NilpotentBlockSpec(sz)
               for sz in (random_partition(rng, q) if q else [])]
    f_w = block_diag([Matrix.identity(p, Mode.EXACT),
                      assemble_Hq(nblocks, Mode.EXACT)], Mode.EXACT)
    g_w = block_diag([assemble_Jp(jblocks, Mode.EXACT),
                      Matrix.identity(q, Mode.EXACT)], Mode.EXACT)
    left, right = unimodular(rng, n), unimodular(rng, n)
    pen = Pencil(left @ f_w @ right, left @ g_w @ right)
    return pen, jblocks, nblocks


def jordan_multiset(blocks) -> list:
    return sorted((b.eigenvalue, b.size) for b in blocks)


def nilpotent_multiset(blocks) -> list:
    return sorted(b.size for b in blocks)


def _causal_bq_pattern(rng: random.Random, nblocks, l: int) -> Matrix:
    """B_q with nonzero rows only at the first row of each nilpotent block,
    which forces H_q B_q = 0 (state-input causality) by construction."""
    rows = []
    for b in nblocks:
        rows.append([rng.randint(-3, 3) for _ in range(l)])
        rows.extend([[0] * l for _ in range(b.size - 1)])
    return Matrix(rows, Mode.EXACT) if rows else Matrix.zeros(0, l, Mode.EXACT)


def random_descriptor(rng: random.Random, n: int, l: int, m: int, *,
                      q: int | None = None, min_q: int = 0,
                      plant: str = "generic"):
    """Random system plus its decomposition and transformed input.

    plant:
      "generic"            -- B, C free random
      "state_causal"       -- B built so that H_q B_q = 0
      "output_causal_only" -- C annihilates the infinite deflating subspace
    Returns (sys, w, tin, jordan specs, nilpotent specs).
    """
    pen, jb, nb = planted_pencil(rng, n, q=q, min_q=min_q)
    w = decompose(pen)
    if plant == "state_causal":
        b_p = small_int_matrix(rng, w.p, l)
        b_q = _causal_bq_pattern(rng, w.nilpotent_blocks, l)
        b = linalg.inverse(w.P) @ vstack([b_p, b_q])
    else:
        b = small_int_matrix(rng, n, l)
    if plant == "output_causal_only":
        c = block_like_c(small_int_matrix(rng, m, w.p), m, w)
    else:
        c = small_int_matrix(rng, m, n)
    sysm = DescriptorSystem(pen.F, pen.G, b, c)
    tin = transform_input(w, b)
    return sysm, w, tin, jb, nb


def block_like_c(c_p: Matrix, m: int, w) -> Matrix:
    """C = [C_p | 0] in decomposition coordinates, i.e. C Q_q = 0."""
    c_w = Matrix([c_p.row_list(i) + [0] * w.q for i in range(m)], Mode.EXACT)
    return c_w @ linalg.inverse(w.Q)


def random_signal(rng: random.Random, l: int, k0: int, count: int,
                  mode: Mode = Mode.EXACT) -> InputSignal:
    rows = [[rng.randint(-3, 3) for _ in range(l)] for _ in range(count)]
    return InputSignal.from_rows(k0, rows, mode)


def consistent_y0(rng: random.Random, w, tin, signal) -> Matrix:
    z = Matrix.column([rng.randint(-3, 3) for _ in range(w.p)], w.mode)
    d0 = compute_Dk(w, tin, signal, signal.k0)
    return w.Q_p @ z + w.Q @ d0.stacked


# ---------------------------------------------------------------------------
# independent oracles
# ---------------------------------------------------------------------------

def _poly_add(a: list, b: list) -> list:
    out = [Fraction(0)] * max(len(a), len(b))
    for i, x in enumerate(a):
        out[i] += x
    for i, x in enumerate(b):
        out[i] += x
    return out


def _poly_mul(a: list, b: list) -> list:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def brute_char_poly(F: Matrix, G: Matrix) -> tuple:
    """det(sF - G) by cofactor expansion over coefficient lists.

    Completely independent of the interpolation path used by the library.
    """
    n = F.rows
    entries = [[[-G[i, j], F[i, j]] for j in range(n)] for i in range(n)]

    def det(rows: list[int], cols: list[int]) -> list:
        if len(rows) == 1:
            return list(entries[rows[0]][cols[0]])
        acc: list = []
        r = rows[0]
        rest = rows[1:]
        for idx, c in enumerate(cols):
            minor = det(rest, [x for x in cols if x != c])
            term = _poly_mul(entries[r][c], minor)
            if idx % 2:
                term = [-t for t in term]
            acc = _poly_add(acc, term)
        return acc

    coeffs = det(list(range(n)), list(range(n)))
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


def stacked_step_solvable(sysm: DescriptorSystem, w, tin, signal, y0: Matrix) -> bool:
    """Solvability of the step-k0 system stacked with the forced backward
    coordinates at k0+1: there exists Y_{k0+1} with
    F Y_{k0+1} = G Y_{k0} + B V_{k0} and [0 I_q] Q^{-1} Y_{k0+1} = Z^q_{k0+1}.

    Solvable exactly when Y_{k0} satisfies the consistency condition; used
    to confirm rejections without going through check_consistency.
    """
    k0 = signal.k0
    q_inv = linalg.inverse(w.Q)
    s_rows = q_inv.take_rows(range(w.p, w.n))
    rhs_step = sysm.G @ y0 + sysm.B @ signal.sample(k0)
    forced_next = compute_Dk(w, tin, signal, k0 + 1).bottom
    a_stack = vstack([sysm.F, s_rows])
    b_stack = vstack([rhs_step, forced_next])
    return linalg.solve(a_stack, b_stack) is not None
