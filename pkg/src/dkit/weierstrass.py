"""Complex Weierstrass canonical form of a regular pencil.

For a regular pencil sF - G this module produces nonsingular P, Q with

    P F Q = I_p (+) H_q        P G Q = J_p (+) I_q

where J_p collects Jordan blocks of the finite eigenvalues and H_q is the
nilpotent block of the infinite eigenstructure (ones on the superdiagonal).

Construction outline.  Eigenvector chains are built directly on the
pencil: for a finite eigenvalue a the chain relation is

    (G - a F) v_1 = 0,     (G - a F) v_k = F v_{k-1},

and for the infinite structure the reversed relation

    F w_1 = 0,             F w_k = G w_{k-1}.

Both are instances of one scheme, "A v_k = E v_{k-1}".  The nested
subspaces N_1 = ker A, N_k = {v : A v in E(N_{k-1})} grow exactly like the
kernel filtration of a nilpotent operator, so the usual Jordan machinery
applies: block sizes come from the dimension increments, top vectors of
long chains are picked first, and each chain is generated downward by the
unique solution of E x = A v_k inside N_{k-1}.  Columns of Q are the chain
vectors; P is then forced, because the first p columns of P^{-1} must be
F Q_p and the last q columns must be G Q_q.

All choices are canonical: kernels come from the (unique) reduced row
echelon form, eigenvalues are sorted, and block sizes are descending, so
repeated runs produce identical output.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .errors import ChainConstructionFailure, IrregularPencil
from .matrices import Matrix, block_diag, hstack
from .pencil import Pencil, char_poly, finite_eigenvalues
from .scalars import Mode, Scalar


@dataclass(frozen=True)
class JordanBlockSpec:
    eigenvalue: Scalar
    size: int

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("block size must be >= 1")


@dataclass(frozen=True)
class NilpotentBlockSpec:
    size: int

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("block size must be >= 1")


def assemble_Jp(blocks: list[JordanBlockSpec] | tuple, mode: Mode) -> Matrix:
    """Direct sum of Jordan blocks: eigenvalue diagonal, ones above it."""
    mats = []
    for b in blocks:
        rows = [
            [
                b.eigenvalue if i == j else (1 if j == i + 1 else 0)
                for j in range(b.size)
            ]
            for i in range(b.size)
        ]
        mats.append(Matrix(rows, mode))
    return block_diag(mats, mode)


def assemble_Hq(blocks: list[NilpotentBlockSpec] | tuple, mode: Mode) -> Matrix:
    """Direct sum of nilpotent shift blocks (ones on the superdiagonal)."""
    mats = []
    for b in blocks:
        rows = [[1 if j == i + 1 else 0 for j in range(b.size)] for i in range(b.size)]
        mats.append(Matrix(rows, mode))
    return block_diag(mats, mode)


@dataclass(frozen=True)
class WeierstrassDecomposition:
    P: Matrix
    Q: Matrix
    jordan_blocks: tuple[JordanBlockSpec, ...]
    nilpotent_blocks: tuple[NilpotentBlockSpec, ...]
    p: int
    q: int
    q_star: int

    @property
    def n(self) -> int:
        return self.p + self.q

    @property
    def mode(self) -> Mode:
        return self.P.mode

    @property
    def Q_p(self) -> Matrix:
        return self.Q.take_cols(range(self.p))

    @property
    def Q_q(self) -> Matrix:
        return self.Q.take_cols(range(self.p, self.n))

    @property
    def J_p(self) -> Matrix:
        return assemble_Jp(self.jordan_blocks, self.mode)

    @property
    def H_q(self) -> Matrix:
        return assemble_Hq(self.nilpotent_blocks, self.mode)

    @property
    def F_w(self) -> Matrix:
        return block_diag([Matrix.identity(self.p, self.mode), self.H_q], self.mode)

    @property
    def G_w(self) -> Matrix:
        return block_diag([self.J_p, Matrix.identity(self.q, self.mode)], self.mode)


@dataclass(frozen=True)
class VerificationReport:
    residual_F: Fraction | float
    residual_G: Fraction | float
    P_nonsingular: bool
    Q_nonsingular: bool

    @property
    def max_residual(self):
        return max(self.residual_F, self.residual_G)


def _filtration(A: Matrix, E: Matrix, target: int, tol: float | None) -> list[Matrix]:
    """Bases of N_1 <= N_2 <= ... until the dimension reaches ``target``."""
    basis = linalg.kernel_basis(A, tol)
    if basis.cols == 0:
        raise ChainConstructionFailure(
            "kernel is trivial but the multiplicity demands eigenvectors"
        )
    bases = [basis]
    while bases[-1].cols < target:
        prev = bases[-1]
        stacked = hstack([A, -(E @ prev)])
        k = linalg.kernel_basis(stacked, tol)
        v_part = k.take_rows(range(A.rows))
        nxt = linalg.column_space_basis(v_part, tol)
        if nxt.cols <= prev.cols or nxt.cols > target:
            raise ChainConstructionFailure(
                f"chain subspaces stalled at dimension {prev.cols} "
                f"(target {target}); the rank structure contradicts the "
                f"computed multiplicities"
            )
        bases.append(nxt)
    return bases


def _block_sizes(dims: list[int]) -> list[int]:
    """Block sizes (descending) from cumulative filtration dimensions."""
    counts_ge = [dims[0]] + [dims[i] - dims[i - 1] for i in range(1, len(dims))]
    sizes: list[int] = []
    for k in range(1, len(dims) + 1):
        exactly = counts_ge[k - 1] - (counts_ge[k] if k < len(dims) else 0)
        if exactly < 0:
            raise ChainConstructionFailure("non-monotone chain dimension increments")
        sizes.extend([k] * exactly)
    sizes.sort(reverse=True)
    return sizes


def _pick_independent(candidates: Matrix, context: list[Matrix], tol: float | None) -> Matrix:
    """First candidate column outside the span of the context columns."""
    if context:
        s = hstack(context)
        base = linalg.rank(s, tol)
    else:
        s = None
        base = 0
    for j in range(candidates.cols):
        v = candidates.col(j)
        trial = hstack([s, v]) if s is not None else v
        if linalg.rank(trial, tol) == base + 1:
            return v
    raise ChainConstructionFailure("no chain top vector available at this level")


def _build_chains(
    A: Matrix, E: Matrix, bases: list[Matrix], sizes: list[int], tol: float | None
) -> list[list[Matrix]]:
    """Chains v_1..v_r per block, longest blocks first.

    The top vector of an r-chain is chosen in N_r, independent of N_{r-1}
    and of every previously picked chain vector; the rest of the chain
    follows from E v_{k-1} = A v_k, solved inside N_{k-1} where the
    solution is unique.
    """
    picked: list[Matrix] = []
    chains: list[list[Matrix]] = []
    for r in sizes:
        candidates = bases[r - 1]
        context = list(picked)
        if r >= 2:
            prev = bases[r - 2]
            context = [prev.col(j) for j in range(prev.cols)] + context
        top = _pick_independent(candidates, context, tol)
        chain = [top]
        for k in range(r, 1, -1):
            b = bases[k - 2]
            rhs = A @ chain[-1]
            try:
                y = linalg.solve_unique(E @ b, rhs, tol)
            except ValueError as exc:
                raise ChainConstructionFailure(f"chain step solve failed: {exc}") from None
            chain.append(b @ y)
        chain.reverse()
        chains.append(chain)
        picked.extend(chain)
    return chains


def decompose(
    pencil: Pencil,
    *,
    zero_tol: float | None = None,
    cluster_radius: float | None = None,
    rank_tol: float | None = None,
) -> WeierstrassDecomposition:
    """Weierstrass canonical form of a regular pencil.

    Raises IrregularPencil when det(sF - G) vanishes identically,
    UnresolvableSpectrum in exact mode for irrational spectra, and
    ChainConstructionFailure when the observed rank structure breaks down
    (float-mode numerical trouble).
    """
    cp = char_poly(pencil, zero_tol)
    if cp.is_zero:
        raise IrregularPencil("det(sF - G) is identically zero")
    p, q = cp.p, cp.q
    mode = pencil.mode
    F, G = pencil.F, pencil.G
    n = pencil.n

    jordan_blocks: list[JordanBlockSpec] = []
    qp_cols: list[Matrix] = []
    if p > 0:
        for a, mult in finite_eigenvalues(cp, cluster_radius):
            A = G - F.scale(a)
            bases = _filtration(A, F, mult, rank_tol)
            sizes = _block_sizes([b.cols for b in bases])
            chains = _build_chains(A, F, bases, sizes, rank_tol)
            for size, chain in zip(sizes, chains):
                jordan_blocks.append(JordanBlockSpec(a, size))
                qp_cols.extend(chain)

    nilpotent_blocks: list[NilpotentBlockSpec] = []
    qq_cols: list[Matrix] = []
    if q > 0:
        bases = _filtration(F, G, q, rank_tol)
        sizes = _block_sizes([b.cols for b in bases])
        chains = _build_chains(F, G, bases, sizes, rank_tol)
        for size, chain in zip(sizes, chains):
            nilpotent_blocks.append(NilpotentBlockSpec(size))
            qq_cols.extend(chain)

    q_p = hstack(qp_cols) if qp_cols else Matrix.zeros(n, 0, mode)
    q_q = hstack(qq_cols) if qq_cols else Matrix.zeros(n, 0, mode)
    q_full = hstack([q_p, q_q])

    # P^{-1} is forced blockwise: columns 1..p equal F Q_p, columns p+1..n
    # equal G Q_q; inverting it solves both block equations at once.
    pinv = hstack([F @ q_p, G @ q_q])
    try:
        p_mat = linalg.inverse(pinv, rank_tol)
    except ValueError:
        raise ChainConstructionFailure("[F Q_p | G Q_q] is singular") from None

    w = WeierstrassDecomposition(
        P=p_mat,
        Q=q_full,
        jordan_blocks=tuple(jordan_blocks),
        nilpotent_blocks=tuple(nilpotent_blocks),
        p=p,
        q=q,
        q_star=max((b.size for b in nilpotent_blocks), default=0),
    )

    report = verify(pencil, w, rank_tol)
    if mode is Mode.EXACT:
        ok = report.residual_F == 0 and report.residual_G == 0
    else:
        scale = float(max(abs(F.max_abs()), abs(G.max_abs()), 1.0))
        thr = (linalg.DEFAULT_RANK_TOL if rank_tol is None else rank_tol) * scale
        ok = float(report.residual_F) <= thr and float(report.residual_G) <= thr
    if not (ok and report.P_nonsingular and report.Q_nonsingular):
        raise ChainConstructionFailure(
            f"reconstruction check failed: residuals "
            f"{report.residual_F}, {report.residual_G}"
        )
    return w


def verify(
    pencil: Pencil, w: WeierstrassDecomposition, rank_tol: float | None = None
) -> VerificationReport:
    """Residuals of the two defining block equations (max-abs norm)."""
    if w.n != pencil.n:
        raise ValueError("decomposition and pencil dimensions differ")
    res_f = (w.P @ pencil.F @ w.Q - w.F_w).max_abs()
    res_g = (w.P @ pencil.G @ w.Q - w.G_w).max_abs()
    return VerificationReport(
        residual_F=res_f,
        residual_G=res_g,
        P_nonsingular=linalg.is_nonsingular(w.P, rank_tol),
        Q_nonsingular=linalg.is_nonsingular(w.Q, rank_tol),
    )
