"""Unique closed-form solutions of F Y_{k+1} = G Y_k + B V_k, X_k = C Y_k.

In Weierstrass coordinates Z_k = Q^{-1} Y_k the system splits into a
forward subsystem driven by J_p and a backward nilpotent subsystem driven
by H_q.  The backward part is forced: it reads the next q* - 1 input
samples, which is why every operation here is explicit about the input
horizon it needs and refuses to zero-pad.

An initial state is admissible exactly when it lies in the affine set
colspan(Q_p) + Q D_{k0}; the solver rejects anything else.  The residual
oracle at the bottom re-checks a trajectory against the original
difference equation and is deliberately independent of the decomposition.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from . import linalg
from .errors import (
    InconsistentInitialCondition,
    InputHorizonTooShort,
    IrregularPencil,
)
from .matrices import Matrix, vstack
from .pencil import Pencil, is_regular
from .scalars import Mode
from .weierstrass import WeierstrassDecomposition


class DescriptorSystem:
    """The quadruple (F, G, B, C) with a regular pencil sF - G."""

    def __init__(self, F: Matrix, G: Matrix, B: Matrix, C: Matrix,
                 *, zero_tol: float | None = None):
        pencil = Pencil(F, G)
        n = pencil.n
        if B.rows != n:
            raise ValueError(f"B must have {n} rows, has {B.rows}")
        if C.cols != n:
            raise ValueError(f"C must have {n} columns, has {C.cols}")
        for mat in (B, C):
            if mat.mode is not F.mode:
                raise ValueError("all system matrices must share one scalar mode")
        if not is_regular(pencil, zero_tol):
            raise IrregularPencil("system pencil sF - G is not regular")
        self.F, self.G, self.B, self.C = F, G, B, C

    @property
    def n(self) -> int:
        return self.F.rows

    @property
    def l(self) -> int:
        return self.B.cols

    @property
    def m(self) -> int:
        return self.C.rows

    @property
    def mode(self) -> Mode:
        return self.F.mode

    @property
    def pencil(self) -> Pencil:
        return Pencil(self.F, self.G)

    def to_float(self) -> "DescriptorSystem":
        return DescriptorSystem(self.F.to_float(), self.G.to_float(),
                                self.B.to_float(), self.C.to_float())


class InputSignal:
    """Samples V_{k0}, V_{k0+1}, ... as l x 1 columns."""

    def __init__(self, k0: int, samples: Sequence[Matrix]):
        self.k0 = k0
        self.samples = tuple(samples)
        for s in self.samples:
            if s.cols != 1:
                raise ValueError("input samples must be column vectors")
            if s.rows != self.samples[0].rows or s.mode is not self.samples[0].mode:
                raise ValueError("input samples must agree in dimension and mode")

    @classmethod
    def from_rows(cls, k0: int, rows: Sequence[Sequence], mode: Mode) -> "InputSignal":
        return cls(k0, [Matrix.column(r, mode) for r in rows])

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def last_index(self) -> int:
        return self.k0 + len(self.samples) - 1

    def sample(self, k: int) -> Matrix:
        if not (self.k0 <= k <= self.last_index):
            raise InputHorizonTooShort(k, self.k0, self.last_index)
        return self.samples[k - self.k0]


@dataclass(frozen=True)
class TransformedInput:
    """P B split into its forward (p x l) and backward (q x l) rows."""

    B_p: Matrix
    B_q: Matrix


def transform_input(w: WeierstrassDecomposition, B: Matrix) -> TransformedInput:
    pb = w.P @ B
    return TransformedInput(
        B_p=pb.take_rows(range(w.p)),
        B_q=pb.take_rows(range(w.p, w.n)),
    )


class Dk(NamedTuple):
    top: Matrix       # forward convolution, p x 1
    bottom: Matrix    # backward forced part, q x 1
    stacked: Matrix   # n x 1


def _h_powers(w: WeierstrassDecomposition) -> list[Matrix]:
    powers = []
    acc = Matrix.identity(w.q, w.mode)
    for _ in range(max(w.q_star, 0)):
        powers.append(acc)
        acc = acc @ w.H_q
    return powers


def compute_Dk(
    w: WeierstrassDecomposition,
    tin: TransformedInput,
    signal: InputSignal,
    k: int,
) -> Dk:
    """The driving vector D_k (forward sum over past inputs stacked on the
    backward sum over the next q* samples)."""
    if k < signal.k0:
        raise ValueError(f"k = {k} precedes the initial time {signal.k0}")
    j_p = w.J_p
    top = Matrix.zeros(w.p, 1, w.mode)
    for j in range(signal.k0, k):
        top = j_p @ top + tin.B_p @ signal.sample(j)
    bottom = Matrix.zeros(w.q, 1, w.mode)
    for i, h_pow in enumerate(_h_powers(w)):
        bottom = bottom + h_pow @ (tin.B_q @ signal.sample(k + i))
    bottom = -bottom
    return Dk(top=top, bottom=bottom, stacked=vstack([top, bottom]))


@dataclass(frozen=True)
class ConsistencyResult:
    consistent: bool
    z_p0: Matrix | None
    residual: Matrix   # y0 - Q_p z - Q D_{k0}; zero when consistent


def check_consistency(
    sys: DescriptorSystem,
    w: WeierstrassDecomposition,
    tin: TransformedInput,
    signal: InputSignal,
    y0: Matrix,
    *,
    rank_tol: float | None = None,
) -> ConsistencyResult:
    """Decide membership of y0 in colspan(Q_p) + Q D_{k0}.

    Q_p has full column rank, so a consistent y0 pins down Z^p_{k0}
    uniquely.  For an inconsistent y0 the returned residual is measured
    against the least-squares projection onto the admissible set.
    """
    if y0.shape != (sys.n, 1):
        raise ValueError(f"y0 must be {sys.n} x 1")
    d0 = compute_Dk(w, tin, signal, signal.k0)
    rhs = y0 - w.Q @ d0.stacked
    q_p = w.Q_p
    z = linalg.solve(q_p, rhs, rank_tol)
    if z is not None:
        return ConsistencyResult(True, z, Matrix.zeros(sys.n, 1, sys.mode))
    z_ls = linalg.least_squares(q_p, rhs, rank_tol)
    return ConsistencyResult(False, None, rhs - q_p @ z_ls)


@dataclass(frozen=True)
class Trajectory:
    k0: int
    states: tuple[Matrix, ...]    # Y_k, n x 1
    outputs: tuple[Matrix, ...]   # X_k, m x 1
    z_p: tuple[Matrix, ...]       # forward coordinates, p x 1
    z_q: tuple[Matrix, ...]       # backward coordinates, q x 1

    @property
    def K(self) -> int:
        return self.k0 + len(self.states) - 1

    def __len__(self) -> int:
        return len(self.states)


def solve(
    sys: DescriptorSystem,
    w: WeierstrassDecomposition,
    tin: TransformedInput,
    signal: InputSignal,
    y0: Matrix,
    K: int,
    *,
    rank_tol: float | None = None,
) -> Trajectory:
    """Unique trajectory on k0..K for a consistent initial state.

    Needs input samples up to index K + q* - 1; raises
    InputHorizonTooShort instead of fabricating missing samples.
    """
    k0 = signal.k0
    if K < k0:
        raise ValueError(f"horizon K = {K} precedes the initial time {k0}")
    last_needed = K + w.q_star - 1
    if last_needed >= k0:
        signal.sample(last_needed)  # fail fast before any work

    res = check_consistency(sys, w, tin, signal, y0, rank_tol=rank_tol)
    if not res.consistent:
        raise InconsistentInitialCondition(
            "initial state lies outside colspan(Q_p) + Q D_{k0}",
            residual=res.residual,
        )

    j_p = w.J_p
    h_pows = _h_powers(w)
    b_p, b_q = tin.B_p, tin.B_q

    def backward(k: int) -> Matrix:
        acc = Matrix.zeros(w.q, 1, w.mode)
        for i, h_pow in enumerate(h_pows):
            acc = acc + h_pow @ (b_q @ signal.sample(k + i))
        return -acc

    z_p_list, z_q_list, states, outputs = [], [], [], []
    zp = res.z_p0
    for k in range(k0, K + 1):
        zq = backward(k)
        y = w.Q @ vstack([zp, zq])
        z_p_list.append(zp)
        z_q_list.append(zq)
        states.append(y)
        outputs.append(sys.C @ y)
        if k < K:
            zp = j_p @ zp + b_p @ signal.sample(k)
    return Trajectory(
        k0=k0,
        states=tuple(states),
        outputs=tuple(outputs),
        z_p=tuple(z_p_list),
        z_q=tuple(z_q_list),
    )


def closed_form_zp(
    w: WeierstrassDecomposition,
    tin: TransformedInput,
    signal: InputSignal,
    z_p0: Matrix,
    k: int,
) -> Matrix:
    """Non-recursive forward coordinate: J_p^{k-k0} Z^p_{k0} plus the
    convolution of past inputs.  Must agree with the recursion used by
    :func:`solve`; tests hold both paths to that."""
    k0 = signal.k0
    acc = linalg.matrix_power(w.J_p, k - k0) @ z_p0
    for i in range(k0, k):
        acc = acc + linalg.matrix_power(w.J_p, k - i - 1) @ (tin.B_p @ signal.sample(i))
    return acc


class SolutionResidual(NamedTuple):
    step_residual: object   # max over k of |F Y_{k+1} - G Y_k - B V_k|
    y0_mismatch: object     # |Y_{k0} - y0|, zero when y0 not supplied


def residual_oracle(
    sys: DescriptorSystem,
    signal: InputSignal,
    traj: Trajectory,
    y0: Matrix | None = None,
) -> SolutionResidual:
    """Check a trajectory against the original difference equation.

    Works directly on (F, G, B); no canonical form involved, so it can
    referee the solver.
    """
    if len(traj) < 2:
        raise ValueError("trajectory must contain at least two states")
    nil = Fraction(0) if sys.mode is Mode.EXACT else 0.0
    worst = nil
    for idx in range(len(traj) - 1):
        k = traj.k0 + idx
        r = sys.F @ traj.states[idx + 1] - sys.G @ traj.states[idx] - sys.B @ signal.sample(k)
        worst = max(worst, r.max_abs())
    mismatch = (traj.states[0] - y0).max_abs() if y0 is not None else nil
    return SolutionResidual(step_residual=worst, y0_mismatch=mismatch)
