"""Causality of descriptor systems: closed-form criteria and a brute-force
trial oracle.

State-input causality fails exactly when the backward subsystem feeds a
future input into the current state, i.e. when H_q B_q != 0.  Output-input
causality only needs those leaks to be invisible through C, i.e.
C Q_q H_q^i B_q = 0 for i = 1 .. q* - 1; equivalently every column of
[Q_q H_q B_q | ... | Q_q H_q^{q*-1} B_q] lies in the right nullspace of C.

The oracle at the bottom tests the definition itself: perturb one future
input sample and watch whether any earlier state (or output) moves.  It
goes through the solver, not through the criteria, so the two can referee
each other.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .matrices import Matrix, hstack
from .scalars import Mode
from .solver import (
    DescriptorSystem,
    InputSignal,
    TransformedInput,
    compute_Dk,
    solve,
)
from .weierstrass import WeierstrassDecomposition

DEFAULT_CAUSALITY_TOL = 1e-8


def _is_zero(mat: Matrix, tol: float | None) -> bool:
    if mat.mode is Mode.EXACT:
        return mat.is_zero()
    return mat.is_zero(DEFAULT_CAUSALITY_TOL if tol is None else tol)


def check_state_causality(
    w: WeierstrassDecomposition, tin: TransformedInput, tol: float | None = None
) -> tuple[bool, Matrix]:
    """State-input causality holds iff H_q B_q = 0; the product is the witness."""
    witness = w.H_q @ tin.B_q
    return _is_zero(witness, tol), witness


def _output_witnesses(
    sys: DescriptorSystem, w: WeierstrassDecomposition, tin: TransformedInput
) -> list[Matrix]:
    out = []
    c_qq = sys.C @ w.Q_q
    acc = tin.B_q
    for _ in range(1, max(w.q_star, 1)):
        acc = w.H_q @ acc
        out.append(c_qq @ acc)
    return out


def check_output_causality(
    sys: DescriptorSystem,
    w: WeierstrassDecomposition,
    tin: TransformedInput,
    tol: float | None = None,
) -> tuple[bool, tuple[Matrix, ...]]:
    """Output-input causality via the products C Q_q H_q^i B_q, i = 1..q*-1.

    Vacuously true when q* <= 1 (no future sample reaches the output).
    """
    witnesses = _output_witnesses(sys, w, tin)
    return all(_is_zero(m, tol) for m in witnesses), tuple(witnesses)


def nullspace_form(
    w: WeierstrassDecomposition, tin: TransformedInput
) -> Matrix:
    """The stacked matrix [Q_q H_q B_q | ... | Q_q H_q^{q*-1} B_q]."""
    cols = []
    acc = tin.B_q
    for _ in range(1, max(w.q_star, 1)):
        acc = w.H_q @ acc
        cols.append(w.Q_q @ acc)
    if not cols:
        return Matrix.zeros(w.n, 0, w.mode)
    return hstack(cols)


def check_output_causality_nullspace(
    sys: DescriptorSystem,
    w: WeierstrassDecomposition,
    tin: TransformedInput,
    tol: float | None = None,
) -> bool:
    """Same verdict as :func:`check_output_causality`, computed as a single
    membership test: C annihilates every column of the stacked matrix."""
    return _is_zero(sys.C @ nullspace_form(w, tin), tol)


@dataclass(frozen=True)
class CausalityReport:
    state_input_causal: bool
    output_input_causal: bool
    criterion_state: Matrix                 # H_q B_q
    criteria_output: tuple[Matrix, ...]     # C Q_q H_q^i B_q, i = 1..q*-1
    nullspace_form: Matrix
    no_infinite_eigenvalues: bool
    tolerance: float | None                 # zero threshold (None in exact mode)


def build_report(
    sys: DescriptorSystem,
    w: WeierstrassDecomposition,
    tin: TransformedInput,
    tol: float | None = None,
) -> CausalityReport:
    state_ok, state_witness = check_state_causality(w, tin, tol)
    output_ok, output_witnesses = check_output_causality(sys, w, tin, tol)
    return CausalityReport(
        state_input_causal=state_ok,
        output_input_causal=output_ok,
        criterion_state=state_witness,
        criteria_output=output_witnesses,
        nullspace_form=nullspace_form(w, tin),
        no_infinite_eigenvalues=(w.q == 0),
        tolerance=(None if sys.mode is Mode.EXACT
                   else (DEFAULT_CAUSALITY_TOL if tol is None else tol)),
    )


@dataclass(frozen=True)
class OracleCounterexample:
    trial: int
    perturbed_index: int
    diverged_at: int
    mode: str
    base_signal: InputSignal
    perturbed_signal: InputSignal
    base_value: Matrix
    perturbed_value: Matrix


@dataclass(frozen=True)
class OracleOutcome:
    causal: bool
    counterexample: OracleCounterexample | None


def brute_force_causality_oracle(
    sys: DescriptorSystem,
    w: WeierstrassDecomposition,
    tin: TransformedInput,
    mode: str = "state",
    horizon: int = 10,
    trials: int = 50,
    *,
    rng: random.Random | None = None,
    seed: int | None = None,
    tol: float | None = None,
) -> OracleOutcome:
    """Empirical causality test straight from the definition.

    Each trial draws a random consistent initial state and a random input
    signal, then perturbs exactly one future sample (index j) by a random
    nonzero vector.  The perturbation is placed at j >= k0 + q*, which
    leaves D_{k0} untouched, so the same initial state stays consistent
    for both signals and the two trajectories are comparable.  Any
    difference in a state (or output, per ``mode``) at a time k < j
    witnesses non-causality.
    """
    if mode not in ("state", "output"):
        raise ValueError(f"mode must be 'state' or 'output', got {mode!r}")
    if rng is None:
        rng = random.Random(0 if seed is None else seed)
    if sys.l == 0:
        return OracleOutcome(True, None)
    k0 = 0
    K = horizon
    count = K - k0 + w.q_star  # covers indices k0 .. K + q* - 1
    j_min = k0 + max(w.q_star, 1)
    j_max = min(K, k0 + count - 1)  # perturbed sample must exist
    if j_min > j_max:
        raise ValueError(f"horizon {horizon} too short; need at least {j_min - k0 + 1}")

    for t in range(trials):
        rows = [[rng.randint(-3, 3) for _ in range(sys.l)] for _ in range(count)]
        j = rng.randrange(j_min, j_max + 1)
        delta = [rng.randint(-3, 3) for _ in range(sys.l)]
        while all(d == 0 for d in delta):
            delta = [rng.randint(-3, 3) for _ in range(sys.l)]
        pert_rows = [list(r) for r in rows]
        pert_rows[j - k0] = [a + b for a, b in zip(pert_rows[j - k0], delta)]

        base = InputSignal.from_rows(k0, rows, sys.mode)
        pert = InputSignal.from_rows(k0, pert_rows, sys.mode)

        z = Matrix.column([rng.randint(-3, 3) for _ in range(w.p)], sys.mode)
        y0 = w.Q_p @ z + w.Q @ compute_Dk(w, tin, base, k0).stacked

        traj_base = solve(sys, w, tin, base, y0, K)
        traj_pert = solve(sys, w, tin, pert, y0, K)
        seq_base = traj_base.states if mode == "state" else traj_base.outputs
        seq_pert = traj_pert.states if mode == "state" else traj_pert.outputs

        for k in range(k0, j):
            diff = seq_base[k - k0] - seq_pert[k - k0]
            if not _is_zero(diff, tol):
                return OracleOutcome(
                    False,
                    OracleCounterexample(
                        trial=t,
                        perturbed_index=j,
                        diverged_at=k,
                        mode=mode,
                        base_signal=base,
                        perturbed_signal=pert,
                        base_value=seq_base[k - k0],
                        perturbed_value=seq_pert[k - k0],
                    ),
                )
    return OracleOutcome(True, None)
