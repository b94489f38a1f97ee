import random
from fractions import Fraction
from itertools import product

import pytest

from dkit import (
    DescriptorSystem,
    InconsistentInitialCondition,
    InputHorizonTooShort,
    InputSignal,
    IrregularPencil,
    Matrix,
    Pencil,
    Trajectory,
    check_consistency,
    closed_form_zp,
    compute_Dk,
    decompose,
    residual_oracle,
    solve,
    transform_input,
    vstack,
)
from dkit import linalg
from dkit.scalars import Mode

from helpers import (
    consistent_y0,
    random_descriptor,
    random_signal,
    stacked_step_solvable,
)

EX = Mode.EXACT


def diag_fixture():
    f = Matrix([[1, 0], [0, 0]], EX)
    g = Matrix([[2, 0], [0, 1]], EX)
    b = Matrix([[1], [1]], EX)
    c = Matrix.identity(2, EX)
    sysm = DescriptorSystem(f, g, b, c)
    w = decompose(Pencil(f, g))
    tin = transform_input(w, b)
    sig = InputSignal.from_rows(0, [[1]] * 5, EX)
    return sysm, w, tin, sig


def test_descriptor_system_validation():
    f = Matrix([[1, 0], [0, 0]], EX)
    with pytest.raises(IrregularPencil):
        DescriptorSystem(f, Matrix.zeros(2, 2, EX),
                         Matrix.zeros(2, 1, EX), Matrix.identity(2, EX))
    with pytest.raises(ValueError):
        DescriptorSystem(f, Matrix([[2, 0], [0, 1]], EX),
                         Matrix.zeros(3, 1, EX), Matrix.identity(2, EX))


def test_transformed_input_stacks_to_pb():
    sysm, w, tin, _ = diag_fixture()
    assert vstack([tin.B_p, tin.B_q]) == w.P @ sysm.B
    assert tin.B_p.shape == (w.p, sysm.l)
    assert tin.B_q.shape == (w.q, sysm.l)


def test_compute_dk_no_infinite_part():
    f = Matrix.identity(2, EX)
    g = Matrix([[1, 1], [0, 1]], EX)
    b = Matrix([[1], [0]], EX)
    sysm = DescriptorSystem(f, g, b, Matrix.identity(2, EX))
    w = decompose(Pencil(f, g))
    tin = transform_input(w, b)
    sig = InputSignal.from_rows(0, [[1], [2], [3]], EX)
    d = compute_Dk(w, tin, sig, 2)
    assert d.bottom.shape == (0, 1)
    assert d.stacked == d.top


def test_compute_dk_zero_input():
    sysm, w, tin, _ = diag_fixture()
    sig = InputSignal.from_rows(0, [[0]] * 4, EX)
    for k in range(3):
        assert compute_Dk(w, tin, sig, k).stacked.is_zero()


def test_compute_dk_diag_fixture_values():
    _, w, tin, sig = diag_fixture()
    d2 = compute_Dk(w, tin, sig, 2)
    assert d2.top.to_lists() == [[3]]       # 2*1 + 1*1
    assert d2.bottom.to_lists() == [[-1]]   # -(H^0 B_q V_2)


def test_compute_dk_needs_future_samples():
    _, w, tin, _ = diag_fixture()
    sig = InputSignal.from_rows(0, [[1], [1]], EX)
    with pytest.raises(InputHorizonTooShort):
        compute_Dk(w, tin, sig, 2)  # bottom block reads V_2
    with pytest.raises(ValueError):
        compute_Dk(w, tin, sig, -1)


def test_consistency_diag_fixture():
    sysm, w, tin, sig = diag_fixture()
    good = check_consistency(sysm, w, tin, sig, Matrix.column([5, -1], EX))
    assert good.consistent
    assert good.z_p0.to_lists() == [[5]]
    assert good.residual.is_zero()

    bad = check_consistency(sysm, w, tin, sig, Matrix.column([5, 7], EX))
    assert not bad.consistent
    assert bad.z_p0 is None
    assert bad.residual.to_lists() == [[0], [8]]


def test_every_y0_consistent_when_q_zero():
    rng = random.Random(31)
    for _ in range(10):
        sysm, w, tin, _, _ = random_descriptor(rng, rng.randint(1, 4), 1, 1, q=0)
        sig = random_signal(rng, 1, 0, 6)
        y0 = Matrix.column([rng.randint(-5, 5) for _ in range(sysm.n)], EX)
        assert check_consistency(sysm, w, tin, sig, y0).consistent


def test_scalar_system_reduces_to_ordinary_recursion():
    a, b = Fraction(3, 2), Fraction(-2)
    sysm = DescriptorSystem(Matrix([[1]], EX), Matrix([[a]], EX),
                            Matrix([[b]], EX), Matrix([[1]], EX))
    w = decompose(Pencil(sysm.F, sysm.G))
    tin = transform_input(w, sysm.B)
    rows = [[1], [2], [-1], [3], [0]]
    sig = InputSignal.from_rows(0, rows, EX)
    y0 = Matrix.column([7], EX)
    traj = solve(sysm, w, tin, sig, y0, 5)
    y = Fraction(7)
    for idx in range(5):
        assert traj.states[idx].column_list() == [y]
        y = a * y + b * Fraction(rows[idx][0])
    assert traj.states[5].column_list() == [y]


def test_pure_nilpotent_state_tracks_input():
    # q = 1 block: Z^q_k = -B_q V_k for every k
    sysm, w, tin, sig = diag_fixture()
    y0 = Matrix.column([5, -1], EX)
    traj = solve(sysm, w, tin, sig, y0, 3)
    for idx in range(4):
        v = sig.sample(idx)
        assert traj.z_q[idx] == -(tin.B_q @ v)


def test_worked_trajectory_values():
    sysm, w, tin, sig = diag_fixture()
    traj = solve(sysm, w, tin, sig, Matrix.column([5, -1], EX), 3)
    assert [s.column_list() for s in traj.states] == [
        [Fraction(5), Fraction(-1)],
        [Fraction(11), Fraction(-1)],
        [Fraction(23), Fraction(-1)],
        [Fraction(47), Fraction(-1)],
    ]
    assert traj.outputs == traj.states  # C = I
    res = residual_oracle(sysm, sig, traj, Matrix.column([5, -1], EX))
    assert res.step_residual == 0 and res.y0_mismatch == 0


def test_solve_rejects_inconsistent_y0():
    sysm, w, tin, sig = diag_fixture()
    with pytest.raises(InconsistentInitialCondition) as err:
        solve(sysm, w, tin, sig, Matrix.column([5, 7], EX), 3)
    assert err.value.residual is not None


def test_solve_rejects_short_horizon():
    sysm, w, tin, _ = diag_fixture()
    sig = InputSignal.from_rows(0, [[1], [1], [1]], EX)  # need 4 for K=3, q*=1
    with pytest.raises(InputHorizonTooShort):
        solve(sysm, w, tin, sig, Matrix.column([5, -1], EX), 3)


def test_trajectory_invariants_and_subsystem_equation():
    rng = random.Random(32)
    for _ in range(20):
        n = rng.randint(1, 5)
        sysm, w, tin, _, _ = random_descriptor(rng, n, rng.randint(1, 2),
                                               rng.randint(1, 2))
        k0 = rng.randint(-2, 2)
        K = k0 + rng.randint(2, 8)
        sig = random_signal(rng, sysm.l, k0, K - k0 + w.q_star)
        y0 = consistent_y0(rng, w, tin, sig)
        traj = solve(sysm, w, tin, sig, y0, K)
        assert residual_oracle(sysm, sig, traj, y0).step_residual == 0
        for idx in range(len(traj)):
            # Y = Q [Z^p; Z^q] and X = C Y at every stored instant
            assert traj.states[idx] == w.Q @ vstack([traj.z_p[idx], traj.z_q[idx]])
            assert traj.outputs[idx] == sysm.C @ traj.states[idx]
        for idx in range(len(traj) - 1):
            # backward subsystem: H Z^q_{k+1} = Z^q_k + B_q V_k
            k = traj.k0 + idx
            assert w.H_q @ traj.z_q[idx + 1] == traj.z_q[idx] + tin.B_q @ sig.sample(k)


def test_closed_form_matches_recursion():
    rng = random.Random(33)
    for _ in range(15):
        n = rng.randint(1, 5)
        sysm, w, tin, _, _ = random_descriptor(rng, n, 1, 1)
        k0 = rng.randint(-1, 1)
        K = k0 + rng.randint(2, 7)
        sig = random_signal(rng, 1, k0, K - k0 + w.q_star)
        y0 = consistent_y0(rng, w, tin, sig)
        traj = solve(sysm, w, tin, sig, y0, K)
        for idx in range(len(traj)):
            k = k0 + idx
            assert traj.z_p[idx] == closed_form_zp(w, tin, sig, traj.z_p[0], k)
            # full closed form: Y_k = Q_p J^{k-k0} Z^p_{k0} + Q D_k
            d = compute_Dk(w, tin, sig, k)
            lhs = w.Q_p @ (linalg.matrix_power(w.J_p, k - k0) @ traj.z_p[0]) + w.Q @ d.stacked
            assert traj.states[idx] == lhs


def test_residual_oracle_detects_corruption():
    sysm, w, tin, sig = diag_fixture()
    traj = solve(sysm, w, tin, sig, Matrix.column([5, -1], EX), 3)
    bumped = list(traj.states)
    bumped[2] = bumped[2] + Matrix.column([1, 0], EX)
    corrupted = Trajectory(k0=traj.k0, states=tuple(bumped),
                           outputs=traj.outputs, z_p=traj.z_p, z_q=traj.z_q)
    assert residual_oracle(sysm, sig, corrupted).step_residual != 0
    with pytest.raises(ValueError):
        residual_oracle(sysm, sig,
                        Trajectory(0, (traj.states[0],), (traj.outputs[0],),
                                   (traj.z_p[0],), (traj.z_q[0],)))


def _grid_uniqueness_check(sysm, w, tin, sig, y0, K):
    """Enumerate candidate trajectories around the solver's output and check
    that zero-residual candidates agree with it wherever the window pins the
    state (k <= T - q*, with steps enforced on k0..T-1)."""
    k0 = sig.k0
    T = K + w.q_star
    truth = solve(sysm, w, tin, sig, y0, T)
    n = sysm.n
    free_coords = n * (T - k0)
    offsets = [Fraction(0), Fraction(1), Fraction(-1)]
    matches = 0
    for combo in product(offsets, repeat=free_coords):
        states = [y0]
        pos = 0
        for idx in range(1, T - k0 + 1):
            base = truth.states[idx]
            delta = Matrix.column(list(combo[pos:pos + n]), EX)
            states.append(base + delta)
            pos += n
        ok = all(
            (sysm.F @ states[i + 1] - sysm.G @ states[i] - sysm.B @ sig.sample(k0 + i)).is_zero()
            for i in range(T - k0)
        )
        if not ok:
            continue
        matches += 1
        for idx in range(K - k0 + 1):  # pinned prefix k <= T - q* = K
            assert states[idx] == truth.states[idx]
    assert matches >= 1  # the true trajectory itself is in the grid


def test_uniqueness_by_brute_force_on_diag_fixture():
    sysm, w, tin, sig = diag_fixture()
    _grid_uniqueness_check(sysm, w, tin, sig, Matrix.column([5, -1], EX), K=1)


def test_uniqueness_by_brute_force_on_nilpotent_fixture():
    f = Matrix([[1, 0, 0], [0, 0, 1], [0, 0, 0]], EX)
    g = Matrix.identity(3, EX)
    b = Matrix([[0], [0], [1]], EX)
    sysm = DescriptorSystem(f, g, b, Matrix.identity(3, EX))
    w = decompose(Pencil(f, g))
    tin = transform_input(w, b)
    sig = InputSignal.from_rows(0, [[1], [2], [-1], [3], [1]], EX)
    y0 = Matrix.column([2, -2, -1], EX)  # (z, -v_1, -v_0) with z = 2
    assert check_consistency(sysm, w, tin, sig, y0).consistent
    _grid_uniqueness_check(sysm, w, tin, sig, y0, K=1)


def test_single_state_trajectory():
    sysm, w, tin, sig = diag_fixture()
    traj = solve(sysm, w, tin, sig, Matrix.column([5, -1], EX), 0)
    assert len(traj) == 1 and traj.K == 0


def test_consistency_iff_stacked_step_solvable():
    rng = random.Random(34)
    checked_reject = 0
    for _ in range(20):
        n = rng.randint(2, 5)
        sysm, w, tin, _, _ = random_descriptor(rng, n, 1, 1, min_q=1)
        sig = random_signal(rng, 1, 0, w.q_star + 3)
        good = consistent_y0(rng, w, tin, sig)
        assert check_consistency(sysm, w, tin, sig, good).consistent
        assert stacked_step_solvable(sysm, w, tin, sig, good)
        if w.q:
            u = Matrix.column([rng.choice([1, 2, -1]) for _ in range(w.q)], EX)
            bad = good + w.Q_q @ u
            assert not check_consistency(sysm, w, tin, sig, bad).consistent
            assert not stacked_step_solvable(sysm, w, tin, sig, bad)
            checked_reject += 1
    assert checked_reject >= 15


def test_q_zero_reduces_to_explicit_recursion():
    rng = random.Random(35)
    for _ in range(5):
        sysm, w, tin, _, _ = random_descriptor(rng, rng.randint(1, 4), 1, 1, q=0)
        sig = random_signal(rng, 1, 0, 6)
        y0 = Matrix.column([rng.randint(-3, 3) for _ in range(sysm.n)], EX)
        traj = solve(sysm, w, tin, sig, y0, 6)
        a_mat = linalg.inverse(sysm.F) @ sysm.G
        b_mat = linalg.inverse(sysm.F) @ sysm.B
        y = y0
        for idx in range(7):
            assert traj.states[idx] == y
            if idx < 6:
                y = a_mat @ y + b_mat @ sig.sample(idx)


def test_float_mode_worked_trajectory():
    f = Matrix([[1, 0], [0, 0]], Mode.FLOAT)
    g = Matrix([[2, 0], [0, 1]], Mode.FLOAT)
    b = Matrix([[1], [1]], Mode.FLOAT)
    sysm = DescriptorSystem(f, g, b, Matrix.identity(2, Mode.FLOAT))
    w = decompose(Pencil(f, g))
    tin = transform_input(w, b)
    sig = InputSignal.from_rows(0, [[1]] * 5, Mode.FLOAT)
    traj = solve(sysm, w, tin, sig, Matrix.column([5, -1], Mode.FLOAT), 3)
    want = [5.0, 11.0, 23.0, 47.0]
    for idx, target in enumerate(want):
        assert abs(traj.states[idx][0, 0] - target) < 1e-9
        assert abs(traj.states[idx][1, 0] + 1.0) < 1e-9
    assert float(residual_oracle(sysm, sig, traj).step_residual) < 1e-9
