import math

import numpy as np
import pytest

from fixedenergy.errors import EmptyWindow, NonConvergedRefinement
from fixedenergy.scattering import PhaseShiftSet, PiecewiseConstantPotential, kappa_from_potential, phase_shift, phase_shifts
from fixedenergy.sensitivity import jacobian
from fixedenergy.verification import (
    condition_estimate,
    finite_difference_jacobian,
    mp_phase_shifts,
    ode_phase_shift,
    ode_phase_shifts,
    range_estimate,
    wronskian_sweep,
)


def test_ode_zero_potential(zero_pot):
    for sol in ode_phase_shifts(zero_pot, 2.0, range(9)):
        assert abs(sol.delta) < 1e-9


def test_ode_table_l0(q_orig_pot):
    sol = ode_phase_shift(q_orig_pot, 2.0, 0)
    assert sol.delta == pytest.approx(-9.941752e-2, abs=1e-6)
    assert -math.pi / 2 < sol.delta <= math.pi / 2


def test_ode_random_four_step_potential():
    rng = np.random.default_rng(11)
    pot = PiecewiseConstantPotential(np.cumsum(rng.uniform(0.3, 1.0, 4)), rng.uniform(-2, 2, 4))
    kv = kappa_from_potential(pot, 2.5)
    assert ode_phase_shift(pot, 2.5, 3).delta == pytest.approx(phase_shift(3, kv, pot.breakpoints), abs=1e-7)


def test_ode_grid_refinement(q_orig_pot):
    sol = ode_phase_shifts(q_orig_pot, 2.0, range(9))
    step = sol[0].grid_step
    finer = ode_phase_shifts(q_orig_pot, 2.0, range(9), step=step / 2, tol=1.0)  # one halving
    assert max(abs(a.delta - b.delta) for a, b in zip(sol, finer)) < 1e-8


def test_ode_refinement_failure_is_reported(q_orig_pot):
    with pytest.raises(NonConvergedRefinement):
        ode_phase_shifts(q_orig_pot, 2.0, [0], step=0.5, tol=1e-15, max_refinements=1)


def test_ode_samples(q_orig_pot):
    sol = ode_phase_shift(q_orig_pot, 2.0, 1, keep_samples=True)
    assert sol.samples.shape[1] == 2
    assert sol.samples[-1, 0] == pytest.approx(q_orig_pot.radius)


def test_mp_forward_agrees_with_double(kv_orig, fixture):
    ref = [float(d) for d in mp_phase_shifts(kv_orig.kappas, 2.0, fixture.breakpoints, 10)]
    np.testing.assert_allclose(phase_shifts(kv_orig, fixture.breakpoints, 10).deltas, ref, rtol=0, atol=1e-14)


def test_fd_zero_potential(zero_pot):
    kv = kappa_from_potential(zero_pot, 2.0)
    J = jacobian(kv, zero_pot.breakpoints)
    F = finite_difference_jacobian(kv, zero_pot.breakpoints, fd_step=1e-6)
    mask = np.abs(F) > 1e-8
    assert np.max(np.abs(J - F)[mask] / np.abs(F)[mask]) < 1e-6


def test_fd_table_configuration(kv_orig, fixture):
    J = jacobian(kv_orig, fixture.breakpoints)
    F = finite_difference_jacobian(kv_orig, fixture.breakpoints, fd_step=1e-7, dps=50)
    mask = np.abs(F) > 1e-12
    assert np.max(np.abs(J - F)[mask] / np.abs(F)[mask]) < 1e-5


def test_fd_single_well():
    # d delta / d kappa for one well, from tan(kR + delta) = (k/kappa) tan(kappa R)
    k, R, kap = 2.0, 1.0, 1.0
    pot = PiecewiseConstantPotential([R], [k * k - kap * kap])
    kv = kappa_from_potential(pot, k)
    t = math.tan(kap * R)
    g = k / kap * t
    dg = -k / kap**2 * t + k / kap * R / math.cos(kap * R) ** 2
    exact = dg / (1 + g * g)
    F = finite_difference_jacobian(kv, [R], fd_step=1e-6)
    assert F[0, 0] == pytest.approx(exact, rel=1e-8)


def test_fd_step_bounds(kv_orig, fixture):
    with pytest.raises(Exception):
        finite_difference_jacobian(kv_orig, fixture.breakpoints, fd_step=1e-2)


def test_range_identity_sequence():
    ls = np.arange(0, 21)
    deltas = np.where(ls == 0, 1.0, (5 * math.e / (2 * ls + 1)) ** (2 * ls.astype(float)))
    diag = range_estimate(PhaseShiftSet(1.0, deltas), range(5, 21))
    np.testing.assert_allclose(diag.estimates, 5.0, rtol=1e-14)
    assert diag.bound_constant == pytest.approx(1.0, rel=1e-12)


def test_range_q_orig(kv_orig, fixture, q_orig_pot):
    shifts = phase_shifts(kv_orig, fixture.breakpoints, 31)
    diag = range_estimate(shifts, range(15, 31), pot=q_orig_pot)
    assert diag.warning is None
    assert diag.is_monotone_increasing()
    assert abs(diag.final_estimate - 5.0) / 5.0 < 0.35


def test_decay_bound(kv_orig, fixture):
    shifts = phase_shifts(kv_orig, fixture.breakpoints, 31)
    diag = range_estimate(shifts, range(10, 31), radius=5.0)
    ls = np.arange(10, 31)
    assert np.all(np.abs(shifts.deltas[ls]) <= diag.bound(ls) * (1 + 1e-12))


def test_range_empty_window():
    with pytest.raises(EmptyWindow):
        range_estimate(PhaseShiftSet(2.0, np.zeros(31)))


def test_range_flags_unusable_entries():
    d = np.full(31, 1e-5)
    d[20] = 0.0
    diag = range_estimate(PhaseShiftSet(1.0, d))
    assert diag.undefined == [20]
    assert np.isnan(diag.estimates[list(diag.ls).index(20)])


def test_range_sign_change_warning():
    pot2 = PiecewiseConstantPotential([4.8, 5.0], [0.2, -0.2])
    shifts = phase_shifts(kappa_from_potential(pot2, 2.0), pot2.breakpoints, 31)
    with pytest.warns(RuntimeWarning):
        diag = range_estimate(shifts, pot=pot2)
    assert diag.warning


def test_condition_estimate_matches_svd():
    rng = np.random.default_rng(5)
    A = rng.standard_normal((6, 6))
    smax, smin = condition_estimate(A)
    sv = np.linalg.svd(A, compute_uv=False)
    assert smax == pytest.approx(sv[0], rel=1e-8)
    assert smin == pytest.approx(sv[-1], rel=1e-8)


def test_wronskian_sweep():
    out = wronskian_sweep(ls=range(0, 20), zs=(0.01, 1.0, 30.0))
    assert out["wronskian_max_abs_err"] < 1e-10
    assert out["derivative_identity_max_rel_err"] < 1e-12
