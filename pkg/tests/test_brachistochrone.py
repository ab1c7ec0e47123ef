import mpmath as mp
import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from nhbrach import (
    UP,
    BiorthPair,
    Constraint,
    ConstraintMode,
    CriticalKind,
    HamiltonianParams,
    TargetSpec,
    bloch_from_spinors,
    build_effective,
    cell_centers,
    classify_saddle,
    critical_points,
    evolution_phase,
    evolution_time,
    landscape,
    phi_from_target,
    propagate_closed,
    reality_manifold_tau,
    solve_reality,
    variance_phase,
)
from nhbrach.dynamics import propagator

from strategies import cplx

PI = np.pi


def bloch_at(params, t):
    """Bloch vector after a (possibly complex) time ``t``."""
    h = build_effective(params)
    pair = BiorthPair(propagator(h, t) @ UP.u, UP.u_tilde @ propagator(h, -t), check=False)
    return bloch_from_spinors(pair)


# phi_from_target

@pytest.mark.parametrize("chi, gamma", [(1.0, 0.0), (2.5, 0.7), (PI, -0.3)])
def test_phi_on_equator(chi, gamma):
    assert abs(phi_from_target(PI / 2, TargetSpec(chi, gamma)) - (gamma + PI / 2)) < 1e-12


def test_phi_at_half_chi():
    assert abs(phi_from_target(0.6, TargetSpec(1.2, 0.4)) - 0.4) < 1e-7


def test_phi_hits_target_for_complex_data():
    theta, target = 0.9 + 0.4j, TargetSpec(PI / 2 + 0.25j, 0.1)
    phi = phi_from_target(theta, target)
    omega = 1.0
    psi = complex(evolution_phase(omega, theta, target.chi))
    n = bloch_at(HamiltonianParams(0, omega, theta, phi), psi)
    assert np.max(np.abs(n - target.bloch)) < 1e-10


def test_phi_rejects_pole():
    with pytest.raises(ValueError):
        phi_from_target(0.0, TargetSpec(1.0))


# evolution and variance phases

@pytest.mark.parametrize("omega, chi", [(1.0, 1.0), (2.0, 2.5), (0.5, PI)])
def test_phase_on_equator(omega, chi):
    assert abs(evolution_phase(omega, PI / 2, chi) - chi / omega) < 1e-12


def test_phase_off_equator_matches_ode_time():
    psi = evolution_phase(1.0, PI / 2 + 1j, PI)
    assert abs(abs(psi) - 2 * np.arctan(1 / np.sinh(1))) < 1e-12
    assert abs(abs(psi) - 1.410053687) < 1e-9


def test_mode_examples():
    res = evolution_time(ConstraintMode.omega_fixed(1), PI / 2, TargetSpec(PI))
    assert abs(res.tau - PI) < 1e-12 and res.reality_residual == 0 and res.admissible
    res = evolution_time(ConstraintMode.variance_fixed(1), PI / 2, TargetSpec(PI / 2))
    assert abs(res.tau - PI / 4) < 1e-12
    assert abs(variance_phase(1.0, PI / 2, PI / 2) - PI / 4) < 1e-12
    assert abs(variance_phase(2.0, PI / 2, 1.3) - 1.3 / 4) < 1e-12


def test_abs_omega_cell_against_high_precision():
    omega = 1 + 0.1j
    mode = ConstraintMode.abs_omega_fixed(omega)
    target = TargetSpec(PI + 0.25j)
    grid = landscape(mode, target, cell_centers(0, PI, 7), cell_centers(-3, 3, 9))
    i, j = 2, 6
    th = mp.mpc(grid.re_theta[i], grid.im_theta[j])
    chi = mp.mpc(PI, 0.25)
    with mp.workdps(40):
        s = mp.sin(chi / 2)
        d = mp.sqrt(mp.cos(chi / 2) ** 2 - mp.cos(th) ** 2)
        psi = 2 / mp.mpc(omega) * mp.atan(s / d)
    # the grid may pick the next arctan branch; compare up to a shift of 2 pi / Omega
    shifts = [psi + k * 2 * mp.pi / mp.mpc(omega) for k in (-1, 0, 1)]
    best = min(shifts, key=lambda z: abs(complex(z) - complex(grid.abs_psi[i, j] * np.exp(1j * grid.arg_psi[i, j]))))
    assert abs(float(abs(best)) - grid.abs_psi[i, j]) < 1e-12
    assert abs(float(mp.arg(best)) - grid.arg_psi[i, j]) < 1e-12
    res = evolution_time(mode, complex(th), target)
    assert abs(res.required_arg_omega - float(mp.arg(best * mp.mpc(omega) / 2))) < 1e-12


@settings(max_examples=300, deadline=None)
@given(st.floats(0.1, 5), cplx((0.1, PI - 0.1), (-2, 2)), cplx((0.2, 3.0), (-0.5, 0.5)))
def test_substitution_identity(delta_e, theta, chi):
    var = variance_phase(delta_e, theta, chi)
    sub = evolution_phase(2 * delta_e / np.sin(theta), theta, chi)
    assume(np.isfinite(var))
    assert abs(var - sub) < 1e-12 * max(1.0, abs(var))


@settings(max_examples=200, deadline=None)
@given(st.floats(0.2, 4), st.floats(0.2, 3.0), st.floats(0, 1))
def test_real_parameter_reduction(omega, chi, frac):
    theta = chi / 2 + frac * (PI / 2 - chi / 2)
    assume(theta - chi / 2 > 1e-6)
    res = evolution_time(ConstraintMode.omega_fixed(omega), theta, TargetSpec(chi))
    assert abs(res.reality_residual) < 1e-12 and abs(res.psi.imag) < 1e-12
    eq = evolution_time(ConstraintMode.omega_fixed(omega), PI / 2, TargetSpec(chi))
    assert abs(eq.tau - chi / omega) < 1e-12


def test_branch_point_flagged():
    res = evolution_time(ConstraintMode.omega_fixed(2.0), 0.5, TargetSpec(1.0))
    assert res.branch_point and abs(res.tau - PI / 2) < 1e-12


def test_negative_real_candidate_moves_to_next_branch():
    # real theta below chi/2 makes the root imaginary; in the other half plane arctan < 0
    res = evolution_time(ConstraintMode.omega_fixed(1.0), PI / 2 + 0.5j, TargetSpec(-1.0))
    assert res.psi.real > 0


# reality manifold

def test_real_root_at_zero():
    roots = solve_reality(ConstraintMode.omega_fixed(1.0), TargetSpec(2.0), PI / 2, window=(-1, 1), n_scan=401)
    assert len(roots) == 1 and abs(roots[0].im_theta) < 1e-9


def _dense_sign_changes(mode, target, re_theta, window, n=20001):
    ys = np.linspace(*window, n)
    args = np.array([evolution_time(mode, re_theta + 1j * y, target).reality_residual for y in ys])
    # a continuous zero has small |arg| on both sides; cut jumps do not
    change = (args[:-1] * args[1:] < 0) & (np.abs(args[:-1]) + np.abs(args[1:]) < 0.05)
    return ys[:-1][change]


@pytest.mark.parametrize("chi, re_theta", [(PI, 1.2), (2.0, 1.2), (2.5, 1.45)])
def test_roots_match_dense_scan(chi, re_theta):
    mode, target = ConstraintMode.omega_fixed(1.0), TargetSpec(chi)
    roots = solve_reality(mode, target, re_theta, window=(-3, 3))
    dense = _dense_sign_changes(mode, target, re_theta, (-3, 3))
    assert len(roots) == len(dense)
    for r, y in zip(roots, dense):
        assert abs(r.im_theta - y) < 6 / 20000
        assert abs(r.residual) < 1e-8


def test_no_root_when_phases_disagree():
    mode = ConstraintMode.omega_fixed(np.exp(0.3j))
    target = TargetSpec(PI)
    assert abs(evolution_time(mode, PI / 2, target).reality_residual) > 0.1
    roots = solve_reality(mode, target, PI / 2, window=(-0.5, 0.5))
    assert all(abs(r.im_theta) > 1e-3 for r in roots)


def test_window_validated():
    with pytest.raises(ValueError):
        solve_reality(ConstraintMode.omega_fixed(1.0), TargetSpec(1.0), 1.0, window=(1, -1))


def test_consistency_closure():
    rng = np.random.default_rng(11)
    checked = 0
    for _ in range(40):
        alpha = rng.uniform(-0.3, 0.3)
        omega = rng.uniform(0.5, 2) * np.exp(1j * alpha)
        target = TargetSpec(rng.uniform(0.5, 2.8) * np.exp(1j * rng.uniform(-0.2, 0.2)), rng.uniform(-1, 1))
        mode = ConstraintMode.omega_fixed(omega)
        re_theta = rng.uniform(0.8, 2.3)
        for root in solve_reality(mode, target, re_theta, window=(-2, 2), n_scan=200):
            theta = complex(re_theta, root.im_theta)
            phi = phi_from_target(theta, target)
            n = propagate_closed(HamiltonianParams(0, omega, theta, phi), root.tau)
            assert np.max(np.abs(n - target.bloch)) < 1e-8
            checked += 1
    assert checked > 10


# critical points and the landscape

def test_critical_points_fig1():
    pts = critical_points(1.0, PI)
    saddle = pts[0]
    assert saddle.kind is CriticalKind.SADDLE and saddle.admissible
    assert abs(saddle.theta - PI / 2) == 0 and abs(saddle.tau - PI) < 1e-15
    assert all(p.kind is CriticalKind.ASYMPTOTIC_INFIMUM for p in pts[1:])
    assert all(abs(p.theta.real - PI / 2) < 1e-15 for p in pts[1:])
    assert abs(critical_points(1.0, PI / 2)[0].tau - PI / 2) < 1e-15


def test_critical_points_tilted_gap():
    omega, chi = np.exp(0.2j), PI * np.exp(0.2j)
    pts = critical_points(omega, chi)
    assert pts[0].admissible and abs(pts[0].tau - PI) < 1e-12
    mode, target = ConstraintMode.omega_fixed(omega), TargetSpec(chi)
    assert abs(evolution_time(mode, PI / 2, target).reality_residual) < 1e-12
    for p in pts[1:]:
        ys = np.sign(p.theta.imag) * np.linspace(1, 8, 30)
        res = [evolution_time(mode, p.theta.real + 1j * y, target) for y in ys]
        taus = np.array([r.tau for r in res])
        assert np.all(np.diff(taus) < 0) and taus[-1] < 2e-3
        assert abs(res[-1].reality_residual) < 1e-7


def test_critical_points_reject_zero_gap():
    with pytest.raises(ValueError):
        critical_points(0, PI)


def test_saddle_classification():
    check = classify_saddle(ConstraintMode.omega_fixed(1.0), TargetSpec(PI))
    assert check.is_saddle and check.is_real_minimum


def test_hermitian_local_minimum():
    mode, target = ConstraintMode.omega_fixed(1.3), TargetSpec(2.2)
    base = evolution_time(mode, PI / 2, target).tau
    for d in (1e-4, 1e-2, 0.2):
        for sign in (-1, 1):
            assert evolution_time(mode, PI / 2 + sign * d, target).tau > base


def test_monotone_vanishing():
    tau, resid = reality_manifold_tau(ConstraintMode.omega_fixed(1.0), TargetSpec(PI), np.linspace(0.01, 6, 300))
    assert np.all(np.diff(tau) < 0) and tau[-1] < 0.01
    assert np.max(np.abs(resid)) < 1e-12


def test_landscape_shape_and_symmetry():
    grid = landscape(ConstraintMode.omega_fixed(1.0), TargetSpec(2.0), cell_centers(0, PI, 20), cell_centers(-3, 3, 30))
    assert grid.abs_psi.shape == (20, 30)
    assert not grid.branch.any()
    assert np.max(np.abs(grid.abs_psi - grid.abs_psi[:, ::-1])) < 1e-12
    assert np.max(np.abs(grid.arg_psi + grid.arg_psi[:, ::-1])) < 1e-12
    rows = list(grid.rows())
    assert len(rows) == 600 and rows[1][0] == rows[0][0]


def test_landscape_flags_branch_cells():
    # cell centred exactly on the branch point theta = pi/2, chi = pi
    grid = landscape(ConstraintMode.omega_fixed(1.0), TargetSpec(PI), cell_centers(0, PI, 3), cell_centers(-1, 1, 3))
    assert grid.branch[1, 1]
    assert np.isnan(grid.abs_psi[1, 1])
    assert np.isfinite(grid.abs_psi[~grid.branch]).all()


def test_cell_centers():
    assert np.allclose(cell_centers(0, 1, 4), [0.125, 0.375, 0.625, 0.875])
    with pytest.raises(ValueError):
        cell_centers(1, 0, 3)


def test_constraint_mode_validation():
    assert ConstraintMode.abs_omega_fixed(1 + 1j).kind is Constraint.ABS_OMEGA_FIXED
    with pytest.raises(ValueError):
        ConstraintMode.variance_fixed(1 + 1j)
