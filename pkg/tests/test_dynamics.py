import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nhbrach import (
    UP,
    HamiltonianParams,
    IntegrationError,
    Trajectory,
    bloch_from_spinors,
    build_effective,
    complex_dot,
    first_arrival,
    integrate_bloch,
    integrate_spinor,
    propagate_closed,
    propagate_spinor,
    propagator,
    pt_closed,
    pt_params,
    transition_coefficients,
)
from nhbrach.dynamics import _solve

from strategies import cplx, gaps, phis, thetas

times = st.floats(0.0, 3.0, allow_nan=False)


def test_closed_form_starts_at_north_pole():
    p = HamiltonianParams(0.1j, 2 - 1j, 0.4 + 0.9j, 1.3)
    assert np.max(np.abs(propagate_closed(p, 0.0) - [0, 0, 1])) < 1e-15


def test_closed_form_circle():
    t = np.linspace(0, 6, 13)
    n = propagate_closed(HamiltonianParams(0, 1, np.pi / 2, np.pi / 2), t)
    expected = np.stack([np.sin(t), 0 * t, np.cos(t)], axis=-1)
    assert np.max(np.abs(n - expected)) < 1e-15


def test_closed_form_vectorized_shape():
    p = HamiltonianParams(0, 1, 1, 0)
    assert propagate_closed(p, np.zeros((4, 5))).shape == (4, 5, 3)
    with pytest.raises(ValueError):
        propagate_closed(p, -1.0)


def test_closed_form_matches_ode_complex():
    p = HamiltonianParams(0, 1 + 0.25j, 0.8 + 0.3j, 0.2 - 0.1j)
    ode = integrate_bloch(p, 1.3, tol=1e-12, n_samples=2).final
    assert np.max(np.abs(ode - propagate_closed(p, 1.3))) < 1e-8


def test_spinor_identity_at_zero():
    pair = propagate_spinor(HamiltonianParams(0.5, 2 + 1j, 0.3j, 1), 0.0)
    assert np.array_equal(pair.u, UP.u) and np.array_equal(pair.u_tilde, UP.u_tilde)


def test_spinor_matches_transition_coefficients():
    chi = 2.1
    p = HamiltonianParams(0, 1, np.pi / 2, 0.7)
    pair = propagate_spinor(p, chi)
    tc = transition_coefficients(p, chi)
    assert np.max(np.abs(pair.u - [tc.a, tc.b])) < 1e-14


@settings(max_examples=300, deadline=None)
@given(cplx(), gaps, thetas, phis, times)
def test_spinor_and_closed_form_agree(lam0, omega, theta, phi, t):
    p = HamiltonianParams(lam0, omega, theta, phi)
    t = t / abs(omega) * 2
    n_spin = bloch_from_spinors(propagate_spinor(p, t))
    n_closed = propagate_closed(p, t)
    scale = max(1.0, np.max(np.abs(n_closed)))
    assert np.max(np.abs(n_spin - n_closed)) / scale < 1e-8


@settings(max_examples=200, deadline=None)
@given(cplx(), gaps, thetas, phis, times, times)
def test_semigroup(lam0, omega, theta, phi, t1, t2):
    h = build_effective(HamiltonianParams(lam0, omega, theta, phi))
    whole = propagator(h, t1 + t2)
    split = propagator(h, t2) @ propagator(h, t1)
    scale = max(1.0, np.max(np.abs(whole)))
    assert np.max(np.abs(whole - split)) / scale < 1e-10


def test_exceptional_point_jordan_limit():
    h = np.array([[0.3, 1.0], [0.0, 0.3]], dtype=complex)
    t = 1.7
    expected = np.exp(-0.3j * t) * (np.eye(2) - 1j * t * (h - 0.3 * np.eye(2)))
    assert np.max(np.abs(propagator(h, t) - expected)) < 1e-15
    # continuity at a tiny gap
    h_near = h + np.diag([1e-9, -1e-9])
    assert np.max(np.abs(propagator(h_near, t) - expected)) < 1e-8


def test_propagator_matches_scipy_expm():
    from scipy.linalg import expm

    h = build_effective(HamiltonianParams(0.3 - 0.1j, 1.3 + 0.4j, 0.6 + 0.5j, -0.2 + 0.3j))
    assert np.max(np.abs(propagator(h, 2.3) - expm(-2.3j * h))) < 1e-12


def test_fixed_point_on_axis():
    traj = integrate_bloch(HamiltonianParams(0, 2 + 1j, 0, 0), 5.0, n_samples=50)
    assert np.max(np.abs(traj.n - [0, 0, 1])) < 1e-12


def test_real_parameters_circle():
    p = HamiltonianParams(0, 1.3, np.pi / 2, 0.4)
    traj = integrate_bloch(p, 2 * np.pi, n_samples=64)
    assert np.max(np.abs(traj.n - propagate_closed(p, traj.times))) < 1e-8
    assert np.max(np.abs(traj.n.imag)) < 1e-10


def test_figure_family_matches_closed_form():
    p = HamiltonianParams(0, 1 + 0.25j, np.pi / 2 + 0.3j, 0.5 + 0.1j)
    traj = integrate_bloch(p, 4.0)
    assert traj.n.shape == (512, 3)
    assert np.max(np.abs(traj.n - propagate_closed(p, traj.times))) < 1e-8


def test_pt_closed_special_cases():
    t = np.linspace(0, 3, 7)
    n = pt_closed(1.0, 0.0, 0.4, t)
    assert np.max(np.abs(n.imag)) < 1e-15
    assert np.max(np.abs(pt_closed(1.0, 1.3, 0.2, 0.0) - [0, 0, 1])) < 1e-15
    ode = integrate_bloch(pt_params(1.0, 1.0, np.pi / 2), 1.0, tol=1e-12, n_samples=2).final
    assert np.max(np.abs(ode - pt_closed(1.0, 1.0, np.pi / 2, 1.0))) < 1e-8


def test_pt_closed_is_general_closed_form():
    t = np.linspace(0, 5, 11)
    assert np.max(np.abs(pt_closed(1.3, 0.7, 0.4, t) - propagate_closed(pt_params(1.3, 0.7, 0.4), t))) < 1e-13


@settings(max_examples=100, deadline=None)
@given(gaps, thetas, phis)
def test_norm_conserved_over_two_periods(omega, theta, phi):
    p = HamiltonianParams(0, omega, theta, phi)
    t_end = 4 * np.pi / abs(omega)
    closed = propagate_closed(p, np.linspace(0, t_end, 64))
    scale = np.maximum(1.0, np.sum(np.abs(closed) ** 2, axis=-1))
    assert np.max(np.abs(complex_dot(closed, closed) - 1) / scale) < 1e-8


def test_norm_conserved_along_integration():
    p = HamiltonianParams(0, 1 + 0.5j, 1.0 + 0.4j, 0.3)
    traj = integrate_bloch(p, 4 * np.pi / abs(p.omega))
    assert np.max(np.abs(complex_dot(traj.n, traj.n) - 1)) < 1e-8


def test_biorthogonal_overlap_conserved():
    h = build_effective(HamiltonianParams(0.2 + 0.1j, 1.5 + 0.5j, 0.9 + 0.6j, 0.1 - 0.2j))
    _, pairs = integrate_spinor(h, 5.0, UP, tol=1e-12, n_samples=50)
    assert max(abs(p.overlap - 1) for p in pairs) < 1e-9


def test_tolerance_range_checked():
    p = HamiltonianParams(0, 1, 1, 0)
    with pytest.raises(ValueError):
        integrate_bloch(p, 1.0, tol=1e-20)
    with pytest.raises(ValueError):
        integrate_bloch(p, -1.0)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_integration_failure_keeps_last_state():
    # an absurd growth rate drives the step size to underflow
    k = np.array([[1e300]], dtype=complex)
    with pytest.raises(IntegrationError) as info:
        _solve(k, [1.0], 10.0, 1e-10)
    assert info.value.t_last is not None


def test_trajectory_validation():
    p = HamiltonianParams()
    n = np.array([[0, 0, 1], [0, 0, 1]], dtype=complex)
    with pytest.raises(ValueError):
        Trajectory(np.array([0.0, 0.0]), n, p)
    with pytest.raises(ValueError):
        Trajectory(np.array([0.0, 1.0]), 2 * n, p)


def test_first_arrival_hermitian():
    p = HamiltonianParams(0, 1, np.pi / 2, np.pi / 2)
    t = first_arrival(p, np.array([0, 0, -1]), t_max=2 * np.pi)
    assert abs(t - np.pi) < 1e-8
    assert first_arrival(p, np.array([0, 0, -1]), t_max=3.0) is None
