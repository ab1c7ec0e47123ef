"""Closed-form and numerically integrated evolution on the complex Bloch sphere.

The integrators here are deliberately independent of the closed forms: they
only use the precession vector (Bloch equation ``dn/dt = Omega x n``) or the
Hamiltonian matrix (Schroedinger equation), and serve as oracles for every
closed-form expression in the package.
"""
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .bloch import BiorthPair, UP, check_on_sphere
from .errors import IntegrationError
from .hamiltonian import HamiltonianParams, build_effective

__all__ = [
    "Trajectory",
    "propagate_closed",
    "propagator",
    "propagate_spinor",
    "integrate_bloch",
    "integrate_spinor",
    "first_arrival",
    "pt_closed",
    "pt_params",
]

DEFAULT_TOL = 1e-10
DEFAULT_SAMPLES = 512
_METHOD = "DOP853"


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled Bloch trajectory: ``times`` (N,) and ``n`` (N, 3)."""

    times: np.ndarray
    n: np.ndarray
    params: HamiltonianParams

    def __post_init__(self):
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")
        check_on_sphere(self.n, tol=1e-8)

    @property
    def final(self):
        return self.n[-1]


def propagate_closed(params, t):
    """Bloch vector at time(s) ``t`` starting from ``(0, 0, 1)``.

    Vectorized over ``t``; the result has shape ``t.shape + (3,)``.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    th, ph = params.theta, params.phi
    s, c = np.sin(th), np.cos(th)
    wt = params.omega * t
    one_minus = 1 - np.cos(wt)
    sin_wt = np.sin(wt)
    n1 = s * c * one_minus * np.cos(ph) + s * sin_wt * np.sin(ph)
    n2 = s * c * one_minus * np.sin(ph) - s * sin_wt * np.cos(ph)
    n3 = c * c + s * s * np.cos(wt)
    return np.stack(np.broadcast_arrays(n1, n2, n3), axis=-1).astype(complex)


def _sinc(z):
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-4
    safe = np.where(small, 1.0, z)
    z2 = z * z
    return np.where(small, 1 - z2 / 6 + z2 * z2 / 120, np.sin(safe) / safe)


def propagator(h, t):
    """``exp(-i h t)`` for a 2x2 matrix, in closed form.

    With ``M = h - tr(h)/2`` one has ``M^2 = q^2`` and
    ``exp(-i M t) = cos(q t) - i t sinc(q t) M``, which reduces to the Jordan
    form ``1 - i M t`` at an exceptional point (``q = 0``) without dividing
    by the gap.
    """
    h = np.asarray(h, dtype=complex)
    lam0 = 0.5 * np.trace(h)
    m = h - lam0 * np.eye(2)
    q = np.sqrt(-np.linalg.det(m) + 0j)
    return np.exp(-1j * lam0 * t) * (
        np.cos(q * t) * np.eye(2) - 1j * t * _sinc(q * t) * m
    )


def propagate_spinor(params, t, initial=UP):
    """Evolve a bi-orthogonal pair for time ``t``.

    The spinor gets ``exp(-iHt) u``; the co-spinor gets ``u~ exp(iHt)`` from
    the same closed-form exponential, so ``<u~|u>`` is preserved exactly up
    to round-off.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    h = build_effective(params)
    forward = propagator(h, t)
    backward = propagator(h, -t)
    return BiorthPair(forward @ initial.u, initial.u_tilde @ backward)


def _skew(v):
    return np.array(
        [[0, -v[2], v[1]], [v[2], 0, -v[0]], [-v[1], v[0], 0]], dtype=complex
    )


def _solve(rhs_matrix, y0, t_end, tol, t_eval=None, events=None):
    if not (1e-14 <= tol <= 1e-4):
        raise ValueError("tol must lie in [1e-14, 1e-4]")
    if t_end < 0:
        raise ValueError("t_end must be non-negative")
    sol = solve_ivp(
        lambda _t, y: rhs_matrix @ y,
        (0.0, t_end),
        np.asarray(y0, dtype=complex),
        method=_METHOD,
        rtol=tol,
        atol=tol,
        t_eval=t_eval,
        events=events,
        dense_output=events is not None,
    )
    if sol.status == -1:
        raise IntegrationError(sol.message, t_last=sol.t[-1], y_last=sol.y[:, -1])
    return sol


def integrate_bloch(params, t_end, tol=DEFAULT_TOL, n_samples=DEFAULT_SAMPLES):
    """Integrate ``dn/dt = Omega x n`` from ``(0, 0, 1)`` with adaptive steps.

    Output is sampled at ``n_samples`` uniform times on ``[0, t_end]``.

    Raises:
        IntegrationError: if the step size underflows.
    """
    k = _skew(params.omega_vector)
    if t_end == 0:
        n = np.array([[0, 0, 1]], dtype=complex)
        return Trajectory(np.zeros(1), n, params)
    times = np.linspace(0.0, t_end, n_samples)
    sol = _solve(k, [0, 0, 1], t_end, tol, t_eval=times)
    return Trajectory(sol.t, sol.y.T, params)


def integrate_spinor(h, t_end, initial=UP, tol=DEFAULT_TOL, n_samples=2):
    """Integrate ``i du/dt = H u`` and ``-i du~/dt = u~ H`` numerically.

    Returns ``(times, pairs)``; each pair is built with ``check=False`` so the
    caller can measure the drift of ``<u~|u>``.
    """
    h = np.asarray(h, dtype=complex)
    block = np.zeros((4, 4), dtype=complex)
    block[:2, :2] = -1j * h
    block[2:, 2:] = 1j * h.T
    y0 = np.concatenate([initial.u, initial.u_tilde])
    times = np.linspace(0.0, t_end, max(n_samples, 2))
    sol = _solve(block, y0, t_end, tol, t_eval=times)
    pairs = [BiorthPair(y[:2], y[2:], check=False) for y in sol.y.T]
    return sol.t, pairs


def first_arrival(params, target, t_max, tol=1e-12, match_tol=1e-6):
    """Earliest time the integrated Bloch vector reaches ``target``.

    Candidate times are the crossings of ``Re n3`` through ``Re target3`` and
    the turning points of ``Re n3`` (where a target at an extremum is touched
    without a crossing), both found by event location on the dense ODE
    output.  The first candidate at which every component lies within
    ``match_tol`` of the target is returned, or ``None`` if the target is not
    reached before ``t_max``.
    """
    target = np.asarray(target, dtype=complex)
    k = _skew(params.omega_vector)

    def crossing(_t, y):
        return (y[2] - target[2]).real

    def turning(_t, y):
        return (k[2] @ y).real

    sol = _solve(k, [0, 0, 1], t_max, tol, events=[crossing, turning])
    candidates = np.sort(np.concatenate(sol.t_events))
    for t_hit in candidates:
        n = sol.sol(t_hit)
        if np.max(np.abs(n - target)) <= match_tol:
            return float(t_hit)
    return None


def pt_params(omega, eta, phi, lambda0=0.0):
    """Parameters on the real-spectrum branch ``theta = pi/2 + i eta``."""
    return HamiltonianParams(lambda0, omega, np.pi / 2 + 1j * eta, phi)


def pt_closed(omega, eta, phi, t):
    """Bloch vector on the ``theta = pi/2 + i eta`` branch (vectorized in ``t``)."""
    t = np.asarray(t, dtype=float)
    ch, sh = np.cosh(eta), np.sinh(eta)
    wt = omega * t
    one_minus = 1 - np.cos(wt)
    sin_wt = np.sin(wt)
    n1 = -1j * sh * ch * one_minus * np.cos(phi) + ch * sin_wt * np.sin(phi)
    n2 = -1j * sh * ch * one_minus * np.sin(phi) - ch * sin_wt * np.cos(phi)
    n3 = ch * ch * np.cos(wt) - sh * sh
    return np.stack(np.broadcast_arrays(n1, n2, n3), axis=-1).astype(complex)
