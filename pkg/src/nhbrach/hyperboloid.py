"""The real-spectrum branch and its picture on the one-sheeted hyperboloid.

With ``theta = pi/2 + i eta`` and real ``Omega`` the complex Bloch trajectory
maps to a real curve on ``m1^2 + m2^2 - m3^2 = 1`` with the indefinite
metric ``g = diag(1, 1, -1)``.  This module provides the map, the geodesics
of that surface, path lengths, and the time/length bounds at fixed
``omega = Omega cosh(eta)``.
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.integrate import simpson, solve_ivp
from scipy.interpolate import CubicSpline

from .dynamics import pt_closed, pt_params
from .errors import NotOnBranchError

__all__ = [
    "METRIC",
    "PTScenario",
    "HyperPath",
    "Speeds",
    "minkowski_dot",
    "check_on_hyperboloid",
    "to_hyperboloid",
    "from_hyperboloid",
    "final_point",
    "final_bloch",
    "pt_evolution_time",
    "geodesic_direction",
    "geodesic",
    "integrate_geodesic",
    "geodesic_residual",
    "schrodinger_curve",
    "mapped_path",
    "path_length",
    "closed_form_length",
    "omega_constrained_bounds",
    "speeds",
]

METRIC = np.diag([1.0, 1.0, -1.0])
REAL_TOL = 1e-9


def minkowski_dot(a, b):
    """``a1 b1 + a2 b2 - a3 b3`` over the last axis."""
    a = np.asarray(a)
    b = np.asarray(b)
    return a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1] - a[..., 2] * b[..., 2]


def check_on_hyperboloid(m, tol=1e-10):
    """Largest ``|g(m, m) - 1|``; raises ``ValueError`` above ``tol``."""
    dev = float(np.max(np.abs(minkowski_dot(m, m) - 1)))
    if dev > tol:
        raise ValueError(f"point leaves the hyperboloid: |g(m,m) - 1| = {dev:.3e}")
    return dev


@dataclass(frozen=True)
class PTScenario:
    """Real gap ``omega > 0``, ``eta = Im theta``, real target angles.

    The azimuth is fixed by the upper sign ``Re(phi - gamma) = +pi/2``.
    """

    omega: float
    eta: float
    chi: float
    gamma: float = 0.0

    def __post_init__(self):
        for name in ("omega", "eta", "chi", "gamma"):
            value = getattr(self, name)
            if isinstance(value, complex) or np.iscomplexobj(value):
                raise ValueError(f"{name} must be real on this branch")
            object.__setattr__(self, name, float(value))
        if not self.omega > 0:
            raise ValueError("omega must be positive")

    @property
    def phi(self):
        return self.gamma + np.pi / 2

    @property
    def theta(self):
        return complex(np.pi / 2, self.eta)

    @property
    def params(self):
        return pt_params(self.omega, self.eta, self.phi)

    @property
    def speed(self):
        """Metric speed ``Omega cosh(eta)`` of the induced curve."""
        return self.omega * np.cosh(self.eta)


@dataclass(frozen=True, eq=False)
class HyperPath:
    """Samples ``points`` (N, 3) on the hyperboloid at parameters ``s``."""

    s: np.ndarray
    points: np.ndarray
    kind: str = "time"

    def __post_init__(self):
        if self.kind not in ("time", "arclength"):
            raise ValueError("kind must be 'time' or 'arclength'")
        if np.any(np.diff(self.s) <= 0):
            raise ValueError("path parameter must be strictly increasing")
        check_on_hyperboloid(self.points, tol=1e-8)


def to_hyperboloid(n, phi):
    """Map a branch Bloch vector to ``(n3, n1 sin phi - n2 cos phi,
    i (n1 cos phi + n2 sin phi))``.

    Raises:
        NotOnBranchError: if any component has an imaginary part above 1e-9.
    """
    n = np.asarray(n, dtype=complex)
    phi = complex(phi)
    m = np.stack(
        [
            n[..., 2],
            n[..., 0] * np.sin(phi) - n[..., 1] * np.cos(phi),
            1j * (n[..., 0] * np.cos(phi) + n[..., 1] * np.sin(phi)),
        ],
        axis=-1,
    )
    residue = np.max(np.abs(m.imag)) if m.size else 0.0
    if residue > REAL_TOL * max(1.0, float(np.max(np.abs(m)))):
        raise NotOnBranchError(f"image is not real (imaginary residue {residue:.2e})")
    return m.real


def from_hyperboloid(m, phi):
    """Inverse of :func:`to_hyperboloid` for a given azimuth."""
    m = np.asarray(m, dtype=float)
    c, s = np.cos(phi), np.sin(phi)
    n1 = m[..., 1] * s - 1j * m[..., 2] * c
    n2 = -m[..., 1] * c - 1j * m[..., 2] * s
    return np.stack([n1, n2, m[..., 0] + 0j], axis=-1)


def final_point(chi, eta):
    """Image of the target: ``(cos chi, sqrt(sin^2 chi + T^2), T)`` with
    ``T = tanh(eta) (1 - cos chi)``."""
    t = np.tanh(eta) * (1 - np.cos(chi))
    return np.array([np.cos(chi), np.sqrt(np.sin(chi) ** 2 + t**2), t])


def final_bloch(scenario):
    """Complex Bloch vector reached at the transfer time on this branch."""
    return from_hyperboloid(final_point(scenario.chi, scenario.eta), scenario.phi)


def pt_evolution_time(scenario):
    """``tau = (2/Omega) arctan(sin(chi/2) / sqrt(cos^2(chi/2) + sinh^2 eta))``."""
    sc = scenario
    root = np.sqrt(np.cos(sc.chi / 2) ** 2 + np.sinh(sc.eta) ** 2)
    return float(2 / sc.omega * np.arctan2(np.sin(sc.chi / 2), root))


def geodesic_direction(chi, eta):
    """Unit tangent at ``(1, 0, 0)`` of the geodesic through ``final_point``."""
    b = np.tanh(eta) * np.tan(chi / 2)
    return np.array([0.0, np.sqrt(1 + b * b), b])


def _check_direction(initial, direction, tol=1e-10):
    if abs(minkowski_dot(initial, initial) - 1) > tol:
        raise ValueError("initial point is not on the hyperboloid")
    if abs(minkowski_dot(initial, direction)) > tol:
        raise ValueError("direction is not g-orthogonal to the initial point")
    if abs(minkowski_dot(direction, direction) - 1) > tol:
        raise ValueError("direction is not a g-unit (spacelike) vector")


def geodesic(s, initial, direction):
    """``m(s) = cos(s) m_i + sin(s) d`` (vectorized over ``s``)."""
    initial = np.asarray(initial, dtype=float)
    direction = np.asarray(direction, dtype=float)
    _check_direction(initial, direction)
    s = np.asarray(s, dtype=float)[..., None]
    return np.cos(s) * initial + np.sin(s) * direction


def integrate_geodesic(s_end, initial, direction, tol=1e-12, chart_limit=10.0):
    """Integrate the geodesic equation numerically and return ``m(s_end)``.

    The ``(rho, nu)`` chart ``m = (cosh rho cos nu, cosh rho sin nu,
    sinh rho)`` is used while ``|rho| <= chart_limit``; past that the
    embedded form ``m'' + m = 0`` takes over.
    """
    initial = np.asarray(initial, dtype=float)
    direction = np.asarray(direction, dtype=float)
    _check_direction(initial, direction)
    rho = np.arcsinh(initial[2])
    nu = np.arctan2(initial[1], initial[0])
    ch = np.cosh(rho)
    drho = direction[2] / ch
    dnu = (-np.sin(nu) * direction[0] + np.cos(nu) * direction[1]) / ch

    def chart_rhs(_s, y):
        r, v, dr, dv = y
        return [dr, dv, -np.sinh(r) * np.cosh(r) * dv**2, -2 * np.tanh(r) * dr * dv]

    def leave_chart(_s, y):
        return abs(y[0]) - chart_limit

    leave_chart.terminal = True
    sol = solve_ivp(
        chart_rhs, (0.0, s_end), [rho, nu, drho, dnu],
        method="DOP853", rtol=tol, atol=tol, events=leave_chart,
    )
    r, v, dr, dv = sol.y[:, -1]
    m = np.array([np.cosh(r) * np.cos(v), np.cosh(r) * np.sin(v), np.sinh(r)])
    if sol.status != 1:
        return m
    dm = np.array([
        np.sinh(r) * np.cos(v) * dr - np.cosh(r) * np.sin(v) * dv,
        np.sinh(r) * np.sin(v) * dr + np.cosh(r) * np.cos(v) * dv,
        np.cosh(r) * dr,
    ])
    s0 = sol.t[-1]
    sol = solve_ivp(
        lambda _s, y: np.concatenate([y[3:], -y[:3]]),
        (s0, s_end), np.concatenate([m, dm]),
        method="DOP853", rtol=tol, atol=tol,
    )
    return sol.y[:3, -1]


def geodesic_residual(curve, s_values, h=1e-4):
    """``max |m''(s) + m(s)|`` by central differences of an arclength curve."""
    s_values = np.asarray(s_values, dtype=float)
    m = curve(s_values)
    d2 = (curve(s_values + h) - 2 * m + curve(s_values - h)) / h**2
    return float(np.max(np.abs(d2 + m)))


def schrodinger_curve(scenario):
    """The induced hyperboloid curve as a function of its arclength.

    The curve has constant metric speed ``Omega cosh(eta)``, so
    ``t = s / speed``.
    """
    sc = scenario

    def curve(s):
        t = np.asarray(s, dtype=float) / sc.speed
        return to_hyperboloid(pt_closed(sc.omega, sc.eta, sc.phi, t), sc.phi)

    return curve


def mapped_path(scenario, t_end=None, n_samples=512):
    """Sample the induced curve in time on ``[0, t_end]`` (default: transfer time)."""
    if t_end is None:
        t_end = pt_evolution_time(scenario)
    t = np.linspace(0.0, t_end, n_samples)
    n = pt_closed(scenario.omega, scenario.eta, scenario.phi, t)
    return HyperPath(t, to_hyperboloid(n, scenario.phi), "time")


def path_length(path, tol=1e-10):
    """Length ``int sqrt(g(m', m')) ds`` by composite Simpson quadrature.

    Tangents come from a cubic spline through the samples.

    Raises:
        ValueError: if the squared speed is negative beyond ``tol``
            (timelike pieces have no real length on this branch).
    """
    spline = CubicSpline(path.s, path.points, axis=0)
    tangent = spline(path.s, 1)
    speed2 = minkowski_dot(tangent, tangent)
    if np.min(speed2) < -tol * max(1.0, float(np.max(np.abs(speed2)))):
        raise ValueError("path is not spacelike: negative squared speed")
    speed = np.sqrt(np.clip(speed2, 0.0, None))
    return float(simpson(speed, x=path.s))


def closed_form_length(chi, eta):
    """``2 cosh(eta) arctan(sin(chi/2) / sqrt(cos^2(chi/2) + sinh^2 eta))``."""
    root = np.sqrt(np.cos(chi / 2) ** 2 + np.sinh(eta) ** 2)
    return float(2 * np.cosh(eta) * np.arctan2(np.sin(chi / 2), root))


def omega_constrained_bounds(omega_bar, chi, omega):
    """Time and length at fixed ``omega_bar = Omega cosh(eta)``.

    ``tau = (2/Omega) arctan(Omega sin(chi/2) / sqrt(w^2 - Omega^2
    sin^2(chi/2)))`` and ``L = w tau``.  ``omega = 0`` returns the
    exceptional-point limit ``tau = (2/w) sin(chi/2)``.

    Raises:
        ValueError: if ``omega > omega_bar`` (no real ``eta``) or negative.
    """
    w = float(omega_bar)
    om = float(omega)
    if not w > 0:
        raise ValueError("omega_bar must be positive")
    if om < 0 or om > w * (1 + 1e-15):
        raise ValueError("need 0 <= Omega <= omega_bar for a real eta")
    om = min(om, w)
    s = np.sin(chi / 2)
    root = np.sqrt(max(w * w - om * om * s * s, 0.0))
    x = om * s / root if root > 0 else np.inf
    if x < 1e-6:
        # arctan(x)/x series; x -> 0 is the exceptional point
        tau = 2 * s / root * (1 - x * x / 3 + x**4 / 5)
    else:
        tau = 2 / om * np.arctan2(om * s, root)
    return float(tau), float(w * tau)


class Speeds(NamedTuple):
    v: float
    v_geodesic: float


def speeds(omega, eta=None, theta=None):
    """Evolution speed against the geodesic speed ``v_g = Omega``.

    Pass ``eta`` for the real-spectrum branch (``v = Omega cosh eta``) or a
    real ``theta`` for the Hermitian case (``v = Omega sin theta``).
    """
    if (eta is None) == (theta is None):
        raise ValueError("give exactly one of eta or theta")
    if eta is not None:
        return Speeds(float(omega * np.cosh(eta)), float(omega))
    return Speeds(float(omega * np.sin(theta)), float(omega))
