"""Evolution time as a function of the complex polar angle ``theta``.

For a target ``n_f(chi, gamma)`` the transfer time is ``tau = |Psi|`` with

    Psi = (2 / Omega) * arctan(sin(chi/2) / sqrt(cos^2(chi/2) - cos^2 theta))

and the configuration is physical only on the reality manifold
``arg Psi = 0``.  Three constraint regimes are supported: fixed ``Omega``,
fixed ``|Omega|`` and fixed energy variance ``Delta E``.
"""
import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import bisect

from ._branches import arctan_term, wrap_angle
from .hamiltonian import _target_off_diagonal

__all__ = [
    "Constraint",
    "ConstraintMode",
    "TimeResult",
    "RealityRoot",
    "CriticalPoint",
    "CriticalKind",
    "SaddleCheck",
    "LandscapeGrid",
    "phi_from_target",
    "evolution_phase",
    "variance_phase",
    "evolution_time",
    "solve_reality",
    "critical_points",
    "classify_saddle",
    "landscape",
    "cell_centers",
    "reality_manifold_tau",
]

ADMISSIBLE_TOL = 1e-9
_REAL_TOL = 1e-12


class Constraint(enum.Enum):
    OMEGA_FIXED = "omega"
    ABS_OMEGA_FIXED = "abs-omega"
    VARIANCE_FIXED = "variance"


@dataclass(frozen=True)
class ConstraintMode:
    """A constraint regime and its value.

    ``OMEGA_FIXED`` takes the complex gap.  ``ABS_OMEGA_FIXED`` takes a
    complex reference gap whose modulus is the constraint; its argument is
    what the reality residual is measured against.  ``VARIANCE_FIXED`` takes
    a real ``Delta E``.
    """

    kind: Constraint
    value: complex

    def __post_init__(self):
        kind = Constraint(self.kind)
        value = complex(self.value)
        if not np.isfinite(value) or value == 0:
            raise ValueError("constraint value must be finite and nonzero")
        if kind is Constraint.VARIANCE_FIXED:
            if value.imag != 0:
                raise ValueError("Delta E must be real")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "value", value)

    @classmethod
    def omega_fixed(cls, omega):
        return cls(Constraint.OMEGA_FIXED, omega)

    @classmethod
    def abs_omega_fixed(cls, omega):
        return cls(Constraint.ABS_OMEGA_FIXED, omega)

    @classmethod
    def variance_fixed(cls, delta_e):
        return cls(Constraint.VARIANCE_FIXED, delta_e)


class TimeResult(NamedTuple):
    tau: float
    psi: complex
    reality_residual: float
    branch_point: bool = False
    required_arg_omega: float = None

    @property
    def admissible(self):
        return abs(self.reality_residual) <= ADMISSIBLE_TOL


class RealityRoot(NamedTuple):
    im_theta: float
    tau: float
    residual: float
    arg_omega: float = None


class CriticalKind(enum.Enum):
    SADDLE = "saddle"
    ASYMPTOTIC_INFIMUM = "asymptotic-infimum"


class CriticalPoint(NamedTuple):
    theta: complex
    kind: CriticalKind
    tau: float
    admissible: bool
    limit: bool = False


class SaddleCheck(NamedTuple):
    d2_re: float
    d2_im: float

    @property
    def is_saddle(self):
        return self.d2_re * self.d2_im < 0

    @property
    def is_real_minimum(self):
        return self.d2_re > 0


def phi_from_target(theta, target):
    """Azimuth ``phi`` that steers ``(0, 0, 1)`` onto ``target`` at polar ``theta``.

    ``e^{i phi} = e^{i gamma} (cos th sin(chi/2) + i sqrt(cos^2(chi/2) -
    cos^2 th)) / (cos(chi/2) sin th)``, the principal log giving
    ``Re phi`` in ``(-pi, pi]``.  At ``theta = pi/2`` this is
    ``gamma + pi/2``.

    Raises:
        ValueError: if ``sin theta = 0`` (pole of ``cot theta``) or the
            target sits at ``chi = pi`` with ``theta != pi/2``.
    """
    theta = complex(theta)
    st = np.sin(theta)
    if abs(st) < 1e-14:
        raise ValueError("cot(theta) has a pole: sin(theta) = 0")
    _, upper = _target_off_diagonal(theta, target.chi, target.gamma)
    return complex(-1j * np.log(upper / st))


def _select_branch(psi, shift):
    """Move negative-real phases to the nearest positive-real branch."""
    psi = np.asarray(psi, dtype=complex)
    neg_real = (np.abs(psi.imag) <= _REAL_TOL * np.abs(psi)) & (psi.real < 0)
    if not np.any(neg_real):
        return psi
    out = psi.copy()
    for step in (shift, -shift):
        cand = psi + step
        ok = (
            neg_real
            & (np.abs(cand.imag) <= _REAL_TOL * np.abs(cand))
            & (cand.real > 0)
        )
        out = np.where(ok, cand, out)
        neg_real = neg_real & ~ok
    return out


def _evolution_phase(omega, theta, chi):
    a, branch = arctan_term(theta, chi)
    psi = 2 * a / omega
    return _select_branch(psi, 2 * np.pi / omega), branch


def _variance_phase(delta_e, theta, chi):
    a, branch = arctan_term(theta, chi)
    st = np.sin(np.asarray(theta, dtype=complex))
    psi = st * a / delta_e
    return _select_branch(psi, np.pi * st / delta_e), branch


def evolution_phase(omega, theta, chi):
    """``Psi(theta)`` for a fixed gap ``omega``.

    At a branch point (``cos^2(chi/2) = cos^2 theta``) the limit
    ``pi / omega`` is returned; use :func:`evolution_time` to get the flag.
    """
    psi, _ = _evolution_phase(complex(omega), theta, chi)
    return complex(psi)


def variance_phase(delta_e, theta, chi):
    """``Psi~(theta) = (sin th / dE) arctan(...)`` for fixed energy variance."""
    psi, _ = _variance_phase(float(delta_e), theta, chi)
    return complex(psi)


def _mode_phase(mode, theta, chi):
    if mode.kind is Constraint.VARIANCE_FIXED:
        return _variance_phase(mode.value.real, theta, chi)
    return _evolution_phase(mode.value, theta, chi)


def evolution_time(mode, theta, target):
    """Transfer time ``|Psi|`` and reality residual ``arg Psi`` at ``theta``.

    For ``ABS_OMEGA_FIXED`` the argument of the gap that would make the time
    real (``arg Omega = arg arctan(...)``) is returned as well.
    """
    psi, branch = _mode_phase(mode, complex(theta), target.chi)
    psi = complex(psi)
    required = None
    if mode.kind is Constraint.ABS_OMEGA_FIXED:
        required = float(np.angle(psi * mode.value / 2))
    return TimeResult(
        tau=abs(psi),
        psi=psi,
        reality_residual=float(np.angle(psi)),
        branch_point=bool(branch),
        required_arg_omega=required,
    )


def solve_reality(mode, target, re_theta, window=(-3.0, 3.0), n_scan=400, xtol=1e-10):
    """Roots in ``Im theta`` of ``arg Psi(re_theta + i y) = 0`` inside ``window``.

    Sign changes are bracketed on ``n_scan`` uniform samples and refined by
    bisection.  Jumps of ``arg`` across the cut at ``+-pi`` are not roots and
    are discarded.  An empty list means no root was found.
    """
    lo, hi = map(float, window)
    if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
        raise ValueError("window must be a finite increasing interval")
    re_theta = float(re_theta)

    def residual(y):
        psi, _ = _mode_phase(mode, re_theta + 1j * np.asarray(y), target.chi)
        return np.angle(psi)

    ys = np.linspace(lo, hi, n_scan)
    rs = residual(ys)
    found = []
    for i in range(n_scan):
        if rs[i] == 0:
            found.append(ys[i])
        if i + 1 < n_scan and rs[i] * rs[i + 1] < 0 and abs(rs[i]) + abs(rs[i + 1]) < np.pi:
            found.append(bisect(lambda y: float(residual(y)), ys[i], ys[i + 1], xtol=xtol))
    roots = []
    for y in found:
        res = evolution_time(mode, re_theta + 1j * y, target)
        if abs(res.reality_residual) > 1e-6:
            continue
        roots.append(RealityRoot(float(y), res.tau, res.reality_residual, res.required_arg_omega))
    return roots


def critical_points(omega, chi):
    """Stationary points of ``tau(theta)`` for a fixed gap.

    A saddle at ``theta = pi/2`` with ``tau = |chi / omega|`` (physical only
    when ``arg omega = arg chi``), and the two asymptotic directions
    ``Re theta = pi/2 +- (arg omega - arg sin(chi/2))`` along which
    ``tau -> 0`` as ``Im theta -> +-inf``.
    """
    omega = complex(omega)
    chi = complex(chi)
    if omega == 0:
        raise ValueError("omega must be nonzero")
    admissible = abs(float(wrap_angle(np.angle(omega) - np.angle(chi)))) < ADMISSIBLE_TOL
    saddle = CriticalPoint(complex(np.pi / 2), CriticalKind.SADDLE, abs(chi / omega), admissible)
    delta = float(wrap_angle(np.angle(omega) - np.angle(np.sin(chi / 2))))
    return [
        saddle,
        CriticalPoint(complex(np.pi / 2 + delta, np.inf), CriticalKind.ASYMPTOTIC_INFIMUM, 0.0, True, True),
        CriticalPoint(complex(np.pi / 2 - delta, -np.inf), CriticalKind.ASYMPTOTIC_INFIMUM, 0.0, True, True),
    ]


def classify_saddle(mode, target, theta0=np.pi / 2, h=1e-5):
    """Central second differences of ``tau = |Psi|`` along ``Re`` and ``Im theta``."""
    theta0 = complex(theta0)

    def tau(th):
        return evolution_time(mode, th, target).tau

    f0 = tau(theta0)
    d2_re = (tau(theta0 + h) + tau(theta0 - h) - 2 * f0) / h**2
    d2_im = (tau(theta0 + 1j * h) + tau(theta0 - 1j * h) - 2 * f0) / h**2
    return SaddleCheck(d2_re, d2_im)


def cell_centers(lo, hi, n):
    """``n`` cell-centred samples of ``[lo, hi]``."""
    if n < 1 or not hi > lo:
        raise ValueError("need n >= 1 and hi > lo")
    return lo + (np.arange(n) + 0.5) * (hi - lo) / n


@dataclass(frozen=True, eq=False)
class LandscapeGrid:
    """``|Psi|`` and ``arg Psi`` on a ``(Re theta, Im theta)`` grid.

    Arrays are indexed ``[i_re, i_im]``.  ``branch`` marks cells where the
    phase is undefined; their values are NaN.
    """

    re_theta: np.ndarray
    im_theta: np.ndarray
    abs_psi: np.ndarray
    arg_psi: np.ndarray
    branch: np.ndarray

    def __post_init__(self):
        for axis in (self.re_theta, self.im_theta):
            if np.any(np.diff(axis) <= 0):
                raise ValueError("grid axes must be strictly increasing")
        shape = (self.re_theta.size, self.im_theta.size)
        for arr in (self.abs_psi, self.arg_psi, self.branch):
            if arr.shape != shape:
                raise ValueError(f"grid values must have shape {shape}")

    def rows(self):
        """Yield ``(re, im, abs_psi, arg_psi, is_branch)`` in row-major order."""
        for i, x in enumerate(self.re_theta):
            for j, y in enumerate(self.im_theta):
                yield x, y, self.abs_psi[i, j], self.arg_psi[i, j], bool(self.branch[i, j])


def landscape(mode, target, re_axis, im_axis):
    """Evaluate the phase functional of ``mode`` on a rectangular grid."""
    re_axis = np.asarray(re_axis, dtype=float)
    im_axis = np.asarray(im_axis, dtype=float)
    if re_axis.size == 0 or im_axis.size == 0:
        raise ValueError("grid must be nonempty")
    theta = re_axis[:, None] + 1j * im_axis[None, :]
    with np.errstate(all="ignore"):
        psi, branch = _mode_phase(mode, theta, target.chi)
        branch = branch | ~np.isfinite(psi)
        abs_psi = np.where(branch, np.nan, np.abs(psi))
        arg_psi = np.where(branch, np.nan, np.angle(psi))
    return LandscapeGrid(re_axis, im_axis, abs_psi, arg_psi, branch)


def reality_manifold_tau(mode, target, im_values, re_theta=np.pi / 2):
    """``(tau, residual)`` along a vertical line ``Re theta = re_theta``."""
    theta = re_theta + 1j * np.asarray(im_values, dtype=float)
    psi, _ = _mode_phase(mode, theta, target.chi)
    return np.abs(psi), np.angle(psi)

