r"""Two-level non-Hermitian Hamiltonians.

The effective Hamiltonian in the bi-orthonormal frame is

.. math::
    H = \lambda_0 \mathbb 1 + \frac{\Omega}{2}
    \begin{pmatrix}
        \cos\theta & e^{-i\varphi}\sin\theta \\
        e^{i\varphi}\sin\theta & -\cos\theta
    \end{pmatrix}

with complex ``lambda0``, ``omega`` (the eigenvalue gap), ``theta`` and
``phi``.  Matrices are returned as ``(2, 2)`` complex arrays.
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._branches import BRANCH_TOL, boundary_root, csqrt
from .errors import ExceptionalPointError

__all__ = [
    "HamiltonianParams",
    "CartesianOmega",
    "TransitionCoefficients",
    "build_effective",
    "from_cartesian",
    "decompose",
    "eigenvalues",
    "energy_variance",
    "transition_coefficients",
    "boundary_hamiltonian",
    "optimal_hamiltonian",
    "general_boundary_hamiltonian",
]

EXCEPTIONAL_TOL = 1e-12


@dataclass(frozen=True)
class HamiltonianParams:
    """Complex tuple ``(lambda0, omega, theta, phi)``."""

    lambda0: complex = 0.0
    omega: complex = 1.0
    theta: complex = np.pi / 2
    phi: complex = 0.0

    def __post_init__(self):
        for name in ("lambda0", "omega", "theta", "phi"):
            value = complex(getattr(self, name))
            if not np.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)

    @property
    def is_exceptional(self):
        return abs(self.omega) < EXCEPTIONAL_TOL

    @property
    def axis(self):
        """Unit complex axis ``(sin th cos ph, sin th sin ph, cos th)``."""
        s = np.sin(self.theta)
        return np.array(
            [s * np.cos(self.phi), s * np.sin(self.phi), np.cos(self.theta)]
        )

    @property
    def omega_vector(self):
        """The precession vector ``Omega * axis``."""
        return self.omega * self.axis

    def cartesian(self):
        x, y, z = self.omega_vector
        return CartesianOmega(x, y, z)


class CartesianOmega(NamedTuple):
    x: complex
    y: complex
    z: complex

    @property
    def omega(self):
        """Principal ``sqrt(X^2 + Y^2 + Z^2)``."""
        return complex(csqrt(self.x**2 + self.y**2 + self.z**2))


class TransitionCoefficients(NamedTuple):
    a: complex
    b: complex
    a_tilde: complex
    b_tilde: complex

    @property
    def overlap(self):
        """``a a~ + b b~``; equals 1 for a normalized final state."""
        return self.a * self.a_tilde + self.b * self.b_tilde


def build_effective(params):
    """Matrix of the effective Hamiltonian for ``params``."""
    p = params
    c = np.cos(p.theta)
    s = np.sin(p.theta)
    m = np.array(
        [[c, np.exp(-1j * p.phi) * s], [np.exp(1j * p.phi) * s, -c]],
        dtype=complex,
    )
    return p.lambda0 * np.eye(2) + 0.5 * p.omega * m


def from_cartesian(lambda0, c):
    """``lambda0 * 1 + (1/2) [[Z, X - iY], [X + iY, -Z]]``."""
    x, y, z = (complex(v) for v in c)
    m = np.array([[z, x - 1j * y], [x + 1j * y, -z]], dtype=complex)
    return complex(lambda0) * np.eye(2) + 0.5 * m


def eigenvalues(h):
    """Eigenvalues of a 2x2 matrix, ordered as ``(lambda0 + O/2, lambda0 - O/2)``
    with ``O`` the principal gap returned by :func:`decompose`."""
    h = np.asarray(h, dtype=complex)
    lam0 = 0.5 * (h[0, 0] + h[1, 1])
    gap = csqrt((h[0, 0] - h[1, 1]) ** 2 + 4 * h[0, 1] * h[1, 0])
    return complex(lam0 + gap / 2), complex(lam0 - gap / 2)


def decompose(h):
    """Recover ``HamiltonianParams`` from a 2x2 matrix.

    ``omega`` is the principal root of the squared gap, so ``Re omega >= 0``
    (``Im omega >= 0`` on ties).  ``theta = arccos((h11 - h22) / omega)``
    and ``phi`` follows from ``h21 = (omega/2) e^{i phi} sin theta``.
    When both off-diagonal entries vanish ``phi = 0``; when exactly one
    vanishes the matrix is a ``theta -> 0`` limit and ``phi`` is taken from
    the phase of the remaining entry (the rebuild is then not exact).

    Raises:
        ExceptionalPointError: if the eigenvalues coincide.
    """
    h = np.asarray(h, dtype=complex)
    if h.shape != (2, 2) or not np.all(np.isfinite(h)):
        raise ValueError("expected a finite 2x2 matrix")
    lam0 = 0.5 * (h[0, 0] + h[1, 1])
    diff = h[0, 0] - h[1, 1]
    omega = complex(csqrt(diff**2 + 4 * h[0, 1] * h[1, 0]))
    if abs(omega) < EXCEPTIONAL_TOL:
        raise ExceptionalPointError("coinciding eigenvalues: gap Omega = 0")
    theta = complex(np.arccos(diff / omega))
    scale = max(abs(omega), 1.0)
    h12_zero = abs(h[0, 1]) <= 1e-15 * scale
    h21_zero = abs(h[1, 0]) <= 1e-15 * scale
    if h12_zero and h21_zero:
        phi = 0.0
    elif h12_zero:
        phi = np.angle(h[1, 0])
    elif h21_zero:
        phi = -np.angle(h[0, 1])
    else:
        e_iphi = 2 * h[1, 0] / (omega * np.sin(theta))
        phi = complex(-1j * np.log(e_iphi))
    return HamiltonianParams(lam0, omega, theta, phi)


def energy_variance(h, pair):
    """Bi-orthogonal variance ``sqrt(<u~|H^2|u> - <u~|H|u>^2)`` (principal root)."""
    h = np.asarray(h, dtype=complex)
    mean = pair.u_tilde @ h @ pair.u
    second = pair.u_tilde @ h @ h @ pair.u
    return complex(csqrt(second - mean**2))


def transition_coefficients(params, tau):
    """Coefficients of ``psi_f = a psi_i + b psi_0`` after time ``tau``.

    The gauge phase ``exp(-i lambda0 tau)`` is kept.
    """
    if tau < 0:
        raise ValueError("tau must be non-negative")
    p = params
    half = 0.5 * p.omega * tau
    c, s = np.cos(half), np.sin(half)
    ct, st = np.cos(p.theta), np.sin(p.theta)
    g = np.exp(-1j * p.lambda0 * tau)
    a = (c - 1j * ct * s) * g
    b = -1j * g * np.exp(1j * p.phi) * st * s
    a_t = (c + 1j * ct * s) / g
    b_t = 1j / g * np.exp(-1j * p.phi) * st * s
    return TransitionCoefficients(complex(a), complex(b), complex(a_t), complex(b_t))


def _target_off_diagonal(theta, chi, gamma):
    """``(sin th e^{-i phi}, sin th e^{i phi})`` for ``phi`` hitting the target.

    Written without dividing by ``sin theta`` or ``cos theta`` so the
    ``theta = pi/2`` case needs no limit.  The boundary root is the same one
    used by the evolution phase.
    """
    theta, chi, gamma = complex(theta), complex(chi), complex(gamma)
    c = np.cos(chi / 2)
    s = np.sin(chi / 2)
    if abs(c) < BRANCH_TOL:
        if abs(np.cos(theta)) < BRANCH_TOL:
            return -1j * np.exp(-1j * gamma), 1j * np.exp(1j * gamma)
        raise ValueError(
            "chi = pi is reachable with finite phi only at theta = pi/2"
        )
    d = complex(boundary_root(theta, chi))
    ct = np.cos(theta)
    return (
        np.exp(-1j * gamma) * (ct * s - 1j * d) / c,
        np.exp(1j * gamma) * (ct * s + 1j * d) / c,
    )


def boundary_hamiltonian(target, theta, omega, lambda0=0.0):
    """Hamiltonian with ``phi`` eliminated in favour of the target angles.

    Equal to ``lambda0 + (omega cos th / 2) [[1, e^{-ig}(t - iR)],
    [e^{ig}(t + iR), -1]]`` with ``t = tan(chi/2)`` and
    ``R = sqrt(tan^2 th - t^2)``, where the sign of ``R`` is fixed by the
    principal boundary root ``R = sqrt(cos^2(chi/2) - cos^2 th) /
    (cos th cos(chi/2))``.  At ``theta = pi/2`` this gives
    ``(omega/2) [[0, -i e^{-ig}], [i e^{ig}, 0]]``.
    """
    theta = complex(theta)
    omega = complex(omega)
    if abs(np.sin(theta)) < 1e-14:
        raise ValueError("sin(theta) must be nonzero")
    lower, upper = _target_off_diagonal(theta, target.chi, target.gamma)
    ct = np.cos(theta)
    m = np.array([[ct, lower], [upper, -ct]], dtype=complex)
    return complex(lambda0) * np.eye(2) + 0.5 * omega * m


def _boundary_products(initial, final):
    pf_i = np.outer(final.u, initial.u_tilde)
    pi_f = np.outer(initial.u, final.u_tilde)
    pi_i = np.outer(initial.u, initial.u_tilde)
    pf_f = np.outer(final.u, final.u_tilde)
    cos2 = complex((final.u_tilde @ initial.u) * (initial.u_tilde @ final.u))
    return pf_i, pi_f, pi_i, pf_f, cos2


def optimal_hamiltonian(initial, final, omega, lambda0=0.0):
    """``lambda0 + i omega / (2 sqrt(1 - c2)) (|f><i~| - |i><f~|)``.

    ``c2 = <f~|i><i~|f>`` plays the role of ``cos^2(chi/2)``.  Evolving
    ``initial`` for ``tau = |chi/omega|`` (with ``arg chi = arg omega``)
    reaches ``final`` up to the gauge factor.

    Raises:
        ExceptionalPointError: if the two states coincide (``c2 = 1``).
    """
    pf_i, pi_f, _, _, cos2 = _boundary_products(initial, final)
    root = complex(csqrt(1 - cos2))
    if abs(root) < 1e-12:
        raise ExceptionalPointError("initial and final states coincide")
    return complex(lambda0) * np.eye(2) + 1j * complex(omega) / (2 * root) * (pf_i - pi_f)


def general_boundary_hamiltonian(initial, final, theta, omega, lambda0=0.0):
    """Hamiltonian at polar angle ``theta`` written through the boundary states.

    ``final`` must be the state actually reached from ``initial`` (with
    ``lambda0 = 0``), because the projectors ``|f><i~|`` and ``|i><f~|``
    carry its gauge.  ``sin(chi/2)`` and the boundary root use principal
    square roots.

    Raises:
        ExceptionalPointError: if ``sin(chi/2) = 0``.
    """
    theta = complex(theta)
    omega = complex(omega)
    st = np.sin(theta)
    if abs(st) < 1e-14:
        raise ValueError("sin(theta) must be nonzero")
    pf_i, pi_f, pi_i, pf_f, cos2 = _boundary_products(initial, final)
    s = complex(csqrt(1 - cos2))
    if abs(s) < 1e-12:
        raise ExceptionalPointError("sin(chi/2) = 0: states coincide")
    ct = np.cos(theta)
    d = complex(csqrt(cos2 - ct**2))
    cross = omega / (2 * st * s**2) * (
        (ct * d + 1j * s) * pf_i + (ct * d - 1j * s) * pi_f
    )
    diag = omega * ct / (2 * s**2) * (pi_i + pf_f)
    return complex(lambda0) * np.eye(2) + cross - diag
