"""Branch conventions shared by every module.

All complex square roots are principal (cut along the negative real axis),
all complex arctangents are principal.  The helpers below are the only place
where the boundary square root ``sqrt(cos^2(chi/2) - cos^2(theta))`` is
evaluated, so the evolution phase, the azimuth ``phi`` and the boundary
Hamiltonians always agree on its sign.
"""
import numpy as np

BRANCH_TOL = 1e-12


def csqrt(z):
    """Principal complex square root (works on scalars and arrays)."""
    return np.sqrt(np.asarray(z, dtype=complex))


def boundary_root(theta, chi):
    """Principal ``sqrt(cos^2(chi/2) - cos^2(theta))``."""
    theta = np.asarray(theta, dtype=complex)
    chi = np.asarray(chi, dtype=complex)
    return csqrt(np.cos(chi / 2) ** 2 - np.cos(theta) ** 2)


def arctan_term(theta, chi):
    """Principal ``arctan(sin(chi/2) / sqrt(cos^2(chi/2) - cos^2(theta)))``.

    Returns ``(value, branch)`` where ``branch`` marks inputs with a vanishing
    boundary root.  There the limit ``pi/2`` is substituted.
    """
    theta = np.asarray(theta, dtype=complex)
    chi = np.asarray(chi, dtype=complex)
    s = np.sin(chi / 2)
    d = boundary_root(theta, chi)
    branch = np.abs(d) <= BRANCH_TOL * (1.0 + np.abs(s))
    with np.errstate(divide="ignore", invalid="ignore"):
        value = np.arctan(s / np.where(branch, 1.0, d))
    value = np.where(branch, np.pi / 2, value)
    branch = branch | ~np.isfinite(value)
    return value, branch


def wrap_angle(x):
    """Map real angles into ``(-pi, pi]``."""
    x = np.asarray(x, dtype=float)
    y = np.mod(x + np.pi, 2 * np.pi) - np.pi
    return np.where(y == -np.pi, np.pi, y)
