r"""Bi-orthogonal two-level states and the complex Bloch sphere.

A state of a non-Hermitian two-level system is a pair of a right spinor
:math:`|u\rangle` and a left co-spinor :math:`\langle\tilde u|` normalized by
the bilinear condition :math:`\langle\tilde u|u\rangle = 1`.  Its Bloch vector
:math:`n = \langle\tilde u|\sigma|u\rangle` is a complex 3-vector with
conjugation-free unit norm :math:`n_1^2 + n_2^2 + n_3^2 = 1`.

Bloch vectors are plain complex ``numpy`` arrays whose last axis has length 3.
"""
from dataclasses import dataclass

import numpy as np

from ._branches import csqrt
from .errors import ExceptionalPointError, NormalizationError

__all__ = [
    "PAULI",
    "BiorthPair",
    "BiorthFrame",
    "TargetSpec",
    "UP",
    "complex_dot",
    "normalize_biorthogonal",
    "bloch_from_spinors",
    "bloch_by_contraction",
    "spinors_from_target",
    "target_from_bloch",
    "biorthonormal_frame",
    "check_on_sphere",
]

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

CONSTRUCT_TOL = 1e-12
INPUT_TOL = 1e-9
SELF_ORTHOGONAL_TOL = 1e-14


def _as_spinor(v, name):
    v = np.asarray(v, dtype=complex)
    if v.shape != (2,):
        raise ValueError(f"{name} must have shape (2,), got {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} must be finite")
    return v


@dataclass(frozen=True, eq=False)
class BiorthPair:
    """Spinor ``u`` and co-spinor ``u_tilde`` with ``u_tilde @ u == 1``.

    The check is relative to ``|u| |u_tilde|`` so that strongly non-unitary
    states (large components) do not trip on round-off.  Pass
    ``check=False`` to build a pair that is validated later.
    """

    u: np.ndarray
    u_tilde: np.ndarray
    check: bool = True

    def __post_init__(self):
        object.__setattr__(self, "u", _as_spinor(self.u, "u"))
        object.__setattr__(self, "u_tilde", _as_spinor(self.u_tilde, "u_tilde"))
        if self.check:
            scale = max(1.0, np.linalg.norm(self.u) * np.linalg.norm(self.u_tilde))
            if abs(self.overlap - 1) > CONSTRUCT_TOL * scale:
                raise NormalizationError(
                    f"<u~|u> = {self.overlap!r}, expected 1 (use normalize_biorthogonal)"
                )

    @property
    def overlap(self):
        return complex(self.u_tilde @ self.u)


@dataclass(frozen=True, eq=False)
class BiorthFrame:
    """Bi-orthonormal basis ``{psi_i, psi_0}`` with dual ``{psi_i~, psi_0~}``."""

    psi_i: np.ndarray
    psi_0: np.ndarray
    psi_i_tilde: np.ndarray
    psi_0_tilde: np.ndarray

    def __post_init__(self):
        for name in ("psi_i", "psi_0", "psi_i_tilde", "psi_0_tilde"):
            object.__setattr__(self, name, _as_spinor(getattr(self, name), name))
        gram = self.gram()
        if np.max(np.abs(gram - np.eye(2))) > CONSTRUCT_TOL * max(1.0, np.max(np.abs(gram))):
            raise NormalizationError(f"frame is not bi-orthonormal:\n{gram}")

    def gram(self):
        """Matrix of pairings ``<psi~_a|psi_b>``."""
        left = np.stack([self.psi_i_tilde, self.psi_0_tilde])
        right = np.stack([self.psi_i, self.psi_0], axis=1)
        return left @ right

    def coefficients(self, pair):
        """Expansion ``(a, b, a~, b~)`` of a state in this frame."""
        return (
            complex(self.psi_i_tilde @ pair.u),
            complex(self.psi_0_tilde @ pair.u),
            complex(pair.u_tilde @ self.psi_i),
            complex(pair.u_tilde @ self.psi_0),
        )


@dataclass(frozen=True)
class TargetSpec:
    """Complex polar/azimuthal angles of the final Bloch vector."""

    chi: complex
    gamma: complex = 0.0

    def __post_init__(self):
        object.__setattr__(self, "chi", complex(self.chi))
        object.__setattr__(self, "gamma", complex(self.gamma))
        if not (np.isfinite(self.chi) and np.isfinite(self.gamma)):
            raise ValueError("target angles must be finite")

    @property
    def bloch(self):
        """``n_f = (sin chi cos gamma, sin chi sin gamma, cos chi)``."""
        s = np.sin(self.chi)
        return np.array(
            [s * np.cos(self.gamma), s * np.sin(self.gamma), np.cos(self.chi)],
            dtype=complex,
        )


UP = BiorthPair(np.array([1, 0]), np.array([1, 0]))


def complex_dot(a, b):
    """Bilinear (conjugation-free) product over the last axis."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return np.sum(a * b, axis=-1)


def check_on_sphere(n, tol=1e-10):
    """Largest deviation of ``n . n`` from 1, scaled by ``max(1, |n|^2)``.

    Raises ``ValueError`` when it exceeds ``tol``.
    """
    n = np.asarray(n, dtype=complex)
    scale = np.maximum(1.0, np.sum(np.abs(n) ** 2, axis=-1))
    dev = np.max(np.abs(complex_dot(n, n) - 1) / scale)
    if dev > tol:
        raise ValueError(f"vector leaves the complex sphere: |n.n - 1| = {dev:.3e}")
    return float(dev)


def normalize_biorthogonal(u, u_tilde):
    """Rescale ``u`` and ``u_tilde`` so that ``<u~|u> = 1``.

    Both sides are divided by the principal square root of the overlap.

    Raises:
        ExceptionalPointError: if the pair is self-orthogonal.
    """
    u = _as_spinor(u, "u")
    u_tilde = _as_spinor(u_tilde, "u_tilde")
    overlap = complex(u_tilde @ u)
    if abs(overlap) < SELF_ORTHOGONAL_TOL:
        raise ExceptionalPointError("self-orthogonal state: <u~|u> = 0")
    if overlap == 1:
        return BiorthPair(u, u_tilde)
    root = complex(csqrt(overlap))
    return BiorthPair(u / root, u_tilde / root)


def bloch_from_spinors(pair):
    """Complex Bloch vector of a normalized pair.

    Components are ``(u1 u2~ + u2 u1~, i (u1 u2~ - u2 u1~), u1 u1~ - u2 u2~)``.
    """
    scale = max(1.0, np.linalg.norm(pair.u) * np.linalg.norm(pair.u_tilde))
    if abs(pair.overlap - 1) > INPUT_TOL * scale:
        raise NormalizationError(f"unnormalized pair: <u~|u> = {pair.overlap!r}")
    u1, u2 = pair.u
    v1, v2 = pair.u_tilde
    return np.array([u1 * v2 + u2 * v1, 1j * (u1 * v2 - u2 * v1), u1 * v1 - u2 * v2])


def bloch_by_contraction(pair):
    """``<u~|sigma|u>`` by explicit Pauli contraction (independent check)."""
    return np.einsum("i,kij,j->k", pair.u_tilde, PAULI, pair.u)


def spinors_from_target(target):
    """A normalized pair whose Bloch vector is ``target.bloch``.

    Uses ``u = (cos(chi/2), e^{i gamma} sin(chi/2))`` and
    ``u~ = (cos(chi/2), e^{-i gamma} sin(chi/2))``.
    """
    c = np.cos(target.chi / 2)
    s = np.sin(target.chi / 2)
    u = np.array([c, np.exp(1j * target.gamma) * s])
    u_tilde = np.array([c, np.exp(-1j * target.gamma) * s])
    return BiorthPair(u, u_tilde)


def biorthonormal_frame(initial, final):
    """Complete ``{psi_i, psi_f}`` to a bi-orthonormal frame ``{psi_i, psi_0}``.

    Solves ``psi_f = a psi_i + b psi_0`` with the symmetric choice
    ``b = b~ = sqrt(1 - a a~)``.

    Raises:
        ExceptionalPointError: if ``a a~ = 1`` (the final state carries no
            component outside ``psi_i``).
    """
    a = complex(initial.u_tilde @ final.u)
    a_t = complex(final.u_tilde @ initial.u)
    rest = 1 - a * a_t
    if abs(rest) < SELF_ORTHOGONAL_TOL:
        raise ExceptionalPointError("final state has no component orthogonal to psi_i")
    b = complex(csqrt(rest))
    psi_0 = (final.u - a * initial.u) / b
    psi_0_tilde = (final.u_tilde - a_t * initial.u_tilde) / b
    return BiorthFrame(initial.u, psi_0, initial.u_tilde, psi_0_tilde)


def target_from_bloch(n):
    """Angles ``(chi, gamma)`` of a complex unit vector (principal branches)."""
    n = np.asarray(n, dtype=complex)
    chi = complex(np.arccos(n[2]))
    s = np.sin(chi)
    if abs(s) < 1e-14:
        return TargetSpec(chi, 0.0)
    e_ig = (n[0] + 1j * n[1]) / s
    return TargetSpec(chi, complex(-1j * np.log(e_ig)))
