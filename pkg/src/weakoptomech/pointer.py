"""Coherent-state and displacement-operator algebra.

Positions are in units of the zero-point width ``sigma`` and momenta in units
of ``hbar / (2 sigma)``, so a coherent state ``|beta>`` has
``<q> = 2 Re(beta)`` and ``<p> = 2 Im(beta)``.

All functions broadcast over numpy arrays.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateNorm

#: Normalised expectations are refused below this fraction of |c0|^2 + |c1|^2.
NORM_FLOOR = 1e-14


def cexpm1(z):
    """``exp(z) - 1`` for complex ``z`` without cancellation near ``z = 0``."""
    z = np.asarray(z, dtype=complex)
    x, y = z.real, z.imag
    re = np.expm1(x) * np.cos(y) - 2.0 * np.sin(0.5 * y) ** 2
    im = np.exp(x) * np.sin(y)
    out = re + 1j * im
    return out[()] if out.ndim == 0 else out


def log_overlap(alpha, beta):
    """Logarithm of ``<beta|alpha>``: ``-|alpha - beta|^2 / 2 + i Im(beta* alpha)``."""
    alpha = np.asarray(alpha, dtype=complex)
    beta = np.asarray(beta, dtype=complex)
    d = alpha - beta
    return -0.5 * (d.real**2 + d.imag**2) + 1j * np.imag(np.conj(beta) * alpha)


def coherent_overlap(alpha, beta):
    """Inner product ``<beta|alpha>`` of two coherent states."""
    return np.exp(log_overlap(alpha, beta))


def commute_displacements(alpha, beta):
    """Phase ``exp(alpha beta* - alpha* beta)`` with ``D(a)D(b) = phase * D(b)D(a)``."""
    alpha = np.asarray(alpha, dtype=complex)
    beta = np.asarray(beta, dtype=complex)
    return np.exp(2j * np.imag(alpha * np.conj(beta)))


def displace_phase(alpha, beta):
    """Phase in ``D(alpha)|beta> = phase * |alpha + beta>``."""
    alpha = np.asarray(alpha, dtype=complex)
    beta = np.asarray(beta, dtype=complex)
    return np.exp(1j * np.imag(alpha * np.conj(beta)))


@dataclass(frozen=True)
class TwoBranchState:
    """Pointer state ``c0|beta0> + c1|beta1>``.

    ``cross_damping`` is a decoherence exponent ``D`` multiplying the two
    off-diagonal terms of the density operator by ``exp(-D)``; with ``D = 0``
    the state is pure. Fields may be numpy arrays of a common shape.
    """

    c0: complex
    beta0: complex
    c1: complex
    beta1: complex
    cross_damping: float = 0.0

    def __post_init__(self):
        if np.any(np.asarray(self.cross_damping) < 0):
            raise ValueError("cross_damping must be nonnegative")

    def moments(self):
        """Return ``(Tr(rho c), Tr(rho))`` evaluated without catastrophic cancellation.

        Both are written around ``s = c0 + c1`` and ``expm1`` of the log
        overlap, so nearly-cancelling branches (the dark-port regime) keep
        full relative precision.
        """
        c0 = np.asarray(self.c0, dtype=complex)
        c1 = np.asarray(self.c1, dtype=complex)
        b0 = np.asarray(self.beta0, dtype=complex)
        b1 = np.asarray(self.beta1, dtype=complex)
        z01 = log_overlap(b1, b0) - np.asarray(self.cross_damping, dtype=float)
        em01 = cexpm1(z01)
        em10 = np.conj(em01)
        s = c0 + c1
        norm = np.abs(s) ** 2 + 2.0 * np.real(np.conj(c0) * c1 * em01)
        trc = b0 * c0 * (np.conj(s) + np.conj(c1) * em10) + b1 * c1 * (
            np.conj(s) + np.conj(c0) * em01
        )
        return trc, norm

    def norm(self):
        return self.moments()[1]

    def scale(self):
        return np.abs(np.asarray(self.c0)) ** 2 + np.abs(np.asarray(self.c1)) ** 2

    def is_degenerate(self):
        scale = self.scale()
        return ~(self.norm() > NORM_FLOOR * np.where(scale > 0, scale, 1.0))


def _normalised_mean(state: TwoBranchState):
    trc, norm = state.moments()
    bad = state.is_degenerate()
    if np.any(bad):
        raise DegenerateNorm(
            "postselected norm below floor; use the small-time series limit"
        )
    return trc / norm


def expectation_q(state: TwoBranchState):
    """Normalised ``<q>`` of ``state`` in units of sigma."""
    return 2.0 * np.real(_normalised_mean(state))


def expectation_p(state: TwoBranchState):
    """Normalised ``<p>`` of ``state`` in units of hbar / (2 sigma)."""
    return 2.0 * np.imag(_normalised_mean(state))


def single_branch(beta, c=1.0) -> TwoBranchState:
    """A single coherent state written as a (trivial) two-branch state."""
    return TwoBranchState(c0=c, beta0=beta, c1=0.0, beta1=0.0)
