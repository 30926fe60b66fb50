"""Damped mirror: analytic solution of the zero-temperature master equation.

With mechanical damping ``gamma`` (in units of ``omega_m``) each photon branch
keeps the mirror coherent, with labels

    phi_n = alpha e^{-lam wt} + (i k n / lam)(1 - e^{-lam wt}),  lam = i + gamma/2,

while the coherence between branches acquires a decay ``exp(-D)`` and a phase.
Expectations are taken from the postselected density operator

    rho = [|phi1><phi1| - e^{i Psi - D}|phi1><phi0| - h.c. + |phi0><phi0|] / 4

and reported relative to the photon-free reference ``|phi0>``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .closed import _scalar, kerr_phase, phi_alpha, smalltime_limit_q
from .errors import DegenerateNorm
from .params import ModelParams
from .pointer import TwoBranchState, cexpm1


def _lam(gamma):
    return 1j + 0.5 * gamma


def _g(lam, x):
    """``(1 - exp(-lam x)) / lam``."""
    return -cexpm1(-lam * x) / lam


def _excess(lam, x):
    """``(x - g(lam, x)) / lam = sum_{n>=2} (-lam)^{n-2} x^n / n!``."""
    lx = lam * x
    small = np.abs(lx) < 0.5
    term = x * x / 2.0 + 0j
    series = term.copy() if isinstance(term, np.ndarray) else term
    for n in range(3, 24):
        term = term * (-lam) * x / n
        series = series + term
    direct = (x - _g(lam, x)) / lam
    return np.where(small, series, direct)


def _h(gamma, x):
    """``(1 - exp(-gamma x)) / gamma`` with its ``gamma -> 0`` limit ``x``."""
    if gamma == 0:
        return np.asarray(x, dtype=float)
    return -np.expm1(-gamma * x) / gamma


def phi_n(p: ModelParams, wt, n: int):
    """Coherent label of the mirror in photon branch ``n`` (0 or 1)."""
    if n not in (0, 1):
        raise ValueError("n must be 0 or 1")
    x = np.asarray(wt, dtype=float)
    lam = _lam(p.gamma)
    out = p.alpha * np.exp(-lam * x) + 1j * p.k * n * _g(lam, x)
    return _scalar(out)


def branch_gap(p: ModelParams, wt):
    """``phi_1 - phi_0 = (i k / lam)(1 - e^{-lam wt})``, independent of alpha."""
    return _scalar(1j * p.k * _g(_lam(p.gamma), np.asarray(wt, dtype=float)))


def decoherence_D(p: ModelParams, wt, return_residue: bool = False):
    """Coherence decay exponent ``D = (gamma/2) int_0^wt |phi_1 - phi_0|^2``.

    Evaluated in complex arithmetic as

        k^2 gamma / (2 (1 + gamma^2/4)) * [wt + (1 - e^{-gamma wt})/gamma
            - (e^{(i - gamma/2) wt} - 1)/(i - gamma/2)
            + (e^{-(i + gamma/2) wt} - 1)/(i + gamma/2)]

    whose last two terms are complex conjugates. With ``return_residue`` the
    discarded imaginary part is returned as well.
    """
    x = np.asarray(wt, dtype=float)
    g = p.gamma
    if g == 0:
        zero = _scalar(np.zeros_like(x))
        return (zero, zero) if return_residue else zero
    mu = 1j - 0.5 * g
    nu = 1j + 0.5 * g
    bracket = x + _h(g, x) - cexpm1(mu * x) / mu + cexpm1(-nu * x) / nu
    val = p.k**2 * g / (2 * (1 + g * g / 4)) * bracket
    re = _scalar(np.real(val))
    if return_residue:
        return re, _scalar(np.imag(val))
    return re


def kerr_phase_damped(p: ModelParams, wt):
    """Photon-number (Kerr) part of the coherence phase, ``k^2 Re[i (wt - g)/lam]``.

    Reduces to ``k^2 (wt - sin wt)`` at ``gamma = 0``.
    """
    x = np.asarray(wt, dtype=float)
    lam = _lam(p.gamma)
    return _scalar(p.k**2 * np.real(1j * _excess(lam, x)))


def alpha_phase_damped(p: ModelParams, wt):
    """Alpha-dependent part of the coherence phase.

    ``k Re[alpha g(lam)] + gamma k Im[(i alpha*/lam)(g(lam*) - h(gamma))]``;
    equals half the undamped reordering phase at ``gamma = 0``.
    """
    x = np.asarray(wt, dtype=float)
    lam = _lam(p.gamma)
    alpha = p.alpha
    out = p.k * np.real(alpha * _g(lam, x))
    if p.gamma:
        out = out + p.gamma * p.k * np.imag(
            1j * np.conj(alpha) / lam * (_g(np.conj(lam), x) - _h(p.gamma, x))
        )
    return _scalar(out)


@dataclass(frozen=True)
class DampedBranchData:
    phi0: complex
    phi1: complex
    D: float
    kerr: float
    phi_alpha_half: float
    tau: float
    # phi1 - phi0, kept separately since the difference cancels badly at small wt
    gap: complex = None

    @property
    def coherence_phase(self):
        """Phase ``kerr + phi_alpha_half`` of the ``|phi1><phi0|`` term."""
        return self.kerr + self.phi_alpha_half


def damped_branch_data(p: ModelParams, wt, printed_phase: bool = False) -> DampedBranchData:
    """Branch labels, decay and phases at ``wt``.

    ``printed_phase=True`` uses the undamped phases ``kerr_phase`` and
    ``phi_alpha / 2`` for the coherence, as in the commonly quoted form; the
    default uses the exact damped phases, which agree with it at ``gamma = 0``.
    """
    x = np.asarray(wt, dtype=float)
    phi0 = phi_n(p, x, 0)
    gap = branch_gap(p, x)
    if printed_phase:
        kerr = kerr_phase(p.k, x)
        half = 0.5 * phi_alpha(p.k, p.alpha, x)
    else:
        kerr = kerr_phase_damped(p, x)
        half = alpha_phase_damped(p, x)
    tau = _scalar(np.imag(np.conj(phi0) * gap))
    return DampedBranchData(
        phi0=phi0, phi1=_scalar(phi0 + gap), D=decoherence_D(p, x), kerr=kerr,
        phi_alpha_half=half, tau=tau, gap=gap,
    )


def recentred_state(data: DampedBranchData) -> TwoBranchState:
    """Damped postselected state shifted by ``-phi0``.

    Displacing by ``-phi0`` maps ``|phi1>`` to ``e^{i tau}|phi1 - phi0>``, so the
    coherence phase becomes ``Psi + tau``.
    """
    phase = data.coherence_phase + data.tau
    return TwoBranchState(
        c0=0.5 * np.exp(1j * phase),
        beta0=np.asarray(data.phi1) - np.asarray(data.phi0) if data.gap is None else data.gap,
        c1=-0.5,
        beta1=0.0,
        cross_damping=data.D,
    )


def lab_state(data: DampedBranchData) -> TwoBranchState:
    """Damped postselected state in the lab frame (labels ``phi1``, ``phi0``)."""
    return TwoBranchState(
        c0=0.5 * np.exp(1j * np.asarray(data.coherence_phase)),
        beta0=data.phi1,
        c1=-0.5,
        beta1=data.phi0,
        cross_damping=data.D,
    )


def _damped_moments(p, wt, printed_phase):
    x = np.asarray(wt, dtype=float)
    state = recentred_state(damped_branch_data(p, x, printed_phase))
    trc, norm = state.moments()
    bad = np.broadcast_to(state.is_degenerate(), np.shape(trc))
    if np.any(bad) and p.alpha_abs == 0:
        raise DegenerateNorm("zero postselection probability with a ground-state pointer")
    return trc / np.where(bad, 1.0, norm), bad


def mean_q_damped(p: ModelParams, wt, printed_phase: bool = False):
    """Postselected ``<q(t)>`` relative to ``|phi0>`` (units sigma)."""
    mean, bad = _damped_moments(p, wt, printed_phase)
    return _scalar(np.where(bad, smalltime_limit_q(p), 2.0 * np.real(mean)))


def mean_p_damped(p: ModelParams, wt, printed_phase: bool = False):
    """Postselected ``<p(t)>`` relative to ``|phi0>`` (units hbar / 2sigma)."""
    mean, bad = _damped_moments(p, wt, printed_phase)
    return _scalar(np.where(bad, 0.0, 2.0 * np.imag(mean)))


def postselected_probability_damped(p: ModelParams, wt, printed_phase: bool = False):
    """Trace of the damped postselected mirror density operator."""
    x = np.asarray(wt, dtype=float)
    return _scalar(recentred_state(damped_branch_data(p, x, printed_phase)).norm())
