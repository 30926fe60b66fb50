"""Closed (undamped) optomechanical weak measurement.

A single photon enters a Mach-Zehnder interferometer with the optomechanical
cavity in one arm. Conditioned on a dark-port click, the mirror is left in
``(exp(i Phi)|xi> - |0>) / 2`` (recentred on the freely rotating coherent
state), with ``Phi`` the Kerr phase plus the displacement-reordering phase.

Time arguments ``wt`` are the dimensionless ``omega_m t`` and broadcast.
"""
from __future__ import annotations

import numpy as np

from .errors import DegenerateNorm, DomainError, NoRoot
from .params import ModelParams
from .pointer import TwoBranchState

#: Validity window (in omega_m t) of the small-time and pi-time expansions.
SMALLTIME_BOUND = 0.1


class _Plateau:
    """Marker for an extremal condition that holds for every small time."""

    def __repr__(self):
        return "PLATEAU"


PLATEAU = _Plateau()


def _scalar(x):
    return x[()] if isinstance(x, np.ndarray) and x.ndim == 0 else x


def kerr_phase(k, wt):
    """Single-photon Kerr phase ``k^2 (wt - sin wt)``."""
    x = np.asarray(wt, dtype=float)
    small = np.abs(x) < 0.1
    x2 = x * x
    series = x * x2 / 6.0 * (1 - x2 / 20.0 * (1 - x2 / 42.0 * (1 - x2 / 72.0 * (1 - x2 / 110.0))))
    direct = x - np.sin(x)
    return _scalar(k**2 * np.where(small, series, direct))


def xi(k, wt):
    """Branch displacement ``k (1 - exp(-i wt))``."""
    x = np.asarray(wt, dtype=float)
    return _scalar(k * (2.0 * np.sin(0.5 * x) ** 2 + 1j * np.sin(x)))


def free_label(alpha, wt):
    """Freely rotated coherent label ``alpha exp(-i wt)``."""
    return _scalar(np.asarray(alpha, dtype=complex) * np.exp(-1j * np.asarray(wt, dtype=float)))


def phi_alpha(k, alpha, wt):
    """Reordering phase ``-i (xi phi* - xi* phi) = 2 Im(xi phi*)``, ``phi = alpha e^{-i wt}``."""
    return _scalar(2.0 * np.imag(xi(k, wt) * np.conj(free_label(alpha, wt))))


def total_phase(p: ModelParams, wt):
    """Relative branch phase ``kerr_phase + phi_alpha``."""
    return kerr_phase(p.k, wt) + phi_alpha(p.k, p.alpha, wt)


def postselected_mirror_state(p: ModelParams, wt) -> TwoBranchState:
    """Recentred mirror state after a dark-port click (unnormalised).

    Its squared norm is the postselection success probability.
    """
    return TwoBranchState(
        c0=0.5 * np.exp(1j * total_phase(p, wt)), beta0=xi(p.k, wt), c1=-0.5, beta1=0.0
    )


def postselected_probability(p: ModelParams, wt):
    """``(1 - exp(-|xi|^2/2) cos Phi) / 2``, evaluated stably."""
    x = np.asarray(wt, dtype=float)
    s = 0.5 * np.abs(xi(p.k, x)) ** 2
    phase = total_phase(p, x)
    out = 0.5 * (-np.expm1(-s) + np.exp(-s) * 2.0 * np.sin(0.5 * phase) ** 2)
    return _scalar(out)


def smalltime_limit_q(p: ModelParams) -> float:
    """``<q>`` as ``wt -> 0+``: ``4|a| cos(th) / (1 + 4|a|^2 cos^2(th))``."""
    c = p.alpha_abs * np.cos(p.theta)
    return 4.0 * c / (1.0 + 4.0 * c * c)


def _closed_moments(p, wt):
    x = np.asarray(wt, dtype=float)
    state = postselected_mirror_state(p, x)
    trc, norm = state.moments()
    bad = np.broadcast_to(state.is_degenerate(), np.shape(trc))
    if np.any(bad) and p.alpha_abs == 0:
        raise DegenerateNorm("zero postselection probability with a ground-state pointer")
    safe = np.where(bad, 1.0, norm)
    return trc / safe, bad


def mean_q_closed(p: ModelParams, wt):
    """Postselected mirror displacement ``<q(t)>`` in units sigma.

    Where the success probability falls below the norm floor (``wt -> 0``)
    the small-time limit is returned instead of the 0/0 ratio.
    """
    mean, bad = _closed_moments(p, wt)
    return _scalar(np.where(bad, smalltime_limit_q(p), 2.0 * np.real(mean)))


def mean_p_closed(p: ModelParams, wt):
    """Postselected mirror momentum shift in units hbar / (2 sigma)."""
    mean, bad = _closed_moments(p, wt)
    return _scalar(np.where(bad, 0.0, 2.0 * np.imag(mean)))


def mean_q_closed_formula(p: ModelParams, wt):
    """Closed-form ratio for ``<q(t)>`` evaluated literally, term by term.

    Loses precision as ``wt -> 0``; kept as an independent transcription of the
    published expression.
    """
    x = np.asarray(wt, dtype=float)
    xv = p.k * (1 - np.exp(-1j * x))
    ph = p.k**2 * (x - np.sin(x)) + 2 * p.k * p.alpha_abs * (np.sin(p.theta) - np.sin(p.theta - x))
    e = np.exp(-np.abs(xv) ** 2 / 2)
    num = xv + np.conj(xv) - e * (np.exp(1j * ph) * xv + np.exp(-1j * ph) * np.conj(xv))
    den = 2 - e * (np.exp(1j * ph) + np.exp(-1j * ph))
    return _scalar(np.real(num / den))


def mean_q_unpostselected(p: ModelParams, wt):
    """Displacement caused by one photon without postselection, ``2k (1 - cos wt)``."""
    x = np.asarray(wt, dtype=float)
    return _scalar(4.0 * p.k * np.sin(0.5 * x) ** 2)


def _check_window(x, centre, name):
    if np.any(x < centre - SMALLTIME_BOUND - 1e-15) or np.any(x > centre + SMALLTIME_BOUND):
        raise DomainError(f"{name} expansion valid only within {SMALLTIME_BOUND} of {centre}")


def _smalltime_amplitude(p, x):
    return 2 * p.k * p.alpha_abs * (x * x / 2 * np.sin(p.theta) + x * np.cos(p.theta))


def first_order_smalltime_state(p: ModelParams, wt):
    """Fock amplitudes ``[|0>, |1>]`` of the state expanded about ``wt = 0``."""
    x = float(wt)
    _check_window(np.asarray(x), 0.0, "small-time")
    return 0.5 * np.array([1j * _smalltime_amplitude(p, x), 1j * p.k * x])


def mean_q_smalltime(p: ModelParams, wt):
    """Small-time series for ``<q(t)>`` (units sigma), valid for ``0 <= wt <= 0.1``."""
    x = np.asarray(wt, dtype=float)
    if np.any(x < 0):
        raise DomainError("small-time expansion requires wt >= 0")
    _check_window(x, 0.0, "small-time")
    s, c = np.sin(p.theta), np.cos(p.theta)
    a = p.alpha_abs
    k2 = p.k**2
    num = 4 * k2 * a * (x**2 * c + x**3 / 2 * s)
    den = k2 * x**2 + 4 * k2 * a**2 * (x * c + x**2 / 2 * s) ** 2
    zero = den == 0
    out = np.where(zero, smalltime_limit_q(p), num / np.where(zero, 1.0, den))
    return _scalar(out)


def solve_max_amp_time(p: ModelParams, sign: int = 1, bound: float = SMALLTIME_BOUND):
    """Earliest small time at which the mirror reaches ``sign * sigma``.

    The condition ``k wt = sign * 2k|a| (wt^2/2 sin th + wt cos th)`` has the
    trivial root ``wt = 0`` and one more, ``(sign - 2|a| cos th) / (|a| sin th)``.
    Returns :data:`PLATEAU` when the condition holds for every ``wt``.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    a = p.alpha_abs
    if a == 0:
        raise NoRoot("no amplification without a coherent pointer")
    s, c = np.sin(p.theta), np.cos(p.theta)
    gap = sign - 2 * a * c
    if abs(s) < 1e-12:
        if abs(gap) < 1e-12:
            return PLATEAU
        raise NoRoot("condition is unsatisfiable for sin(theta) = 0")
    root = gap / (a * s)
    if not (0 < root <= bound):
        raise NoRoot(f"root wt={root:.6g} lies outside (0, {bound}]")
    return float(root)


def pi_expansion_state(p: ModelParams, wt):
    """Fock amplitudes ``[|0>, |1>]`` of the state expanded about ``wt = pi``."""
    x = float(wt)
    _check_window(np.asarray(x), np.pi, "pi-time")
    b = 2 * p.k * p.alpha_abs * (2 * np.sin(p.theta) - (x - np.pi) * np.cos(p.theta))
    return 0.5 * np.array([1j * b, 2 * p.k])


def pi_condition(p: ModelParams, wt, sign: int = 1, rtol: float = 1e-9) -> bool:
    """Whether ``sign * 2k = 2k|a| (2 sin th - (wt - pi) cos th)`` holds.

    ``sign = +1`` gives the momentum minimum ``-hbar/2sigma``; ``-1`` the maximum.
    """
    b = 2 * p.k * p.alpha_abs * (2 * np.sin(p.theta) - (wt - np.pi) * np.cos(p.theta))
    return bool(np.isclose(b, sign * 2 * p.k, rtol=rtol, atol=1e-15))
