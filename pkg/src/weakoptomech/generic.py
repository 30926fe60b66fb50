"""Generic weak measurement of a two-level system with a coherent pointer.

The impulsive coupling ``exp[-eta sigma_z (c - c^dag)]`` displaces the pointer
by ``+eta`` or ``-eta`` depending on the system eigenstate. The system starts in
``|+>`` and is postselected on ``|->`` (orthogonal) or, for the ground-pointer
baseline, on ``epsilon|+> + |->``.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DegenerateNorm
from .params import GenericWeakParams
from .pointer import TwoBranchState, displace_phase, expectation_p, expectation_q


class Branch(NamedTuple):
    phase: complex
    label: complex


def evolve_coherent_pointer(p: GenericWeakParams) -> tuple[Branch, Branch]:
    """Pointer branches ``D(+eta)D(alpha)|0>`` and ``D(-eta)D(alpha)|0>``.

    Each is returned as ``(phase, label)`` with ``D(e)D(alpha)|0> =
    phase * |alpha + e>``. Their ratio is ``exp(-i phi)``; recentring both on
    ``alpha`` doubles it to ``exp(-2 i phi)``.
    """
    alpha = complex(p.alpha)
    plus = Branch(complex(displace_phase(p.eta, alpha)), alpha + p.eta)
    minus = Branch(complex(displace_phase(-p.eta, alpha)), alpha - p.eta)
    return plus, minus


def postselect_orthogonal(p: GenericWeakParams) -> TwoBranchState:
    """Recentred pointer after orthogonal postselection.

    ``(exp(-i phi)|eta> - exp(i phi)|-eta>) / 2`` with ``phi = 2 eta Im(alpha)``.
    """
    phi = p.phi
    return TwoBranchState(
        c0=0.5 * np.exp(-1j * phi), beta0=p.eta, c1=-0.5 * np.exp(1j * phi), beta1=-p.eta
    )


def first_order_orthogonal(p: GenericWeakParams):
    """Fock amplitudes ``[-i phi, eta]`` of the linearised orthogonal state."""
    return np.array([-1j * p.phi, p.eta], dtype=complex)


def _require_nondegenerate(a, b, names):
    if a == 0 and b == 0:
        raise DegenerateNorm(f"{names} both zero: postselected pointer vanishes")


def mean_q_generic(p: GenericWeakParams) -> float:
    """Exact ``<q>`` (units sigma) of the orthogonally postselected pointer.

    Computed from the state itself; it vanishes identically.
    """
    _require_nondegenerate(p.eta, p.phi, "eta and phi")
    return float(expectation_q(postselect_orthogonal(p)))


def mean_p_generic(p: GenericWeakParams) -> float:
    """Weak-regime momentum shift ``2 phi eta / (phi^2 + eta^2)`` (units hbar/2sigma)."""
    _require_nondegenerate(p.eta, p.phi, "eta and phi")
    phi, eta = p.phi, p.eta
    return 2.0 * phi * eta / (phi**2 + eta**2)


def mean_p_generic_exact(p: GenericWeakParams) -> float:
    """``<p>`` of the exact (non-expanded) postselected pointer."""
    _require_nondegenerate(p.eta, p.phi, "eta and phi")
    return float(expectation_p(postselect_orthogonal(p)))


def ground_pointer_postselect(p: GenericWeakParams) -> TwoBranchState:
    """Ground-state pointer postselected on ``epsilon|+> + |->``.

    Returns ``[(1 + eps)|eta> - (1 - eps)|-eta>] / sqrt(2)``; ``p.alpha`` is ignored.
    """
    eps = p.epsilon
    r = 1.0 / np.sqrt(2.0)
    return TwoBranchState(c0=r * (1 + eps), beta0=p.eta, c1=-r * (1 - eps), beta1=-p.eta)


def first_order_ground(p: GenericWeakParams):
    """Fock amplitudes ``[epsilon, eta]`` of the linearised ground-pointer state."""
    return np.array([p.epsilon, p.eta], dtype=complex)


def mean_q_ground(p: GenericWeakParams) -> float:
    """``2 epsilon eta / (epsilon^2 + eta^2)`` in units sigma."""
    _require_nondegenerate(p.eta, p.epsilon, "eta and epsilon")
    eps, eta = p.epsilon, p.eta
    return 2.0 * eps * eta / (eps**2 + eta**2)


def mean_p_ground(p: GenericWeakParams) -> float:
    """Momentum shift of the ground-pointer baseline, exactly zero."""
    _require_nondegenerate(p.eta, p.epsilon, "eta and epsilon")
    return float(expectation_p(ground_pointer_postselect(p)))


def mean_q_ground_exact(p: GenericWeakParams) -> float:
    _require_nondegenerate(p.eta, p.epsilon, "eta and epsilon")
    return float(expectation_q(ground_pointer_postselect(p)))
