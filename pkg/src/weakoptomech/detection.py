"""Photon-arrival statistics for a leaky cavity and the arrival-weighted displacement.

The photon leaves the cavity at ``wt`` with density ``K exp(-K wt)``
(``K = kappa / omega_m``). Combined with the dark-port success probability this
gives the conditional arrival density and the overall postselection
probability ``P``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .closed import _scalar, mean_q_closed, phi_alpha, postselected_probability, xi
from .damped import mean_q_damped
from .errors import ZeroProbability
from .params import ModelParams

#: ``4P / k^2`` at ``K = 10``, i.e. ``int K e^{-K wt}(|xi|^2 + phi^2) dwt / k^2``
#: without the 1/4 of the success probability (``P`` itself is about ``0.01 k^2``).
P_OVER_K2_WEIGHT = 0.04


@dataclass(frozen=True)
class ArrivalSpec:
    """Quadrature setup for integrals against the arrival density.

    Integrals run over ``[0, cutoff / K]``; the neglected tail of the
    exponential weight is at most ``exp(-cutoff)``.
    """

    kappa_ratio: float
    cutoff: float = 30.0
    limit: int = 200
    epsabs: float = 1e-16
    epsrel: float = 1e-12

    def __post_init__(self):
        if not self.kappa_ratio > 0:
            raise ValueError("kappa_ratio must be positive")
        if self.cutoff < 30.0:
            raise ValueError("cutoff below 30/kappa leaves a tail above 1e-13")

    @property
    def upper(self) -> float:
        return self.cutoff / self.kappa_ratio

    def integrate(self, f) -> float:
        """``int_0^upper f(wt) dwt`` with break points at each half period."""
        upper = self.upper
        points = np.arange(np.pi, upper, np.pi)[:50]
        val, _ = integrate.quad(
            f, 0.0, upper, limit=self.limit, epsabs=self.epsabs, epsrel=self.epsrel,
            points=points if len(points) else None,
        )
        return val


def arrival_density(kappa_ratio, wt):
    """Cavity emission density ``K exp(-K wt)`` in dimensionless time."""
    x = np.asarray(wt, dtype=float)
    if np.any(x < 0):
        raise ValueError("wt must be nonnegative")
    return _scalar(kappa_ratio * np.exp(-kappa_ratio * x))


def postselect_prob(p: ModelParams, wt):
    """Exact dark-port success probability ``(1 - exp(-|xi|^2/2) cos Phi) / 2``."""
    return postselected_probability(p, wt)


def postselect_prob_approx(p: ModelParams, wt):
    """Small-``k`` form ``(|xi|^2 + phi_alpha^2) / 4``."""
    x = np.asarray(wt, dtype=float)
    return _scalar(0.25 * (np.abs(xi(p.k, x)) ** 2 + phi_alpha(p.k, p.alpha, x) ** 2))


def _weight(p, kappa_ratio, wt):
    return arrival_density(kappa_ratio, wt) * postselect_prob_approx(p, wt)


def overall_P_closed(p: ModelParams, kappa_ratio: float) -> float:
    """``(k^2/2)(2K^2 + 5)/(K^4 + 5K^2 + 4)``; holds for ``|alpha| = 1/2, theta = 0`` only."""
    K2 = kappa_ratio**2
    return 0.5 * p.k**2 * (2 * K2 + 5) / (K2 * K2 + 5 * K2 + 4)


def overall_P_quadrature(p: ModelParams, kappa_ratio: float, spec: ArrivalSpec | None = None) -> float:
    """``int K e^{-K wt} (|xi|^2 + phi_alpha^2)/4 dwt`` by adaptive quadrature."""
    spec = spec or ArrivalSpec(kappa_ratio)
    return spec.integrate(lambda x: float(_weight(p, kappa_ratio, x)))


def _special_point(p):
    return math.isclose(p.alpha_abs, 0.5, abs_tol=1e-15) and math.isclose(
        math.remainder(p.theta, 2 * math.pi), 0.0, abs_tol=1e-15
    )


def overall_P(p: ModelParams, kappa_ratio: float | None = None) -> float:
    """Overall probability of a dark-port photon.

    Uses the closed form at ``(|alpha|, theta) = (1/2, 0)`` and quadrature
    elsewhere.
    """
    K = p.kappa_ratio if kappa_ratio is None else kappa_ratio
    if _special_point(p):
        return overall_P_closed(p, K)
    return overall_P_quadrature(p, K)


def _require_P(p, K):
    P = overall_P(p, K)
    if not P > 0:
        raise ZeroProbability("overall postselection probability is zero")
    return P


def conditional_arrival_density(p: ModelParams, kappa_ratio, wt):
    """Arrival density given a dark-port click, ``K e^{-K wt}(|xi|^2 + phi^2) / (4P)``."""
    P = _require_P(p, kappa_ratio)
    return _scalar(_weight(p, kappa_ratio, np.asarray(wt, dtype=float)) / P)


def averaged_q(p: ModelParams, kappa_ratio: float | None = None, gamma: float | None = None) -> float:
    """Arrival-weighted mean displacement ``int density(wt) <q(wt)> dwt`` (units sigma).

    ``<q>`` is the undamped closed form unless ``gamma`` is given, in which case
    the damped solution at that rate is used.
    """
    K = p.kappa_ratio if kappa_ratio is None else kappa_ratio
    P = _require_P(p, K)
    if gamma is None:
        q = lambda x: mean_q_closed(p, x)  # noqa: E731
    else:
        pg = p.with_(gamma=gamma)
        q = lambda x: mean_q_damped(pg, x)  # noqa: E731
    spec = ArrivalSpec(K)
    return spec.integrate(lambda x: float(_weight(p, K, x) * q(x))) / P


def dark_count_threshold(
    f_m: float,
    kappa_ratio: float,
    dark_rate: float,
    *,
    angular: bool = False,
    weight: float = P_OVER_K2_WEIGHT,
) -> float:
    """Smallest ``k`` with ``dark_rate <= weight * k^2 * kappa``.

    ``kappa = kappa_ratio * f_m`` by default; ``angular=True`` uses
    ``kappa_ratio * 2 pi f_m``. The defaults give ``k_min ~ 0.0033`` for a
    450 kHz device at ``K = 10`` and 2 Hz; ``weight=0.01, angular=True`` is the
    literal ``0.01 k^2 kappa`` reading, which gives about 0.0027.
    """
    if f_m <= 0 or kappa_ratio <= 0 or dark_rate < 0 or weight <= 0:
        raise ValueError("f_m, kappa_ratio and weight must be positive, dark_rate nonnegative")
    kappa = kappa_ratio * f_m * (2 * math.pi if angular else 1.0)
    return math.sqrt(dark_rate / (weight * kappa))
