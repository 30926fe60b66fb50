"""Parameter containers for the generic and optomechanical models."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

from scipy import constants

#: Weak-coupling bound on the scaled coupling (and on the generic eta).
WEAK_COUPLING_LIMIT = 0.25


class WeakCouplingWarning(UserWarning):
    pass


def _check_weak(name, value):
    if value > WEAK_COUPLING_LIMIT:
        warnings.warn(
            f"{name}={value} exceeds the weak-coupling limit {WEAK_COUPLING_LIMIT}",
            WeakCouplingWarning,
            stacklevel=3,
        )


@dataclass(frozen=True)
class GenericWeakParams:
    """Two-level system coupled impulsively to a coherent pointer.

    eta
        Integrated coupling ``hbar chi / (2 sigma)``.
    alpha
        Initial coherent label of the pointer.
    epsilon
        Postselection offset for the ground-pointer baseline
        (``0`` is orthogonal postselection).
    """

    eta: float
    alpha: complex = 0.0
    epsilon: float = 0.0

    def __post_init__(self):
        if self.eta < 0:
            raise ValueError("eta must be nonnegative")
        _check_weak("eta", self.eta)

    @property
    def phi(self) -> float:
        """Noncommutativity phase ``-i eta (alpha - alpha*) = 2 eta Im(alpha)``."""
        return 2.0 * self.eta * complex(self.alpha).imag


@dataclass(frozen=True)
class ModelParams:
    """Dimensionless optomechanical parameters.

    k
        Scaled coupling ``g / omega_m``.
    alpha_abs, theta
        Modulus and phase of the mirror's initial coherent label.
    gamma
        Mechanical damping ``gamma_m / omega_m``.
    kappa_ratio
        Cavity decay ``kappa / omega_m`` (photon-arrival statistics only).
    """

    k: float
    alpha_abs: float = 0.0
    theta: float = 0.0
    gamma: float = 0.0
    kappa_ratio: float = 10.0

    def __post_init__(self):
        for name in ("k", "alpha_abs", "gamma"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and nonnegative, got {value}")
        if not math.isfinite(self.theta):
            raise ValueError("theta must be finite")
        if not (math.isfinite(self.kappa_ratio) and self.kappa_ratio > 0):
            raise ValueError("kappa_ratio must be positive")
        _check_weak("k", self.k)

    @property
    def alpha(self) -> complex:
        return self.alpha_abs * complex(math.cos(self.theta), math.sin(self.theta))

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class DeviceParams:
    """Physical device numbers (SI) from which ``k`` and ``sigma`` follow.

    ``omega0`` and ``omega_m`` are angular frequencies, ``length`` the cavity
    length and ``mass`` the effective mirror mass.
    """

    mass: float
    length: float
    omega0: float
    omega_m: float

    @property
    def sigma(self) -> float:
        """Zero-point width ``sqrt(hbar / (2 m omega_m))`` in metres."""
        return math.sqrt(constants.hbar / (2.0 * self.mass * self.omega_m))

    @property
    def g(self) -> float:
        """Optomechanical coupling ``omega0 sigma / L`` (rad/s)."""
        return self.omega0 * self.sigma / self.length

    @property
    def k(self) -> float:
        return self.g / self.omega_m

    def model(self, alpha_abs=0.0, theta=0.0, gamma=0.0, kappa_ratio=10.0) -> ModelParams:
        return ModelParams(
            k=self.k, alpha_abs=alpha_abs, theta=theta, gamma=gamma, kappa_ratio=kappa_ratio
        )
