"""Physical parameter types and derived kinematics for Gaussian packets.

Conventions
-----------
Natural units with hbar = c = 1 throughout: velocities are dimensionless,
energy and momentum share units, length and time share units. A packet is
defined by its mass m, its width parameter sigma (sigma**2 is the initial
per-axis position dispersion), and its mean momentum 3-vector.

All value types in this module are immutable after construction and safe
to share between threads.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

# Validity verdicts for the wide-packet approximation regime, decided by
# the dimensionless product sigma*m (packet width over Compton wavelength).
VALID = "valid"
MARGINAL = "marginal"
INVALID = "invalid"

_SIGMA_M_VALID = 3.0
_SIGMA_M_MARGINAL = 1.0


class InvalidPacketError(ValueError):
    """Raised for non-finite or non-positive packet parameters."""


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise InvalidPacketError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class PacketSpec:
    """Gaussian packet definition: mass, width, and mean momentum.

    mass : particle mass m > 0 (energy units).
    sigma : width parameter sigma > 0 (length units); the initial
        position dispersion per axis is sigma**2.
    mean_momentum : (p1, p2, p3) mean momentum components.
    """

    mass: float
    sigma: float
    mean_momentum: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self) -> None:
        m = _require_finite("mass", self.mass)
        s = _require_finite("sigma", self.sigma)
        if m <= 0.0:
            raise InvalidPacketError(f"mass must be positive, got {m}")
        if s <= 0.0:
            raise InvalidPacketError(f"sigma must be positive, got {s}")
        p = tuple(_require_finite("mean_momentum", c) for c in self.mean_momentum)
        if len(p) != 3:
            raise InvalidPacketError(
                f"mean_momentum must have 3 components, got {len(p)}"
            )
        object.__setattr__(self, "mass", m)
        object.__setattr__(self, "sigma", s)
        object.__setattr__(self, "mean_momentum", p)

    @property
    def momentum_magnitude(self) -> float:
        p1, p2, p3 = self.mean_momentum
        return math.hypot(p1, p2, p3)

    @property
    def momentum_direction(self) -> tuple[float, float, float]:
        """Unit vector along the mean momentum; +z when the packet is at rest."""
        p = self.momentum_magnitude
        if p == 0.0:
            return (0.0, 0.0, 1.0)
        p1, p2, p3 = self.mean_momentum
        return (p1 / p, p2 / p, p3 / p)

    def with_momentum_along_z(self, magnitude: float) -> "PacketSpec":
        return PacketSpec(self.mass, self.sigma, (0.0, 0.0, float(magnitude)))


@dataclass(frozen=True)
class DerivedKinematics:
    """Kinematic quantities derived from a PacketSpec.

    energy = sqrt(|p|**2 + m**2), speed = |p|/E in [0, 1), gamma = E/m,
    compton_wavelength = 1/m, sigma_m_product = sigma*m.
    """

    energy: float
    speed: float
    gamma: float
    compton_wavelength: float
    sigma_m_product: float


@dataclass(frozen=True)
class ValidityVerdict:
    """Regime verdict for the wide-packet approximation, with sigma*m."""

    status: str
    sigma_m: float

    @property
    def is_valid(self) -> bool:
        return self.status == VALID

    @property
    def is_usable(self) -> bool:
        return self.status in (VALID, MARGINAL)


def derive_kinematics(spec: PacketSpec) -> DerivedKinematics:
    """Compute E, v, gamma and the Compton wavelength for a packet.

    The energy uses a hypot-style square root so large momenta stay
    accurate; gamma*m reproduces E to rounding.
    """
    m = spec.mass
    p = spec.momentum_magnitude
    energy = math.hypot(p, m)
    speed = p / energy
    gamma = energy / m
    return DerivedKinematics(
        energy=energy,
        speed=speed,
        gamma=gamma,
        compton_wavelength=1.0 / m,
        sigma_m_product=spec.sigma * m,
    )


def check_validity(spec: PacketSpec) -> ValidityVerdict:
    """Classify a packet against the wide-packet regime sigma >> 1/m.

    valid for sigma*m > 3, marginal for 1 < sigma*m <= 3 (usable with a
    warning), invalid for sigma*m <= 1 where the quadratic expansion of
    the dispersion relation has no justification.
    """
    sigma_m = spec.sigma * spec.mass
    if sigma_m > _SIGMA_M_VALID:
        status = VALID
    elif sigma_m > _SIGMA_M_MARGINAL:
        status = MARGINAL
    else:
        status = INVALID
    return ValidityVerdict(status=status, sigma_m=sigma_m)


@dataclass(frozen=True)
class MomentSet:
    """Mean positions and dispersions at one time, tagged by method.

    For 3-dimensional computations the tuples hold axes (1, 2, 3); the
    1-dimensional grid model reports a single longitudinal axis. norm is
    the total probability recovered by the method (1 up to its numerical
    tolerance), or None when the method normalizes exactly.
    """

    time: float
    mean_position: tuple[float, ...]
    sigma_sq: tuple[float, ...]
    method: str
    norm: float | None = None
