"""Closed-form moments of the spreading relativistic Gaussian packet.

All formulas follow from the quadratic expansion of sqrt(k**2 + m**2)
around the mean momentum, valid for packets much wider than the Compton
wavelength (sigma*m >> 1). In that regime the evolved packet stays a
product of Gaussians in the frame whose third axis points along the mean
momentum, and its moments have closed forms:

    mean position      X(t)            = v t  along the momentum axis
    longitudinal       sigma_l**2(t)   = sigma**2 + t**2 / (4 gamma**6 m**2 sigma**2)
    transverse         sigma_T**2(t)   = sigma**2 + t**2 / (4 gamma**2 m**2 sigma**2)
    at rest            sigma0**2(t)    = sigma**2 + t**2 / (4 m**2 sigma**2)

so the moving-packet curves are exact time-rescalings of the rest curve:
the transverse dispersion at time t equals the rest dispersion at t/gamma,
while the longitudinal one equals the rest dispersion at t/gamma**3.

The gamma-based forms above are the canonical implementations (they stay
well conditioned as v -> 1); the algebraically equivalent (E, v) forms are
provided as cross-checks. All functions rotate internally to the frame
with the third axis along the mean momentum and report results either in
that frame (dispersions, tagged with the axis direction) or rotated back
to lab axes (mean position).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .model import PacketSpec, derive_kinematics

LONGITUDINAL = "longitudinal"
TRANSVERSE = "transverse"


@dataclass(frozen=True)
class QuadraticExpansionFactors:
    """Complex per-axis width factors of the factorized evolved Gaussian.

    a1_sq = a2_sq = sigma**2 + i t/(2E) on the transverse axes and
    a3_sq = sigma**2 + i t (1 - v**2)/(2E) on the momentum axis; the drift
    velocity is (0, 0, v) in the rotated frame. Real parts all equal
    sigma**2.
    """

    a1_sq: complex
    a2_sq: complex
    a3_sq: complex
    v_axis: tuple[float, float, float]


@dataclass(frozen=True)
class ClosedFormMoments:
    """Closed-form mean position and dispersions at one time.

    Dispersions are principal-frame values: sigma_sq_longitudinal along
    frame_axis (the momentum direction, +z for a packet at rest) and two
    equal transverse values. mean_position is in lab axes.
    """

    time: float
    mean_position: tuple[float, float, float]
    sigma_sq_longitudinal: float
    sigma_sq_transverse_1: float
    sigma_sq_transverse_2: float
    frame_axis: tuple[float, float, float]

    def dispersion_along(self, direction: tuple[float, float, float]) -> float:
        """Position variance along an arbitrary unit direction.

        The position covariance is diagonal in the principal frame, so the
        variance along e is a convex mix of the principal values weighted
        by (e . frame_axis)**2.
        """
        e1, e2, e3 = direction
        norm = math.hypot(e1, e2, e3)
        if norm == 0.0 or not math.isfinite(norm):
            raise ValueError(f"direction must be a nonzero finite vector, got {direction}")
        c = (e1 * self.frame_axis[0] + e2 * self.frame_axis[1] + e3 * self.frame_axis[2]) / norm
        csq = c * c
        return self.sigma_sq_longitudinal * csq + self.sigma_sq_transverse_1 * (1.0 - csq)

    def lab_axis_dispersions(self) -> tuple[float, float, float]:
        """Per-axis variances projected onto the lab axes x, y, z."""
        n = self.frame_axis
        out = []
        for j in range(3):
            csq = n[j] * n[j]
            out.append(
                self.sigma_sq_longitudinal * csq
                + self.sigma_sq_transverse_1 * (1.0 - csq)
            )
        return (out[0], out[1], out[2])


def rest_dispersion(spec: PacketSpec, t: float) -> float:
    """Dispersion of the packet at rest: sigma**2 + t**2/(4 m**2 sigma**2).

    The momentum in spec is ignored; only m and sigma enter.
    """
    s_sq = spec.sigma * spec.sigma
    return s_sq + (t * t) / (4.0 * spec.mass * spec.mass * s_sq)


def longitudinal_dispersion(spec: PacketSpec, t: float) -> float:
    """Dispersion along the momentum: sigma**2 + t**2/(4 gamma**6 m**2 sigma**2)."""
    kin = derive_kinematics(spec)
    s_sq = spec.sigma * spec.sigma
    g3 = kin.gamma * kin.gamma * kin.gamma
    return s_sq + (t * t) / (4.0 * g3 * g3 * spec.mass * spec.mass * s_sq)


def transverse_dispersion(spec: PacketSpec, t: float) -> float:
    """Dispersion perpendicular to the momentum: sigma**2 + t**2/(4 E**2 sigma**2)."""
    kin = derive_kinematics(spec)
    s_sq = spec.sigma * spec.sigma
    g = kin.gamma
    return s_sq + (t * t) / (4.0 * g * g * spec.mass * spec.mass * s_sq)


def longitudinal_dispersion_ev_form(spec: PacketSpec, t: float) -> float:
    """Equivalent longitudinal form sigma**2 + t**2 (1-v**2)**2/(4 E**2 sigma**2).

    Kept as an independent algebraic route for validation against
    longitudinal_dispersion; less well conditioned for v -> 1.
    """
    kin = derive_kinematics(spec)
    s_sq = spec.sigma * spec.sigma
    one_minus_vsq = 1.0 - kin.speed * kin.speed
    return s_sq + (t * t) * one_minus_vsq * one_minus_vsq / (
        4.0 * kin.energy * kin.energy * s_sq
    )


def transverse_dispersion_ev_form(spec: PacketSpec, t: float) -> float:
    """Equivalent transverse form sigma**2 + t**2/(4 E**2 sigma**2) via E."""
    kin = derive_kinematics(spec)
    s_sq = spec.sigma * spec.sigma
    return s_sq + (t * t) / (4.0 * kin.energy * kin.energy * s_sq)


def mean_position(spec: PacketSpec, t: float) -> tuple[float, float, float]:
    """Center of the packet at time t: t*v along the momentum direction."""
    p = spec.momentum_magnitude
    if p == 0.0:
        return (0.0, 0.0, 0.0)
    kin = derive_kinematics(spec)
    n1, n2, n3 = spec.momentum_direction
    d = t * kin.speed
    return (d * n1, d * n2, d * n3)


def expansion_factors(spec: PacketSpec, t: float) -> QuadraticExpansionFactors:
    """Complex width factors of the factorized evolution integrals.

    Computed in the rotated frame (third axis along p). 1 - v**2 is
    evaluated as m**2/E**2 to avoid cancellation at large gamma.
    """
    kin = derive_kinematics(spec)
    s_sq = spec.sigma * spec.sigma
    imag_t = 0.5 * t / kin.energy
    m_over_e = spec.mass / kin.energy
    a_transverse = complex(s_sq, imag_t)
    a_longitudinal = complex(s_sq, imag_t * m_over_e * m_over_e)
    return QuadraticExpansionFactors(
        a1_sq=a_transverse,
        a2_sq=a_transverse,
        a3_sq=a_longitudinal,
        v_axis=(0.0, 0.0, kin.speed),
    )


def retarded_time_map(t: float, gamma: float, axis: str) -> float:
    """Rest-frame time at which the rest dispersion matches the moving one.

    t/gamma**3 for the longitudinal axis, t/gamma for the transverse axes;
    these make dispersion(p, t) == rest_dispersion(t') exact identities of
    the closed forms.
    """
    if not math.isfinite(gamma) or gamma < 1.0:
        raise ValueError(f"gamma must be >= 1, got {gamma}")
    if axis == LONGITUDINAL:
        return t / (gamma * gamma * gamma)
    if axis == TRANSVERSE:
        return t / gamma
    raise ValueError(f"axis must be {LONGITUDINAL!r} or {TRANSVERSE!r}, got {axis!r}")


def dispersion_relation_residual(
    spec: PacketSpec, kprime: tuple[float, float, float]
) -> float:
    """Exact minus quadratic-approximation energy at momentum p - k'.

    Both sides are evaluated in the frame with p along the third axis, so
    kprime components are (transverse, transverse, longitudinal). The
    residual vanishes at k' = 0 and grows with the cube of |k'| when the
    packet moves (the dropped expansion terms are third order).
    """
    kin = derive_kinematics(spec)
    p = spec.momentum_magnitude
    e = kin.energy
    k1, k2, k3 = (float(c) for c in kprime)
    # same primitive as the energy in derive_kinematics, so the residual
    # cancels exactly at k' = 0
    exact = math.hypot(k1, k2, p - k3, spec.mass)
    one_minus_vsq = (spec.mass / e) * (spec.mass / e)
    quadratic = e * (
        1.0
        - p * k3 / (e * e)
        + (k1 * k1 + k2 * k2 + one_minus_vsq * k3 * k3) / (2.0 * e * e)
    )
    return exact - quadratic


def closed_form_moments(spec: PacketSpec, t: float) -> ClosedFormMoments:
    """Assemble the full closed-form moment set at time t."""
    s_trans = transverse_dispersion(spec, t)
    return ClosedFormMoments(
        time=t,
        mean_position=mean_position(spec, t),
        sigma_sq_longitudinal=longitudinal_dispersion(spec, t),
        sigma_sq_transverse_1=s_trans,
        sigma_sq_transverse_2=s_trans,
        frame_axis=spec.momentum_direction,
    )
