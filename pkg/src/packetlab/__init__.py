"""Numerical laboratory for free relativistic wave-packet spreading.

Evolves positive-energy Gaussian packets of a spinless particle (natural
units, probability density in the sense of localized position states) and
measures how their position dispersions grow, through three independent
routes: wide-packet closed forms, Gauss-Hermite quadrature of exact
momentum integrals, and FFT grid propagation with the exact relativistic
phase. The harness fits the exponent alpha in the clock-rescaling law
F_v(t) = F_0(t/gamma**alpha): transverse spreading dilates like a moving
clock (alpha = 1), longitudinal spreading retards as gamma**3.
"""
from ._kernels import BACKEND
from .analytic import (
    ClosedFormMoments,
    QuadraticExpansionFactors,
    closed_form_moments,
    dispersion_relation_residual,
    expansion_factors,
    longitudinal_dispersion,
    mean_position,
    rest_dispersion,
    retarded_time_map,
    transverse_dispersion,
)
from .harness import (
    RetardationReport,
    SweepConfig,
    compare_methods,
    er_verdict,
    fit_retardation_exponent,
)
from .model import (
    DerivedKinematics,
    InvalidPacketError,
    MomentSet,
    PacketSpec,
    ValidityVerdict,
    check_validity,
    derive_kinematics,
)
from .oracle import (
    ExactMoments,
    GaussianMomentumAmplitude,
    exact_moment_curve,
    exact_moments,
    exact_moments_1d,
    gauss_hermite_scheme,
)
from .propagator import (
    DensityField,
    GridSizingError,
    MomentumGrid,
    PacketEscapedBoxError,
    evolve,
    grid_for_spec,
    grid_moments,
    init_packet_on_grid,
    snapshot_series,
    to_position_density,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ClosedFormMoments",
    "DensityField",
    "DerivedKinematics",
    "ExactMoments",
    "GaussianMomentumAmplitude",
    "GridSizingError",
    "InvalidPacketError",
    "MomentSet",
    "MomentumGrid",
    "PacketEscapedBoxError",
    "PacketSpec",
    "QuadraticExpansionFactors",
    "RetardationReport",
    "SweepConfig",
    "ValidityVerdict",
    "check_validity",
    "closed_form_moments",
    "compare_methods",
    "derive_kinematics",
    "dispersion_relation_residual",
    "er_verdict",
    "evolve",
    "exact_moment_curve",
    "exact_moments",
    "exact_moments_1d",
    "expansion_factors",
    "fit_retardation_exponent",
    "gauss_hermite_scheme",
    "grid_for_spec",
    "grid_moments",
    "init_packet_on_grid",
    "longitudinal_dispersion",
    "mean_position",
    "rest_dispersion",
    "retarded_time_map",
    "snapshot_series",
    "to_position_density",
    "transverse_dispersion",
]
