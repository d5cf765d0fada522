"""Retardation sweeps: fit how dispersion curves rescale under a boost.

A packet at rest spreads as sigma**2(t) = sigma0**2 + C_rest * t**2. If a
boosted packet's curve is the rest curve run through a slowed clock,
F_v(t) = F_0(t / gamma**alpha), then its quadratic coefficient obeys
C_mov = C_rest / gamma**(2*alpha), so

    alpha = ln(C_rest / C_mov) / (2 ln gamma).

Einstein time dilation predicts alpha = 1. The sweep fits alpha per axis
and per method: transverse spreading gives alpha = 1 (dilation holds),
longitudinal gives alpha = 3 (it fails; the map is t -> t/gamma**3).

Moving packets are always built with momentum along +z, so axis 3 is the
longitudinal axis and axes 1, 2 are transverse.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import analytic, oracle, propagator
from .model import PacketSpec, check_validity, derive_kinematics

ER_HOLDS = "holds"
ER_FAILS = "fails"
ER_DEGENERATE = "degenerate"
ER_ERROR = "error"

VALID_METHODS = ("analytic", "oracle", "grid")

CSV_HEADER = "m,sigma,p,gamma,axis,method,t,sigma_sq,alpha_fit,residual,verdict"


class DegenerateFrameError(ValueError):
    """gamma = 1 carries no boost; a retardation exponent is undefined."""


@dataclass(frozen=True)
class SweepConfig:
    """Inputs of one retardation sweep over momenta, times and methods."""

    mass: float
    sigma: float
    momenta: tuple[float, ...]
    times: tuple[float, ...]
    methods: tuple[str, ...] = ("analytic",)
    quad_order: int = 40
    grid_points: int = 128
    grid_dimension: int = 1
    grid_halfwidth_sigma_factor: float = 6.0
    verdict_tolerance: float = 0.05

    def __post_init__(self) -> None:
        if not (math.isfinite(self.mass) and self.mass > 0.0):
            raise ValueError(f"mass must be positive and finite, got {self.mass}")
        if not (math.isfinite(self.sigma) and self.sigma > 0.0):
            raise ValueError(f"sigma must be positive and finite, got {self.sigma}")
        if not self.momenta:
            raise ValueError("momenta must be non-empty")
        for p in self.momenta:
            if not (math.isfinite(p) and p >= 0.0):
                raise ValueError(f"momentum magnitudes must be >= 0, got {p}")
        if not self.times:
            raise ValueError("times must be non-empty")
        for t in self.times:
            if not math.isfinite(t):
                raise ValueError(f"times must be finite, got {t}")
        if 0.0 not in self.times:
            raise ValueError("times must include 0 (anchors the initial dispersion)")
        if len({t for t in self.times if t != 0.0}) < 2:
            raise ValueError("need at least 2 distinct nonzero times to fit")
        if not self.methods:
            raise ValueError("methods must be non-empty")
        for method in self.methods:
            if method not in VALID_METHODS:
                raise ValueError(
                    f"unknown method {method!r}; choose from {VALID_METHODS}"
                )
        if len(set(self.methods)) != len(self.methods):
            raise ValueError("methods must not repeat")
        if self.quad_order < 2:
            raise ValueError(f"quad_order must be >= 2, got {self.quad_order}")
        if self.grid_dimension not in (1, 3):
            raise ValueError(f"grid_dimension must be 1 or 3, got {self.grid_dimension}")
        if not 0.0 < self.verdict_tolerance < 1.0:
            raise ValueError(
                f"verdict_tolerance must be in (0, 1), got {self.verdict_tolerance}"
            )


@dataclass(frozen=True)
class ExponentFit:
    """Fitted retardation exponent with fit-quality diagnostics."""

    alpha: float
    residual: float
    moving_coefficient: float


def quadratic_growth_coefficient(
    times, values, sigma0_sq: float
) -> tuple[float, float]:
    """Least-squares C in values = sigma0_sq + C*t**2, plus relative residual.

    C is fit through the fixed intercept sigma0_sq (linear least squares in
    t**2); the returned residual is rms(misfit)/rms(values), which is at
    rounding level when the curve is exactly quadratic.
    """
    t = np.asarray(times, dtype=np.float64)
    y = np.asarray(values, dtype=np.float64)
    if t.shape != y.shape or t.ndim != 1:
        raise ValueError("times and values must be 1-D and of equal length")
    nonzero = t != 0.0
    if len(np.unique(t[nonzero])) < 2:
        raise ValueError("need at least 2 distinct nonzero times to fit")
    t_sq = t[nonzero] ** 2
    growth = y[nonzero] - sigma0_sq
    coeff = float((growth @ t_sq) / (t_sq @ t_sq))
    misfit = y - (sigma0_sq + coeff * t * t)
    residual = float(
        math.sqrt(float(np.mean(misfit**2))) / math.sqrt(float(np.mean(y**2)))
    )
    return coeff, residual


def fit_retardation_exponent(
    moving_curve,
    rest_coefficient: float,
    gamma: float,
    sigma0_sq: float | None = None,
) -> ExponentFit:
    """Fit alpha in F_v(t) = F_0(t/gamma**alpha) from one moving curve.

    moving_curve is a sequence of (t, sigma**2) samples. The intercept is
    the t = 0 sample unless sigma0_sq overrides it. rest_coefficient is
    the rest frame's fitted C. Raises DegenerateFrameError for gamma <= 1.
    """
    if gamma <= 1.0:
        raise DegenerateFrameError(
            f"gamma = {gamma} has no boost; retardation exponent is undefined"
        )
    pairs = [(float(t), float(v)) for t, v in moving_curve]
    if sigma0_sq is None:
        anchors = [v for t, v in pairs if t == 0.0]
        if not anchors:
            raise ValueError("moving curve lacks a t=0 sample and no sigma0_sq given")
        sigma0_sq = anchors[0]
    if not (math.isfinite(rest_coefficient) and rest_coefficient > 0.0):
        raise ValueError(f"rest_coefficient must be positive, got {rest_coefficient}")
    times = [t for t, _ in pairs]
    values = [v for _, v in pairs]
    coeff, residual = quadratic_growth_coefficient(times, values, sigma0_sq)
    if coeff <= 0.0:
        raise ValueError(f"moving curve has non-positive growth coefficient {coeff}")
    alpha = math.log(rest_coefficient / coeff) / (2.0 * math.log(gamma))
    return ExponentFit(alpha=alpha, residual=residual, moving_coefficient=coeff)


def er_verdict(alpha: float, tolerance: float = 0.05) -> str:
    """Label whether the fitted exponent matches Einstein dilation (alpha = 1)."""
    if not 0.0 < tolerance < 1.0:
        raise ValueError(f"tolerance must be in (0, 1), got {tolerance}")
    return ER_HOLDS if abs(alpha - 1.0) <= tolerance else ER_FAILS


def axis_role(axis: int) -> str:
    """Role of a lab axis for momentum along +z: 3 is longitudinal."""
    if axis not in (1, 2, 3):
        raise ValueError(f"axis must be 1, 2 or 3, got {axis}")
    return "longitudinal" if axis == 3 else "transverse"


@dataclass(frozen=True)
class ReportRow:
    """Dispersion curve and fitted exponent for one (momentum, method, axis)."""

    momentum: float
    gamma: float
    method: str
    axis: int
    axis_role: str
    times: tuple[float, ...]
    sigma_sq: tuple[float | None, ...]
    alpha: float | None
    residual: float | None
    verdict: str


@dataclass(frozen=True)
class RetardationReport:
    """Full result of compare_methods for one (mass, sigma) family."""

    mass: float
    sigma: float
    validity_status: str
    sigma_m: float
    times: tuple[float, ...]
    methods: tuple[str, ...]
    grid_dimension: int
    verdict_tolerance: float
    rest_coefficients: dict[str, float]
    rows: tuple[ReportRow, ...]
    method_deltas: dict[str, float]
    failures: tuple[str, ...]


def method_curves(
    method: str, spec: PacketSpec, config: SweepConfig, failures: list[str]
) -> dict[int, list[float | None]] | None:
    """Dispersion values per lab axis at config.times, None per failed point.

    Returns None when the whole method failed for this momentum (recorded
    in failures). The 1-D grid reports only axis 3 and models a single
    longitudinal degree of freedom.
    """
    p = spec.momentum_magnitude
    if method == "analytic":
        curves: dict[int, list[float | None]] = {1: [], 2: [], 3: []}
        for t in config.times:
            d1, d2, d3 = analytic.closed_form_moments(spec, t).lab_axis_dispersions()
            curves[1].append(d1)
            curves[2].append(d2)
            curves[3].append(d3)
        return curves
    if method == "oracle":
        amp = oracle.GaussianMomentumAmplitude.from_spec(spec)
        scheme = oracle.gauss_hermite_scheme(config.quad_order)
        moments = oracle.exact_moment_curve(amp, scheme, config.times)
        return {
            axis: [m.dispersion[axis - 1] for m in moments] for axis in (1, 2, 3)
        }
    if method == "grid":
        try:
            grid = propagator.grid_for_spec(
                spec,
                dimension=config.grid_dimension,
                points_per_axis=config.grid_points,
                halfwidth_sigma_factor=config.grid_halfwidth_sigma_factor,
                t_max=max(config.times),
            )
            snapshots = propagator.snapshot_series(spec, grid, config.times)
        except propagator.GridSizingError as exc:
            failures.append(f"grid p={p:g}: {exc}")
            return None
        axes = grid.physical_axes
        curves = {axis: [] for axis in axes}
        for snapshot in snapshots:
            if snapshot.moments is None:
                failures.append(
                    f"grid p={p:g} t={snapshot.time:g}: density reached box faces"
                )
                for axis in axes:
                    curves[axis].append(None)
                continue
            for i, axis in enumerate(axes):
                curves[axis].append(snapshot.moments.sigma_sq[i])
        return curves
    raise ValueError(f"unknown method {method!r}")


def _oracle_1d_curve(spec: PacketSpec, config: SweepConfig) -> list[float]:
    scheme = oracle.gauss_hermite_scheme(config.quad_order)
    return [
        oracle.exact_moments_1d(spec, scheme, t).sigma_sq[0] for t in config.times
    ]


def _rest_coefficient(
    curves: dict[int, list[float | None]], times: tuple[float, ...]
) -> float:
    values = curves[3]
    pairs = [(t, v) for t, v in zip(times, values) if v is not None]
    anchors = [v for t, v in pairs if t == 0.0]
    if not anchors:
        raise ValueError("rest curve lacks a t=0 sample")
    coeff, _ = quadratic_growth_coefficient(
        [t for t, _ in pairs], [v for _, v in pairs], anchors[0]
    )
    if coeff <= 0.0:
        raise ValueError(f"rest curve has non-positive growth coefficient {coeff}")
    return coeff


def _max_relative_delta(
    a: dict[int, list[float | None]], b: dict[int, list[float | None]]
) -> float | None:
    worst = None
    for axis in set(a) & set(b):
        for x, y in zip(a[axis], b[axis]):
            if x is None or y is None:
                continue
            delta = abs(x - y) / max(abs(x), abs(y))
            if worst is None or delta > worst:
                worst = delta
    return worst


def compare_methods(config: SweepConfig) -> RetardationReport:
    """Run the sweep on every requested method and fit exponents per axis.

    Per-point failures (grid sizing, box escapes, unfittable curves) are
    collected into the report's failures list instead of aborting; the
    affected rows carry verdict "error" or gaps in sigma_sq. Method-delta
    entries give the worst relative disagreement between routes on shared
    axes; a 1-D grid is compared against the 1-D quadrature oracle
    (key "grid_vs_oracle1d"), never against 3-D curves, because its
    energy ignores transverse momentum.
    """
    failures: list[str] = []
    rest_spec = PacketSpec(config.mass, config.sigma, (0.0, 0.0, 0.0))
    validity = check_validity(rest_spec)

    rest_coefficients: dict[str, float] = {}
    for method in config.methods:
        curves = method_curves(method, rest_spec, config, failures)
        if curves is None:
            continue
        try:
            rest_coefficients[method] = _rest_coefficient(curves, config.times)
        except ValueError as exc:
            failures.append(f"rest curve ({method}): {exc}")

    rows: list[ReportRow] = []
    all_curves: dict[tuple[str, float], dict[int, list[float | None]]] = {}
    for p in config.momenta:
        spec = rest_spec if p == 0.0 else rest_spec.with_momentum_along_z(p)
        gamma = derive_kinematics(spec).gamma
        for method in config.methods:
            curves = method_curves(method, spec, config, failures)
            if curves is None:
                continue
            all_curves[(method, p)] = curves
            for axis in sorted(curves):
                values = curves[axis]
                alpha = residual = None
                if gamma == 1.0:
                    verdict = ER_DEGENERATE
                elif method not in rest_coefficients:
                    verdict = ER_ERROR
                else:
                    pairs = [
                        (t, v) for t, v in zip(config.times, values) if v is not None
                    ]
                    try:
                        fit = fit_retardation_exponent(
                            pairs, rest_coefficients[method], gamma
                        )
                        alpha, residual = fit.alpha, fit.residual
                        verdict = er_verdict(alpha, config.verdict_tolerance)
                    except (ValueError, DegenerateFrameError) as exc:
                        failures.append(
                            f"fit p={p:g} method={method} axis={axis}: {exc}"
                        )
                        verdict = ER_ERROR
                rows.append(
                    ReportRow(
                        momentum=p,
                        gamma=gamma,
                        method=method,
                        axis=axis,
                        axis_role=axis_role(axis),
                        times=config.times,
                        sigma_sq=tuple(values),
                        alpha=alpha,
                        residual=residual,
                        verdict=verdict,
                    )
                )

    method_deltas: dict[str, float] = {}
    grid_is_1d = config.grid_dimension == 1
    for i, m1 in enumerate(config.methods):
        for m2 in config.methods[i + 1 :]:
            if grid_is_1d and "grid" in (m1, m2):
                continue
            worst = None
            for p in config.momenta:
                a = all_curves.get((m1, p))
                b = all_curves.get((m2, p))
                if a is None or b is None:
                    continue
                delta = _max_relative_delta(a, b)
                if delta is not None and (worst is None or delta > worst):
                    worst = delta
            if worst is not None:
                method_deltas[f"{m1}_vs_{m2}"] = worst
    if grid_is_1d and "grid" in config.methods:
        worst = None
        for p in config.momenta:
            curves = all_curves.get(("grid", p))
            if curves is None:
                continue
            spec = rest_spec if p == 0.0 else rest_spec.with_momentum_along_z(p)
            reference = {3: list(_oracle_1d_curve(spec, config))}
            delta = _max_relative_delta(curves, reference)
            if delta is not None and (worst is None or delta > worst):
                worst = delta
        if worst is not None:
            method_deltas["grid_vs_oracle1d"] = worst

    return RetardationReport(
        mass=config.mass,
        sigma=config.sigma,
        validity_status=validity.status,
        sigma_m=validity.sigma_m,
        times=config.times,
        methods=config.methods,
        grid_dimension=config.grid_dimension,
        verdict_tolerance=config.verdict_tolerance,
        rest_coefficients=rest_coefficients,
        rows=tuple(rows),
        method_deltas=method_deltas,
        failures=tuple(failures),
    )


def _fmt(x: float | None) -> str:
    return "" if x is None else f"{x:.17g}"


def report_csv_rows(report: RetardationReport) -> list[str]:
    """Flatten a report into CSV lines with the fixed column set.

    Columns: m, sigma, p, gamma, axis, method, t, sigma_sq, alpha_fit,
    residual, verdict. One line per (momentum, method, axis, time); the
    fit fields repeat within a curve group and are empty where no fit
    exists. Numbers carry 17 significant digits for lossless round-trips.
    """
    lines = [CSV_HEADER]
    for row in report.rows:
        for t, s in zip(row.times, row.sigma_sq):
            lines.append(
                ",".join(
                    [
                        _fmt(report.mass),
                        _fmt(report.sigma),
                        _fmt(row.momentum),
                        _fmt(row.gamma),
                        str(row.axis),
                        row.method,
                        _fmt(t),
                        _fmt(s),
                        _fmt(row.alpha),
                        _fmt(row.residual),
                        row.verdict,
                    ]
                )
            )
    return lines


def report_json_dict(report: RetardationReport) -> dict:
    """Report as one JSON-serializable dict (None becomes null)."""
    return {
        "mass": report.mass,
        "sigma": report.sigma,
        "validity_status": report.validity_status,
        "sigma_m": report.sigma_m,
        "times": list(report.times),
        "methods": list(report.methods),
        "grid_dimension": report.grid_dimension,
        "verdict_tolerance": report.verdict_tolerance,
        "rest_coefficients": dict(report.rest_coefficients),
        "results": [
            {
                "momentum": row.momentum,
                "gamma": row.gamma,
                "method": row.method,
                "axis": row.axis,
                "axis_role": row.axis_role,
                "times": list(row.times),
                "sigma_sq": list(row.sigma_sq),
                "alpha": row.alpha,
                "residual": row.residual,
                "verdict": row.verdict,
            }
            for row in report.rows
        ],
        "method_deltas": dict(report.method_deltas),
        "failures": list(report.failures),
    }


def summary_lines(report: RetardationReport) -> list[str]:
    """Human-readable per-momentum summary for terminal output."""
    lines = [
        f"packet family: m={report.mass:g} sigma={report.sigma:g} "
        f"(sigma*m={report.sigma_m:g}, validity: {report.validity_status})"
    ]
    for row in report.rows:
        if row.verdict == ER_DEGENERATE:
            continue
        alpha = "none" if row.alpha is None else f"{row.alpha:.4f}"
        lines.append(
            f"p={row.momentum:<10g} gamma={row.gamma:<8.4f} method={row.method:<8s} "
            f"axis {row.axis} ({row.axis_role:<12s}) alpha={alpha:<8s} "
            f"dilation {row.verdict}"
        )
    for key, delta in sorted(report.method_deltas.items()):
        lines.append(f"max relative delta {key}: {delta:.3e}")
    for failure in report.failures:
        lines.append(f"failure: {failure}")
    return lines
