"""Command-line interface: dispersion tables, grid evolution, dilation tests.

Subcommands
    dispersion  per-axis dispersion curves sigma**2(t) by chosen methods
    evolve      grid propagation: snapshots plus density center-line slices
    er-test     fit retardation exponents and report dilation verdicts
    sweep       er-test over several momenta plus plot-ready .dat files
    residual    exact-minus-quadratic dispersion-relation error, cubic check

Options may come from a config file (--config, 'key = value' lines, '#'
comments); explicit flags override the file, and built-in defaults fill
the rest. Every run writes <out>_config.json echoing the fully resolved
configuration. Data files are written atomically (temp file + rename),
numbers carry 17 significant digits, and no timestamps enter data files,
so reruns are byte-identical.

Exit codes: 0 success, 1 invalid configuration or physics parameters,
2 run completed but some points failed (details on stderr), 3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from . import analytic, harness, propagator
from .model import InvalidPacketError, PacketSpec, derive_kinematics

_DEFAULT_MOMENTUM = "1.7320508075688772"  # sqrt(3): E = 2m, gamma = 2 for m = 1

DEFAULTS: dict[str, object] = {
    "m": "1",
    "sigma": "5",
    "p": [_DEFAULT_MOMENTUM],
    "times": "0,5,10,20",
    "method": ["analytic"],
    "quad_order": "40",
    "grid_n": "128",
    "dim": "1",
    "tolerance": "0.05",
    "format": "csv",
    "out": None,
    "kprime": "0,0,0.6",
}

_CONFIG_KEYS = set(DEFAULTS)


class ConfigError(ValueError):
    """Unusable command line or config file."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: D102 - argparse hook
        raise ConfigError(message)


def _parse_float(name: str, raw: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"{name}: not a number: {raw!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"{name}: must be finite, got {raw!r}")
    return value


def _parse_int(name: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{name}: not an integer: {raw!r}") from None


def _parse_times(raw: str) -> tuple[float, ...]:
    parts = [s for s in raw.split(",") if s.strip()]
    if not parts:
        raise ConfigError(f"times: empty list: {raw!r}")
    return tuple(_parse_float("times", s) for s in parts)


def _parse_momentum(raw: str) -> tuple[float, float, float]:
    """One momentum entry: a magnitude along +z, or a comma triple."""
    parts = [s for s in raw.split(",") if s.strip()]
    if len(parts) == 1:
        magnitude = _parse_float("p", parts[0])
        if magnitude < 0.0:
            raise ConfigError(f"p: magnitude must be >= 0, got {raw!r}")
        return (0.0, 0.0, magnitude)
    if len(parts) == 3:
        return tuple(_parse_float("p", s) for s in parts)  # type: ignore[return-value]
    raise ConfigError(f"p: expected a magnitude or 3 components, got {raw!r}")


def _parse_triple(name: str, raw: str) -> tuple[float, float, float]:
    parts = [s for s in raw.split(",") if s.strip()]
    if len(parts) != 3:
        raise ConfigError(f"{name}: expected 3 comma-separated components, got {raw!r}")
    return tuple(_parse_float(name, s) for s in parts)  # type: ignore[return-value]


def parse_config_file(path: Path) -> dict[str, object]:
    """Read 'key = value' lines; p and method values may list several entries."""
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    values: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value': {line!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigError(
                f"{path}:{lineno}: unknown key {key!r} "
                f"(known: {', '.join(sorted(_CONFIG_KEYS))})"
            )
        if key in ("p", "method"):
            values[key] = value.split()
        else:
            values[key] = value
    return values


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved parameters of one CLI invocation."""

    command: str
    mass: float
    sigma: float
    momenta: tuple[tuple[float, float, float], ...]
    times: tuple[float, ...]
    methods: tuple[str, ...]
    quad_order: int
    grid_points: int
    grid_dimension: int
    verdict_tolerance: float
    out_base: str
    output_format: str
    kprime: tuple[float, float, float]

    def echo_dict(self) -> dict:
        return {
            "command": self.command,
            "m": self.mass,
            "sigma": self.sigma,
            "p": [list(entry) for entry in self.momenta],
            "times": list(self.times),
            "method": list(self.methods),
            "quad_order": self.quad_order,
            "grid_n": self.grid_points,
            "dim": self.grid_dimension,
            "tolerance": self.verdict_tolerance,
            "out": self.out_base,
            "format": self.output_format,
            "kprime": list(self.kprime),
        }


def _build_parser() -> _Parser:
    parser = _Parser(prog="packetlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("dispersion", "per-axis dispersion curves by the chosen methods"),
        ("evolve", "grid evolution snapshots and density slices"),
        ("er-test", "retardation-exponent fits and dilation verdicts"),
        ("sweep", "er-test over several momenta, with plot data files"),
        ("residual", "dispersion-relation residual and its cubic scaling"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--m", help="particle mass (natural units), default 1")
        p.add_argument("--sigma", help="initial packet width, default 5")
        p.add_argument(
            "--p",
            action="append",
            help="momentum: magnitude along +z or 'k1,k2,k3'; repeatable",
        )
        p.add_argument("--times", help="comma-separated times, default 0,5,10,20")
        p.add_argument(
            "--method",
            action="append",
            choices=["analytic", "oracle", "grid"],
            help="computation route; repeatable, default analytic",
        )
        p.add_argument("--quad-order", help="quadrature nodes per axis, default 40")
        p.add_argument("--grid-n", help="grid points per axis, default 128")
        p.add_argument("--dim", choices=["1", "3"], help="grid dimension, default 1")
        p.add_argument(
            "--tolerance", help="dilation verdict tolerance on alpha, default 0.05"
        )
        p.add_argument("--out", help="output base path, default the subcommand name")
        p.add_argument("--format", choices=["csv", "json"], help="report format")
        p.add_argument("--config", help="config file with 'key = value' lines")
        if name == "residual":
            p.add_argument(
                "--kprime",
                help="boosted-frame momentum offset 'k1,k2,k3', default 0,0,0.6",
            )
    return parser


def resolve(argv=None) -> RunConfig:
    """Parse argv, merge defaults < config file < flags, convert and validate."""
    namespace = _build_parser().parse_args(argv)
    merged = dict(DEFAULTS)
    if namespace.config is not None:
        merged.update(parse_config_file(Path(namespace.config)))
    for key in _CONFIG_KEYS:
        flag_value = getattr(namespace, key, None)
        if flag_value is not None:
            merged[key] = flag_value

    momenta = tuple(_parse_momentum(raw) for raw in merged["p"])
    methods = tuple(dict.fromkeys(merged["method"]))
    for method in methods:
        if method not in harness.VALID_METHODS:
            raise ConfigError(
                f"method: unknown method {method!r} "
                f"(choose from {', '.join(harness.VALID_METHODS)})"
            )
    dim = _parse_int("dim", merged["dim"])
    if dim not in (1, 3):
        raise ConfigError(f"dim: must be 1 or 3, got {dim}")
    out_base = merged["out"] if merged["out"] is not None else namespace.command
    return RunConfig(
        command=namespace.command,
        mass=_parse_float("m", merged["m"]),
        sigma=_parse_float("sigma", merged["sigma"]),
        momenta=momenta,
        times=_parse_times(merged["times"]),
        methods=methods,
        quad_order=_parse_int("quad_order", merged["quad_order"]),
        grid_points=_parse_int("grid_n", merged["grid_n"]),
        grid_dimension=dim,
        verdict_tolerance=_parse_float("tolerance", merged["tolerance"]),
        out_base=str(out_base),
        output_format=merged["format"],
        kprime=_parse_triple("kprime", merged["kprime"]),
    )


def _write_text_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _write_json(path: Path, payload: dict) -> None:
    _write_text_atomic(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _fmt(x: float | None) -> str:
    return "" if x is None else f"{x:.17g}"


@dataclass
class RunSummary:
    outputs: list[Path]
    failures: list[str]


def _sweep_config(cfg: RunConfig) -> harness.SweepConfig:
    magnitudes = tuple(math.hypot(*entry) for entry in cfg.momenta)
    return harness.SweepConfig(
        mass=cfg.mass,
        sigma=cfg.sigma,
        momenta=magnitudes,
        times=cfg.times,
        methods=cfg.methods,
        quad_order=cfg.quad_order,
        grid_points=cfg.grid_points,
        grid_dimension=cfg.grid_dimension,
        verdict_tolerance=cfg.verdict_tolerance,
    )


_AXIS_TOKEN = {1: "trans1", 2: "trans2", 3: "long"}


def emit_plotdata(report: harness.RetardationReport, out_base: str) -> list[Path]:
    """Write gnuplot-ready .dat series from a sweep report.

    <base>_<axis>_<method>.dat holds 't sigma_sq' blocks, one block per
    momentum separated by blank lines; <base>_alpha_<axis>_<method>.dat
    holds 'gamma alpha' rows over the fitted momenta. Axis tokens are
    long, trans1, trans2.
    """
    paths = []
    groups: dict[tuple[int, str], list[harness.ReportRow]] = {}
    for row in report.rows:
        groups.setdefault((row.axis, row.method), []).append(row)
    for (axis, method), rows in sorted(groups.items()):
        token = _AXIS_TOKEN[axis]
        blocks = []
        for row in rows:
            lines = [f"# p = {_fmt(row.momentum)}, gamma = {_fmt(row.gamma)}"]
            lines += [
                f"{_fmt(t)} {_fmt(s)}"
                for t, s in zip(row.times, row.sigma_sq)
                if s is not None
            ]
            blocks.append("\n".join(lines))
        path = Path(f"{out_base}_{token}_{method}.dat")
        _write_text_atomic(path, "# columns: t sigma_sq\n" + "\n\n".join(blocks) + "\n")
        paths.append(path)
        fitted = [row for row in rows if row.alpha is not None]
        if fitted:
            alpha_path = Path(f"{out_base}_alpha_{token}_{method}.dat")
            lines = ["# columns: gamma alpha"]
            lines += [f"{_fmt(row.gamma)} {_fmt(row.alpha)}" for row in fitted]
            _write_text_atomic(alpha_path, "\n".join(lines) + "\n")
            paths.append(alpha_path)
    return paths


def _run_retardation(cfg: RunConfig, with_plotdata: bool) -> RunSummary:
    report = harness.compare_methods(_sweep_config(cfg))
    if cfg.output_format == "csv":
        report_path = Path(f"{cfg.out_base}.csv")
        _write_text_atomic(report_path, "\n".join(harness.report_csv_rows(report)) + "\n")
    else:
        report_path = Path(f"{cfg.out_base}.json")
        _write_json(report_path, harness.report_json_dict(report))
    outputs = [report_path]
    if with_plotdata:
        if report.rows:
            outputs += emit_plotdata(report, cfg.out_base)
        else:
            print("warning: no rows to plot", file=sys.stderr)
    for line in harness.summary_lines(report):
        print(line)
    return RunSummary(outputs=outputs, failures=list(report.failures))


def _run_dispersion(cfg: RunConfig) -> RunSummary:
    failures: list[str] = []
    sweep = _sweep_config(cfg)
    results = []
    for entry in cfg.momenta:
        spec = PacketSpec(cfg.mass, cfg.sigma, entry)
        gamma = derive_kinematics(spec).gamma
        for method in cfg.methods:
            curves = harness.method_curves(method, spec, sweep, failures)
            if curves is None:
                continue
            for axis in sorted(curves):
                results.append(
                    {
                        "momentum": list(entry),
                        "gamma": gamma,
                        "method": method,
                        "axis": axis,
                        "times": list(cfg.times),
                        "sigma_sq": curves[axis],
                    }
                )
    if cfg.output_format == "csv":
        lines = ["m,sigma,p,gamma,axis,method,t,sigma_sq"]
        for r in results:
            p_mag = math.hypot(*r["momentum"])
            for t, s in zip(r["times"], r["sigma_sq"]):
                lines.append(
                    ",".join(
                        [
                            _fmt(cfg.mass),
                            _fmt(cfg.sigma),
                            _fmt(p_mag),
                            _fmt(r["gamma"]),
                            str(r["axis"]),
                            r["method"],
                            _fmt(t),
                            _fmt(s),
                        ]
                    )
                )
        report_path = Path(f"{cfg.out_base}.csv")
        _write_text_atomic(report_path, "\n".join(lines) + "\n")
    else:
        report_path = Path(f"{cfg.out_base}.json")
        _write_json(
            report_path,
            {
                "m": cfg.mass,
                "sigma": cfg.sigma,
                "results": results,
                "failures": failures,
            },
        )
    for r in results:
        last = r["sigma_sq"][-1]
        shown = "wrapped" if last is None else f"{last:.6g}"
        print(
            f"p={math.hypot(*r['momentum']):<10g} method={r['method']:<8s} "
            f"axis {r['axis']}: sigma_sq(t={cfg.times[-1]:g}) = {shown}"
        )
    return RunSummary(outputs=[report_path], failures=failures)


def _run_evolve(cfg: RunConfig) -> RunSummary:
    failures: list[str] = []
    entry = cfg.momenta[0]
    spec = PacketSpec(cfg.mass, cfg.sigma, entry)
    grid = propagator.grid_for_spec(
        spec,
        dimension=cfg.grid_dimension,
        points_per_axis=cfg.grid_points,
        t_max=max(cfg.times),
    )
    base = propagator.init_packet_on_grid(spec, grid)
    axes = grid.physical_axes
    header = ["t", "norm", "peak_density", "wrapped"]
    header += [f"x{a}" for a in axes] + [f"sigma_sq_{a}" for a in axes]
    lines = [",".join(header)]
    outputs: list[Path] = []
    out_dir = Path(cfg.out_base).parent if Path(cfg.out_base).parent != Path("") else Path(".")
    stem = Path(cfg.out_base).name
    snapshots_json = []
    for index, t in enumerate(cfg.times):
        state = propagator.evolve(base, float(t))
        field = propagator.to_position_density(state)
        norm = float(field.rho.sum()) * field.cell_volume
        peak = float(field.rho.max())
        outputs += propagator.write_density_slices(field, out_dir, f"{stem}_t{index}")
        if field.wrapped:
            failures.append(f"t={t:g}: density reached box faces; moments skipped")
            mean = [None] * len(axes)
            disp = [None] * len(axes)
        else:
            moments = propagator.grid_moments(field)
            mean = list(moments.mean_position)
            disp = list(moments.sigma_sq)
        lines.append(
            ",".join(
                [_fmt(float(t)), _fmt(norm), _fmt(peak), str(int(field.wrapped))]
                + [_fmt(v) for v in mean]
                + [_fmt(v) for v in disp]
            )
        )
        snapshots_json.append(
            {
                "t": float(t),
                "norm": norm,
                "peak_density": peak,
                "wrapped": field.wrapped,
                "mean_position": mean,
                "sigma_sq": disp,
            }
        )
    if cfg.output_format == "csv":
        report_path = Path(f"{cfg.out_base}.csv")
        _write_text_atomic(report_path, "\n".join(lines) + "\n")
    else:
        report_path = Path(f"{cfg.out_base}.json")
        _write_json(
            report_path,
            {
                "m": cfg.mass,
                "sigma": cfg.sigma,
                "p": list(entry),
                "dim": cfg.grid_dimension,
                "grid_n": cfg.grid_points,
                "snapshots": snapshots_json,
                "failures": failures,
            },
        )
    outputs.insert(0, report_path)
    for snap in snapshots_json:
        state_txt = "wrapped" if snap["wrapped"] else f"norm={snap['norm']:.12f}"
        print(f"t={snap['t']:<8g} {state_txt} peak={snap['peak_density']:.6g}")
    return RunSummary(outputs=outputs, failures=failures)


def _run_residual(cfg: RunConfig) -> RunSummary:
    spec = PacketSpec(cfg.mass, cfg.sigma, cfg.momenta[0])
    scales = (1.0, 0.5, 0.25, 0.125)
    rows = []
    for lam in scales:
        scaled = tuple(lam * c for c in cfg.kprime)
        value = analytic.dispersion_relation_residual(spec, scaled)
        rows.append(
            {
                "lambda": lam,
                "kprime": list(scaled),
                "residual": value,
                "residual_over_lambda_cubed": value / lam**3,
            }
        )
    if cfg.output_format == "csv":
        lines = ["lambda,kprime1,kprime2,kprime3,residual,residual_over_lambda_cubed"]
        for r in rows:
            lines.append(
                ",".join(
                    [_fmt(r["lambda"])]
                    + [_fmt(c) for c in r["kprime"]]
                    + [_fmt(r["residual"]), _fmt(r["residual_over_lambda_cubed"])]
                )
            )
        report_path = Path(f"{cfg.out_base}.csv")
        _write_text_atomic(report_path, "\n".join(lines) + "\n")
    else:
        report_path = Path(f"{cfg.out_base}.json")
        _write_json(
            report_path,
            {
                "m": cfg.mass,
                "sigma": cfg.sigma,
                "p": list(cfg.momenta[0]),
                "kprime": list(cfg.kprime),
                "rows": rows,
            },
        )
    for r in rows:
        print(
            f"lambda={r['lambda']:<8g} residual={r['residual']:.6e} "
            f"residual/lambda^3={r['residual_over_lambda_cubed']:.6e}"
        )
    return RunSummary(outputs=[report_path], failures=[])


_RUNNERS = {
    "dispersion": _run_dispersion,
    "evolve": _run_evolve,
    "er-test": lambda cfg: _run_retardation(cfg, with_plotdata=False),
    "sweep": lambda cfg: _run_retardation(cfg, with_plotdata=True),
    "residual": _run_residual,
}


def main(argv=None) -> int:
    started = time.perf_counter()
    try:
        cfg = resolve(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        echo_path = Path(f"{cfg.out_base}_config.json")
        _write_json(echo_path, cfg.echo_dict())
        summary = _RUNNERS[cfg.command](cfg)
    except (ConfigError, InvalidPacketError, propagator.GridSizingError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    summary.outputs.append(echo_path)
    for path in summary.outputs:
        print(f"wrote {path}")
    for failure in summary.failures:
        print(f"failed point: {failure}", file=sys.stderr)
    print(f"completed in {time.perf_counter() - started:.2f}s")
    return 2 if summary.failures else 0


if __name__ == "__main__":
    sys.exit(main())
