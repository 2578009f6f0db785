"""Command-line front end: run, sweep and predict verbs.

``run`` executes one collision-model experiment and writes a CSV time
series plus a JSON summary sidecar; ``sweep`` repeats that over one axis
(N, T_a, g or tau) in a pool of independent processes; ``predict`` prints
the closed-form thermalization numbers without simulating.

Exit codes: 0 success, 2 validation, 3 truncation, 4 stability (gain
regime), 5 numerical divergence.  Failures also emit one machine-readable
JSON line on stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import BrokenExecutor, ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .analytics import field_temperature, fit_decay_rate, thermalization_time
from .config import SimulationConfig, config_from_mapping, config_to_mapping, parse_config
from .dynamics import TimeSeries, run_simulation
from .errors import ConfigError, FitError, MicromaserError, exit_code_for
from .models import MULTILEVEL

CSV_COLUMNS = ("step", "time", "n_mean", "T_field", "g2", "trace_dev", "tail_leak")

_SWEEP_AXES = {
    "N": ("reservoir", "N", int),
    "T_a": ("reservoir", "T_a", float),
    "g": ("coupling", "g", float),
    "tau": ("coupling", "tau", float),
}


def _fmt(value) -> str:
    """Fixed 6-significant-digit formatting; undefined values print as undef."""
    if value is None or (isinstance(value, float) and not math.isfinite(value)):
        return "undef"
    return format(float(value), ".6g")


def _csv_cell(value: float) -> str:
    # repr gives the shortest representation that round-trips exactly
    return repr(float(value))


def write_timeseries_csv(path, series: TimeSeries) -> None:
    """Write the fixed-column CSV; g2 below the photon floor prints undef."""
    lines = [",".join(CSV_COLUMNS)]
    for k in range(len(series)):
        g2 = series.g2[k]
        lines.append(
            ",".join(
                (
                    str(k),
                    _csv_cell(series.times[k]),
                    _csv_cell(series.n_mean[k]),
                    _csv_cell(series.T_field[k]),
                    "undef" if math.isnan(g2) else _csv_cell(g2),
                    _csv_cell(series.trace_dev[k]),
                    _csv_cell(series.tail_leak[k]),
                )
            )
        )
    Path(path).write_text("\n".join(lines) + "\n")


def read_timeseries_csv(path) -> TimeSeries:
    """Parse a CSV written by :func:`write_timeseries_csv`."""
    lines = Path(path).read_text().strip().split("\n")
    if not lines or lines[0].split(",") != list(CSV_COLUMNS):
        raise ConfigError(f"{path} does not carry the expected CSV header")
    columns = {name: [] for name in CSV_COLUMNS}
    for line in lines[1:]:
        cells = line.split(",")
        if len(cells) != len(CSV_COLUMNS):
            raise ConfigError(f"malformed CSV row: {line!r}")
        for name, cell in zip(CSV_COLUMNS, cells):
            columns[name].append(math.nan if cell == "undef" else float(cell))
    return TimeSeries(
        times=columns["time"],
        n_mean=columns["n_mean"],
        T_field=columns["T_field"],
        g2=columns["g2"],
        trace_dev=columns["trace_dev"],
        tail_leak=columns["tail_leak"],
    )


def summarize_series(series: TimeSeries, config: SimulationConfig) -> dict:
    """Summary statistics reproducible from the CSV columns alone."""
    prediction = thermalization_time(config.reservoir, config.coupling)
    tail = max(1, len(series) // 10)
    steady_n = float(np.mean(series.n_mean[-tail:]))
    try:
        fit = fit_decay_rate(series)
        gamma_fit, fit_r2 = fit.Gamma, fit.r_squared
    except FitError:
        gamma_fit, fit_r2 = None, None
    g2_final = float(series.g2[-1])
    return {
        "collisions": len(series) - 1,
        "final_time": float(series.times[-1]),
        "steady_n_mean": steady_n,
        "steady_T_field": field_temperature(steady_n, config.field.Omega),
        "Gamma_fit": gamma_fit,
        "fit_r_squared": fit_r2,
        "Gamma_predicted": prediction.Gamma,
        "t_th_predicted": prediction.t_th,
        "n_bar_th_predicted": prediction.n_bar_th,
        "g2_final": g2_final,
        "T_candidate_reservoir": config.reservoir.T_a,
        "T_candidate_steady": field_temperature(prediction.n_bar_th, config.field.Omega),
    }


def _summary_lines(summary: dict, kind: str) -> list[str]:
    lines = [
        "steady_T_field={} Gamma_fit={} t_th_predicted={} g2_final={}".format(
            _fmt(summary["steady_T_field"]),
            _fmt(summary["Gamma_fit"]),
            _fmt(summary["t_th_predicted"]),
            _fmt(summary["g2_final"]),
        )
    ]
    label = "multilevel " if kind == MULTILEVEL else ""
    lines.append(
        "{}T_candidate_reservoir={} T_candidate_steady={}".format(
            label,
            _fmt(summary["T_candidate_reservoir"]),
            _fmt(summary["T_candidate_steady"]),
        )
    )
    return lines


def _json_safe(value):
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def _write_json(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(_json_safe(payload), indent=2, sort_keys=True) + "\n")


def cmd_run(config: SimulationConfig, out_dir, stem: str, quiet: bool = False) -> int:
    """Execute one run; write CSV + JSON sidecar; print the summary."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    series = run_simulation(config)
    write_timeseries_csv(out_dir / f"{stem}.csv", series)
    summary = summarize_series(series, config)
    summary["csv"] = f"{stem}.csv"
    summary["config"] = config_to_mapping(config)
    _write_json(out_dir / f"{stem}.summary.json", summary)
    if not quiet:
        for line in _summary_lines(summary, config.reservoir.kind):
            print(line)
    return 0


def cmd_predict(config: SimulationConfig, quiet: bool = False) -> int:
    """Print the closed-form prediction; no simulation is run."""
    prediction = thermalization_time(config.reservoir, config.coupling)
    if quiet:
        return 0
    print(f"Gamma = {_fmt(prediction.Gamma)}")
    print(f"t_th = {_fmt(prediction.t_th)}")
    print(f"n_bar_th = {_fmt(prediction.n_bar_th)}")
    print(f"t_th_low_T = {_fmt(prediction.low_T_approx)}")
    print(f"T_candidate_reservoir = {_fmt(config.reservoir.T_a)}")
    print(
        "T_candidate_steady = "
        f"{_fmt(field_temperature(prediction.n_bar_th, config.field.Omega))}"
    )
    return 0


def _sweep_worker(payload: tuple) -> dict:
    """Run one sweep point in isolation; never raises."""
    index, mapping, out_dir, file_stem, collisions, dim = payload
    try:
        config = config_from_mapping(mapping).with_overrides(collisions, dim)
        series = run_simulation(config)
        write_timeseries_csv(Path(out_dir) / f"{file_stem}.csv", series)
        summary = summarize_series(series, config)
        summary["csv"] = f"{file_stem}.csv"
        return {"index": index, "summary": summary}
    except Exception as exc:  # per-point failures must not kill the sweep
        return {
            "index": index,
            "error": type(exc).__name__,
            "message": str(exc),
            "exit_code": exit_code_for(exc),
        }


def _run_pool(payloads: list[tuple]) -> list[dict]:
    if len(payloads) <= 1:
        return [_sweep_worker(p) for p in payloads]
    try:
        workers = min(len(payloads), os.cpu_count() or 1)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sweep_worker, payloads))
    except (OSError, PermissionError, NotImplementedError, BrokenExecutor):
        return [_sweep_worker(p) for p in payloads]


def _format_table(rows: list[list[str]]) -> str:
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    return "\n".join(
        "  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip()
        for row in rows
    )


def cmd_sweep(
    base_mapping: dict,
    axis: str,
    values: list,
    out_dir,
    stem: str,
    collisions: int | None = None,
    dim: int | None = None,
    quiet: bool = False,
) -> int:
    """Run all sweep points (independently, in a process pool) and tabulate.

    Points that fail keep their row in the table with the error recorded;
    the remaining points still run.  Rows follow the input order.
    """
    if axis not in _SWEEP_AXES:
        raise ConfigError(f"unknown sweep axis {axis!r}")
    if not values:
        raise ConfigError("sweep needs a non-empty list of values")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    section, key, _ = _SWEEP_AXES[axis]
    payloads = []
    for index, value in enumerate(values):
        mapping = {name: dict(body) for name, body in base_mapping.items()}
        mapping.setdefault(section, {})[key] = value
        file_stem = f"{stem}_{axis}{index}_{value:g}"
        payloads.append((index, mapping, str(out), file_stem, collisions, dim))
    results = sorted(_run_pool(payloads), key=lambda r: r["index"])

    table = [["%s" % axis, "t_th_pred", "Gamma_fit", "t_th_fit", "steady_T_field", "g2_final", "status"]]
    for value, result in zip(values, results):
        if "summary" in result:
            summary = result["summary"]
            gamma_fit = summary["Gamma_fit"]
            table.append(
                [
                    _fmt(value),
                    _fmt(summary["t_th_predicted"]),
                    _fmt(gamma_fit),
                    _fmt(1.0 / gamma_fit if gamma_fit else None),
                    _fmt(summary["steady_T_field"]),
                    _fmt(summary["g2_final"]),
                    "ok",
                ]
            )
        else:
            table.append(
                [_fmt(value), "-", "-", "-", "-", "-", f"error:{result['error']}"]
            )
    _write_json(out / f"{stem}.sweep.json", {"axis": axis, "values": list(values), "points": results})
    if not quiet:
        print(_format_table(table))
    return 0


def _emit_error(exc: BaseException) -> None:
    payload = {
        "error": type(exc).__name__,
        "exit_code": exit_code_for(exc),
        "message": str(exc),
    }
    print(json.dumps(payload), file=sys.stderr)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="micromaser",
        description="Collision-model thermalization of a single cavity mode",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("run", "simulate one configuration and write its time series"),
        ("sweep", "simulate a family of configurations along one axis"),
        ("predict", "print closed-form thermalization numbers only"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to a JSON config document")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--collisions", type=int, default=None, help="override run.collisions_max")
        p.add_argument("--dim", type=int, default=None, help="override field.dim")
        p.add_argument("--quiet", action="store_true", help="suppress stdout summaries")
        if name == "sweep":
            p.add_argument("--axis", required=True, choices=sorted(_SWEEP_AXES))
            p.add_argument("--values", required=True, help="comma-separated axis values")
    return parser


def _parse_values(axis: str, text: str) -> list:
    caster = _SWEEP_AXES[axis][2]
    items = [piece.strip() for piece in text.split(",") if piece.strip()]
    if not items:
        raise ConfigError("sweep needs a non-empty list of values")
    try:
        return [caster(item) for item in items]
    except ValueError as exc:
        raise ConfigError(f"bad value for axis {axis}: {exc}") from exc


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config_path = Path(args.config)
        text = config_path.read_text()
        stem = config_path.stem
        if args.command == "predict":
            config = parse_config(text).with_overrides(args.collisions, args.dim)
            return cmd_predict(config, quiet=args.quiet)
        if args.command == "run":
            config = parse_config(text).with_overrides(args.collisions, args.dim)
            return cmd_run(config, args.out, stem, quiet=args.quiet)
        mapping = json.loads(text)
        if not isinstance(mapping, dict):
            raise ConfigError("config document must be a JSON object")
        values = _parse_values(args.axis, args.values)
        return cmd_sweep(
            mapping,
            args.axis,
            values,
            args.out,
            stem,
            collisions=args.collisions,
            dim=args.dim,
            quiet=args.quiet,
        )
    except OSError as exc:
        _emit_error(ConfigError(str(exc)))
        return 2
    except MicromaserError as exc:
        _emit_error(exc)
        return exit_code_for(exc)


if __name__ == "__main__":
    sys.exit(main())
