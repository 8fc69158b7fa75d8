"""Command-line front end.

Subcommands:
    run     one scenario from a config file plus --set overrides
    preset  a named scenario bundle (fig1..fig6, nobarrier)
    sweep   Cartesian product of barrier heights and widths
    check   the self-diagnostic suite on the configured mesh
    fit     re-analyze an existing trace CSV

Every simulating command writes one CSV per scenario, a summary.json with
the fitted quantities, and a manifest.json whose config echo is sufficient
to reproduce each run bit for bit.

Exit codes: 0 success, 1 check or analysis failure, 2 usage or config
error, 3 numerical abort.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import analysis, oracles
from .checks import format_check_report, run_checks
from .csvio import read_trace_csv, write_manifest, write_trace_csv
from .model import (
    ScenarioConfig,
    coerce_config_value,
    config_from_mapping,
    config_to_mapping,
    parse_config_values,
    validate_config,
)
from .observables import DecayTrace
from .presets import PRESET_NAMES, expand_preset, scenario_label
from .propagator import NumericalBreakdownError, run

EXIT_OK = 0
EXIT_CHECK_FAILURE = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


class UsageError(Exception):
    pass


def _parse_overrides(pairs: list[str]) -> dict[str, float | int]:
    values: dict[str, float | int] = {}
    for pair in pairs:
        key, sep, raw = pair.partition("=")
        if not sep:
            raise UsageError(f"--set expects key=value, got {pair!r}")
        try:
            values[key.strip()] = coerce_config_value(key.strip(), raw.strip())
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    return values


def _resolve_config(args: argparse.Namespace) -> ScenarioConfig:
    values: dict[str, float | int] = {}
    if getattr(args, "config", None):
        path = Path(args.config)
        try:
            text = path.read_text()
        except OSError:
            raise UsageError(f"cannot read config file {path}") from None
        try:
            values.update(parse_config_values(text))
        except ValueError as exc:
            raise UsageError(f"{path}: {exc}") from None
    values.update(_parse_overrides(getattr(args, "set", None) or []))
    try:
        cfg = config_from_mapping(values)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    violations = validate_config(cfg)
    if violations:
        raise UsageError("invalid configuration:\n  " + "\n  ".join(violations))
    return cfg


def _analyze(label: str, trace: DecayTrace) -> dict:
    """Per-scenario summary block: fits, transition peak, sign episodes.

    Quantities that cannot be computed on this trace (fit window beyond
    t_end, no finite g samples) are reported as null with a note rather
    than failing the run; the CSV is the primary artifact.
    """
    block: dict = {"name": label, "notes": []}
    try:
        fit = analysis.fit_exponential(trace)
        block["gamma_fit"] = fit.value
        block["fit_residual"] = fit.residual
        block["fit_window"] = list(fit.window)
    except ValueError as exc:
        block["gamma_fit"] = None
        block["notes"].append(f"exponential fit unavailable: {exc}")
    barrier = trace.cfg.barrier
    if barrier is not None and barrier.h > np.pi**2:
        block["gamma_pole"] = oracles.resonance_gamma(barrier.h, barrier.w).gamma
    else:
        block["gamma_pole"] = None
    try:
        peak_t, peak_g = analysis.transition_peak(trace)
        block["peak_t"] = peak_t
        block["peak_g"] = peak_g
    except ValueError as exc:
        block["peak_t"] = block["peak_g"] = None
        block["notes"].append(f"transition peak unavailable: {exc}")
    block["positive_g_intervals"] = [list(iv) for iv in analysis.positive_g_intervals(trace)]
    return block


def _format_block(b: dict) -> str:
    parts = [f"{b['name']}:"]
    if b["gamma_fit"] is not None:
        parts.append(f"gamma_fit={b['gamma_fit']:.6g}")
    if b["gamma_pole"] is not None:
        parts.append(f"gamma_pole={b['gamma_pole']:.6g}")
    if b["peak_t"] is not None:
        parts.append(f"peak t*={b['peak_t']:.3f} g*={b['peak_g']:.4f}")
    for note in b["notes"]:
        parts.append(f"({note})")
    return " ".join(parts)


def _run_scenarios(
    scenarios: list[tuple[str, ScenarioConfig]], out_dir: Path, workers: int
) -> tuple[list[dict], list[dict]]:
    """Run scenarios (possibly concurrently), write CSVs, return runs+blocks."""
    out_dir.mkdir(parents=True, exist_ok=True)

    def job(item: tuple[str, ScenarioConfig]) -> tuple[str, ScenarioConfig, DecayTrace]:
        label, cfg = item
        trace = run(cfg)
        write_trace_csv(out_dir / f"{label}.csv", trace)
        return label, cfg, trace

    if workers > 1 and len(scenarios) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, scenarios))
    else:
        results = [job(item) for item in scenarios]

    runs, blocks = [], []
    for label, cfg, trace in results:
        runs.append(
            {
                "name": label,
                "csv": f"{label}.csv",
                "config": config_to_mapping(cfg),
            }
        )
        blocks.append(_analyze(label, trace))
    return runs, blocks


def _emit_artifacts(out_dir: Path, command: str, runs: list[dict], summary: dict) -> None:
    summary_path = out_dir / "summary.json"
    summary_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    write_manifest(
        out_dir / "manifest.json",
        {
            "command": command,
            "out_dir": str(out_dir),
            "runs": runs,
            "summary": "summary.json",
        },
    )


def cmd_run(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    out_dir = Path(args.out)
    label = scenario_label(cfg.barrier)
    runs, blocks = _run_scenarios([(label, cfg)], out_dir, workers=1)
    _emit_artifacts(out_dir, "run", runs, {"runs": blocks})
    print(f"wrote {runs[0]['csv']} and summary.json in {out_dir}")
    return EXIT_OK


def cmd_preset(args: argparse.Namespace) -> int:
    name = args.name or args.preset
    if not name:
        raise UsageError("preset requires a name (positional or --preset)")
    base = _resolve_config(args)
    try:
        scenarios = expand_preset(name, base)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out_dir = Path(args.out)
    runs, blocks = _run_scenarios(scenarios, out_dir, args.workers)
    summary: dict = {"preset": name, "runs": blocks}

    if name in ("fig2", "fig3"):
        gammas = [b["gamma_fit"] for b in blocks]
        summary["gamma_ordering_decreasing"] = None not in gammas and all(
            a > b for a, b in zip(gammas, gammas[1:])
        )
    if name in ("fig4", "fig5", "fig6"):
        by_name = {b["name"]: b for b in blocks}
        free = by_name.get("nobarrier")
        if free is not None and len(blocks) > 1:
            first_barrier = next(b for b in blocks if b["name"] != "nobarrier")
            summary["peak_comparison"] = {
                "nobarrier": {"t": free["peak_t"], "g": free["peak_g"]},
                first_barrier["name"]: {
                    "t": first_barrier["peak_t"],
                    "g": first_barrier["peak_g"],
                },
            }
    if name == "fig5":
        free_cols = read_trace_csv(out_dir / "nobarrier.csv")
        bar_run = next(r for r in runs if r["name"] != "nobarrier")
        bar_cols = read_trace_csv(out_dir / bar_run["csv"])
        crossing = analysis.crossing_time(
            (free_cols["t"], free_cols["P"]), (bar_cols["t"], bar_cols["P"])
        )
        summary["crossing"] = None if crossing is None else {
            "t": crossing[0],
            "P": crossing[1],
        }

    _emit_artifacts(out_dir, f"preset {name}", runs, summary)
    for b in blocks:
        print(_format_block(b))
    if "crossing" in summary and summary["crossing"]:
        print(
            f"crossing: t={summary['crossing']['t']:.3f} P={summary['crossing']['P']:.4f}"
        )
    print(f"wrote {len(runs)} CSV file(s), summary.json, manifest.json in {out_dir}")
    return EXIT_OK


def _parse_float_list(raw: str, flag: str) -> list[float]:
    try:
        values = [float(tok) for tok in raw.split(",") if tok.strip()]
    except ValueError:
        raise UsageError(f"{flag} expects a comma-separated number list, got {raw!r}") from None
    if not values:
        raise UsageError(f"{flag} must name at least one value")
    return values


def cmd_sweep(args: argparse.Namespace) -> int:
    heights = _parse_float_list(args.heights, "--heights")
    widths = _parse_float_list(args.widths, "--widths")
    base = _resolve_config(args)

    # all-or-nothing: every combination must validate before any run starts
    scenarios: list[tuple[str, ScenarioConfig]] = []
    problems: list[str] = []
    for h in heights:
        for w in widths:
            mapping = config_to_mapping(base)
            mapping["barrier_height"] = h
            mapping["barrier_width"] = w
            try:
                cfg = config_from_mapping(mapping)
            except ValueError as exc:
                problems.append(f"(h={h:g}, w={w:g}): {exc}")
                continue
            bad = validate_config(cfg)
            if bad:
                problems.append(f"(h={h:g}, w={w:g}): " + "; ".join(bad))
            else:
                scenarios.append((scenario_label(cfg.barrier), cfg))
    if problems:
        raise UsageError("invalid sweep combinations:\n  " + "\n  ".join(problems))

    out_dir = Path(args.out)
    runs, blocks = _run_scenarios(scenarios, out_dir, args.workers)
    table = []
    for b in blocks:
        cfg_echo = next(r["config"] for r in runs if r["name"] == b["name"])
        table.append(
            {
                "h": cfg_echo["barrier_height"],
                "w": cfg_echo["barrier_width"],
                "gamma_fit": b["gamma_fit"],
                "gamma_pole": b["gamma_pole"],
                "peak_t": b["peak_t"],
                "peak_g": b["peak_g"],
                "has_positive_g": bool(b["positive_g_intervals"]),
            }
        )
    _emit_artifacts(out_dir, "sweep", runs, {"runs": blocks, "table": table})
    print(f"{'h':>6} {'w':>6} {'gamma_fit':>12} {'gamma_pole':>12} {'peak_t':>8} {'peak_g':>9} pos_g")

    def cell(value, fmt: str) -> str:
        return "-" if value is None else format(value, fmt)

    for row in table:
        print(
            f"{row['h']:>6g} {row['w']:>6g} {cell(row['gamma_fit'], '.6g'):>12}"
            f" {cell(row['gamma_pole'], '.6g'):>12} {cell(row['peak_t'], '.3f'):>8}"
            f" {cell(row['peak_g'], '.4f'):>9} {row['has_positive_g']}"
        )
    return EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    results = run_checks(cfg)
    print(format_check_report(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK_FAILURE


def cmd_fit(args: argparse.Namespace) -> int:
    path = Path(args.csv)
    if not path.exists():
        raise UsageError(f"no such CSV file: {path}")
    try:
        cols = read_trace_csv(path)
        fit = analysis.fit_exponential((cols["t"], cols["P"]))
    except ValueError as exc:
        print(f"analysis failure: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILURE
    print(f"gamma_fit={fit.value:.8g}  residual={fit.residual:.3e}  window={fit.window}")
    if np.count_nonzero(np.isfinite(cols["g"])) >= 3:
        peak_t, peak_g = analysis.transition_peak((cols["t"], cols["g"]))
        print(f"peak: t*={peak_t:.4f}  g*={peak_g:.6g}")
        intervals = analysis.positive_g_intervals((cols["t"], cols["g"]))
        if intervals:
            spans = ", ".join(f"[{a:.3f}, {b:.3f}]" for a, b in intervals)
            print(f"positive-g intervals: {spans}")
        else:
            print("positive-g intervals: none")
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser, with_workers: bool = False) -> None:
    parser.add_argument("--config", help="key=value config file")
    parser.add_argument(
        "--set",
        action="append",
        metavar="KEY=VALUE",
        help="override one config key (repeatable)",
    )
    if with_workers:
        parser.add_argument(
            "--workers", type=int, default=1, help="concurrent scenario workers"
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tunneldecay",
        description="Crank-Nicolson decay of a confined state through a square barrier",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario")
    _add_common(p_run)
    p_run.add_argument("--out", default="out", help="output directory")
    p_run.set_defaults(func=cmd_run)

    p_preset = sub.add_parser("preset", help="run a named scenario bundle")
    p_preset.add_argument("name", nargs="?", choices=PRESET_NAMES, help="preset name")
    p_preset.add_argument("--preset", dest="preset", choices=PRESET_NAMES)
    _add_common(p_preset, with_workers=True)
    p_preset.add_argument("--out", default="out", help="output directory")
    p_preset.set_defaults(func=cmd_preset)

    p_sweep = sub.add_parser("sweep", help="run a barrier parameter product")
    p_sweep.add_argument("--heights", required=True, help="comma-separated barrier heights")
    p_sweep.add_argument("--widths", required=True, help="comma-separated barrier widths")
    _add_common(p_sweep, with_workers=True)
    p_sweep.add_argument("--out", default="out", help="output directory")
    p_sweep.set_defaults(func=cmd_sweep)

    p_check = sub.add_parser("check", help="run the self-diagnostic suite")
    _add_common(p_check)
    p_check.set_defaults(func=cmd_check)

    p_fit = sub.add_parser("fit", help="re-analyze an existing trace CSV")
    p_fit.add_argument("csv", help="trace CSV path")
    p_fit.set_defaults(func=cmd_fit)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalBreakdownError as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
