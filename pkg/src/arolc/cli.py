"""Command-line entry points.

Subcommands:
  bound     print the Razumikhin delay margin and feasibility of a scenario
  simulate  run one scenario, write trace.csv and metrics.json
  compare   run two scenarios, write per-run artifacts plus a side-by-side
            metrics table
  sweep     rerun a scenario over a parameter range, aggregate metrics

Exit codes: 0 success, 1 runtime failure (e.g. divergence; a partial trace
is still written), 2 scenario parse/validation errors.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from .delays import max_delay
from .metrics import metrics_from_trace, metrics_to_json
from .scenario_io import (
    ScenarioError,
    apply_override,
    build_scenario,
    load_config,
    scenario_hash,
)
from .sim import SimulationDiverged, simulate, trace_to_csv
from .stability import check_feasibility, delay_margin

__all__ = ["main"]


def _apply_cli_overrides(config, args) -> None:
    if getattr(args, "seed", None) is not None:
        apply_override(config, "sim.seed", str(args.seed))
    if getattr(args, "dt", None) is not None:
        apply_override(config, "sim.dt", repr(args.dt))
    if getattr(args, "control_dt", None) is not None:
        apply_override(config, "sim.control_dt", repr(args.control_dt))


def _run_one(config, label, out_dir: Path, quiet: bool) -> tuple[int, object]:
    sc = build_scenario(config, label=label)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()
    try:
        trace = simulate(sc)
        code = 0
    except SimulationDiverged as exc:
        trace = exc.partial_trace
        code = 1
        print(f"error: {exc}", file=sys.stderr)
    runtime = time.perf_counter() - started
    trace_to_csv(trace, out_dir / "trace.csv")
    report = metrics_from_trace(
        trace, sc.trajectory.diameter, runtime=runtime,
        scenario_hash=scenario_hash(config),
    )
    (out_dir / "metrics.json").write_text(metrics_to_json(report) + "\n")
    if not quiet:
        ae = ", ".join(f"{a:.6g}" for a in report.ae_per_dim)
        print(f"{label}: rows={len(trace)} ae=[{ae}] tv={report.tv:.6g} "
              f"runtime={runtime:.2f}s -> {out_dir}")
    return code, report


def _cmd_bound(args) -> int:
    config = load_config(args.scenario)
    sc = build_scenario(config)
    if sc.gains is None:
        print("error: [gains] section required for bound", file=sys.stderr)
        return 2
    margin = delay_margin(sc.gains)
    peak = max_delay(sc.delay)
    feasible = check_feasibility(sc.gains, peak)
    print(f"delay margin [s]: {margin:.6f}")
    print(f"peak delay   [s]: {peak:.6f} ({sc.delay.kind})")
    print(f"feasible: {'yes' if feasible else 'no'}")
    return 0


def _cmd_simulate(args) -> int:
    config = load_config(args.scenario)
    _apply_cli_overrides(config, args)
    code, _ = _run_one(config, Path(args.scenario).stem, Path(args.out),
                       args.quiet)
    return code


def _cmd_compare(args) -> int:
    config_a = load_config(args.scenario_a)
    config_b = load_config(args.scenario_b)
    _apply_cli_overrides(config_a, args)
    _apply_cli_overrides(config_b, args)
    out = Path(args.out)
    label_a = Path(args.scenario_a).stem
    label_b = Path(args.scenario_b).stem
    code_a, rep_a = _run_one(config_a, label_a, out / "a", args.quiet)
    code_b, rep_b = _run_one(config_b, label_b, out / "b", args.quiet)
    n = len(rep_a.ae_per_dim)
    header = ["scenario"]
    header += [f"ae_{i}" for i in range(n)]
    header += [f"pct_ae_{i}" for i in range(n)]
    header += ["tv", "sup_error_tail", "runtime"]
    lines = [",".join(header)]
    for label, rep in ((label_a, rep_a), (label_b, rep_b)):
        row = [label]
        row += [f"{a:.9g}" for a in rep.ae_per_dim]
        row += [f"{p:.9g}" for p in rep.pct_ae_per_dim]
        row += [f"{rep.tv:.9g}", f"{rep.sup_error_tail:.9g}",
                f"{rep.runtime:.9g}"]
        lines.append(",".join(row))
    out.mkdir(parents=True, exist_ok=True)
    (out / "comparison.csv").write_text("\n".join(lines) + "\n")
    if not args.quiet:
        print("\n".join(lines))
    return max(code_a, code_b)


def _parse_range(spec: str) -> np.ndarray:
    parts = spec.split(":")
    if len(parts) != 3:
        raise ScenarioError(f"range must be start:stop:step, got {spec!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError as exc:
        raise ScenarioError(f"bad range {spec!r}") from exc
    if step <= 0.0 or stop < start:
        raise ScenarioError(f"range must increase, got {spec!r}")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)


def _cmd_sweep(args) -> int:
    base = load_config(args.scenario)
    _apply_cli_overrides(base, args)
    values = _parse_range(args.range)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    worst = 0
    n_dims = None
    for value in values:
        config = {sec: dict(keys) for sec, keys in base.items()}
        apply_override(config, args.param, repr(float(value)))
        sc = build_scenario(config, label=f"{args.param}={value:g}")
        started = time.perf_counter()
        try:
            trace = simulate(sc)
            status = "ok"
        except SimulationDiverged as exc:
            trace = exc.partial_trace
            status = "diverged"
            worst = 1
        runtime = time.perf_counter() - started
        report = metrics_from_trace(trace, sc.trajectory.diameter,
                                    runtime=runtime,
                                    scenario_hash=scenario_hash(config))
        n_dims = len(report.ae_per_dim)
        rows.append((value, status, report))
        if not args.quiet:
            print(f"{args.param}={value:g}: {status} "
                  f"ae={report.ae_per_dim} tv={report.tv:.6g}")
    header = ["value", "status"]
    header += [f"ae_{i}" for i in range(n_dims)]
    header += ["tv", "sup_error_tail", "runtime"]
    lines = [",".join(header)]
    for value, status, rep in rows:
        row = [f"{value:.9g}", status]
        row += [f"{a:.9g}" for a in rep.ae_per_dim]
        row += [f"{rep.tv:.9g}", f"{rep.sup_error_tail:.9g}",
                f"{rep.runtime:.9g}"]
        lines.append(",".join(row))
    (out / "sweep.csv").write_text("\n".join(lines) + "\n")
    return worst


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arolc",
        description="Adaptive-robust control of input-delayed Euler-Lagrange "
                    "systems: delay margins, simulation, metrics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_bound = sub.add_parser("bound", help="delay margin and feasibility")
    p_bound.add_argument("scenario")
    p_bound.set_defaults(func=_cmd_bound)

    def add_common(p):
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--dt", type=float, default=None,
                       help="integration step override [s]")
        p.add_argument("--control-dt", dest="control_dt", type=float,
                       default=None, help="control period override [s]")
        p.add_argument("--quiet", action="store_true")

    p_sim = sub.add_parser("simulate", help="run one scenario")
    p_sim.add_argument("scenario")
    add_common(p_sim)
    p_sim.set_defaults(func=_cmd_simulate)

    p_cmp = sub.add_parser("compare", help="run two scenarios side by side")
    p_cmp.add_argument("scenario_a")
    p_cmp.add_argument("scenario_b")
    add_common(p_cmp)
    p_cmp.set_defaults(func=_cmd_compare)

    p_sweep = sub.add_parser("sweep", help="parameter sweep")
    p_sweep.add_argument("scenario")
    p_sweep.add_argument("--param", required=True,
                         help="dotted key, e.g. delay.h0")
    p_sweep.add_argument("--range", required=True, help="start:stop:step")
    add_common(p_sweep)
    p_sweep.set_defaults(func=_cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
