"""Command-line surface: simulate / tune / plan / compare.

Each subcommand reads one YAML config (see config module; `plan` reads
a scene file), writes CSV and SVG artifacts into --out, and exits 0 on
success, 1 on config errors, 2 on simulation divergence, 3 on planner
infeasibility.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .config import ConfigError, RunConfig, load_config, load_scene
from .metrics import comparison_csv_rows, render_table
from .planner import PlanInfeasible, plan_detour, sample_path, time_parameterize
from .sim import (
    CompareResult,
    ConfigMismatch,
    SimulationDiverged,
    as_pid_baseline,
    run_compare,
    run_simulation,
    run_tune,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DIVERGED = 2
EXIT_INFEASIBLE = 3


def _with_seed(config: RunConfig, seed: Optional[int]) -> RunConfig:
    if seed is None:
        return config
    from dataclasses import replace

    return replace(
        config,
        sim=replace(config.sim, seed=seed),
        tuning=replace(config.tuning, seed=seed),
    )


def _metrics_text(result) -> str:
    lines = []
    for report in (result.attitude, result.position):
        lines.append(
            f"# {report.label} ({report.units}), t_peak={report.t_peak:g} s"
        )
        lines.append("channel,iae,itae,itse")
        for channel, m in report.channels.items():
            lines.append(
                f"{channel},{m.iae:.9g},{m.itae:.9g},{m.itse:.9g}"
            )
    return "\n".join(lines) + "\n"


def cmd_simulate(args: argparse.Namespace) -> int:
    config = _with_seed(load_config(args.config), args.seed)
    out = Path(args.out)
    try:
        result = run_simulation(config)
    except SimulationDiverged as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    out.mkdir(parents=True, exist_ok=True)
    csv_path = result.log.write_csv(out / "sim_log.csv")
    (out / "metrics.txt").write_text(_metrics_text(result), encoding="utf-8")
    print(f"wrote {csv_path} ({len(result.log.rows)} rows)")
    for report in (result.attitude, result.position):
        summary = ", ".join(
            f"{ch} iae={m.iae:.4g}" for ch, m in report.channels.items()
        )
        print(f"{report.units:>3}: {summary}")
    return EXIT_OK


def cmd_tune(args: argparse.Namespace) -> int:
    config = _with_seed(load_config(args.config), args.seed)
    outputs = run_tune(config, args.out)
    for group, result in (("inner", outputs.inner), ("outer", outputs.outer)):
        if result is None:
            continue
        print(
            f"{group}: K1=({result.k1.kp:.4g}, {result.k1.ki:.4g}, {result.k1.kd:.4g})"
            f"  K2=({result.k2.kp:.4g}, {result.k2.ki:.4g}, {result.k2.kd:.4g})"
        )
        if any(result.inverted):
            names = [n for n, bad in zip("pid", result.inverted) if bad]
            print(f"{group}: inverted bound on {names}; half_range forced to 0")
    print(f"wrote {outputs.tuned_config}")
    return EXIT_OK


def cmd_plan(args: argparse.Namespace) -> int:
    request, obstacles = load_scene(args.config)
    out = Path(args.out)
    try:
        path = time_parameterize(
            plan_detour(request, obstacles), request.v_max, request.a_max
        )
    except PlanInfeasible as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    out.mkdir(parents=True, exist_ok=True)
    payload = {
        "clearance": path.clearance if path.clearance != float("inf") else None,
        "corridor_ok": path.corridor_ok,
        "lateral_ids": list(path.lateral_ids),
        "duration": path.duration,
        "segments": [
            {
                "control_points": [list(s.p0), list(s.p1), list(s.p2), list(s.p3)],
                "duration": s.duration,
            }
            for s in path.segments
        ],
    }
    (out / "path.json").write_text(
        json.dumps(payload, indent=2) + "\n", encoding="utf-8"
    )
    samples = sample_path(path, request.sample_dt)
    lines = ["t,x,y,z,vx,vy,vz,ax,ay,psi_d"]
    for s in samples:
        lines.append(
            ",".join(
                format(v, ".9g")
                for v in (s.t, s.x, s.y, s.z, s.vx, s.vy, s.vz, s.ax, s.ay, s.psi_d)
            )
        )
    (out / "path_samples.csv").write_text(
        "\n".join(lines) + "\n", encoding="utf-8", newline="\n"
    )
    print(
        f"planned {len(path.segments)} segments, duration {path.duration:.2f} s, "
        f"min clearance {path.clearance:.3f} m"
    )
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    candidate = _with_seed(load_config(args.config), args.seed)
    if args.baseline is not None:
        baseline = _with_seed(load_config(args.baseline), args.seed)
    else:
        baseline = as_pid_baseline(candidate)
    try:
        result = run_compare(baseline, candidate)
    except SimulationDiverged as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_compare_outputs(result, out, baseline, candidate)
    print(render_table(result.attitude_rows))
    print()
    print(render_table(result.position_rows))
    return EXIT_OK


def _write_compare_outputs(
    result: CompareResult, out: Path, baseline: RunConfig, candidate: RunConfig
) -> None:
    rows = result.attitude_rows + result.position_rows
    (out / "comparison.csv").write_text(
        "\n".join(comparison_csv_rows(rows)) + "\n", encoding="utf-8", newline="\n"
    )
    text = (
        f"attitude (deg), t_peak={result.baseline.attitude.t_peak:g} s\n"
        + render_table(result.attitude_rows)
        + f"\n\nposition (m), t_peak={result.baseline.position.t_peak:g} s\n"
        + render_table(result.position_rows)
        + "\n"
    )
    (out / "comparison.txt").write_text(text, encoding="utf-8")
    result.baseline.log.write_csv(out / "baseline_log.csv")
    result.candidate.log.write_csv(out / "candidate_log.csv")
    from .plots import error_overlay, overlay_channels

    logs = [result.baseline.log, result.candidate.log]
    labels = [baseline.controller.mode, candidate.controller.mode]
    overlay_channels(
        logs,
        labels,
        ["phi", "theta", "psi"],
        out / "attitude_overlay.svg",
        ref_channels=["phi_ref", "theta_ref", "psi_ref"],
        title="attitude response",
    )
    overlay_channels(
        logs,
        labels,
        ["x", "y", "z"],
        out / "position_overlay.svg",
        ref_channels=["x_ref", "y_ref", "z_ref"],
        title="position tracking",
    )
    error_overlay(
        logs, labels, ["phi", "theta", "psi"], out / "attitude_error_overlay.svg"
    )
    error_overlay(logs, labels, ["x", "y", "z"], out / "position_error_overlay.svg")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quadflight",
        description="Deterministic quadcopter control workbench",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, default_out: str) -> None:
        p.add_argument("--config", required=True, help="YAML config (or scene for plan)")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--out", default=default_out, help="output directory")

    p_sim = sub.add_parser("simulate", help="fly one configured mission")
    add_common(p_sim, "runs/simulate")
    p_sim.set_defaults(func=cmd_simulate)

    p_tune = sub.add_parser("tune", help="learn NLVG gain bands")
    add_common(p_tune, "runs/tune")
    p_tune.set_defaults(func=cmd_tune)

    p_plan = sub.add_parser("plan", help="plan a detour path through a scene")
    add_common(p_plan, "runs/plan")
    p_plan.set_defaults(func=cmd_plan)

    p_cmp = sub.add_parser("compare", help="baseline-vs-candidate metric table")
    add_common(p_cmp, "runs/compare")
    p_cmp.add_argument(
        "--baseline",
        default=None,
        help="baseline config (default: same config forced to pid mode)",
    )
    p_cmp.set_defaults(func=cmd_compare)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ConfigMismatch) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PlanInfeasible as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
