"""Closed-loop simulation harness and campaign runners.

run_simulation flies one configured mission: reference generator (or a
planned scene path) -> cascade controller -> saturation -> RK4 plant
step, logging every control period. run_tune learns NLVG gain bands
from step episodes and writes a runnable config carrying them.
run_compare runs a baseline and a candidate on the same mission and
emits the metric comparison.

Everything here is deterministic for a fixed config and seed; the log
serializer fixes number formatting so repeated runs are byte-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Optional, Sequence

from .config import (
    ControllerSettings,
    RunConfig,
    build_cascade_config,
    load_scene,
    write_tuned_config,
)
from .control import (
    CascadeConfig,
    FixedGains,
    cascade_update,
    reset,
)
from .dynamics import QuadParams, StateVector, step_rk4
from .metrics import ErrorSeries, MetricReport, report_for
from .planner import plan_detour, sample_path, time_parameterize
from .trajectory import ReferenceSample, StepSpec, sample_mission
from .tuning import (
    PENALTY_COST,
    EsConfig,
    GainVector,
    TuneResult,
    cost_from_series,
    trace_csv_rows,
    tune_bounds,
)

T_PEAK_ATTITUDE = 0.15  # s, step-response metric window (attitude)
T_PEAK_POSITION = 0.37  # s, step-response metric window (position)


class SimulationDiverged(RuntimeError):
    """Plant integration failed (non-finite state or gimbal guard)."""

    def __init__(self, t: float, cause: Exception):
        super().__init__(f"simulation diverged at t={t:.3f} s: {cause}")
        self.t = t
        self.cause = cause


LOG_COLUMNS = (
    "t",
    "phi", "theta", "psi", "phi_dot", "theta_dot", "psi_dot",
    "x", "y", "z", "x_dot", "y_dot", "z_dot",
    "x_ref", "y_ref", "z_ref", "phi_ref", "theta_ref", "psi_ref",
    "ux", "uy", "thrust", "tau_x", "tau_y", "tau_z",
    "e_x", "e_y", "e_z", "e_phi", "e_theta", "e_psi",
)


@dataclass(frozen=True)
class SimLog:
    dt: float
    rows: tuple[tuple[float, ...], ...]
    columns: tuple[str, ...] = LOG_COLUMNS

    def column(self, name: str) -> list[float]:
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]

    def csv_lines(self) -> list[str]:
        lines = [",".join(self.columns)]
        for row in self.rows:
            lines.append(",".join(format(v, ".9g") for v in row))
        return lines

    def write_csv(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(self.csv_lines()) + "\n", encoding="utf-8", newline="\n")
        return path


@dataclass(frozen=True)
class SimResult:
    log: SimLog
    attitude: MetricReport
    position: MetricReport
    references: tuple[ReferenceSample, ...]


def _scene_references(config: RunConfig, n: int) -> list[ReferenceSample]:
    """Plan the configured scene and fly its samples; after the path
    ends the reference holds the final point."""
    request, obstacles = load_scene(config.scene_path)
    path = time_parameterize(
        plan_detour(request, obstacles), request.v_max, request.a_max
    )
    samples = sample_path(path, config.sim.dt, yaw_mode=config.trajectory.yaw_mode)
    dt = config.sim.dt
    on_grid = [s for s in samples if abs(s.t / dt - round(s.t / dt)) < 1e-9]
    out = [s._replace(t=k * dt) for k, s in enumerate(on_grid[:n])]
    if samples:
        end = samples[-1]  # exact path endpoint, even when off the grid
        hold = ReferenceSample(
            0.0, end.x, end.y, end.z, 0.0, 0.0, 0.0, 0.0, 0.0, end.psi_d
        )
    else:
        hold = ReferenceSample(0.0, 0, 0, 0, 0, 0, 0, 0, 0, 0.0)
    while len(out) < n:
        out.append(hold._replace(t=len(out) * dt))
    return out


def build_references(config: RunConfig) -> list[ReferenceSample]:
    n = int(round(config.sim.t_total / config.sim.dt)) + 1
    if config.trajectory.kind == "scene":
        return _scene_references(config, n)
    return sample_mission(
        config.trajectory.spec,
        config.sim.dt,
        config.sim.t_total,
        yaw_mode=config.trajectory.yaw_mode,
    )


def _metric_windows(config: RunConfig) -> tuple[float, float, float]:
    """(start, t_peak_attitude, t_peak_position) for this run. Step runs
    default to the step onset and the standard windows; path runs to the
    whole flight."""
    sim = config.sim
    if config.trajectory.kind == "step":
        start = sim.metrics_start if sim.metrics_start is not None else config.trajectory.spec.t_start
        tpa = sim.t_peak_attitude if sim.t_peak_attitude is not None else T_PEAK_ATTITUDE
        tpp = sim.t_peak_position if sim.t_peak_position is not None else T_PEAK_POSITION
    else:
        start = sim.metrics_start if sim.metrics_start is not None else 0.0
        remaining = sim.t_total - start
        tpa = sim.t_peak_attitude if sim.t_peak_attitude is not None else remaining
        tpp = sim.t_peak_position if sim.t_peak_position is not None else remaining
    return start, tpa, tpp


def _run_loop(
    cascade: CascadeConfig,
    references: Sequence[ReferenceSample],
    dt: float,
) -> tuple[tuple[float, ...], ...]:
    state = StateVector.zero()
    channels = reset()
    rows = []
    n = len(references)
    for k in range(n):
        ref = references[k]
        t = k * dt
        result = cascade_update(state, ref, cascade, channels, dt)
        channels = result.channels
        u = result.control
        rows.append(
            (
                t,
                state.phi, state.theta, state.psi,
                state.phi_dot, state.theta_dot, state.psi_dot,
                state.x, state.y, state.z,
                state.x_dot, state.y_dot, state.z_dot,
                ref.x, ref.y, ref.z,
                result.phi_d, result.theta_d, ref.psi_d,
                u.ux, u.uy, u.thrust, u.tau_x, u.tau_y, u.tau_z,
                ref.x - state.x, ref.y - state.y, ref.z - state.z,
                result.phi_d - state.phi,
                result.theta_d - state.theta,
                ref.psi_d - state.psi,
            )
        )
        if k < n - 1:
            try:
                state = step_rk4(state, u, cascade.plant, dt)
            except ValueError as exc:
                raise SimulationDiverged(t + dt, exc) from exc
    return tuple(rows)


def run_simulation(config: RunConfig) -> SimResult:
    references = build_references(config)
    cascade = build_cascade_config(config.plant, config.controller)
    rows = _run_loop(cascade, references, config.sim.dt)
    log = SimLog(dt=config.sim.dt, rows=rows)

    start, tpa, tpp = _metric_windows(config)
    first = min(int(round(start / config.sim.dt)), len(rows) - 2)
    dt = config.sim.dt
    att_series = [
        ErrorSeries(
            name,
            dt,
            [math.degrees(r[LOG_COLUMNS.index(f"e_{name}")]) for r in rows[first:]],
        )
        for name in ("phi", "theta", "psi")
    ]
    pos_series = [
        ErrorSeries(
            name, dt, [r[LOG_COLUMNS.index(f"e_{name}")] for r in rows[first:]]
        )
        for name in ("x", "y", "z")
    ]
    label = config.controller.mode
    attitude = report_for(label, att_series, tpa, units="deg")
    position = report_for(label, pos_series, tpp, units="m")
    return SimResult(
        log=log, attitude=attitude, position=position, references=tuple(references)
    )


# --- tuning campaigns ---


def _episode_cost(
    plant: QuadParams,
    controller: ControllerSettings,
    group: str,
    amplitude: float,
    episode_time: float,
    dt: float,
) -> Callable[[GainVector], float]:
    """Cost evaluator for one step episode: candidate gains installed on
    the named loop group, mean-square tracking error over the episode.

    Attitude episodes drive a roll step through the tilt override, so
    only the inner loops act; position episodes step x through the full
    cascade with the configured inner gains held fixed."""
    channel = "phi" if group == "inner" else "x"
    spec = StepSpec(channel=channel, amplitude=amplitude, t_start=0.0)
    references = sample_mission(spec, dt, episode_time)
    err_col = LOG_COLUMNS.index(f"e_{channel}")
    times = [k * dt for k in range(len(references))]
    t_final = times[-1]

    def cost(k: GainVector) -> float:
        candidate = FixedGains(*k, integral_limit=controller.integral_limit)
        fixed_outer = FixedGains(*controller.outer, integral_limit=controller.integral_limit)
        fixed_inner = FixedGains(*controller.inner, integral_limit=controller.integral_limit)
        outer = candidate if group == "outer" else fixed_outer
        inner = candidate if group == "inner" else fixed_inner
        cascade = CascadeConfig(
            plant=plant,
            x=outer, y=outer, z=outer,
            phi=inner, theta=inner, psi=inner,
            attitude_clamp=controller.attitude_clamp,
        )
        try:
            rows = _run_loop(cascade, references, dt)
        except SimulationDiverged:
            return PENALTY_COST
        errors = [r[err_col] for r in rows]
        if not all(math.isfinite(e) for e in errors):
            return PENALTY_COST
        return cost_from_series(times, errors, 0.0, t_final)

    return cost


@dataclass(frozen=True)
class TuneOutputs:
    inner: Optional[TuneResult]
    outer: Optional[TuneResult]
    tuned_config: Optional[Path]
    trace_files: tuple[Path, ...]


def run_tune(config: RunConfig, out_dir: str | Path) -> TuneOutputs:
    """Learn gain bands for the configured groups and write the tuned
    config plus per-group trace CSVs into out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tn = config.tuning
    results: dict[str, TuneResult] = {}
    traces: list[Path] = []
    for i, group in enumerate(tn.groups):
        if group == "inner":
            amplitudes = tn.attitude_amplitudes
            episode_time = tn.attitude_episode_time
            init_range = tn.inner_init_range
        else:
            amplitudes = tn.position_amplitudes
            episode_time = tn.position_episode_time
            init_range = tn.outer_init_range
        es_cfg = EsConfig(
            alpha=tn.alpha,
            delta=tn.delta,
            max_iters=tn.max_iters,
            restarts=tn.restarts,
            seed=tn.seed + i,  # distinct stream per group, still seed-determined
            init_range=init_range,
            tol=tn.tol,
            tol_iters=tn.tol_iters,
        )
        cost_small = _episode_cost(
            config.plant, config.controller, group, amplitudes[0], episode_time, config.sim.dt
        )
        cost_large = _episode_cost(
            config.plant, config.controller, group, amplitudes[1], episode_time, config.sim.dt
        )
        result = tune_bounds(
            es_cfg,
            cost_small,
            cost_large,
            delta1=config.controller.delta1,
            delta2=config.controller.delta2,
        )
        results[group] = result
        trace_path = out / f"tune_trace_{group}.csv"
        trace_path.write_text(
            "\n".join(trace_csv_rows(result.trace)) + "\n", encoding="utf-8", newline="\n"
        )
        traces.append(trace_path)
    tuned_path = write_tuned_config(
        config,
        out / "tuned_config.yaml",
        inner_schedules=results["inner"].schedules if "inner" in results else None,
        outer_schedules=results["outer"].schedules if "outer" in results else None,
    )
    return TuneOutputs(
        inner=results.get("inner"),
        outer=results.get("outer"),
        tuned_config=tuned_path,
        trace_files=tuple(traces),
    )


# --- comparison runs ---


class ConfigMismatch(ValueError):
    """Compared configs differ in plant, trajectory, or timing."""


@dataclass(frozen=True)
class CompareResult:
    baseline: SimResult
    candidate: SimResult
    attitude_rows: list
    position_rows: list


def as_pid_baseline(config: RunConfig) -> RunConfig:
    """The same mission with the controller forced to fixed-gain mode."""
    return replace(config, controller=replace(config.controller, mode="pid"))


def run_compare(config_a: RunConfig, config_b: RunConfig) -> CompareResult:
    """Run baseline (a) and candidate (b) on the identical mission and
    compare their metric reports."""
    from .metrics import compare  # local to keep module import cheap

    if config_a.plant != config_b.plant:
        raise ConfigMismatch("plant parameters differ")
    if config_a.trajectory != config_b.trajectory:
        raise ConfigMismatch("trajectory settings differ")
    if (config_a.sim.dt, config_a.sim.t_total) != (config_b.sim.dt, config_b.sim.t_total):
        raise ConfigMismatch("simulation grid differs")
    if config_a.scene_path != config_b.scene_path:
        raise ConfigMismatch("scene files differ")
    base = run_simulation(config_a)
    cand = run_simulation(config_b)
    return CompareResult(
        baseline=base,
        candidate=cand,
        attitude_rows=compare(base.attitude, cand.attitude),
        position_rows=compare(base.position, cand.position),
    )


def improvement_summary(rows, channels: Sequence[str], metric: str = "iae") -> float:
    """Mean improvement percentage of one metric over the named channels."""
    picked = [r.improvement_pct for r in rows if r.metric == metric and r.channel in channels]
    if not picked:
        raise ValueError(f"no rows for metric {metric} on channels {channels}")
    return sum(picked) / len(picked)
