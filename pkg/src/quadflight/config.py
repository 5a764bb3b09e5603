"""Structured run configuration.

One YAML file drives a run: plant constants, controller mode and gains,
trajectory selection, simulation grid, and tuner settings. Parsing is
strict: unknown keys anywhere are an error, so typos fail fast instead
of silently running defaults. `paper_defaults.yaml` (shipped as package
data) carries the reference constants.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

import yaml

from .control import CascadeConfig, ChannelGains, FixedGains, NlvgGains, NlvgSchedule
from .dynamics import QuadParams
from .planner import ObstacleSphere, PlanRequest
from .trajectory import (
    LissajousSpec,
    StepSpec,
    StormSpec,
    TrajectorySpec,
    YAW_MODES,
)


class ConfigError(ValueError):
    """Malformed, unknown, or inconsistent configuration content."""


def _require_mapping(value: Any, path: str) -> dict:
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(f"{path} must be a mapping")
    return value


def _check_keys(mapping: dict, allowed: set[str], path: str) -> None:
    unknown = sorted(set(mapping) - allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) {unknown} in {path}")


def _number(mapping: dict, key: str, default: float, path: str) -> float:
    value = mapping.get(key, default)
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(f"{path}.{key} must be a number")
    return float(value)


def _integer(mapping: dict, key: str, default: int, path: str) -> int:
    value = mapping.get(key, default)
    if not isinstance(value, int) or isinstance(value, bool):
        raise ConfigError(f"{path}.{key} must be an integer")
    return value


def _string(mapping: dict, key: str, default: str, path: str, choices=None) -> str:
    value = mapping.get(key, default)
    if not isinstance(value, str):
        raise ConfigError(f"{path}.{key} must be a string")
    if choices is not None and value not in choices:
        raise ConfigError(f"{path}.{key} must be one of {sorted(choices)}")
    return value


def _parse_plant(section: Any) -> QuadParams:
    sec = _require_mapping(section, "plant")
    allowed = {
        "mass", "ix", "iy", "iz", "gravity",
        "kdx", "kdy", "kdz", "thrust_max", "torque_max",
    }
    _check_keys(sec, allowed, "plant")
    defaults = QuadParams()
    kwargs = {
        key: _number(sec, key, getattr(defaults, key), "plant") for key in allowed
    }
    try:
        return QuadParams(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"plant: {exc}") from exc


def _parse_gain_triple(section: Any, path: str, default: FixedGains) -> tuple[float, float, float]:
    sec = _require_mapping(section, path)
    _check_keys(sec, {"kp", "ki", "kd"}, path)
    return (
        _number(sec, "kp", default.kp, path),
        _number(sec, "ki", default.ki, path),
        _number(sec, "kd", default.kd, path),
    )


def _parse_schedule_group(
    section: Any, path: str, delta1: float, delta2: float
) -> tuple[NlvgSchedule, NlvgSchedule, NlvgSchedule]:
    sec = _require_mapping(section, path)
    _check_keys(sec, {"p", "i", "d"}, path)
    out = []
    for name in ("p", "i", "d"):
        entry = _require_mapping(sec.get(name), f"{path}.{name}")
        _check_keys(entry, {"k1", "half_range"}, f"{path}.{name}")
        if "k1" not in entry:
            raise ConfigError(f"{path}.{name}.k1 is required")
        try:
            out.append(
                NlvgSchedule(
                    k1=_number(entry, "k1", 0.0, f"{path}.{name}"),
                    half_range=_number(entry, "half_range", 0.0, f"{path}.{name}"),
                    delta1=delta1,
                    delta2=delta2,
                )
            )
        except ValueError as exc:
            raise ConfigError(f"{path}.{name}: {exc}") from exc
    return tuple(out)


PAPER_OUTER = FixedGains(5.0, 0.2, 5.0)
PAPER_INNER = FixedGains(8.0, 0.1, 5.0)


@dataclass(frozen=True)
class ControllerSettings:
    mode: str  # "pid" | "nlvg"
    signal_pairing: str
    outer: tuple[float, float, float]
    inner: tuple[float, float, float]
    delta1: float
    delta2: float
    attitude_clamp: float
    integral_limit: float
    outer_schedules: Optional[tuple[NlvgSchedule, NlvgSchedule, NlvgSchedule]]
    inner_schedules: Optional[tuple[NlvgSchedule, NlvgSchedule, NlvgSchedule]]


def _parse_controller(section: Any) -> ControllerSettings:
    sec = _require_mapping(section, "controller")
    allowed = {
        "mode", "schedule_signals", "outer", "inner", "delta1", "delta2",
        "attitude_clamp", "integral_limit", "schedules",
    }
    _check_keys(sec, allowed, "controller")
    mode = _string(sec, "mode", "pid", "controller", {"pid", "nlvg"})
    pairing = _string(
        sec, "schedule_signals", "paper", "controller", {"paper", "matched"}
    )
    delta1 = _number(sec, "delta1", 0.01, "controller")
    delta2 = _number(sec, "delta2", 0.838, "controller")
    if not 0 <= delta1 < delta2:
        raise ConfigError("controller: need 0 <= delta1 < delta2")
    schedules = _require_mapping(sec.get("schedules"), "controller.schedules")
    _check_keys(schedules, {"outer", "inner"}, "controller.schedules")
    outer_sched = inner_sched = None
    if "outer" in schedules:
        outer_sched = _parse_schedule_group(
            schedules["outer"], "controller.schedules.outer", delta1, delta2
        )
    if "inner" in schedules:
        inner_sched = _parse_schedule_group(
            schedules["inner"], "controller.schedules.inner", delta1, delta2
        )
    if mode == "nlvg" and outer_sched is None and inner_sched is None:
        raise ConfigError("controller: nlvg mode needs at least one schedules group")
    return ControllerSettings(
        mode=mode,
        signal_pairing=pairing,
        outer=_parse_gain_triple(sec.get("outer"), "controller.outer", PAPER_OUTER),
        inner=_parse_gain_triple(sec.get("inner"), "controller.inner", PAPER_INNER),
        delta1=delta1,
        delta2=delta2,
        attitude_clamp=_number(sec, "attitude_clamp", 0.6, "controller"),
        integral_limit=_number(sec, "integral_limit", 10.0, "controller"),
        outer_schedules=outer_sched,
        inner_schedules=inner_sched,
    )


@dataclass(frozen=True)
class TrajectorySettings:
    kind: str  # "step" | "storm" | "lissajous" | "scene"
    spec: Optional[TrajectorySpec]
    yaw_mode: str


def _parse_trajectory(section: Any) -> TrajectorySettings:
    sec = _require_mapping(section, "trajectory")
    allowed = {"kind", "yaw_mode", "step", "storm", "lissajous"}
    _check_keys(sec, allowed, "trajectory")
    kind = _string(
        sec, "kind", "step", "trajectory", {"step", "storm", "lissajous", "scene"}
    )
    yaw_mode = _string(sec, "yaw_mode", "zero", "trajectory", set(YAW_MODES))
    spec: Optional[TrajectorySpec] = None
    try:
        if kind == "step":
            sub = _require_mapping(sec.get("step"), "trajectory.step")
            _check_keys(sub, {"channel", "amplitude", "t_start"}, "trajectory.step")
            spec = StepSpec(
                channel=_string(sub, "channel", "phi", "trajectory.step"),
                amplitude=_number(sub, "amplitude", 0.5, "trajectory.step"),
                t_start=_number(sub, "t_start", 1.0, "trajectory.step"),
            )
        elif kind == "storm":
            sub = _require_mapping(sec.get("storm"), "trajectory.storm")
            keys = {
                "r0", "radial_rate", "omega", "z0", "climb_rate",
                "t_takeoff", "ramp_time",
            }
            _check_keys(sub, keys, "trajectory.storm")
            base = StormSpec()
            spec = StormSpec(
                **{k: _number(sub, k, getattr(base, k), "trajectory.storm") for k in keys}
            )
        elif kind == "lissajous":
            sub = _require_mapping(sec.get("lissajous"), "trajectory.lissajous")
            float_keys = {
                "amp_x", "amp_y", "amp_z", "phase", "omega", "z0",
                "t_takeoff", "ramp_time",
            }
            int_keys = {"a", "b", "c"}
            _check_keys(sub, float_keys | int_keys, "trajectory.lissajous")
            base = LissajousSpec()
            kwargs: dict[str, Any] = {
                k: _number(sub, k, getattr(base, k), "trajectory.lissajous")
                for k in float_keys
            }
            kwargs.update(
                {
                    k: _integer(sub, k, getattr(base, k), "trajectory.lissajous")
                    for k in int_keys
                }
            )
            spec = LissajousSpec(**kwargs)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"trajectory: {exc}") from exc
    return TrajectorySettings(kind=kind, spec=spec, yaw_mode=yaw_mode)


@dataclass(frozen=True)
class SimSettings:
    dt: float
    t_total: float
    seed: int
    # None = pick by trajectory kind (step onset and the standard windows
    # for steps, the whole run for paths)
    metrics_start: Optional[float]
    t_peak_attitude: Optional[float]
    t_peak_position: Optional[float]


def _parse_sim(section: Any) -> SimSettings:
    sec = _require_mapping(section, "sim")
    allowed = {
        "dt", "t_total", "seed", "metrics_start",
        "t_peak_attitude", "t_peak_position",
    }
    _check_keys(sec, allowed, "sim")
    dt = _number(sec, "dt", 0.01, "sim")
    t_total = _number(sec, "t_total", 140.0, "sim")
    if dt <= 0 or t_total < dt:
        raise ConfigError("sim: need dt > 0 and t_total >= dt")

    def optional(key: str) -> Optional[float]:
        if sec.get(key) is None:
            return None
        return _number(sec, key, 0.0, "sim")

    return SimSettings(
        dt=dt,
        t_total=t_total,
        seed=_integer(sec, "seed", 0, "sim"),
        metrics_start=optional("metrics_start"),
        t_peak_attitude=optional("t_peak_attitude"),
        t_peak_position=optional("t_peak_position"),
    )


@dataclass(frozen=True)
class TuneSettings:
    alpha: float
    delta: float
    max_iters: int
    restarts: int
    seed: int
    tol: float
    tol_iters: int
    groups: tuple[str, ...]  # subset of ("inner", "outer")
    attitude_amplitudes: tuple[float, float]  # small, large (rad)
    position_amplitudes: tuple[float, float]  # small, large (m)
    attitude_episode_time: float
    position_episode_time: float
    inner_init_range: tuple[tuple[float, float], ...]
    outer_init_range: tuple[tuple[float, float], ...]


def _parse_pair(section: dict, key: str, default: tuple[float, float], path: str):
    value = section.get(key, list(default))
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        raise ConfigError(f"{path}.{key} must be [small, large]")
    return (float(value[0]), float(value[1]))


def _parse_init_range(section: dict, key: str, default, path: str):
    value = section.get(key)
    if value is None:
        return default
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        raise ConfigError(f"{path}.{key} must list [low, high] for kp, ki, kd")
    out = []
    for pair in value:
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise ConfigError(f"{path}.{key} must list [low, high] for kp, ki, kd")
        out.append((float(pair[0]), float(pair[1])))
    return tuple(out)


def _parse_tuning(section: Any, sim_seed: int) -> TuneSettings:
    sec = _require_mapping(section, "tuning")
    allowed = {
        "alpha", "delta", "max_iters", "restarts", "seed", "tol", "tol_iters",
        "groups", "attitude_amplitudes", "position_amplitudes",
        "attitude_episode_time", "position_episode_time",
        "inner_init_range", "outer_init_range",
    }
    _check_keys(sec, allowed, "tuning")
    groups = sec.get("groups", ["inner", "outer"])
    if not isinstance(groups, (list, tuple)) or not groups or any(
        g not in ("inner", "outer") for g in groups
    ):
        raise ConfigError("tuning.groups must be a nonempty subset of [inner, outer]")
    return TuneSettings(
        alpha=_number(sec, "alpha", 0.05, "tuning"),
        delta=_number(sec, "delta", 0.01, "tuning"),
        max_iters=_integer(sec, "max_iters", 30, "tuning"),
        restarts=_integer(sec, "restarts", 5, "tuning"),
        seed=_integer(sec, "seed", sim_seed, "tuning"),
        tol=_number(sec, "tol", 1e-6, "tuning"),
        tol_iters=_integer(sec, "tol_iters", 5, "tuning"),
        groups=tuple(groups),
        attitude_amplitudes=_parse_pair(sec, "attitude_amplitudes", (0.05, 0.5), "tuning"),
        position_amplitudes=_parse_pair(sec, "position_amplitudes", (0.2, 2.0), "tuning"),
        attitude_episode_time=_number(sec, "attitude_episode_time", 2.0, "tuning"),
        position_episode_time=_number(sec, "position_episode_time", 4.0, "tuning"),
        inner_init_range=_parse_init_range(
            sec, "inner_init_range", ((0.0, 12.0), (0.0, 1.0), (0.0, 8.0)), "tuning"
        ),
        outer_init_range=_parse_init_range(
            sec, "outer_init_range", ((0.0, 10.0), (0.0, 1.0), (0.0, 8.0)), "tuning"
        ),
    )


@dataclass(frozen=True)
class RunConfig:
    plant: QuadParams
    controller: ControllerSettings
    trajectory: TrajectorySettings
    sim: SimSettings
    tuning: TuneSettings
    scene_path: Optional[str]
    raw: dict  # parsed YAML, kept for fragment rewriting
    source: Optional[str] = None  # where it was loaded from


TOP_LEVEL_KEYS = {"plant", "controller", "trajectory", "sim", "tuning", "scene"}


def parse_config(data: dict, source: Optional[str] = None) -> RunConfig:
    data = _require_mapping(data, "config")
    _check_keys(data, TOP_LEVEL_KEYS, "config")
    sim = _parse_sim(data.get("sim"))
    scene = data.get("scene")
    if scene is not None and not isinstance(scene, str):
        raise ConfigError("scene must be a file path string")
    trajectory = _parse_trajectory(data.get("trajectory"))
    if trajectory.kind == "scene" and scene is None:
        raise ConfigError("trajectory.kind=scene requires a top-level scene path")
    return RunConfig(
        plant=_parse_plant(data.get("plant")),
        controller=_parse_controller(data.get("controller")),
        trajectory=trajectory,
        sim=sim,
        tuning=_parse_tuning(data.get("tuning"), sim.seed),
        scene_path=scene,
        raw=data,
        source=source,
    )


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from exc
    cfg = parse_config(data or {}, source=str(path))
    if cfg.scene_path is not None:
        scene_file = Path(cfg.scene_path)
        if not scene_file.is_absolute():
            scene_file = path.parent / scene_file
        if not scene_file.exists():
            raise ConfigError(f"scene file not found: {scene_file}")
        cfg = RunConfig(
            plant=cfg.plant,
            controller=cfg.controller,
            trajectory=cfg.trajectory,
            sim=cfg.sim,
            tuning=cfg.tuning,
            scene_path=str(scene_file),
            raw=cfg.raw,
            source=cfg.source,
        )
    return cfg


def paper_defaults_path() -> Path:
    resource = importlib.resources.files("quadflight") / "configs" / "paper_defaults.yaml"
    return Path(str(resource))


def load_paper_defaults() -> RunConfig:
    return load_config(paper_defaults_path())


def _channel_gains(
    settings: ControllerSettings,
    fixed: tuple[float, float, float],
    schedules,
) -> ChannelGains:
    if settings.mode == "nlvg" and schedules is not None:
        return NlvgGains(
            p=schedules[0],
            i=schedules[1],
            d=schedules[2],
            signal_pairing=settings.signal_pairing,
            integral_limit=settings.integral_limit,
        )
    return FixedGains(*fixed, integral_limit=settings.integral_limit)


def build_cascade_config(plant: QuadParams, settings: ControllerSettings) -> CascadeConfig:
    """Wire the configured gain mode into the six-loop cascade. In nlvg
    mode a loop group without schedules keeps its fixed gains."""
    outer = _channel_gains(settings, settings.outer, settings.outer_schedules)
    inner = _channel_gains(settings, settings.inner, settings.inner_schedules)
    return CascadeConfig(
        plant=plant,
        x=outer, y=outer, z=outer,
        phi=inner, theta=inner, psi=inner,
        attitude_clamp=settings.attitude_clamp,
    )


SCENE_KEYS = {"waypoints", "obstacles", "corridor", "limits", "sample_dt"}


def parse_scene(data: dict, source: str = "scene") -> tuple[PlanRequest, list[ObstacleSphere]]:
    data = _require_mapping(data, source)
    _check_keys(data, SCENE_KEYS, source)
    waypoints = data.get("waypoints")
    if not isinstance(waypoints, list) or len(waypoints) < 2:
        raise ConfigError(f"{source}: need at least 2 waypoints")
    for w in waypoints:
        if not isinstance(w, (list, tuple)) or len(w) != 3:
            raise ConfigError(f"{source}: each waypoint must be [x, y, z]")
    corridor = _require_mapping(data.get("corridor"), f"{source}.corridor")
    _check_keys(corridor, {"z_min", "z_max"}, f"{source}.corridor")
    limits = _require_mapping(data.get("limits"), f"{source}.limits")
    _check_keys(limits, {"v_max", "a_max"}, f"{source}.limits")
    try:
        request = PlanRequest(
            waypoints=tuple(tuple(float(c) for c in w) for w in waypoints),
            v_max=_number(limits, "v_max", 2.0, f"{source}.limits"),
            a_max=_number(limits, "a_max", 2.0, f"{source}.limits"),
            z_min=_number(corridor, "z_min", 0.0, f"{source}.corridor"),
            z_max=_number(corridor, "z_max", 50.0, f"{source}.corridor"),
            sample_dt=_number(data, "sample_dt", 0.05, source),
        )
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    obstacles = []
    for i, entry in enumerate(data.get("obstacles") or []):
        entry = _require_mapping(entry, f"{source}.obstacles[{i}]")
        _check_keys(entry, {"id", "center", "r_safe"}, f"{source}.obstacles[{i}]")
        center = entry.get("center")
        if not isinstance(center, (list, tuple)) or len(center) != 3:
            raise ConfigError(f"{source}.obstacles[{i}].center must be [x, y, z]")
        try:
            obstacles.append(
                ObstacleSphere(
                    center=tuple(float(c) for c in center),
                    r_safe=_number(entry, "r_safe", 1.0, f"{source}.obstacles[{i}]"),
                    id=str(entry.get("id", f"obstacle{i}")),
                )
            )
        except ValueError as exc:
            raise ConfigError(f"{source}.obstacles[{i}]: {exc}") from exc
    return request, obstacles


def load_scene(path: str | Path) -> tuple[PlanRequest, list[ObstacleSphere]]:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"scene file not found: {path}")
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from exc
    return parse_scene(data or {}, source=str(path))


def schedules_to_mapping(
    schedules: tuple[NlvgSchedule, NlvgSchedule, NlvgSchedule]
) -> dict:
    return {
        name: {"k1": float(s.k1), "half_range": float(s.half_range)}
        for name, s in zip(("p", "i", "d"), schedules)
    }


def write_tuned_config(
    base: RunConfig,
    out_path: str | Path,
    inner_schedules=None,
    outer_schedules=None,
) -> Path:
    """Full runnable config equal to `base` but in nlvg mode with the
    learned schedules installed."""
    data = yaml.safe_load(yaml.safe_dump(base.raw))  # deep copy
    controller = data.setdefault("controller", {}) or {}
    controller["mode"] = "nlvg"
    schedules = controller.setdefault("schedules", {}) or {}
    if inner_schedules is not None:
        schedules["inner"] = schedules_to_mapping(inner_schedules)
    if outer_schedules is not None:
        schedules["outer"] = schedules_to_mapping(outer_schedules)
    controller["schedules"] = schedules
    data["controller"] = controller
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(yaml.safe_dump(data, sort_keys=True), encoding="utf-8")
    parse_config(yaml.safe_load(out.read_text(encoding="utf-8")), source=str(out))
    return out
