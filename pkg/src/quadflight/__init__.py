"""Deterministic quadcopter flight-control workbench.

Wrench-level 6-DOF dynamics under RK4, a cascaded PID controller whose
gains can slide between learned bounds (cosine blend on the tracking
signals), an extremum-seeking tuner that learns those bounds from step
episodes, sphere-threat path planning with Bezier detours, reference
trajectory generators, and IAE/ITAE/ITSE comparison tooling.
"""

from .control import (
    CascadeConfig,
    CascadeResult,
    FixedGains,
    NlvgGains,
    NlvgSchedule,
    cascade_update,
    nlvg_gain,
    pid_step,
    reset,
)
from .dynamics import (
    ControlInput,
    GimbalLockError,
    NonFiniteError,
    QuadParams,
    StateVector,
    derivative,
    hover_input,
    saturate,
    step_rk4,
)
from .metrics import (
    ErrorSeries,
    MetricReport,
    MismatchedChannels,
    WindowTooLong,
    compare,
    iae,
    itae,
    itse,
    report_for,
)
from .planner import (
    BezierSegment,
    NoVerticalRoom,
    ObstacleSphere,
    PlanInfeasible,
    PlannedPath,
    PlanRequest,
    detect_conflicts,
    plan_detour,
    sample_path,
    time_parameterize,
    vertical_decision,
)
from .trajectory import (
    LissajousSpec,
    ReferenceSample,
    StepSpec,
    StormSpec,
    lissajous_reference,
    mission_reference,
    sample_mission,
    step_reference,
    storm_reference,
    yaw_policy,
)
from .tuning import (
    EsConfig,
    GainVector,
    TuneResult,
    es_descend,
    grad_estimate,
    tune_bounds,
)
from .config import (
    ConfigError,
    RunConfig,
    build_cascade_config,
    load_config,
    load_paper_defaults,
    load_scene,
    paper_defaults_path,
    parse_config,
    parse_scene,
    write_tuned_config,
)
from .sim import (
    ConfigMismatch,
    SimLog,
    SimResult,
    SimulationDiverged,
    as_pid_baseline,
    improvement_summary,
    run_compare,
    run_simulation,
    run_tune,
)

__version__ = "0.1.0"

__all__ = [
    "CascadeConfig",
    "CascadeResult",
    "FixedGains",
    "NlvgGains",
    "NlvgSchedule",
    "cascade_update",
    "nlvg_gain",
    "pid_step",
    "reset",
    "ControlInput",
    "GimbalLockError",
    "NonFiniteError",
    "QuadParams",
    "StateVector",
    "derivative",
    "hover_input",
    "saturate",
    "step_rk4",
    "ErrorSeries",
    "MetricReport",
    "MismatchedChannels",
    "WindowTooLong",
    "compare",
    "iae",
    "itae",
    "itse",
    "report_for",
    "BezierSegment",
    "NoVerticalRoom",
    "ObstacleSphere",
    "PlanInfeasible",
    "PlannedPath",
    "PlanRequest",
    "detect_conflicts",
    "plan_detour",
    "sample_path",
    "time_parameterize",
    "vertical_decision",
    "LissajousSpec",
    "ReferenceSample",
    "StepSpec",
    "StormSpec",
    "lissajous_reference",
    "mission_reference",
    "sample_mission",
    "step_reference",
    "storm_reference",
    "yaw_policy",
    "EsConfig",
    "GainVector",
    "TuneResult",
    "ConfigError",
    "RunConfig",
    "build_cascade_config",
    "load_config",
    "load_paper_defaults",
    "load_scene",
    "paper_defaults_path",
    "parse_config",
    "parse_scene",
    "write_tuned_config",
    "ConfigMismatch",
    "SimLog",
    "SimResult",
    "SimulationDiverged",
    "as_pid_baseline",
    "improvement_summary",
    "run_compare",
    "run_simulation",
    "run_tune",
    "es_descend",
    "grad_estimate",
    "tune_bounds",
]
