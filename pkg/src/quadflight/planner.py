"""Sphere-threat route planner with cubic Bezier detours.

Straight route legs are tested against threat spheres by exact
line/sphere intersection. A conflicted stretch is replaced by two cubic
Bezier segments through an apex placed above or below the sphere
(shorter Euclidean detour wins, ties go up); when the altitude corridor
blocks both apexes the detour sidesteps horizontally instead. Joins
introduced by the planner are tangent-direction continuous; corners of
the input polyline stay corners.

Clearance is verified by sampling. If any sample comes closer than
R_safe to a sphere center, the apex margin is inflated (x1.5, up to 5
times) and the path rebuilt; exhausting the retries raises
PlanInfeasible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional, Sequence

from .trajectory import ReferenceSample, wrap_to_pi

Point = tuple[float, float, float]

DEFAULT_MARGIN = 0.5  # m, added to R_safe for apex placement
MARGIN_GROWTH = 1.5
MAX_MARGIN_RETRIES = 5
MIN_DURATION = 0.01  # s, floor for degenerate segments


class NoVerticalRoom(ValueError):
    """Both vertical apex candidates violate the altitude corridor."""


class PlanInfeasible(ValueError):
    """No clearance-respecting detour found within the margin retries."""


def _sub(a: Point, b: Point) -> Point:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def _add(a: Point, b: Point) -> Point:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def _scale(a: Point, s: float) -> Point:
    return (a[0] * s, a[1] * s, a[2] * s)


def _dot(a: Point, b: Point) -> float:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _norm(a: Point) -> float:
    return math.sqrt(_dot(a, a))


def _lerp(a: Point, b: Point, t: float) -> Point:
    return _add(a, _scale(_sub(b, a), t))


def _unit(a: Point) -> Point:
    n = _norm(a)
    if n < 1e-12:
        raise ValueError("cannot normalize a zero vector")
    return _scale(a, 1.0 / n)


@dataclass(frozen=True)
class ObstacleSphere:
    center: Point
    r_safe: float
    id: str = ""

    def __post_init__(self) -> None:
        if self.r_safe <= 0:
            raise ValueError("r_safe must be positive")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))


@dataclass(frozen=True)
class PlanRequest:
    waypoints: tuple[Point, ...]
    v_max: float = 2.0
    a_max: float = 2.0
    z_min: float = 0.0
    z_max: float = 50.0
    sample_dt: float = 0.05

    def __post_init__(self) -> None:
        wps = tuple(tuple(float(c) for c in w) for w in self.waypoints)
        if len(wps) < 2:
            raise ValueError("need at least 2 waypoints")
        if self.v_max <= 0 or self.a_max <= 0:
            raise ValueError("v_max and a_max must be positive")
        if self.z_min >= self.z_max:
            raise ValueError("need z_min < z_max")
        if self.sample_dt <= 0:
            raise ValueError("sample_dt must be positive")
        object.__setattr__(self, "waypoints", wps)


@dataclass(frozen=True)
class BezierSegment:
    """Cubic curve; control points p0..p3, flown over `duration` seconds."""

    p0: Point
    p1: Point
    p2: Point
    p3: Point
    duration: float = 1.0

    def __post_init__(self) -> None:
        if self.duration <= 0:
            raise ValueError("duration must be positive")
        for name in ("p0", "p1", "p2", "p3"):
            object.__setattr__(self, name, tuple(float(c) for c in getattr(self, name)))

    def position(self, u: float) -> Point:
        v = 1.0 - u
        return _add(
            _add(_scale(self.p0, v**3), _scale(self.p1, 3 * v * v * u)),
            _add(_scale(self.p2, 3 * v * u * u), _scale(self.p3, u**3)),
        )

    def deriv(self, u: float) -> Point:
        """dB/du (divide by duration for velocity)."""
        v = 1.0 - u
        return _add(
            _add(
                _scale(_sub(self.p1, self.p0), 3 * v * v),
                _scale(_sub(self.p2, self.p1), 6 * v * u),
            ),
            _scale(_sub(self.p3, self.p2), 3 * u * u),
        )

    def deriv2(self, u: float) -> Point:
        """d2B/du2 (divide by duration^2 for acceleration)."""
        a = _add(_sub(self.p2, _scale(self.p1, 2.0)), self.p0)
        b = _add(_sub(self.p3, _scale(self.p2, 2.0)), self.p1)
        return _add(_scale(a, 6 * (1.0 - u)), _scale(b, 6 * u))


def straight_segment(a: Point, b: Point, duration: float = 1.0) -> BezierSegment:
    """Degenerate cubic along a-b with control points at the thirds, so
    the parametric speed is constant."""
    return BezierSegment(a, _lerp(a, b, 1 / 3), _lerp(a, b, 2 / 3), b, duration)


@dataclass(frozen=True)
class PlannedPath:
    segments: tuple[BezierSegment, ...]
    clearance: float = math.inf  # min sampled distance to any sphere center
    velocity_ok: bool = False
    accel_ok: bool = False
    corridor_ok: bool = True
    lateral_ids: tuple[str, ...] = ()  # spheres dodged sideways, not vertically

    @property
    def duration(self) -> float:
        return sum(s.duration for s in self.segments)


class Conflict(NamedTuple):
    leg: int
    sphere_id: str
    entry: float  # leg parameter in [0, 1]
    exit: float


def _leg_sphere_window(a: Point, b: Point, sphere: ObstacleSphere):
    """Intersection parameter window of segment a-b with the closed
    sphere, or None."""
    d = _sub(b, a)
    m = _sub(a, sphere.center)
    qa = _dot(d, d)
    if qa < 1e-18:
        return (0.0, 0.0) if _norm(m) <= sphere.r_safe else None
    qb = 2.0 * _dot(m, d)
    qc = _dot(m, m) - sphere.r_safe**2
    disc = qb * qb - 4.0 * qa * qc
    if disc < 0.0:
        return None
    root = math.sqrt(disc)
    s1 = (-qb - root) / (2.0 * qa)
    s2 = (-qb + root) / (2.0 * qa)
    if s2 < 0.0 or s1 > 1.0:
        return None
    return (max(s1, 0.0), min(s2, 1.0))


def detect_conflicts(
    request: PlanRequest, obstacles: Sequence[ObstacleSphere]
) -> list[Conflict]:
    """All leg/sphere intersections, ordered along the route. Tangency
    counts (closed spheres)."""
    conflicts = []
    for i in range(len(request.waypoints) - 1):
        a, b = request.waypoints[i], request.waypoints[i + 1]
        for sphere in obstacles:
            window = _leg_sphere_window(a, b, sphere)
            if window is not None:
                conflicts.append(Conflict(i, sphere.id, window[0], window[1]))
    conflicts.sort(key=lambda c: (c.leg, c.entry))
    return conflicts


def _apex_xy(request: PlanRequest, conflict: Conflict) -> tuple[float, float]:
    a = request.waypoints[conflict.leg]
    b = request.waypoints[conflict.leg + 1]
    entry = _lerp(a, b, conflict.entry)
    exit_ = _lerp(a, b, conflict.exit)
    return 0.5 * (entry[0] + exit_[0]), 0.5 * (entry[1] + exit_[1])


def vertical_decision(
    conflict: Conflict,
    sphere: ObstacleSphere,
    request: PlanRequest,
    margin: float = DEFAULT_MARGIN,
) -> str:
    """"over" or "under": whichever apex gives the shorter Euclidean
    entry-apex-exit detour while staying inside the altitude corridor.
    Ties go over."""
    a = request.waypoints[conflict.leg]
    b = request.waypoints[conflict.leg + 1]
    entry = _lerp(a, b, conflict.entry)
    exit_ = _lerp(a, b, conflict.exit)
    mx, my = _apex_xy(request, conflict)
    offset = sphere.r_safe + margin
    costs = {}
    for name, z in (("over", sphere.center[2] + offset), ("under", sphere.center[2] - offset)):
        if request.z_min <= z <= request.z_max:
            apex = (mx, my, z)
            costs[name] = _norm(_sub(apex, entry)) + _norm(_sub(exit_, apex))
    if not costs:
        raise NoVerticalRoom(f"no corridor room over or under sphere {sphere.id!r}")
    if len(costs) == 2 and costs["under"] >= costs["over"] - 1e-12:
        return "over"
    return min(costs, key=costs.get)  # type: ignore[arg-type]


def _detour_apex(
    request: PlanRequest,
    conflict: Conflict,
    sphere: ObstacleSphere,
    margin: float,
) -> tuple[Point, bool]:
    """Apex point for one conflict; second value flags a lateral dodge."""
    mx, my = _apex_xy(request, conflict)
    offset = sphere.r_safe + margin
    try:
        side = vertical_decision(conflict, sphere, request, margin)
        z = sphere.center[2] + (offset if side == "over" else -offset)
        return (mx, my, z), False
    except NoVerticalRoom:
        a = request.waypoints[conflict.leg]
        b = request.waypoints[conflict.leg + 1]
        d = _sub(b, a)
        horiz = (d[0], d[1], 0.0)
        if _norm(horiz) < 1e-9:
            normal = (1.0, 0.0, 0.0)
        else:
            u = _unit(horiz)
            normal = (-u[1], u[0], 0.0)
        entry = _lerp(a, b, conflict.entry)
        exit_ = _lerp(a, b, conflict.exit)
        best = None
        for sign in (1.0, -1.0):
            apex = _add(
                (sphere.center[0], sphere.center[1], sphere.center[2]),
                _scale(normal, sign * offset),
            )
            if not (request.z_min <= apex[2] <= request.z_max):
                continue
            cost = _norm(_sub(apex, entry)) + _norm(_sub(exit_, apex))
            if best is None or cost < best[0] - 1e-12:
                best = (cost, apex)
        if best is None:
            raise PlanInfeasible(
                f"sphere {sphere.id!r}: no vertical or lateral room"
            ) from None
        return best[1], True


def _detour_segments(approach: Point, apex: Point, depart: Point, leg_dir: Point):
    """Two cubics approach->apex->depart with matched tangent directions
    at every join (leg direction at the ends, a shared tangent at the
    apex)."""
    through = _sub(depart, approach)
    apex_tangent = _unit(through) if _norm(through) > 1e-9 else leg_dir
    l1 = _norm(_sub(apex, approach)) / 3.0
    l2 = _norm(_sub(depart, apex)) / 3.0
    seg1 = BezierSegment(
        approach,
        _add(approach, _scale(leg_dir, l1)),
        _sub(apex, _scale(apex_tangent, l1)),
        apex,
    )
    seg2 = BezierSegment(
        apex,
        _add(apex, _scale(apex_tangent, l2)),
        _sub(depart, _scale(leg_dir, l2)),
        depart,
    )
    return seg1, seg2


def _build_geometry(
    request: PlanRequest, obstacles: Sequence[ObstacleSphere], margin: float
) -> tuple[list[BezierSegment], list[str]]:
    by_id = {s.id: s for s in obstacles}
    conflicts = detect_conflicts(request, obstacles)
    by_leg: dict[int, list[Conflict]] = {}
    for c in conflicts:
        by_leg.setdefault(c.leg, []).append(c)

    segments: list[BezierSegment] = []
    lateral: list[str] = []
    for i in range(len(request.waypoints) - 1):
        a, b = request.waypoints[i], request.waypoints[i + 1]
        leg_len = _norm(_sub(b, a))
        if leg_len < 1e-12:
            continue
        d_hat = _unit(_sub(b, a))
        cursor = 0.0
        for c in by_leg.get(i, ()):
            sphere = by_id[c.sphere_id]
            standoff = 2.0 * sphere.r_safe / leg_len  # l_s as a leg parameter
            t_in = max(c.entry - standoff, cursor)
            t_out = min(c.exit + standoff, 1.0)
            if t_out <= cursor:
                continue
            approach = _lerp(a, b, t_in)
            depart = _lerp(a, b, t_out)
            apex, is_lateral = _detour_apex(request, c, sphere, margin)
            if is_lateral:
                lateral.append(c.sphere_id)
            if t_in > cursor + 1e-12:
                segments.append(straight_segment(_lerp(a, b, cursor), approach))
            segments.extend(_detour_segments(approach, apex, depart, d_hat))
            cursor = t_out
        if cursor < 1.0 - 1e-12:
            segments.append(straight_segment(_lerp(a, b, cursor), b))
    return segments, lateral


def _min_clearance(
    segments: Sequence[BezierSegment], obstacles: Sequence[ObstacleSphere]
) -> tuple[float, float]:
    """(worst deficit, min distance-to-center) over dense samples.
    Deficit is distance-to-center minus that sphere's r_safe; negative
    means the path cuts inside a safety sphere. (+inf, +inf) with no
    obstacles."""
    if not obstacles:
        return math.inf, math.inf
    worst_deficit = math.inf
    min_center = math.inf
    for seg in segments:
        chord = _norm(_sub(seg.p3, seg.p0))
        n = max(32, int(chord / 0.02))
        for k in range(n + 1):
            p = seg.position(k / n)
            for sphere in obstacles:
                dist = _norm(_sub(p, sphere.center))
                worst_deficit = min(worst_deficit, dist - sphere.r_safe)
                min_center = min(min_center, dist)
    return worst_deficit, min_center


def _corridor_ok(segments: Sequence[BezierSegment], request: PlanRequest) -> bool:
    for seg in segments:
        for k in range(65):
            z = seg.position(k / 64)[2]
            if z < request.z_min - 1e-9 or z > request.z_max + 1e-9:
                return False
    return True


def plan_detour(
    request: PlanRequest,
    obstacles: Sequence[ObstacleSphere] = (),
    margin: float = DEFAULT_MARGIN,
) -> PlannedPath:
    """Geometric plan: polyline legs with conflicted stretches replaced
    by Bezier detours. Durations are placeholders until
    time_parameterize."""
    current = margin
    last_deficit = -math.inf
    for _ in range(MAX_MARGIN_RETRIES + 1):
        segments, lateral = _build_geometry(request, obstacles, current)
        deficit, min_center = _min_clearance(segments, obstacles)
        if deficit >= -1e-9:
            return PlannedPath(
                segments=tuple(segments),
                clearance=min_center,
                corridor_ok=_corridor_ok(segments, request),
                lateral_ids=tuple(dict.fromkeys(lateral)),
            )
        last_deficit = deficit
        current *= MARGIN_GROWTH
    raise PlanInfeasible(
        f"clearance still violated by {-last_deficit:.3f} m after "
        f"{MAX_MARGIN_RETRIES} margin inflations"
    )


def time_parameterize(path: PlannedPath, v_max: float, a_max: float) -> PlannedPath:
    """Minimal per-segment durations meeting the speed and acceleration
    caps (sampled Bezier derivative bounds)."""
    if v_max <= 0 or a_max <= 0:
        raise ValueError("v_max and a_max must be positive")
    timed = []
    for seg in path.segments:
        n = 256
        dmax = max(_norm(seg.deriv(k / n)) for k in range(n + 1))
        d2max = max(_norm(seg.deriv2(k / n)) for k in range(n + 1))
        duration = max(dmax / v_max, math.sqrt(d2max / a_max), MIN_DURATION)
        timed.append(replace(seg, duration=duration))
    return replace(
        path, segments=tuple(timed), velocity_ok=True, accel_ok=True
    )


def sample_path(
    path: PlannedPath, dt: float, yaw_mode: str = "zero"
) -> list[ReferenceSample]:
    """Uniform-dt reference samples over the timed path (the exact final
    time is appended when it falls off the grid)."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    total = path.duration
    times = [k * dt for k in range(int(total / dt) + 1)]
    if times[-1] < total - 1e-9:
        times.append(total)

    starts = []
    t0 = 0.0
    for seg in path.segments:
        starts.append(t0)
        t0 += seg.duration

    samples = []
    prev_psi: Optional[float] = None
    idx = 0
    for t in times:
        while idx + 1 < len(path.segments) and t >= starts[idx + 1] - 1e-12:
            idx += 1
        seg = path.segments[idx]
        u = min(max((t - starts[idx]) / seg.duration, 0.0), 1.0)
        pos = seg.position(u)
        vel = _scale(seg.deriv(u), 1.0 / seg.duration)
        acc = _scale(seg.deriv2(u), 1.0 / seg.duration**2)
        psi = 0.0
        if yaw_mode == "tangent":
            speed = math.hypot(vel[0], vel[1])
            if speed < 1e-9:
                psi = prev_psi if prev_psi is not None else 0.0
            else:
                raw = math.atan2(vel[1], vel[0])
                psi = raw if prev_psi is None else prev_psi + wrap_to_pi(raw - prev_psi)
            prev_psi = psi
        elif yaw_mode != "zero":
            raise ValueError("yaw_mode must be 'zero' or 'tangent'")
        samples.append(
            ReferenceSample(
                t, pos[0], pos[1], pos[2], vel[0], vel[1], vel[2], acc[0], acc[1], psi
            )
        )
    return samples
