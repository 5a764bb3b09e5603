"""Extremum-seeking gain search.

The cost of a gain triple is the mean-square tracking error of a
simulated step episode. A finite-difference gradient (central where the
perturbed gain stays nonnegative, forward otherwise) drives plain
projected descent:

    K <- max(K - alpha * grad J(K), 0)

`tune_bounds` runs two restart campaigns of this descent, one on a
small-amplitude episode and one on a large-amplitude episode, and turns
the two winners K1/K2 into per-gain blend schedules with half-range
A = max(0, (K2 - K1)/2). Everything is a pure function of the config
and seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .control import NlvgSchedule

_trapz = getattr(np, "trapezoid", None) or np.trapz

PENALTY_COST = 1e6  # assigned to episodes that blow up

CostFn = Callable[["GainVector"], float]


class GainVector(NamedTuple):
    kp: float
    ki: float
    kd: float

    def project(self) -> "GainVector":
        return GainVector(max(self.kp, 0.0), max(self.ki, 0.0), max(self.kd, 0.0))


@dataclass(frozen=True)
class EsConfig:
    alpha: float = 0.05
    delta: float = 0.01
    max_iters: int = 50
    restarts: int = 5
    seed: int = 0
    # (low, high) init window per gain component
    init_range: tuple[tuple[float, float], ...] = ((0.0, 10.0), (0.0, 1.0), (0.0, 10.0))
    tol: float = 1e-6
    tol_iters: int = 5

    def __post_init__(self) -> None:
        if self.alpha <= 0 or self.delta <= 0:
            raise ValueError("alpha and delta must be positive")
        if self.restarts < 1 or self.max_iters < 1:
            raise ValueError("restarts and max_iters must be >= 1")
        if len(self.init_range) != 3 or any(lo > hi for lo, hi in self.init_range):
            raise ValueError("init_range needs (low <= high) per gain component")


def cost_from_series(times: Sequence[float], errors: Sequence[float], t0: float, tf: float) -> float:
    """Mean-square error over [t0, tf]: (1/(tf-t0)) * integral e^2 dt,
    trapezoid with interpolated window ends."""
    t = np.asarray(times, dtype=float)
    e = np.asarray(errors, dtype=float)
    if t.ndim != 1 or t.shape != e.shape or t.size < 2:
        raise ValueError("times and errors must be matching 1-D series")
    if not (t[0] <= t0 < tf <= t[-1] + 1e-12):
        raise ValueError("need t[0] <= t0 < tf <= t[-1]")
    sq = e * e
    inside = (t > t0) & (t < tf)
    ts = np.concatenate(([t0], t[inside], [min(tf, t[-1])]))
    qs = np.interp(ts, t, sq)
    return float(_trapz(qs, ts)) / (tf - t0)


class GradResult(NamedTuple):
    gradient: tuple[float, float, float]
    one_sided: tuple[bool, bool, bool]


def grad_estimate(gains: GainVector, delta: float, cost: CostFn) -> GradResult:
    """Per-component finite-difference gradient. Central differences,
    except one-sided forward where k - delta would go negative."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    base: float | None = None
    grad = []
    flags = []
    for i in range(3):
        plus = GainVector(*(g + delta if j == i else g for j, g in enumerate(gains)))
        lo = gains[i] - delta
        if lo < 0.0:
            if base is None:
                base = cost(gains)
            grad.append((cost(plus) - base) / delta)
            flags.append(True)
        else:
            minus = GainVector(*(g - delta if j == i else g for j, g in enumerate(gains)))
            grad.append((cost(plus) - cost(minus)) / (2.0 * delta))
            flags.append(False)
    return GradResult(tuple(grad), tuple(flags))


class IterPoint(NamedTuple):
    iteration: int
    gains: GainVector
    cost: float
    one_sided: tuple[bool, bool, bool]


@dataclass(frozen=True)
class EsResult:
    gains: GainVector  # best-so-far, not necessarily the last iterate
    cost: float
    trace: tuple[IterPoint, ...]
    converged: bool


def es_descend(start: GainVector, cfg: EsConfig, cost: CostFn) -> EsResult:
    """Projected finite-difference descent from one starting point."""
    gains = GainVector(*start).project()
    j = cost(gains)
    trace = [IterPoint(0, gains, j, (False, False, False))]
    best_gains, best_cost = gains, j
    flat_run = 0
    converged = False
    prev_j = j
    for it in range(1, cfg.max_iters + 1):
        grad, flags = grad_estimate(gains, cfg.delta, cost)
        gains = GainVector(
            gains.kp - cfg.alpha * grad[0],
            gains.ki - cfg.alpha * grad[1],
            gains.kd - cfg.alpha * grad[2],
        ).project()
        j = cost(gains)
        trace.append(IterPoint(it, gains, j, flags))
        if j < best_cost:
            best_gains, best_cost = gains, j
        flat_run = flat_run + 1 if abs(j - prev_j) < cfg.tol else 0
        prev_j = j
        if flat_run >= cfg.tol_iters:
            converged = True
            break
    return EsResult(best_gains, best_cost, tuple(trace), converged)


class TraceRow(NamedTuple):
    phase: str  # "K1" or "K2"
    restart: int
    iteration: int
    kp: float
    ki: float
    kd: float
    cost: float


@dataclass(frozen=True)
class TuneResult:
    k1: GainVector
    k2: GainVector
    schedules: tuple[NlvgSchedule, NlvgSchedule, NlvgSchedule]  # p, i, d
    inverted: tuple[bool, bool, bool]  # components where K2 < K1 (A forced to 0)
    trace: tuple[TraceRow, ...]


def _campaign(
    phase: str, cfg: EsConfig, cost: CostFn, children: Sequence[np.random.SeedSequence]
) -> tuple[GainVector, list[TraceRow]]:
    rows: list[TraceRow] = []
    best: tuple[float, int, GainVector] | None = None
    for r, child in enumerate(children):
        rng = np.random.default_rng(child)
        start = GainVector(*(rng.uniform(lo, hi) for lo, hi in cfg.init_range))
        result = es_descend(start, cfg, cost)
        for p in result.trace:
            rows.append(TraceRow(phase, r, p.iteration, *p.gains, p.cost))
        key = (result.cost, r)
        if best is None or key < (best[0], best[1]):
            best = (result.cost, r, result.gains)
    assert best is not None
    return best[2], rows


def tune_bounds(
    cfg: EsConfig,
    cost_small: CostFn,
    cost_large: CostFn,
    delta1: float = 0.01,
    delta2: float = 0.838,
) -> TuneResult:
    """Learn the gain band: K1 from the small-amplitude episode, K2 from
    the large-amplitude one, restarts seeded from one master seed. A
    component with K2 < K1 is flagged inverted and gets a zero
    half-range."""
    master = np.random.SeedSequence(cfg.seed)
    children = master.spawn(2 * cfg.restarts)
    k1, rows1 = _campaign("K1", cfg, cost_small, children[: cfg.restarts])
    k2, rows2 = _campaign("K2", cfg, cost_large, children[cfg.restarts :])
    inverted = tuple(b < a for a, b in zip(k1, k2))
    schedules = tuple(
        NlvgSchedule(
            k1=a,
            half_range=max(0.0, (b - a) / 2.0),
            delta1=delta1,
            delta2=delta2,
        )
        for a, b in zip(k1, k2)
    )
    return TuneResult(k1, k2, schedules, inverted, tuple(rows1 + rows2))


def trace_csv_rows(trace: Sequence[TraceRow]) -> list[str]:
    out = ["phase,restart,iter,kp,ki,kd,J"]
    for r in trace:
        out.append(
            f"{r.phase},{r.restart},{r.iteration},"
            f"{r.kp:.9g},{r.ki:.9g},{r.kd:.9g},{r.cost:.9g}"
        )
    return out
