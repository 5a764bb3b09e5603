"""Tracking-error metrics and controller comparison tables.

All three metrics integrate over the window [0, t_peak] measured from
the start of the series and divide by t_peak:

    iae  = (1/t_peak) * integral |e|      dt
    itae = (1/t_peak) * integral t * |e|  dt
    itse = (1/t_peak) * integral t * e^2  dt

Quadrature is the trapezoid rule on the logged grid; a t_peak that
falls between grid points gets a partial trapezoid with the integrand
interpolated linearly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

_trapz = getattr(np, "trapezoid", None) or np.trapz


class WindowTooLong(ValueError):
    """t_peak extends past the end of the error series."""


class MismatchedChannels(ValueError):
    """Reports being compared do not cover the same channels."""


@dataclass(frozen=True)
class ErrorSeries:
    channel: str
    dt: float
    samples: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.samples, dtype=float)
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if arr.ndim != 1 or arr.size < 2:
            raise ValueError("samples must be a 1-D series of length >= 2")
        if not np.all(np.isfinite(arr)):
            raise ValueError("samples must be finite")
        object.__setattr__(self, "samples", arr)

    @property
    def duration(self) -> float:
        return (self.samples.size - 1) * self.dt


def _windowed_integral(series: ErrorSeries, integrand: np.ndarray, t_peak: float) -> float:
    if t_peak <= 0:
        raise ValueError("t_peak must be positive")
    if t_peak > series.duration * (1 + 1e-12) + 1e-15:
        raise WindowTooLong(
            f"t_peak={t_peak} exceeds series duration {series.duration}"
        )
    dt = series.dt
    n_full = min(int(math.floor(t_peak / dt + 1e-9)), integrand.size - 1)
    total = float(_trapz(integrand[: n_full + 1], dx=dt))
    rem = t_peak - n_full * dt
    if rem > 1e-9 * dt and n_full + 1 < integrand.size:
        lo = integrand[n_full]
        hi = lo + (integrand[n_full + 1] - lo) * (rem / dt)
        total += 0.5 * (lo + hi) * rem
    return total / t_peak


def iae(series: ErrorSeries, t_peak: float) -> float:
    return _windowed_integral(series, np.abs(series.samples), t_peak)


def itae(series: ErrorSeries, t_peak: float) -> float:
    t = np.arange(series.samples.size) * series.dt
    return _windowed_integral(series, t * np.abs(series.samples), t_peak)


def itse(series: ErrorSeries, t_peak: float) -> float:
    t = np.arange(series.samples.size) * series.dt
    return _windowed_integral(series, t * series.samples**2, t_peak)


METRIC_NAMES = ("iae", "itae", "itse")


@dataclass(frozen=True)
class ChannelMetrics:
    iae: float
    itae: float
    itse: float

    def value(self, name: str) -> float:
        return getattr(self, name)


@dataclass(frozen=True)
class MetricReport:
    """Per-channel metric values for one controller run."""

    label: str
    t_peak: float
    units: str = ""
    channels: dict[str, ChannelMetrics] = field(default_factory=dict)


def report_for(
    label: str, series_list: Sequence[ErrorSeries], t_peak: float, units: str = ""
) -> MetricReport:
    channels = {
        s.channel: ChannelMetrics(iae(s, t_peak), itae(s, t_peak), itse(s, t_peak))
        for s in series_list
    }
    return MetricReport(label=label, t_peak=t_peak, units=units, channels=channels)


@dataclass(frozen=True)
class ComparisonRow:
    channel: str
    metric: str
    baseline: float
    candidate: float
    improvement_pct: float


def compare(report_a: MetricReport, report_b: MetricReport) -> list[ComparisonRow]:
    """Per-channel, per-metric comparison; positive improvement_pct means
    report_b (candidate) beats report_a (baseline)."""
    if set(report_a.channels) != set(report_b.channels):
        raise MismatchedChannels(
            f"{sorted(report_a.channels)} vs {sorted(report_b.channels)}"
        )
    if abs(report_a.t_peak - report_b.t_peak) > 1e-12:
        raise MismatchedChannels("reports use different t_peak windows")
    rows = []
    for channel in report_a.channels:
        a = report_a.channels[channel]
        b = report_b.channels[channel]
        for name in METRIC_NAMES:
            va, vb = a.value(name), b.value(name)
            if va == 0.0:
                pct = 0.0 if vb == 0.0 else float("-inf")
            else:
                pct = 100.0 * (va - vb) / va
            rows.append(ComparisonRow(channel, name, va, vb, pct))
    return rows


def comparison_csv_rows(rows: Sequence[ComparisonRow]) -> list[str]:
    """CSV lines, header first. The baseline report fills the `pid`
    column and the candidate fills `nlvg`."""
    out = ["channel,metric,pid,nlvg,improvement_pct"]
    for r in rows:
        out.append(
            f"{r.channel},{r.metric},{r.baseline:.9g},{r.candidate:.9g},"
            f"{r.improvement_pct:.9g}"
        )
    return out


def render_table(rows: Sequence[ComparisonRow], label_a: str = "pid", label_b: str = "nlvg") -> str:
    header = f"{'channel':<8} {'metric':<6} {label_a:>12} {label_b:>12} {'improve%':>9}"
    lines = [header, "-" * len(header)]
    for r in rows:
        lines.append(
            f"{r.channel:<8} {r.metric:<6} {r.baseline:>12.4f} "
            f"{r.candidate:>12.4f} {r.improvement_pct:>9.2f}"
        )
    return "\n".join(lines)
