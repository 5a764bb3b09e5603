"""Vector-graphic figure emission from simulation logs.

Everything renders through the Agg backend straight to SVG files; no
interactive windows. The overlay plots mirror the usual step-response
and tracking-comparison figures: baseline and candidate on shared axes,
reference dashed.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .sim import SimLog  # noqa: E402


def _finish(fig, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg")
    plt.close(fig)
    return path


def overlay_channels(
    logs: Sequence[SimLog],
    labels: Sequence[str],
    channels: Sequence[str],
    path: str | Path,
    ref_channels: Optional[Sequence[str]] = None,
    title: str = "",
    ylabel: str = "",
) -> Path:
    """One subplot per channel; every log drawn on shared time axes,
    references (taken from the first log) dashed."""
    if len(logs) != len(labels):
        raise ValueError("need one label per log")
    fig, axes = plt.subplots(
        len(channels), 1, figsize=(8, 2.4 * len(channels)), sharex=True, squeeze=False
    )
    t0 = logs[0].column("t")
    for i, channel in enumerate(channels):
        ax = axes[i][0]
        if ref_channels is not None:
            ax.plot(
                t0,
                logs[0].column(ref_channels[i]),
                "k--",
                linewidth=1.0,
                label="reference",
            )
        for log, label in zip(logs, labels):
            ax.plot(log.column("t"), log.column(channel), linewidth=1.2, label=label)
        ax.set_ylabel(ylabel or channel)
        ax.grid(True, alpha=0.3)
        if i == 0:
            ax.legend(loc="best", fontsize=8)
            if title:
                ax.set_title(title)
    axes[-1][0].set_xlabel("t [s]")
    fig.tight_layout()
    return _finish(fig, path)


def error_overlay(
    logs: Sequence[SimLog],
    labels: Sequence[str],
    channels: Sequence[str],
    path: str | Path,
    title: str = "",
) -> Path:
    return overlay_channels(
        logs,
        labels,
        [f"e_{c}" for c in channels],
        path,
        title=title,
    )


def path3d(
    logs: Sequence[SimLog],
    labels: Sequence[str],
    path: str | Path,
    title: str = "",
    show_reference: bool = True,
) -> Path:
    """Flown 3D tracks (and the reference track of the first log)."""
    fig = plt.figure(figsize=(7, 6))
    ax = fig.add_subplot(projection="3d")
    if show_reference:
        ax.plot(
            logs[0].column("x_ref"),
            logs[0].column("y_ref"),
            logs[0].column("z_ref"),
            "k--",
            linewidth=1.0,
            label="reference",
        )
    for log, label in zip(logs, labels):
        ax.plot(log.column("x"), log.column("y"), log.column("z"), linewidth=1.2, label=label)
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.set_zlabel("z [m]")
    if title:
        ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    return _finish(fig, path)


def tuning_trace(trace_rows, path: str | Path, title: str = "") -> Path:
    """Cost vs iteration, one line per (phase, restart)."""
    fig, ax = plt.subplots(figsize=(7, 4))
    series: dict[tuple[str, int], list[tuple[int, float]]] = {}
    for row in trace_rows:
        series.setdefault((row.phase, row.restart), []).append((row.iteration, row.cost))
    for (phase, restart), points in sorted(series.items()):
        xs, ys = zip(*points)
        ax.plot(xs, ys, linewidth=1.0, label=f"{phase} r{restart}")
    ax.set_xlabel("iteration")
    ax.set_ylabel("episode cost J")
    ax.set_yscale("log")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best", fontsize=7, ncol=2)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return _finish(fig, path)
