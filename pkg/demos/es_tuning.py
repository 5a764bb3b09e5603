"""
Extremum-seeking gain bounds
============================

The tuner runs two campaigns of step episodes: small steps learn the
lower gain bound K1, large steps learn the upper bound K2, and the
blend half-range is A = (K2 - K1) / 2 per channel. This demo runs a
reduced-budget campaign on the attitude loops and plots every descent
trace.
"""

import time
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from quadflight.config import parse_config
from quadflight.sim import run_tune

OUT = Path(__file__).resolve().parent / "out"
OUT.mkdir(exist_ok=True)

# default campaign budget: 5 restarts x 30 iterations per phase,
# about 15 s of wall time on the attitude group
config = parse_config(
    {
        "sim": {"dt": 0.01, "t_total": 10.0},
        "tuning": {"groups": ["inner"], "seed": 0},
    }
)

t0 = time.perf_counter()
outputs = run_tune(config, OUT / "tune")
print(f"campaign finished in {time.perf_counter() - t0:.1f} s")

result = outputs.inner
print("K1 (small steps):", tuple(round(g, 4) for g in result.k1))
print("K2 (large steps):", tuple(round(g, 4) for g in result.k2))
for name, sched in zip("pid", result.schedules):
    print(f"  {name}: k1={sched.k1:.4f}  half_range={sched.half_range:.4f}")
if any(result.inverted):
    print("inverted bounds on:", [n for n, bad in zip("pid", result.inverted) if bad])

# one line per (phase, restart): the tuner keeps the best cost seen
fig, ax = plt.subplots(figsize=(7, 4))
for phase in ("K1", "K2"):
    restarts = sorted({r.restart for r in result.trace if r.phase == phase})
    for restart in restarts:
        pts = [r for r in result.trace if r.phase == phase and r.restart == restart]
        ax.plot(
            [p.iteration for p in pts],
            [p.cost for p in pts],
            marker=".",
            ms=3,
            lw=0.8,
            label=f"{phase} restart {restart}",
        )
ax.set_yscale("log")
ax.set_xlabel("iteration")
ax.set_ylabel("episode cost J")
ax.set_title("extremum-seeking descent traces (attitude group)")
ax.legend(fontsize=7)
fig.tight_layout()
fig.savefig(OUT / "es_traces.svg")
print(f"wrote {OUT / 'es_traces.svg'}")
print(f"tuned config: {outputs.tuned_config}")
