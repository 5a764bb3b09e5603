"""
The cosine gain blend
=====================

A variable-gain channel holds its lower gain K1 while the scheduling
signal is small, slides along a half-cosine to K1 + 2A inside the
blend band [delta1, delta2], and saturates above it. This script
sweeps a few schedules to show the shape stays continuous and
monotone whatever the band.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from quadflight.control import NlvgSchedule, nlvg_gain

OUT = Path(__file__).resolve().parent / "out"
OUT.mkdir(exist_ok=True)

# the band the tuner uses by default, plus a narrow and a shifted one
schedules = [
    ("delta=[0.01, 0.838], A=2", NlvgSchedule(4.0, 2.0, 0.01, 0.838)),
    ("delta=[0.01, 0.30], A=2", NlvgSchedule(4.0, 2.0, 0.01, 0.30)),
    ("delta=[0.20, 0.838], A=1", NlvgSchedule(4.0, 1.0, 0.20, 0.838)),
    ("A=0 (fixed gain)", NlvgSchedule(4.0, 0.0, 0.01, 0.838)),
]

s = np.linspace(0.0, 1.1, 600)
fig, ax = plt.subplots(figsize=(7, 4))
for label, sched in schedules:
    ax.plot(s, [nlvg_gain(float(v), sched) for v in s], label=label)

ax.axvline(0.01, color="gray", lw=0.6, ls=":")
ax.axvline(0.838, color="gray", lw=0.6, ls=":")
ax.set_xlabel("scheduling signal |s|")
ax.set_ylabel("effective gain")
ax.set_title("half-cosine blend between K1 and K1 + 2A")
ax.legend(fontsize=8)
fig.tight_layout()
fig.savefig(OUT / "gain_blend.svg")
print(f"wrote {OUT / 'gain_blend.svg'}")

# the edges are exact: K1 below the band, K1 + 2A above it
sched = schedules[0][1]
print("gain at s=0      :", nlvg_gain(0.0, sched))
print("gain at s=delta1 :", nlvg_gain(0.01, sched))
print("gain at midpoint :", nlvg_gain((0.01 + 0.838) / 2, sched))
print("gain at s=delta2 :", nlvg_gain(0.838, sched))
