"""
Variable gains vs fixed gains on the figure-eight
=================================================

Tune both loop groups with a reduced budget, then fly the 3D Lissajous
route twice: once with the learned gain bands active and once with the
controller pinned to fixed gains. The comparison table shows where the
sliding gains pay off.
"""

import time
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from quadflight.config import load_config, paper_defaults_path, parse_config
from quadflight.metrics import render_table
from quadflight.sim import as_pid_baseline, improvement_summary, run_compare, run_tune

import yaml

OUT = Path(__file__).resolve().parent / "out"
OUT.mkdir(exist_ok=True)

# reduced budget to keep the demo quick; the acceptance suite runs the
# full default campaign, which improves attitude IAE by >90% here
raw = yaml.safe_load(paper_defaults_path().read_text(encoding="utf-8"))
raw["trajectory"]["kind"] = "lissajous"
raw["tuning"].update({"restarts": 3, "max_iters": 20})

t0 = time.perf_counter()
outputs = run_tune(parse_config(raw), OUT / "tune_lissajous")
print(f"tuning finished in {time.perf_counter() - t0:.1f} s")

tuned = load_config(outputs.tuned_config)
result = run_compare(as_pid_baseline(tuned), tuned)

print()
print(render_table(result.attitude_rows))
print()
print(render_table(result.position_rows))
print()
att = improvement_summary(result.attitude_rows, ("phi", "theta"))
pos = improvement_summary(result.position_rows, ("x", "y", "z"))
print(f"mean attitude IAE improvement (phi, theta): {att:.1f}%")
print(f"mean position IAE improvement (x, y, z):    {pos:.1f}%")

base_log, cand_log = result.baseline.log, result.candidate.log
fig, axes = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
t = base_log.column("t")
axes[0].plot(t, base_log.column("e_phi"), lw=0.6, label="fixed gains")
axes[0].plot(t, cand_log.column("e_phi"), lw=0.6, label="variable gains")
axes[0].set_ylabel("roll error [rad]")
axes[0].legend(fontsize=8)
axes[1].plot(t, base_log.column("e_x"), lw=0.6, label="fixed gains")
axes[1].plot(t, cand_log.column("e_x"), lw=0.6, label="variable gains")
axes[1].set_ylabel("x error [m]")
axes[1].set_xlabel("t [s]")
fig.suptitle("Lissajous tracking error, fixed vs variable gains")
fig.tight_layout()
fig.savefig(OUT / "lissajous_compare.svg")
print(f"wrote {OUT / 'lissajous_compare.svg'}")
