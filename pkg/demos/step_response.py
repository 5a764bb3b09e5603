"""
Attitude step response
======================

Fly a 0.5 rad roll step with the default fixed gains and look at the
transient: roll angle, roll torque, and the windowed tracking metrics
the comparison tables are built from.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from quadflight.config import parse_config
from quadflight.sim import run_simulation

OUT = Path(__file__).resolve().parent / "out"
OUT.mkdir(exist_ok=True)

config = parse_config(
    {
        "trajectory": {
            "kind": "step",
            "step": {"channel": "phi", "amplitude": 0.5, "t_start": 1.0},
        },
        "sim": {"dt": 0.01, "t_total": 6.0},
    }
)
result = run_simulation(config)
log = result.log

t = log.column("t")
fig, axes = plt.subplots(3, 1, figsize=(7, 7), sharex=True)
axes[0].plot(t, log.column("phi"), label="phi")
axes[0].plot(t, log.column("phi_ref"), "--", label="reference", lw=0.9)
axes[0].set_ylabel("roll [rad]")
axes[0].legend(fontsize=8)
axes[1].plot(t, log.column("e_phi"), color="tab:red")
axes[1].set_ylabel("error [rad]")
axes[2].plot(t, log.column("tau_x"), color="tab:green")
axes[2].set_ylabel("tau_x [N m]")
axes[2].set_xlabel("t [s]")
fig.suptitle("0.5 rad roll step, fixed gains")
fig.tight_layout()
fig.savefig(OUT / "step_response.svg")
print(f"wrote {OUT / 'step_response.svg'}")

# the metric window starts at the step and spans t_peak = 0.15 s
print(f"window t_peak = {result.attitude.t_peak} s, units = {result.attitude.units}")
for name in ("phi", "theta", "psi"):
    ch = result.attitude.channels[name]
    print(f"{name:>5}: IAE={ch.iae:8.4f}  ITAE={ch.itae:8.4f}  ITSE={ch.itse:8.4f}")
