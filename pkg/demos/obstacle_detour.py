"""
Detours around sphere threats
=============================

Each obstacle is a closed keep-out sphere. The planner finds where a
route leg enters and leaves a sphere, decides whether going over or
under is shorter (falling back to a lateral sidestep when the corridor
pinches), and replaces the crossing with two cubic Bezier curves that
join the straight legs with matched tangents. This demo plans around a
stacked pair of spheres and plots the detour.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from quadflight.planner import (
    ObstacleSphere,
    PlanRequest,
    plan_detour,
    sample_path,
    time_parameterize,
)

OUT = Path(__file__).resolve().parent / "out"
OUT.mkdir(exist_ok=True)

request = PlanRequest(
    waypoints=((0.0, 0.0, 10.0), (24.0, 0.0, 10.0), (24.0, 18.0, 10.0)),
    v_max=2.0,
    a_max=2.0,
    z_min=0.0,
    z_max=50.0,
)
obstacles = [
    ObstacleSphere(center=(10.0, 0.0, 9.0), r_safe=2.0, id="low"),
    ObstacleSphere(center=(24.0, 9.0, 13.5), r_safe=2.0, id="high"),
]

path = time_parameterize(plan_detour(request, obstacles), request.v_max, request.a_max)
print(f"{len(path.segments)} segments, duration {path.duration:.1f} s")
print(f"min distance to any threat center: {path.clearance:.3f} m")
print(f"speed/accel limits respected: {path.velocity_ok}/{path.accel_ok}")

samples = sample_path(path, 0.05)
xs = [s.x for s in samples]
ys = [s.y for s in samples]
zs = [s.z for s in samples]

fig = plt.figure(figsize=(7, 5.5))
ax = fig.add_subplot(projection="3d")
ax.plot(xs, ys, zs, lw=1.2, label="planned path")
wx, wy, wz = zip(*request.waypoints)
ax.plot(wx, wy, wz, "k--", lw=0.7, label="raw route")
u, v = np.mgrid[0 : 2 * np.pi : 24j, 0 : np.pi : 12j]
for sphere in obstacles:
    cx, cy, cz = sphere.center
    ax.plot_wireframe(
        cx + sphere.r_safe * np.cos(u) * np.sin(v),
        cy + sphere.r_safe * np.sin(u) * np.sin(v),
        cz + sphere.r_safe * np.cos(v),
        color="tab:red",
        lw=0.3,
        alpha=0.5,
    )
ax.set_xlabel("x [m]")
ax.set_ylabel("y [m]")
ax.set_zlabel("z [m]")
ax.legend(fontsize=8)
ax.set_title("over the low threat, under the high one")
fig.tight_layout()
fig.savefig(OUT / "obstacle_detour.svg")
print(f"wrote {OUT / 'obstacle_detour.svg'}")
