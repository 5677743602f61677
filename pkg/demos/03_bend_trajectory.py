"""
Bending the manipulator
=======================

A bend is split evenly over the joints. Each joint rotates the modules above
it about a horizontal axis through the joint centre. The inverse problem is
solved at every step, and the active cable lengths give the actuation
schedule.
"""

import math

import numpy as np

from hedra import TetraParams, TrajectorySpec, build_hedra, gravity_loads, run_trajectory

model = build_hedra(5, TetraParams(radius=0.1, height=0.15))
loads = lambda X: gravity_loads(model, X)  # noqa: E731

###############################################################################
# Bend by 76 degrees toward +x in 20 steps.
spec = TrajectorySpec("bend", math.radians(76.0), azimuth=0.0, steps=20)
result = run_trajectory(model, spec, loads=loads)
tr = result.trace

print("step  bend   x       z       cable lengths (m)")
for i in range(len(tr)):
    x, _, z = tr.centroid[i]
    print(f"{i:4d} {tr.bend_deg[i]:6.2f} {x:7.4f} {z:7.4f}", np.round(tr.cable_lengths[i], 4))

###############################################################################
# The cable on the concave side shortens. The others lengthen.
dL = tr.cable_lengths[-1] - tr.cable_lengths[0]
print("change in active lengths (m):", np.round(dL, 4))

###############################################################################
# Twisting and contracting work the same way.
twist = run_trajectory(model, TrajectorySpec("twist", math.radians(40.0), 0.0, 5), loads=loads)
print("twist (deg):", np.round(twist.trace.twist_deg, 3))
squeeze = run_trajectory(model, TrajectorySpec("contract", 0.8, 0.0, 5), loads=loads)
print("height (m):", np.round(squeeze.trace.centroid[:, 2], 4))
