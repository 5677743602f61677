"""
Checking the inverse solution by forward simulation
===================================================

Given only rest lengths and loads, dynamic relaxation lets the structure find
its own equilibrium. Cables pull when stretched and go slack otherwise. If the
inverse solution is right, the relaxed shape matches the commanded one.
"""

import math

import numpy as np

from hedra import (
    RelaxationParams,
    TetraParams,
    TrajectorySpec,
    build_hedra,
    gravity_loads,
    pose_sequence,
    relax,
    solve_pose,
)
from hedra.motion import stack_height

model = build_hedra(2, TetraParams(radius=0.1, height=0.15))
poses = pose_sequence(TrajectorySpec("bend", math.radians(25.0), 0.3, 1), model)[-1]
sol = solve_pose(model, poses, loads=lambda X: gravity_loads(model, X))

###############################################################################
# Start from the upright reference shape and relax with kinetic damping.
X, diag = relax(model, sol.member_rest_lengths, sol.loads)
err = np.max(np.linalg.norm(X - sol.positions, axis=1))
print(f"{diag['iterations']} iterations, dt {diag['time_step']:.2e} s")
print(f"largest node error {err:.2e} m ({err / stack_height(model):.1e} of height)")
print("slack cable-steps on the way:", diag["slack_events"])

###############################################################################
# Viscous damping reaches the same state, usually more slowly.
Xv, dv = relax(model, sol.member_rest_lengths, sol.loads, RelaxationParams(damping=2.0))
print(f"viscous: {dv['iterations']} iterations, error {np.max(np.linalg.norm(Xv - sol.positions, axis=1)):.2e} m")

###############################################################################
# Lengthening one axial cable leaves it slack. It then carries no force at
# all and the others take up the load.
from hedra import CableClass
from hedra.motion import member_tensions

rest = sol.member_rest_lengths.copy()
i = model.members_of_class(CableClass.AXIAL)[0]
rest[i] *= 1.5
Xs, _ = relax(model, rest, sol.loads)
print("cable tensions (N):", np.round(member_tensions(model, Xs, rest)[: model.n_cables], 2))
