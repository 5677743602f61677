"""
Holding the upright stack against gravity
=========================================

The inverse problem fixes the geometry and asks which cable tensions hold it.
Force densities q = f / l make equilibrium linear, ``A q = p``. Among all
solutions we take the one storing the least elastic energy in the cables
while every cable density stays above a floor.
"""

import numpy as np

from hedra import CableClass, ModulePose, TetraParams, build_hedra, gravity_loads, solve_pose

model = build_hedra(5, TetraParams(radius=0.1, height=0.15))

###############################################################################
# Bars weigh 0.05 kg/m; their weight is lumped at the end nodes.
loads = lambda X: gravity_loads(model, X)  # noqa: E731

sol = solve_pose(model, [ModulePose()] * 4, loads=loads, q_min=500.0)
print(f"residual {sol.residual:.2e} N, cable energy {sol.objective:.3f} J")

###############################################################################
# Axial cables sit on the floor. Saddle cables carry the joints and take
# slightly more tension near the base, which carries more weight.
for cls in (CableClass.SADDLE, CableClass.AXIAL):
    q = sol.q[model.members_of_class(cls)]
    print(cls.value, np.round(q, 2))

###############################################################################
# Rest lengths follow from Hooke's law, ``l0 = l (1 - q / K)``.
stretch = sol.lengths[: model.n_cables] - sol.rest_lengths
print("cable stretch (mm):", np.round(1e3 * stretch, 3))

###############################################################################
# Raising the floor stiffens the whole structure at the price of more energy.
# Saddle densities grow faster than the floor and reach the cable stiffness
# between 760 and 770 N/m, where no positive rest length exists.
for q_min in (0.0, 250.0, 500.0, 700.0):
    s = solve_pose(model, [ModulePose()] * 4, loads=loads, q_min=q_min)
    print(f"q_min {q_min:6.0f} N/m -> energy {s.objective:8.3f} J")
