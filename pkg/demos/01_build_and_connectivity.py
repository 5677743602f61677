"""
Building a stack of tetrahedra
==============================

Each module is a tetrahedron of six bars: an apex below a triangular face.
Modules stack with the apex of each upper module hanging just below the face
of the module beneath it, held there by saddle and axial cables.
"""

import numpy as np

from hedra import TetraParams, build_hedra, connectivity

###############################################################################
# Two modules give 8 nodes, 9 cables and 12 bars. Nodes 1 to 4 form the base
# and stay fixed.
model = build_hedra(2, TetraParams(radius=0.1, height=0.15))
print(model.n_nodes, "nodes,", model.n_cables, "cables,", model.n_bars, "bars")
print("fixed:", sorted(model.fixed_nodes))

###############################################################################
# The incidence matrix lists cables first. A member from node k to node j
# (k < j) has +1 in column k and -1 in column j.
C = connectivity(model).entries
np.set_printoptions(linewidth=100)
print("cables\n", C[: model.n_cables])
print("bars\n", C[model.n_cables :])

###############################################################################
# Every row sums to zero and every bar row touches nodes of a single module.
assert np.all(C.sum(axis=1) == 0)

###############################################################################
# Node coordinates, one row per node, in meters.
for node in model.nodes:
    print(node.id, np.round(node.position, 4))

###############################################################################
# The active cables run from the base to the top through one face node of each
# module. Their routes are listed by node id.
for i, route in enumerate(model.active_routes, start=1):
    print(f"active cable {i}:", route)
