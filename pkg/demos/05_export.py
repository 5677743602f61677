"""
Writing models, solutions and geometry to disk
==============================================

Models and solutions are JSON, traces are CSV, and geometry is OBJ with line
elements grouped into cables and bars. Every file written through the command
line also gets a manifest next to it.
"""

import math
import tempfile
from pathlib import Path

import numpy as np

from hedra import TetraParams, TrajectorySpec, build_hedra, connectivity, run_trajectory
from hedra import io as hio

out = Path(tempfile.mkdtemp())
model = build_hedra(2, TetraParams(radius=0.1, height=0.15))

###############################################################################
# A model survives the round trip unchanged.
hio.write_model(model, out / "model.json")
back = hio.read_model(out / "model.json")
assert np.array_equal(connectivity(back).entries, connectivity(model).entries)

###############################################################################
# Export the final pose of a small bend as OBJ.
res = run_trajectory(model, TrajectorySpec("bend", math.radians(20.0), 0.0, 4))
hio.write_obj(model, out / "bent.obj", res.solutions[-1].positions)
print((out / "bent.obj").read_text())

###############################################################################
# Trace and actuation schedule as CSV.
hio.write_trace_csv(res.trace, out / "trace.csv")
hio.write_schedule_csv(res.schedule(), out / "schedule.csv")
print((out / "trace.csv").read_text())
print("files in", out, ":", sorted(p.name for p in out.iterdir()))
