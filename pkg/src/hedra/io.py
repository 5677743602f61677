"""Model, solution and configuration files, CSV traces, OBJ export and run manifests.

All numbers are written with ``repr`` precision so files round-trip exactly.
"""
from __future__ import annotations

import csv
import datetime as _dt
import json
import os
from pathlib import Path

import numpy as np

from . import __version__
from .errors import InvalidParameterError
from .ik import IKSolution
from .structure import Member, MemberKind, Node, TensegrityModel, member_lengths

MODEL_SCHEMA = "hedra_model_v1"
SOLUTION_SCHEMA = "hedra_solution_v1"
CONFIG_SCHEMA = "hedra_configuration_v1"
UNITS = {"length": "m", "force": "N", "force_density": "N/m"}


def _floats(a) -> list:
    return [float(v) for v in np.asarray(a, dtype=float).ravel()]


def _dump(doc: dict, path) -> None:
    text = json.dumps(doc, indent=1, allow_nan=False)
    Path(path).write_text(text + "\n", encoding="utf-8")


def _load(path, schema: str) -> dict:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("schema") != schema:
        raise InvalidParameterError(f"{path}: expected schema {schema!r}, got {doc.get('schema')!r}")
    return doc


# --- model ------------------------------------------------------------------


def model_to_dict(model: TensegrityModel) -> dict:
    members = []
    for mb in model.members:
        rec = {
            "id": mb.id,
            "kind": mb.kind.value,
            "k": mb.k,
            "j": mb.j,
            "stiffness": float(mb.stiffness),
            "class": mb.cable_class.value,
        }
        if mb.rest_length is not None:
            rec["rest_length"] = float(mb.rest_length)
        members.append(rec)
    return {
        "schema": MODEL_SCHEMA,
        "units": UNITS,
        "meta": {key: model.meta[key] for key in sorted(model.meta)},
        "nodes": [{"id": nd.id, "xyz": list(nd.position)} for nd in model.nodes],
        "members": members,
        "fixed_nodes": sorted(model.fixed_nodes),
        "active_routes": [list(r) for r in model.active_routes],
        "modules": [list(m) for m in model.modules],
    }


def model_from_dict(doc: dict) -> TensegrityModel:
    if doc.get("schema") != MODEL_SCHEMA:
        raise InvalidParameterError(f"expected schema {MODEL_SCHEMA!r}, got {doc.get('schema')!r}")
    nodes = [Node(int(n["id"]), tuple(n["xyz"])) for n in doc["nodes"]]
    members = [
        Member(
            int(m["id"]),
            MemberKind(m["kind"]),
            int(m["k"]),
            int(m["j"]),
            float(m["stiffness"]),
            m.get("class", "none"),
            m.get("rest_length"),
        )
        for m in doc["members"]
    ]
    return TensegrityModel(
        nodes=tuple(nodes),
        members=tuple(members),
        fixed_nodes=frozenset(doc.get("fixed_nodes", [])),
        active_routes=tuple(tuple(r) for r in doc.get("active_routes", [])),
        modules=tuple(tuple(m) for m in doc.get("modules", [])),
        meta=dict(doc.get("meta", {})),
    )


def write_model(model: TensegrityModel, path) -> None:
    _dump(model_to_dict(model), path)


def read_model(path) -> TensegrityModel:
    return model_from_dict(_load(path, MODEL_SCHEMA))


# --- IK solutions and configurations -----------------------------------------


def write_solution(sol: IKSolution, path, poses=None, q_min=None) -> None:
    doc = {
        "schema": SOLUTION_SCHEMA,
        "units": UNITS,
        "residual": float(sol.residual),
        "objective": float(sol.objective),
        "q": _floats(sol.q),
        "f": _floats(sol.forces),
        "rest_lengths": _floats(sol.rest_lengths),
        "bar_rest_lengths": _floats(sol.bar_rest_lengths),
        "active_lengths": _floats(sol.active_lengths),
        "lengths": _floats(sol.lengths),
        "positions": [_floats(row) for row in sol.positions],
        "loads": _floats(sol.loads),
        "solver": {
            "method": "nullspace dual active-set QP",
            "iterations": int(sol.iterations),
            "tolerance": float(sol.tolerance),
        },
    }
    if q_min is not None:
        doc["solver"]["q_min"] = q_min if np.isscalar(q_min) else _floats(q_min)
    if poses is not None:
        doc["poses"] = [{"euler": list(p.euler), "translation": list(p.translation)} for p in poses]
    _dump(doc, path)


def read_solution(path) -> IKSolution:
    doc = _load(path, SOLUTION_SCHEMA)
    arr = lambda key: np.asarray(doc[key], dtype=float)  # noqa: E731
    return IKSolution(
        q=arr("q"),
        rest_lengths=arr("rest_lengths"),
        active_lengths=arr("active_lengths"),
        residual=float(doc["residual"]),
        objective=float(doc["objective"]),
        positions=arr("positions").reshape(-1, 3),
        lengths=arr("lengths"),
        forces=arr("f"),
        bar_rest_lengths=arr("bar_rest_lengths"),
        loads=arr("loads"),
        iterations=int(doc["solver"]["iterations"]),
        tolerance=float(doc["solver"]["tolerance"]),
    )


def write_configuration(positions, path, diagnostics: dict | None = None) -> None:
    doc = {"schema": CONFIG_SCHEMA, "units": UNITS, "positions": [_floats(r) for r in positions]}
    if diagnostics:
        doc["diagnostics"] = {
            k: (float(v) if isinstance(v, (float, np.floating)) else v) for k, v in diagnostics.items()
        }
    _dump(doc, path)


def read_configuration(path) -> np.ndarray:
    doc = _load(path, CONFIG_SCHEMA)
    return np.asarray(doc["positions"], dtype=float).reshape(-1, 3)


# --- CSV --------------------------------------------------------------------


def _cell(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_trace_csv(trace, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(trace.header())
        for row in trace.rows():
            w.writerow([_cell(v) for v in row])


def write_schedule_csv(rows, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["step", "route_id", "length_m"])
        for step, rid, length in rows:
            w.writerow([_cell(step), _cell(rid), _cell(length)])


def read_csv(path) -> tuple[list[str], np.ndarray]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.asarray(rows[1:], dtype=float).reshape(len(rows) - 1, len(rows[0]))


# --- OBJ --------------------------------------------------------------------


def write_obj(model: TensegrityModel, path, config=None) -> None:
    """Vertices per node and one line element per member, grouped into cables and bars."""
    X = model.positions if config is None else np.asarray(config, dtype=float)
    member_lengths(model, X)  # rejects degenerate geometry before writing
    lines = [f"# hedra {__version__}: {model.n_nodes} nodes, {len(model.members)} members"]
    lines += [f"v {x!r} {y!r} {z!r}" for x, y, z in X.tolist()]
    for name, kind in (("cables", MemberKind.CABLE), ("bars", MemberKind.BAR)):
        group = [mb for mb in model.members if mb.kind is kind]
        if group:
            lines.append(f"g {name}")
            lines += [f"l {mb.k} {mb.j}" for mb in group]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_obj(path) -> tuple[np.ndarray, dict[str, list[tuple[int, int]]]]:
    """Vertices and the line elements of each group (1-based vertex ids)."""
    verts, groups, current = [], {}, "default"
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        parts = raw.split()
        if not parts or parts[0].startswith("#"):
            continue
        if parts[0] == "v":
            verts.append([float(v) for v in parts[1:4]])
        elif parts[0] == "g":
            current = parts[1]
            groups.setdefault(current, [])
        elif parts[0] == "l":
            ids = [int(p) for p in parts[1:]]
            groups.setdefault(current, []).extend(zip(ids[:-1], ids[1:]))
    return np.asarray(verts, dtype=float).reshape(-1, 3), groups


# --- manifests --------------------------------------------------------------


def run_timestamp() -> str:
    """UTC timestamp, pinned by ``SOURCE_DATE_EPOCH`` when set."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is not None:
        when = _dt.datetime.fromtimestamp(int(epoch), tz=_dt.timezone.utc)
    else:
        when = _dt.datetime.now(tz=_dt.timezone.utc)
    return when.strftime("%Y-%m-%dT%H:%M:%SZ")


def write_manifest(output, command: str, inputs, parameters: dict, outputs) -> Path:
    """Write ``<output>.manifest.json`` describing the run that produced ``output``."""
    doc = {
        "command": command,
        "inputs": [str(p) for p in inputs],
        "parameters": parameters,
        "outputs": [str(p) for p in outputs],
        "timestamp": run_timestamp(),
        "version": __version__,
        "seed": None,
    }
    path = Path(str(output) + ".manifest.json")
    _dump(doc, path)
    return path
