import json

import numpy as np
import pytest

from conftest import gravity_for
from hedra import TetraParams, build_hedra, connectivity, solve_pose
from hedra import io as hio
from hedra.structure import ModulePose, member_lengths


@pytest.mark.parametrize("k,cables", [(1, 3), (2, 3), (5, 6)])
def test_model_round_trip(tmp_path, k, cables):
    m = build_hedra(k, TetraParams(0.1, 0.15), active_cable_count=cables)
    path = tmp_path / "m.json"
    hio.write_model(m, path)
    back = hio.read_model(path)
    np.testing.assert_array_equal(connectivity(back).entries, connectivity(m).entries)
    np.testing.assert_array_equal(back.positions, m.positions)
    assert back.fixed_nodes == m.fixed_nodes
    assert back.active_routes == m.active_routes
    assert back.meta == m.meta
    assert back.members == m.members


def test_schema_is_checked(tmp_path, model2):
    path = tmp_path / "m.json"
    hio.write_model(model2, path)
    doc = json.loads(path.read_text())
    doc["schema"] = "something_else"
    path.write_text(json.dumps(doc))
    with pytest.raises(ValueError):
        hio.read_model(path)


def test_solution_round_trip(tmp_path, model5):
    poses = [ModulePose((0.1, 0.0, 0.0), (0.0, 0.0, 0.0))] + [ModulePose()] * 3
    sol = solve_pose(model5, poses, loads=gravity_for(model5))
    path = tmp_path / "s.json"
    hio.write_solution(sol, path, poses=poses, q_min=500.0)
    back = hio.read_solution(path)
    for name in ("q", "rest_lengths", "bar_rest_lengths", "positions", "loads", "forces", "active_lengths"):
        np.testing.assert_array_equal(getattr(back, name), getattr(sol, name))
    assert back.residual == sol.residual
    doc = json.loads(path.read_text())
    assert doc["units"]["force_density"] == "N/m"
    assert len(doc["poses"]) == 4


def test_configuration_round_trip(tmp_path):
    X = np.random.default_rng(0).normal(size=(8, 3))
    path = tmp_path / "c.json"
    hio.write_configuration(X, path, {"converged": True, "peak_force": np.float64(1e-7)})
    np.testing.assert_array_equal(hio.read_configuration(path), X)


@pytest.mark.parametrize("k,n_v,n_l", [(1, 4, 6), (2, 8, 21)])
def test_obj_counts_and_lengths(tmp_path, k, n_v, n_l):
    m = build_hedra(k, TetraParams(0.1, 0.15))
    path = tmp_path / "h.obj"
    hio.write_obj(m, path)
    V, groups = hio.read_obj(path)
    assert V.shape == (n_v, 3)
    lines = groups.get("cables", []) + groups.get("bars", [])
    assert len(lines) == n_l
    assert len(groups["bars"]) == 6 * k
    L = np.array([np.linalg.norm(V[a - 1] - V[b - 1]) for a, b in lines])
    np.testing.assert_allclose(L, member_lengths(m, m.positions), atol=1e-9)


def test_csv_headers(tmp_path, model2):
    from hedra import TrajectorySpec, run_trajectory

    res = run_trajectory(model2, TrajectorySpec("twist", 0.2, 0.0, 3))
    hio.write_trace_csv(res.trace, tmp_path / "t.csv")
    hio.write_schedule_csv(res.schedule(), tmp_path / "s.csv")
    head, data = hio.read_csv(tmp_path / "t.csv")
    assert head == ["step", "x", "y", "z", "bend_deg", "twist_deg", "cable1_m", "cable2_m", "cable3_m"]
    assert data.shape[0] == 3
    head, data = hio.read_csv(tmp_path / "s.csv")
    assert head == ["step", "route_id", "length_m"]
    assert data.shape == (9, 3)


def test_manifest_timestamp(tmp_path, monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "0")
    path = hio.write_manifest(tmp_path / "out.json", "build", [], {"modules": 2}, ["out.json"])
    doc = json.loads(path.read_text())
    assert doc["timestamp"] == "1970-01-01T00:00:00Z"
    assert set(doc) == {"command", "inputs", "parameters", "outputs", "timestamp", "version", "seed"}
