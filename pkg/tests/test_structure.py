import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.distance import pdist

from conftest import PRINTED_CR, PRINTED_CS
from hedra import (
    CableClass,
    DegenerateGeometryError,
    InvalidParameterError,
    Member,
    MemberKind,
    ModulePose,
    Node,
    TensegrityModel,
    TetraParams,
    apply_pose,
    base_tetra_nodes,
    build_hedra,
    compose_poses,
    connectivity,
    member_lengths,
)

angles = st.floats(-math.pi, math.pi, allow_nan=False)
coords = st.floats(-1.0, 1.0, allow_nan=False)
poses = st.builds(
    lambda a, b, c, x, y, z: ModulePose((a, b, c), (x, y, z)), angles, angles, angles, coords, coords, coords
)


def test_base_nodes_unit_radius():
    # zero height is rejected, so the planar layout is checked in xy only
    S = base_tetra_nodes(TetraParams(1.0, 1.0))
    s = math.sqrt(3) / 2
    np.testing.assert_allclose(
        S[:, :2], [[0, 0], [0, 1], [s, -0.5], [-s, -0.5]], atol=1e-15
    )
    np.testing.assert_array_equal(S[0], [0, 0, 0])


def test_base_nodes_default_dimensions():
    S = base_tetra_nodes(TetraParams(0.1, 0.15))
    np.testing.assert_allclose(S[1:, 2], 0.15)
    np.testing.assert_allclose(np.hypot(S[1:, 0], S[1:, 1]), 0.1)


def test_face_edge_length_matches_prototype():
    r = 0.07 / math.sqrt(3)
    S = base_tetra_nodes(TetraParams(r, 0.05148))
    np.testing.assert_allclose(pdist(S[1:]), 0.07, rtol=1e-12)


@pytest.mark.parametrize("r,h", [(0.0, 0.1), (0.1, 0.0), (-1.0, 1.0), (1.0, -2.0)])
def test_invalid_params(r, h):
    with pytest.raises(InvalidParameterError):
        TetraParams(r, h)


def test_identity_pose_is_noop():
    S = np.random.default_rng(0).normal(size=(4, 3))
    np.testing.assert_array_equal(apply_pose(S, ModulePose()), S)


def test_pure_translation():
    S = np.random.default_rng(1).normal(size=(5, 3))
    out = apply_pose(S, ModulePose(translation=(0, 0, 0.1)))
    np.testing.assert_allclose(out[:, 2], S[:, 2] + 0.1)
    np.testing.assert_array_equal(out[:, :2], S[:, :2])


def test_half_turn_about_z():
    out = apply_pose([[1.0, 0.0, 0.0]], ModulePose((math.pi, 0, 0)))
    np.testing.assert_allclose(out, [[-1.0, 0.0, 0.0]], atol=1e-12)


def test_euler_order_matches_scipy_intrinsic_zyx():
    from scipy.spatial.transform import Rotation

    e = (0.3, -0.7, 1.1)
    np.testing.assert_allclose(
        ModulePose(e).matrix(), Rotation.from_euler("ZYX", e).as_matrix(), atol=1e-15
    )


@settings(max_examples=200, deadline=None)
@given(poses)
def test_pose_preserves_distances(pose):
    S = np.random.default_rng(2).normal(size=(6, 3))
    np.testing.assert_allclose(pdist(apply_pose(S, pose)), pdist(S), rtol=1e-12)


@settings(max_examples=200, deadline=None)
@given(poses, poses)
def test_pose_composition(a, b):
    S = np.random.default_rng(3).normal(size=(6, 3))
    sequential = apply_pose(apply_pose(S, a), b)
    composed = apply_pose(S, compose_poses(a, b))
    np.testing.assert_allclose(composed, sequential, atol=1e-12)


def test_two_module_counts(model2):
    assert model2.n_nodes == 8
    assert model2.n_cables == 9
    assert model2.n_bars == 12
    assert connectivity(model2).shape == (21, 8)


def test_single_module():
    m = build_hedra(1, TetraParams(0.1, 0.15))
    assert (m.n_nodes, m.n_bars, m.n_cables) == (4, 6, 0)


@pytest.mark.parametrize("k", range(1, 9))
def test_counts_match_enumeration(k):
    m = build_hedra(k, TetraParams(0.1, 0.15))
    assert (m.n_nodes, m.n_bars, m.n_cables) == (4 * k, 6 * k, 9 * (k - 1))
    assert len(m.members_of_class(CableClass.SADDLE)) == 3 * (k - 1)
    assert len(m.members_of_class(CableClass.AXIAL)) == 6 * (k - 1)
    assert m.fixed_nodes == {1, 2, 3, 4}
    assert len(m.active_routes) == 3 and all(len(r) == k for r in m.active_routes)


def test_six_active_cables():
    m = build_hedra(4, TetraParams(0.1, 0.15), active_cable_count=6)
    assert len(m.active_routes) == 6
    assert len(set(m.active_routes)) == 6


@pytest.mark.parametrize(
    "kwargs",
    [dict(k=0), dict(k=2, joint_gap=0.0), dict(k=2, joint_gap=0.2), dict(k=2, active_cable_count=4)],
)
def test_build_rejects_bad_input(kwargs):
    k = kwargs.pop("k")
    with pytest.raises(InvalidParameterError):
        build_hedra(k, TetraParams(0.1, 0.15), **kwargs)


def test_printed_connectivity(model2):
    C = connectivity(model2)
    np.testing.assert_array_equal(C.cable_rows, PRINTED_CS)
    np.testing.assert_array_equal(C.bar_rows, PRINTED_CR)


@pytest.mark.parametrize("k", [1, 2, 3, 6])
def test_incidence_rows(k):
    C = connectivity(build_hedra(k, TetraParams(0.1, 0.15))).entries
    assert np.all((C == 1).sum(axis=1) == 1)
    assert np.all((C == -1).sum(axis=1) == 1)
    assert np.all(C.sum(axis=1) == 0)


def test_single_member_matrix():
    m = TensegrityModel(
        nodes=(Node(1, (0, 0, 0)), Node(2, (1, 0, 0))),
        members=(Member(1, MemberKind.BAR, 1, 2, 1.0),),
        fixed_nodes={1},
    )
    np.testing.assert_array_equal(connectivity(m).entries, [[1, -1]])


def test_member_endpoints_sorted():
    mb = Member(1, MemberKind.CABLE, 5, 2, 1.0, CableClass.SADDLE)
    assert (mb.k, mb.j) == (2, 5)
    with pytest.raises(InvalidParameterError):
        Member(1, MemberKind.BAR, 3, 3, 1.0)
    with pytest.raises(InvalidParameterError):
        Member(1, MemberKind.BAR, 1, 2, 1.0, CableClass.AXIAL)
    with pytest.raises(InvalidParameterError):
        Member(1, MemberKind.CABLE, 1, 2, 0.0, CableClass.AXIAL)


def test_member_lengths_axis_aligned():
    m = TensegrityModel(
        nodes=(Node(1, (0, 0, 0)), Node(2, (0.07, 0, 0))),
        members=(Member(1, MemberKind.BAR, 1, 2, 1.0),),
        fixed_nodes={1},
    )
    np.testing.assert_allclose(member_lengths(m, m.positions), [0.07])


def test_module_bar_lengths():
    r = 0.07 / math.sqrt(3)
    m = build_hedra(1, TetraParams(r, 0.05148), joint_gap=0.01)
    L = member_lengths(m, m.positions)
    # bars in order: three apex legs, then three face edges
    np.testing.assert_allclose(L[3:], 0.07, rtol=1e-12)
    np.testing.assert_allclose(L[:3], 0.06544863431220956, rtol=1e-12)


def test_coincident_endpoints_rejected(model2):
    X = model2.positions.copy()
    X[4] = X[1]
    with pytest.raises(DegenerateGeometryError):
        member_lengths(model2, X)


def test_upper_apex_below_lower_face(params):
    m = build_hedra(3, params, joint_gap=0.02)
    X = m.positions
    for lower, upper in itertools.pairwise(m.modules):
        assert X[upper[0] - 1, 2] == pytest.approx(X[lower[1] - 1, 2] - 0.02)


def test_model_rejects_unknown_nodes():
    with pytest.raises(InvalidParameterError):
        TensegrityModel(
            nodes=(Node(1, (0, 0, 0)), Node(2, (1, 0, 0))),
            members=(Member(1, MemberKind.BAR, 1, 3, 1.0),),
            fixed_nodes={1},
        )
    with pytest.raises(InvalidParameterError):
        TensegrityModel(nodes=(Node(2, (0, 0, 0)),), members=(), fixed_nodes={2})
