"""Stacked tetrahedral tensegrity models: geometry, members and incidence matrices.

Node ids are 1-based and contiguous. Modules are numbered bottom-up from 0; module
``m`` owns nodes ``4m+1`` (apex) and ``4m+2 .. 4m+4`` (triangle, in the order
``0, 2pi/3, -2pi/3`` of the face parameterization). All lengths are meters.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.transform import Rotation

from .errors import DegenerateGeometryError, InvalidParameterError

ALPHA = 2.0 * math.pi / 3.0

DEFAULT_CABLE_STIFFNESS = 10000.0
DEFAULT_BAR_STIFFNESS = 1.0e6
DEFAULT_JOINT_GAP = 0.02


class MemberKind(str, enum.Enum):
    CABLE = "cable"
    BAR = "bar"


class CableClass(str, enum.Enum):
    SADDLE = "saddle"
    AXIAL = "axial"
    ACTIVE_SEGMENT = "active_segment"
    NONE = "none"


@dataclass(frozen=True)
class TetraParams:
    """Module dimensions: face circumradius, height, and the fixed 120 degree spacing."""

    radius: float
    height: float
    alpha: float = ALPHA

    def __post_init__(self):
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise InvalidParameterError(f"radius must be positive, got {self.radius}")
        if not (self.height > 0 and math.isfinite(self.height)):
            raise InvalidParameterError(f"height must be positive, got {self.height}")


@dataclass(frozen=True)
class ModulePose:
    """Rigid transform of one module.

    ``euler`` is (yaw about z, pitch about y, roll about x) in radians, intrinsic
    Z-Y-X. Points are row vectors and map as ``S @ R + t``.
    """

    euler: tuple[float, float, float] = (0.0, 0.0, 0.0)
    translation: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        e = tuple(float(v) for v in self.euler)
        t = tuple(float(v) for v in self.translation)
        if len(e) != 3 or len(t) != 3:
            raise InvalidParameterError("euler and translation need three components each")
        if not all(math.isfinite(v) for v in e + t):
            raise InvalidParameterError("pose components must be finite")
        object.__setattr__(self, "euler", e)
        object.__setattr__(self, "translation", t)

    @classmethod
    def from_matrix(cls, rotation, translation=(0.0, 0.0, 0.0)) -> "ModulePose":
        """Build a pose from a column-convention rotation matrix (``x' = R x + t``)."""
        with warnings.catch_warnings():
            # at +-90 deg pitch scipy warns and zeroes roll; the rotation is still exact
            warnings.simplefilter("ignore", UserWarning)
            yaw, pitch, roll = Rotation.from_matrix(np.asarray(rotation, dtype=float)).as_euler("ZYX")
        return cls((yaw, pitch, roll), tuple(np.asarray(translation, dtype=float)))

    def matrix(self) -> np.ndarray:
        """Column-convention rotation matrix ``Rz(yaw) Ry(pitch) Rx(roll)``."""
        return rotation_matrix(*self.euler)

    def is_identity(self) -> bool:
        return self.euler == (0.0, 0.0, 0.0) and self.translation == (0.0, 0.0, 0.0)


def rotation_matrix(yaw: float, pitch: float, roll: float) -> np.ndarray:
    cz, sz = math.cos(yaw), math.sin(yaw)
    cy, sy = math.cos(pitch), math.sin(pitch)
    cx, sx = math.cos(roll), math.sin(roll)
    rz = np.array([[cz, -sz, 0.0], [sz, cz, 0.0], [0.0, 0.0, 1.0]])
    ry = np.array([[cy, 0.0, sy], [0.0, 1.0, 0.0], [-sy, 0.0, cy]])
    rx = np.array([[1.0, 0.0, 0.0], [0.0, cx, -sx], [0.0, sx, cx]])
    return rz @ ry @ rx


def apply_pose(nodes, pose: ModulePose) -> np.ndarray:
    """Rigidly transform an ``(n, 3)`` block of row-vector positions.

    The translation is broadcast to every row.
    """
    S = np.asarray(nodes, dtype=float).reshape(-1, 3)
    if pose.is_identity():
        return S.copy()
    return S @ pose.matrix().T + np.asarray(pose.translation)


def compose_poses(first: ModulePose, second: ModulePose) -> ModulePose:
    """Pose equivalent to applying ``first`` and then ``second``."""
    r1, r2 = first.matrix(), second.matrix()
    t = r2 @ np.asarray(first.translation) + np.asarray(second.translation)
    return ModulePose.from_matrix(r2 @ r1, t)


def base_tetra_nodes(params: TetraParams, phase: float = 0.0) -> np.ndarray:
    """Apex at the local origin followed by the three face nodes at height ``h``.

    ``phase`` rotates the face about the local z axis (used for alternating modules).
    """
    r, h, a = params.radius, params.height, params.alpha
    angles = (phase, phase + a, phase - a)
    pts = [(0.0, 0.0, 0.0)]
    pts += [(r * math.sin(t), r * math.cos(t), h) for t in angles]
    return np.array(pts)


@dataclass(frozen=True)
class Node:
    id: int
    position: tuple[float, float, float]

    def __post_init__(self):
        pos = tuple(float(v) for v in self.position)
        if len(pos) != 3 or not all(math.isfinite(v) for v in pos):
            raise InvalidParameterError(f"node {self.id}: position must be three finite numbers")
        object.__setattr__(self, "position", pos)


@dataclass(frozen=True)
class Member:
    id: int
    kind: MemberKind
    k: int
    j: int
    stiffness: float
    cable_class: CableClass = CableClass.NONE
    rest_length: float | None = None

    def __post_init__(self):
        kind = MemberKind(self.kind)
        cls = CableClass(self.cable_class)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "cable_class", cls)
        if self.k == self.j:
            raise InvalidParameterError(f"member {self.id} connects node {self.k} to itself")
        if self.k > self.j:
            k, j = self.j, self.k
            object.__setattr__(self, "k", k)
            object.__setattr__(self, "j", j)
        if not self.stiffness > 0:
            raise InvalidParameterError(f"member {self.id}: stiffness must be positive")
        if kind is MemberKind.BAR and cls is not CableClass.NONE:
            raise InvalidParameterError(f"member {self.id}: bars carry no cable class")
        if kind is MemberKind.CABLE and cls is CableClass.NONE:
            raise InvalidParameterError(f"member {self.id}: cables need a cable class")

    @property
    def is_cable(self) -> bool:
        return self.kind is MemberKind.CABLE


@dataclass(frozen=True)
class ConnectivityMatrix:
    """Incidence matrix with the cable rows stacked above the bar rows."""

    entries: np.ndarray
    n_cables: int

    @property
    def cable_rows(self) -> np.ndarray:
        return self.entries[: self.n_cables]

    @property
    def bar_rows(self) -> np.ndarray:
        return self.entries[self.n_cables :]

    @property
    def shape(self):
        return self.entries.shape


@dataclass(frozen=True)
class TensegrityModel:
    """A tensegrity graph: nodes, members (cables first), grounded nodes and cable routes.

    ``modules`` lists the node ids of each rigid module bottom-up; ``meta`` keeps the
    builder parameters (``k``, ``radius``, ``height``, ``gap``, ``pitch``).
    """

    nodes: tuple[Node, ...]
    members: tuple[Member, ...]
    fixed_nodes: frozenset[int]
    active_routes: tuple[tuple[int, ...], ...] = ()
    modules: tuple[tuple[int, ...], ...] = ()
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "members", tuple(self.members))
        object.__setattr__(self, "fixed_nodes", frozenset(int(i) for i in self.fixed_nodes))
        object.__setattr__(self, "active_routes", tuple(tuple(int(i) for i in r) for r in self.active_routes))
        object.__setattr__(self, "modules", tuple(tuple(int(i) for i in m) for m in self.modules))
        ids = [nd.id for nd in self.nodes]
        if ids != list(range(1, len(ids) + 1)):
            raise InvalidParameterError("node ids must be contiguous from 1")
        n = len(ids)
        seen_bar = False
        for mb in self.members:
            if mb.j > n:
                raise InvalidParameterError(f"member {mb.id} references unknown node {mb.j}")
            if mb.kind is MemberKind.BAR:
                seen_bar = True
            elif seen_bar:
                raise InvalidParameterError("cables must precede bars in the member list")
        refs = set(self.fixed_nodes)
        for r in self.active_routes:
            refs.update(r)
        for m in self.modules:
            refs.update(m)
        bad = [i for i in refs if not 1 <= i <= n]
        if bad:
            raise InvalidParameterError(f"unknown node ids referenced: {sorted(bad)}")

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_cables(self) -> int:
        return sum(1 for mb in self.members if mb.is_cable)

    @property
    def n_bars(self) -> int:
        return len(self.members) - self.n_cables

    @property
    def module_count(self) -> int:
        return len(self.modules)

    @property
    def positions(self) -> np.ndarray:
        """Reference configuration as an ``(n, 3)`` array."""
        return np.array([nd.position for nd in self.nodes], dtype=float).reshape(-1, 3)

    @property
    def endpoints(self) -> np.ndarray:
        """Zero-based ``(m, 2)`` endpoint indices."""
        return np.array([(mb.k - 1, mb.j - 1) for mb in self.members], dtype=int).reshape(-1, 2)

    @property
    def stiffness(self) -> np.ndarray:
        return np.array([mb.stiffness for mb in self.members], dtype=float)

    @property
    def cable_mask(self) -> np.ndarray:
        return np.array([mb.is_cable for mb in self.members], dtype=bool)

    @property
    def free_nodes(self) -> list[int]:
        return [nd.id for nd in self.nodes if nd.id not in self.fixed_nodes]

    def members_of_class(self, cls: CableClass) -> list[int]:
        """Zero-based member indices of a cable class."""
        cls = CableClass(cls)
        return [i for i, mb in enumerate(self.members) if mb.cable_class is cls]


def build_hedra(
    k: int,
    params: TetraParams,
    joint_gap: float = DEFAULT_JOINT_GAP,
    active_cable_count: int = 3,
    cable_stiffness: float = DEFAULT_CABLE_STIFFNESS,
    bar_stiffness: float = DEFAULT_BAR_STIFFNESS,
) -> TensegrityModel:
    """Stack ``k`` apex-down tetrahedra joined by saddle and axial cables.

    Module ``m`` sits ``m * (h - joint_gap)`` above the base, so each upper apex hangs
    ``joint_gap`` below the face of the module beneath it and the saddle cables can
    carry it. Odd modules are turned by -60 degrees about z so that every lower face
    node sits midway between the two upper face nodes it is tied to.

    Per joint the cables are, in order: the 3 saddle cables (lower face node to upper
    apex) and then, for each lower face node, its two axial cables to the neighbouring
    upper face nodes. With ``k = 2`` this gives exactly the 9 x 8 cable block and
    12 x 8 bar block of the two-module reference structure.

    Active route ``c`` threads face node ``c`` of every module. With six active
    cables, route ``c + 3`` takes the other neighbour on odd modules, so routes come
    in pairs straddling each azimuth.
    """
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise InvalidParameterError(f"module count must be an integer >= 1, got {k!r}")
    if not (0 < joint_gap < params.height):
        raise InvalidParameterError(
            f"joint_gap must lie in (0, height={params.height}), got {joint_gap}"
        )
    if active_cable_count not in (3, 6):
        raise InvalidParameterError(f"active_cable_count must be 3 or 6, got {active_cable_count}")

    pitch = params.height - joint_gap
    coords = []
    for m in range(k):
        local = base_tetra_nodes(params, phase=-(math.pi / 3.0) * (m % 2))
        local[:, 2] += m * pitch
        coords.append(local)
    X = np.vstack(coords)
    nodes = [Node(i + 1, tuple(p)) for i, p in enumerate(X)]

    pairs = []
    for m in range(k - 1):
        lo, up = 4 * m, 4 * (m + 1)
        lower_face = [lo + 2 + t for t in range(3)]
        upper_apex = up + 1
        for t in range(3):
            pairs.append((lower_face[t], upper_apex, CableClass.SADDLE))
        step = 1 if m % 2 == 0 else -1
        for t in range(3):
            pairs.append((lower_face[t], up + 2 + t, CableClass.AXIAL))
            pairs.append((lower_face[t], up + 2 + (t + step) % 3, CableClass.AXIAL))

    members = [
        Member(i + 1, MemberKind.CABLE, a, b, cable_stiffness, cls)
        for i, (a, b, cls) in enumerate(pairs)
    ]
    for m in range(k):
        a = 4 * m + 1
        for u, v in ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)):
            members.append(Member(len(members) + 1, MemberKind.BAR, a + u, a + v, bar_stiffness))

    routes = [[4 * m + 2 + c for m in range(k)] for c in range(3)]
    if active_cable_count == 6:
        routes += [
            [4 * m + 2 + (c if m % 2 == 0 else (c + 1) % 3) for m in range(k)] for c in range(3)
        ]

    return TensegrityModel(
        nodes=tuple(nodes),
        members=tuple(members),
        fixed_nodes=frozenset(range(1, 5)),
        active_routes=tuple(tuple(r) for r in routes),
        modules=tuple(tuple(range(4 * m + 1, 4 * m + 5)) for m in range(k)),
        meta={
            "k": k,
            "radius": params.radius,
            "height": params.height,
            "gap": joint_gap,
            "pitch": pitch,
        },
    )


def connectivity(model: TensegrityModel) -> ConnectivityMatrix:
    m, n = len(model.members), model.n_nodes
    C = np.zeros((m, n))
    ends = model.endpoints
    rows = np.arange(m)
    C[rows, ends[:, 0]] = 1.0
    C[rows, ends[:, 1]] = -1.0
    return ConnectivityMatrix(C, model.n_cables)


def member_lengths(model: TensegrityModel, config) -> np.ndarray:
    X = np.asarray(config, dtype=float)
    if X.shape != (model.n_nodes, 3):
        raise InvalidParameterError(
            f"configuration must be ({model.n_nodes}, 3), got {X.shape}"
        )
    ends = model.endpoints
    lengths = np.linalg.norm(X[ends[:, 1]] - X[ends[:, 0]], axis=1)
    bad = np.flatnonzero(lengths == 0.0)
    if bad.size:
        raise DegenerateGeometryError(
            f"members with coincident endpoints: {[int(i) + 1 for i in bad]}"
        )
    return lengths
