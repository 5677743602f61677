"""Trajectories, forward validation by dynamic relaxation, and end-effector traces."""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.transform import Rotation

from .errors import DivergenceError, InvalidParameterError
from .ik import IKSolution, route_lengths, solve_pose
from .statics import unstack_loads
from .structure import CableClass, ModulePose, TensegrityModel, member_lengths

log = logging.getLogger(__name__)

DEFAULT_NODE_MASS = 0.0035


class Mode(str, enum.Enum):
    BEND = "bend"
    TWIST = "twist"
    CONTRACT = "contract"


@dataclass(frozen=True)
class TrajectorySpec:
    """Bend/twist magnitudes are total angles in radians; contract magnitude is a ratio."""

    mode: Mode
    magnitude: float
    azimuth: float = 0.0
    steps: int = 10

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if not isinstance(self.steps, (int, np.integer)) or self.steps < 1:
            raise InvalidParameterError(f"steps must be an integer >= 1, got {self.steps!r}")
        if not math.isfinite(self.magnitude) or not math.isfinite(self.azimuth):
            raise InvalidParameterError("magnitude and azimuth must be finite")
        if self.mode is Mode.CONTRACT and not (0.0 < self.magnitude <= 1.0):
            raise InvalidParameterError(f"contraction ratio must be in (0, 1], got {self.magnitude}")

    def fractions(self) -> np.ndarray:
        """Interpolation parameter per step; the first step is the reference pose."""
        if self.steps == 1:
            return np.array([1.0])
        return np.linspace(0.0, 1.0, self.steps)


def joint_centers(model: TensegrityModel, config=None) -> np.ndarray:
    """Centroid of the saddle-cable midpoints of each joint, bottom-up, ``(k-1, 3)``."""
    X = model.positions if config is None else np.asarray(config, dtype=float)
    module_of = {nid: i for i, mod in enumerate(model.modules) for nid in mod}
    ends = model.endpoints
    centers = []
    for j in range(1, model.module_count):
        mids = [
            0.5 * (X[ends[i, 0]] + X[ends[i, 1]])
            for i in model.members_of_class(CableClass.SADDLE)
            if {module_of[ends[i, 0] + 1], module_of[ends[i, 1] + 1]} == {j - 1, j}
        ]
        if not mids:
            raise InvalidParameterError(f"joint {j} has no saddle cables")
        centers.append(np.mean(mids, axis=0))
    return np.array(centers).reshape(-1, 3)


def _axis_rotation(axis, angle) -> np.ndarray:
    return Rotation.from_rotvec(np.asarray(axis, dtype=float) * angle).as_matrix()


def _chain_poses(joint_rotations, centers) -> list[ModulePose]:
    # module i moves by G_1 o G_2 o ... o G_i, each G_j a rotation about its
    # reference joint centre
    poses = []
    for i in range(1, len(joint_rotations) + 1):
        R, t = np.eye(3), np.zeros(3)
        for j in range(i - 1, -1, -1):
            Q, c = joint_rotations[j], centers[j]
            R = Q @ R
            t = Q @ t + c - Q @ c
        poses.append(ModulePose.from_matrix(R, t))
    return poses


def pose_sequence(spec: TrajectorySpec, model: TensegrityModel) -> list[list[ModulePose]]:
    """Per-step poses of the non-base modules for a bend, twist or contraction.

    Bend and twist spread the commanded angle equally over the joints, each rotating
    about its virtual joint centre; contraction scales the module pitch.
    """
    k = model.module_count
    n_joints = k - 1
    if spec.mode in (Mode.BEND, Mode.TWIST) and n_joints < 1:
        raise InvalidParameterError(f"{spec.mode.value} needs at least two modules")
    centers = joint_centers(model) if n_joints else np.zeros((0, 3))
    out = []
    for frac in spec.fractions():
        if spec.mode is Mode.CONTRACT:
            ratio = 1.0 - frac * (1.0 - spec.magnitude)
            pitch = float(model.meta.get("pitch", 0.0))
            poses = [
                ModulePose(translation=(0.0, 0.0, -(i + 1) * pitch * (1.0 - ratio)))
                for i in range(n_joints)
            ]
        else:
            per_joint = frac * spec.magnitude / n_joints
            if spec.mode is Mode.BEND:
                axis = (-math.sin(spec.azimuth), math.cos(spec.azimuth), 0.0)
            else:
                axis = (0.0, 0.0, 1.0)
            Q = _axis_rotation(axis, per_joint)
            poses = _chain_poses([Q] * n_joints, centers)
        out.append(poses)
    return out


def active_lengths(model: TensegrityModel, config) -> np.ndarray:
    return route_lengths(model, config)


# --- dynamic relaxation -----------------------------------------------------


@dataclass(frozen=True)
class RelaxationParams:
    """``damping`` is ``"kinetic"`` or a viscous coefficient in N s/m."""

    time_step: float | None = None
    node_mass: float = DEFAULT_NODE_MASS
    damping: str | float = "kinetic"
    max_iterations: int = 200_000
    force_tolerance: float = 1e-6
    kinetic_tolerance: float = 1e-12

    def __post_init__(self):
        if self.time_step is not None and not self.time_step > 0:
            raise InvalidParameterError("time_step must be positive")
        if not self.node_mass > 0:
            raise InvalidParameterError("node_mass must be positive")
        if not (self.force_tolerance > 0 and self.kinetic_tolerance > 0):
            raise InvalidParameterError("tolerances must be positive")
        if self.damping != "kinetic" and not (
            isinstance(self.damping, (int, float)) and self.damping >= 0
        ):
            raise InvalidParameterError("damping must be 'kinetic' or a non-negative coefficient")


def member_tensions(model: TensegrityModel, X, rest) -> np.ndarray:
    """Hooke tensions; cables never push."""
    ends = model.endpoints
    lengths = np.linalg.norm(X[ends[:, 1]] - X[ends[:, 0]], axis=1)
    t = model.stiffness * (lengths - rest)
    return np.where(model.cable_mask, np.maximum(t, 0.0), t)


def nodal_forces(model: TensegrityModel, X, rest, external=None) -> np.ndarray:
    """Net force on every node (fixed nodes included) from members and external loads."""
    X = np.asarray(X, dtype=float)
    ends = model.endpoints
    d = X[ends[:, 1]] - X[ends[:, 0]]
    lengths = np.linalg.norm(d, axis=1)
    t = model.stiffness * (lengths - rest)
    t = np.where(model.cable_mask, np.maximum(t, 0.0), t)
    pull = (t / lengths)[:, None] * d
    F = np.zeros_like(X)
    np.add.at(F, ends[:, 0], pull)
    np.add.at(F, ends[:, 1], -pull)
    if external is not None:
        F += external
    return F


def potential_energy(model: TensegrityModel, X, rest, external=None) -> float:
    """Elastic energy of all members minus the work potential of constant loads."""
    X = np.asarray(X, dtype=float)
    ends = model.endpoints
    lengths = np.linalg.norm(X[ends[:, 1]] - X[ends[:, 0]], axis=1)
    ext = lengths - rest
    ext = np.where(model.cable_mask, np.maximum(ext, 0.0), ext)
    energy = 0.5 * float(np.sum(model.stiffness * ext**2))
    if external is not None:
        energy -= float(np.sum(external * X))
    return energy


def default_time_step(model: TensegrityModel, node_mass: float) -> float:
    """Half the stiffest nodal period scale, ``0.5 sqrt(m / K_node)``.

    ``K_node`` is the largest sum of member stiffnesses meeting at one node, which
    bounds the spectrum of the stiffness matrix from above.
    """
    ends = model.endpoints
    knode = np.zeros(model.n_nodes)
    np.add.at(knode, ends[:, 0], model.stiffness)
    np.add.at(knode, ends[:, 1], model.stiffness)
    return 0.5 * math.sqrt(node_mass / knode.max())


def relax(model: TensegrityModel, rest, loads=None, params: RelaxationParams | None = None, initial=None):
    """Find the static equilibrium for given rest lengths by damped explicit dynamics.

    ``rest`` holds one rest length per member (cables first). ``loads`` is a stacked
    free-node load vector. Fixed nodes stay where ``initial`` (default: the model's
    reference configuration) puts them. Returns ``(positions, diagnostics)``.
    """
    params = params or RelaxationParams()
    rest = np.asarray(rest, dtype=float)
    if rest.shape != (len(model.members),):
        raise InvalidParameterError(f"need {len(model.members)} rest lengths, got {rest.shape}")
    if np.any(rest <= 0):
        raise InvalidParameterError("rest lengths must be positive")
    X = (model.positions if initial is None else np.asarray(initial, dtype=float)).copy()
    external = None if loads is None else unstack_loads(model, loads)
    free = np.ones(model.n_nodes, dtype=bool)
    free[np.array(sorted(model.fixed_nodes), dtype=int) - 1] = False

    dt = params.time_step or default_time_step(model, params.node_mass)
    m = params.node_mass
    V = np.zeros_like(X)
    ke_prev = 0.0
    ke = 0.0
    min_tension = np.inf
    slack_events = 0
    cables = model.cable_mask
    ends = model.endpoints
    K = model.stiffness
    viscous = None if params.damping == "kinetic" else float(params.damping)

    peak = np.inf
    for it in range(params.max_iterations + 1):
        d = X[ends[:, 1]] - X[ends[:, 0]]
        lengths = np.linalg.norm(d, axis=1)
        t = K * (lengths - rest)
        t = np.where(cables, np.maximum(t, 0.0), t)
        if cables.any():
            tc = t[cables]
            min_tension = min(min_tension, float(tc.min()))
            slack_events += int(np.count_nonzero(tc == 0.0))
        pull = (t / lengths)[:, None] * d
        F = np.zeros_like(X)
        np.add.at(F, ends[:, 0], pull)
        np.add.at(F, ends[:, 1], -pull)
        if external is not None:
            F += external
        F[~free] = 0.0
        peak = float(np.max(np.linalg.norm(F, axis=1)))
        if not np.isfinite(peak):
            break
        if peak < params.force_tolerance and ke <= params.kinetic_tolerance:
            diag = dict(
                converged=True,
                iterations=it,
                peak_force=peak,
                kinetic_energy=ke,
                time_step=dt,
                min_cable_tension=min_tension,
                slack_events=slack_events,
            )
            log.debug("relaxation converged in %d iterations", it)
            return X, diag
        if it == params.max_iterations:
            break
        if viscous is None:
            V_new = V + (dt / m) * F
            ke = 0.5 * m * float(np.sum(V_new**2))
            if ke < ke_prev:
                V = np.zeros_like(V)
                ke = 0.0
            else:
                V = V_new
                X = X + dt * V
        else:
            V = V + (dt / m) * (F - viscous * V)
            V[~free] = 0.0
            ke = 0.5 * m * float(np.sum(V**2))
            X = X + dt * V
        ke_prev = ke

    diag = dict(
        converged=False,
        iterations=it,
        peak_force=peak,
        kinetic_energy=ke,
        time_step=dt,
        min_cable_tension=min_tension,
        slack_events=slack_events,
    )
    raise DivergenceError(
        f"relaxation did not converge in {params.max_iterations} iterations "
        f"(peak force {peak:.3e} N)",
        X,
        diag,
    )


# --- traces -----------------------------------------------------------------


@dataclass(frozen=True)
class Trace:
    """One row per trajectory step; angles in degrees, lengths in meters."""

    centroid: np.ndarray
    bend_deg: np.ndarray
    twist_deg: np.ndarray
    cable_lengths: np.ndarray
    validation_error: np.ndarray | None = None

    def __len__(self):
        return len(self.bend_deg)

    def header(self) -> list[str]:
        cols = ["step", "x", "y", "z", "bend_deg", "twist_deg"]
        cols += [f"cable{i + 1}_m" for i in range(self.cable_lengths.shape[1])]
        if self.validation_error is not None:
            cols.append("relax_error_m")
        return cols

    def rows(self):
        for i in range(len(self)):
            row = [i, *self.centroid[i], self.bend_deg[i], self.twist_deg[i], *self.cable_lengths[i]]
            if self.validation_error is not None:
                row.append(self.validation_error[i])
            yield row


def module_rotation(model: TensegrityModel, config, module: int = -1) -> np.ndarray:
    """Best-fit rotation of one module from its reference nodes to ``config``."""
    idx = np.asarray(model.modules[module], dtype=int) - 1
    ref = model.positions[idx]
    cur = np.asarray(config, dtype=float)[idx]
    rot, _ = Rotation.align_vectors(cur - cur.mean(axis=0), ref - ref.mean(axis=0))
    return rot.as_matrix()


def _twist_about_z(R) -> float:
    w_xyz = Rotation.from_matrix(R).as_quat()  # x, y, z, w
    x, y, z, w = w_xyz
    return math.degrees(2.0 * math.atan2(z, w)) if (z or w) else 0.0


def trace(model: TensegrityModel, configurations, errors=None) -> Trace:
    """End-effector centroid, bend and twist angles and route lengths per configuration.

    Bend is the angle between the top module's axis and global z; twist is the
    rotation of the top module about its own axis, from a swing-twist split.
    """
    configs = [np.asarray(c, dtype=float) for c in configurations]
    if not configs:
        raise InvalidParameterError("trace needs at least one configuration")
    top = np.asarray(model.modules[-1], dtype=int) - 1
    face = top[1:]
    cent, bend, twist, cables = [], [], [], []
    for X in configs:
        cent.append(X[face].mean(axis=0))
        R = module_rotation(model, X)
        axis = R[:, 2]
        bend.append(math.degrees(math.atan2(math.hypot(axis[0], axis[1]), axis[2])))
        tw = _twist_about_z(R)
        if tw > 180.0:
            tw -= 360.0
        elif tw <= -180.0:
            tw += 360.0
        twist.append(tw)
        cables.append(route_lengths(model, X))
    return Trace(
        centroid=np.array(cent),
        bend_deg=np.array(bend),
        twist_deg=np.array(twist),
        cable_lengths=np.array(cables).reshape(len(configs), -1),
        validation_error=None if errors is None else np.asarray(errors, dtype=float),
    )


@dataclass(frozen=True)
class TrajectoryResult:
    trace: Trace
    solutions: list[IKSolution]
    relaxed: list[np.ndarray] = field(default_factory=list)
    relax_diagnostics: list[dict] = field(default_factory=list)

    def schedule(self):
        """Actuation schedule rows ``(step, route_id, length_m)``."""
        for step, sol in enumerate(self.solutions):
            for rid, length in enumerate(sol.active_lengths):
                yield step, rid + 1, float(length)


def run_trajectory(
    model: TensegrityModel,
    spec: TrajectorySpec,
    loads=None,
    q_min=500.0,
    tol: float = 1e-8,
    validate: bool = False,
    relax_params: RelaxationParams | None = None,
) -> TrajectoryResult:
    """Solve the IK at every step of a trajectory, optionally relaxing each solution forward.

    When validating, each relaxation starts from the previous step's relaxed state and
    the per-step error is the largest nodal distance to the IK target.
    """
    solutions, relaxed, errors, diags = [], [], [], []
    start = model.positions
    for step, poses in enumerate(pose_sequence(spec, model)):
        sol = solve_pose(model, poses, loads=loads, q_min=q_min, tol=tol)
        solutions.append(sol)
        if validate:
            X, diag = relax(model, sol.member_rest_lengths, sol.loads, relax_params, initial=start)
            relaxed.append(X)
            diags.append(diag)
            errors.append(float(np.max(np.linalg.norm(X - sol.positions, axis=1))))
            start = X
            log.info("step %d relaxed in %d iterations", step, diag["iterations"])
    tr = trace(model, [s.positions for s in solutions], errors if validate else None)
    return TrajectoryResult(tr, solutions, relaxed, diags)


def stack_height(model: TensegrityModel, config=None) -> float:
    X = model.positions if config is None else np.asarray(config, dtype=float)
    return float(X[:, 2].max() - X[:, 2].min())


__all__ = [
    "Mode",
    "TrajectorySpec",
    "RelaxationParams",
    "Trace",
    "TrajectoryResult",
    "active_lengths",
    "joint_centers",
    "member_lengths",
    "member_tensions",
    "nodal_forces",
    "pose_sequence",
    "potential_energy",
    "relax",
    "run_trajectory",
    "stack_height",
    "trace",
]
