"""Force-density equilibrium assembly, residuals and load construction.

Equilibrium at the free nodes reads ``A q = p`` with
``A = [C^T diag(C x); C^T diag(C y); C^T diag(C z)]`` restricted to free-node rows
and ``p`` stacked as ``(p_x; p_y; p_z)``. A positive density is tension.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptySystemError, InvalidParameterError
from .structure import ConnectivityMatrix, MemberKind, TensegrityModel, member_lengths

GRAVITY = 9.81
DEFAULT_MASS_PER_LENGTH = 0.05


@dataclass(frozen=True)
class EquilibriumSystem:
    A: np.ndarray
    free_nodes: tuple[int, ...]
    n_cables: int

    @property
    def free_node_index(self) -> dict[int, int]:
        """Node id -> position within each coordinate block of ``A``."""
        return {nid: i for i, nid in enumerate(self.free_nodes)}

    @property
    def n_members(self) -> int:
        return self.A.shape[1]


@dataclass(frozen=True)
class ForceState:
    q: np.ndarray
    f: np.ndarray
    residual: float


def assemble(C: ConnectivityMatrix, config, fixed) -> EquilibriumSystem:
    """Build the equilibrium matrix for the free nodes of ``config``."""
    Cm = np.asarray(C.entries, dtype=float)
    X = np.asarray(config, dtype=float)
    m, n = Cm.shape
    if X.shape != (n, 3):
        raise InvalidParameterError(f"configuration must be ({n}, 3), got {X.shape}")
    if m == 0:
        raise EmptySystemError("no members: the equilibrium system has no unknowns")
    fixed = {int(i) for i in fixed}
    free = [i for i in range(1, n + 1) if i not in fixed]
    if not free:
        raise EmptySystemError("all nodes are fixed: no equilibrium rows remain")
    rows = np.array(free) - 1
    D = Cm @ X  # (m, 3) member coordinate differences
    A = np.vstack([(Cm.T * D[:, c])[rows] for c in range(3)])
    return EquilibriumSystem(A, tuple(free), C.n_cables)


def residual(sys: EquilibriumSystem, q, p) -> float:
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    if q.shape != (sys.A.shape[1],) or p.shape != (sys.A.shape[0],):
        raise InvalidParameterError(
            f"dimension mismatch: A is {sys.A.shape}, q {q.shape}, p {p.shape}"
        )
    return float(np.linalg.norm(sys.A @ q - p))


def forces_from_densities(q, lengths) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    lengths = np.asarray(lengths, dtype=float)
    if q.shape != lengths.shape:
        raise InvalidParameterError(f"shape mismatch: q {q.shape}, lengths {lengths.shape}")
    return q * lengths


def stack_loads(model: TensegrityModel, nodal) -> np.ndarray:
    """Convert an ``(n, 3)`` nodal force array to the stacked free-node load vector."""
    F = np.asarray(nodal, dtype=float).reshape(model.n_nodes, 3)
    rows = np.array(model.free_nodes, dtype=int) - 1
    return np.concatenate([F[rows, c] for c in range(3)])


def unstack_loads(model: TensegrityModel, p) -> np.ndarray:
    """Inverse of :func:`stack_loads`; fixed-node rows come back as zeros."""
    p = np.asarray(p, dtype=float)
    free = np.array(model.free_nodes, dtype=int) - 1
    nf = len(free)
    if p.shape != (3 * nf,):
        raise InvalidParameterError(f"load vector must have length {3 * nf}, got {p.shape}")
    F = np.zeros((model.n_nodes, 3))
    for c in range(3):
        F[free, c] = p[c * nf : (c + 1) * nf]
    return F


def gravity_loads(
    model: TensegrityModel,
    config,
    member_mass_per_length: float = DEFAULT_MASS_PER_LENGTH,
    node_masses: dict[int, float] | None = None,
    payload=None,
    cable_mass_per_length: float = 0.0,
    g: float = GRAVITY,
) -> np.ndarray:
    """Lumped-mass self weight plus point payloads, as a stacked free-node load vector.

    Each bar's mass (``member_mass_per_length`` times its current length) is split
    evenly between its endpoints; cables use ``cable_mass_per_length``. ``payload`` is
    a ``(node_id, force_xyz)`` pair or a list of them.
    """
    if member_mass_per_length < 0 or cable_mass_per_length < 0:
        raise InvalidParameterError("masses per length must be non-negative")
    n = model.n_nodes
    mass = np.zeros(n)
    if member_mass_per_length > 0 or cable_mass_per_length > 0:
        lengths = member_lengths(model, config)
        rho = np.array(
            [
                member_mass_per_length if mb.kind is MemberKind.BAR else cable_mass_per_length
                for mb in model.members
            ]
        )
        half = 0.5 * rho * lengths
        ends = model.endpoints
        np.add.at(mass, ends[:, 0], half)
        np.add.at(mass, ends[:, 1], half)
    for nid, mval in (node_masses or {}).items():
        if not 1 <= int(nid) <= n:
            raise InvalidParameterError(f"node mass on unknown node {nid}")
        if mval < 0:
            raise InvalidParameterError("node masses must be non-negative")
        mass[int(nid) - 1] += mval

    F = np.zeros((n, 3))
    F[:, 2] = -g * mass
    if payload is not None:
        items = [payload] if np.isscalar(payload[0]) else payload
        for nid, force in items:
            if not 1 <= int(nid) <= n:
                raise InvalidParameterError(f"payload on unknown node {nid}")
            F[int(nid) - 1] += np.asarray(force, dtype=float)
    return stack_loads(model, F)
