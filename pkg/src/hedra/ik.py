"""Inverse kinematics by the force density method with tension-only cables.

For a prescribed configuration the equilibrium ``A q = p`` is solved in general
form ``q = A^+ p + N lam`` (``N`` an orthonormal nullspace basis of ``A``), and
``lam`` is chosen to minimise the elastic energy stored in the cables while every
cable density stays at or above ``q_min``. Rest lengths then follow from Hooke's law.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InfeasibleLoadError,
    InvalidParameterError,
    NotStaticallyFeasibleError,
    SlackImpossibleError,
)
from .qp import solve_qp
from .statics import EquilibriumSystem, assemble, forces_from_densities, residual
from .structure import (
    CableClass,
    ModulePose,
    TensegrityModel,
    apply_pose,
    connectivity,
    member_lengths,
)

DEFAULT_Q_MIN = 500.0
DEFAULT_TOL = 1e-8
RCOND = 1e-10


@dataclass(frozen=True)
class IKSolution:
    q: np.ndarray
    rest_lengths: np.ndarray  # cables only
    active_lengths: np.ndarray
    residual: float
    objective: float
    positions: np.ndarray
    lengths: np.ndarray
    forces: np.ndarray
    bar_rest_lengths: np.ndarray
    loads: np.ndarray
    iterations: int = 0
    tolerance: float = DEFAULT_TOL
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def n_cables(self) -> int:
        return self.rest_lengths.size

    @property
    def member_rest_lengths(self) -> np.ndarray:
        """Rest lengths of every member, cables first, for forward simulation."""
        return np.concatenate([self.rest_lengths, self.bar_rest_lengths])


def pseudoinverse(A, rcond: float = RCOND):
    """Return ``(A^+, N)`` from one SVD; singular values below ``rcond * s_max`` count as zero."""
    A = np.asarray(A, dtype=float)
    U, s, Vt = np.linalg.svd(A, full_matrices=True)
    rank = int(np.sum(s > rcond * s[0])) if s.size and s[0] > 0 else 0
    Apinv = (Vt[:rank].T / s[:rank]) @ U[:, :rank].T
    N = Vt[rank:].T.copy()
    return Apinv, N


def solve_general(sys: EquilibriumSystem, p, tol: float = DEFAULT_TOL):
    """Minimum-norm particular solution and an orthonormal nullspace basis of ``A``.

    Raises :class:`InfeasibleLoadError` if ``p`` is not reachable, i.e. the
    least-squares residual exceeds ``tol * max(1, ||p||)``.
    """
    p = np.asarray(p, dtype=float)
    if p.shape != (sys.A.shape[0],):
        raise InvalidParameterError(f"load vector must have length {sys.A.shape[0]}")
    Apinv, N = pseudoinverse(sys.A)
    q_part = Apinv @ p
    res = float(np.linalg.norm(sys.A @ q_part - p))
    if res > tol * max(1.0, float(np.linalg.norm(p))):
        raise InfeasibleLoadError(
            f"load outside the range of the equilibrium matrix (residual {res:.3e} N)", res
        )
    return q_part, N


def _qmin_vector(q_min, model: TensegrityModel | None, s: int) -> np.ndarray:
    if isinstance(q_min, dict):
        if model is None:
            raise InvalidParameterError("per-class q_min needs the model")
        default = float(q_min.get("default", DEFAULT_Q_MIN))
        out = np.full(s, default)
        for key, val in q_min.items():
            if key == "default":
                continue
            idx = [i for i in model.members_of_class(CableClass(key)) if i < s]
            out[idx] = float(val)
        return out
    out = np.broadcast_to(np.asarray(q_min, dtype=float), (s,)).astype(float)
    return out


@dataclass(frozen=True)
class _DensityResult:
    q: np.ndarray
    iterations: int


def _optimize(sys, p, partition, q_min, stiffness, lengths, tol) -> _DensityResult:
    s, r = partition
    A = sys.A
    if A.shape[1] != s + r:
        raise InvalidParameterError(f"partition {partition} does not match {A.shape[1]} members")
    q_min = np.broadcast_to(np.asarray(q_min, dtype=float), (s,))
    if np.any(q_min < 0):
        raise InvalidParameterError("q_min must be non-negative")
    K = np.asarray(stiffness, dtype=float)[:s]
    L = np.asarray(lengths, dtype=float)[:s]
    if np.any(K <= 0) or np.any(L <= 0):
        raise InvalidParameterError("cable stiffness and lengths must be positive")

    q_part, N = solve_general(sys, p, tol)
    if s == 0:
        return _DensityResult(q_part, 0)

    w = L**2 / K  # energy = 1/2 sum w q^2 over cables
    Ns = N[:s]
    # directions that move only bar densities leave the energy unchanged;
    # dropping them yields the minimum-norm optimiser
    if Ns.size:
        _, sv, Vt = np.linalg.svd(Ns, full_matrices=False)
        rho = int(np.sum(sv > RCOND * max(sv[0], 1.0))) if sv.size else 0
        V = Vt[:rho].T
    else:
        V = np.zeros((N.shape[1], 0))
    Gm = Ns @ V
    qs0 = q_part[:s]

    if V.shape[1] == 0:
        if np.any(qs0 < q_min - 1e-9):
            raise NotStaticallyFeasibleError("pose not statically feasible: no self-stress freedom")
        return _DensityResult(q_part, 0)

    wn = w / w.max()
    H = Gm.T @ (wn[:, None] * Gm)
    H = 0.5 * (H + H.T)
    g = Gm.T @ (wn * qs0)
    res = solve_qp(H, g, Gm, q_min - qs0)
    q = q_part + N @ (V @ res.x)
    return _DensityResult(q, res.iterations)


def optimize_densities(sys, p, partition, q_min, stiffness, lengths, tol: float = DEFAULT_TOL):
    """Force densities of least cable energy that equilibrate ``p``.

    Minimises ``sum over cables (q_i l_i)^2 / (2 K_i)`` subject to ``A q = p`` and
    ``q_i >= q_min`` on the first ``s`` (cable) members; bar densities are free.
    Raises :class:`~hedra.errors.NotStaticallyFeasibleError` if no such ``q`` exists.
    """
    return _optimize(sys, p, partition, q_min, stiffness, lengths, tol).q


def rest_lengths(q, lengths, K) -> np.ndarray:
    """Hooke rest lengths ``l0 = l (1 - q / K)``."""
    q = np.asarray(q, dtype=float)
    lengths = np.asarray(lengths, dtype=float)
    K = np.asarray(K, dtype=float)
    if np.any(K <= 0):
        raise InvalidParameterError("stiffness must be positive")
    ratio = q / K
    bad = np.flatnonzero(ratio >= 1.0)
    if bad.size:
        raise SlackImpossibleError(
            f"force density reaches stiffness on members {[int(i) + 1 for i in bad]}: "
            "rest length would be non-positive"
        )
    return lengths * (1.0 - ratio)


def route_lengths(model: TensegrityModel, config) -> np.ndarray:
    """Length of each active cable route, summed over straight viapoint segments."""
    X = np.asarray(config, dtype=float)
    out = np.zeros(len(model.active_routes))
    for i, route in enumerate(model.active_routes):
        idx = np.asarray(route, dtype=int) - 1
        if idx.size > 1:
            out[i] = np.linalg.norm(np.diff(X[idx], axis=0), axis=1).sum()
    return out


def posed_configuration(model: TensegrityModel, poses) -> np.ndarray:
    """Apply one pose per non-base module to the reference configuration."""
    poses = list(poses)
    if len(poses) != model.module_count - 1:
        raise InvalidParameterError(
            f"expected {model.module_count - 1} poses (one per non-base module), got {len(poses)}"
        )
    X = model.positions.copy()
    for module, pose in zip(model.modules[1:], poses):
        idx = np.asarray(module, dtype=int) - 1
        X[idx] = apply_pose(X[idx], pose)
    return X


def solve_pose(
    model: TensegrityModel,
    poses,
    loads=None,
    q_min=DEFAULT_Q_MIN,
    tol: float = DEFAULT_TOL,
) -> IKSolution:
    """Densities, rest lengths and active route lengths that hold the posed structure.

    ``loads`` is a stacked free-node load vector, ``None`` for no load, or a callable
    taking the posed configuration and returning the load vector. ``q_min`` may be a
    scalar, a per-cable array, or a dict keyed by cable class (plus ``"default"``).
    """
    X = posed_configuration(model, [p if isinstance(p, ModulePose) else ModulePose(**p) for p in poses])
    lengths = member_lengths(model, X)
    C = connectivity(model)
    sys = assemble(C, X, model.fixed_nodes)
    if loads is None:
        p = np.zeros(sys.A.shape[0])
    elif callable(loads):
        p = np.asarray(loads(X), dtype=float)
    else:
        p = np.asarray(loads, dtype=float)

    s, r = model.n_cables, model.n_bars
    qmin = _qmin_vector(q_min, model, s)
    K = model.stiffness
    out = _optimize(sys, p, (s, r), qmin, K, lengths, tol)
    q = out.q
    res = residual(sys, q, p)
    if res > tol * max(1.0, float(np.linalg.norm(p))):
        raise InfeasibleLoadError(f"equilibrium residual {res:.3e} N exceeds tolerance", res)

    l0_cables = rest_lengths(q[:s], lengths[:s], K[:s])
    l0_bars = rest_lengths(q[s:], lengths[s:], K[s:])
    f = forces_from_densities(q, lengths)
    objective = float(np.sum(f[:s] ** 2 / (2.0 * K[:s])))
    return IKSolution(
        q=q,
        rest_lengths=l0_cables,
        active_lengths=route_lengths(model, X),
        residual=res,
        objective=objective,
        positions=X,
        lengths=lengths,
        forces=f,
        bar_rest_lengths=l0_bars,
        loads=p,
        iterations=out.iterations,
        tolerance=tol,
    )
