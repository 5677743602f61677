"""Dense strictly convex QP with inequality constraints, dual active-set method.

Solves::

    minimize    1/2 x^T H x + g^T x
    subject to  G x >= b

following Goldfarb and Idnani: start at the unconstrained minimum and repeatedly
add the most violated constraint, dropping active constraints whose multipliers
would turn negative. The problems met here have tens of variables, so the projected
inverse Hessian is recomputed from scratch at each step instead of being updated.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import NotStaticallyFeasibleError


@dataclass(frozen=True)
class QPResult:
    x: np.ndarray
    multipliers: np.ndarray  # one per constraint row, zero when inactive
    active: tuple[int, ...]
    iterations: int


def solve_qp(H, g, G, b, max_iter: int | None = None, feas_tol: float = 1e-12) -> QPResult:
    """Minimize the quadratic subject to ``G x >= b``.

    ``H`` must be symmetric positive definite. Raises
    :class:`NotStaticallyFeasibleError` when the constraints admit no point.
    ``feas_tol`` is relative to the magnitude of ``b`` and ``G x``.
    """
    H = np.asarray(H, dtype=float)
    g = np.asarray(g, dtype=float)
    G = np.asarray(G, dtype=float).reshape(-1, H.shape[0])
    b = np.asarray(b, dtype=float)
    n, m = H.shape[0], G.shape[0]
    if max_iter is None:
        max_iter = 50 * (n + m) + 100

    chol = cho_factor(H)
    Hinv = cho_solve(chol, np.eye(n))
    Hinv = 0.5 * (Hinv + Hinv.T)
    x = -cho_solve(chol, g)

    active: list[int] = []
    u = np.zeros(0)
    iterations = 0

    def violation_tol(xv):
        return feas_tol * max(1.0, np.max(np.abs(b), initial=0.0), np.max(np.abs(G @ xv), initial=0.0))

    while True:
        slack = G @ x - b
        if active:
            slack[active] = np.inf
        p = int(np.argmin(slack)) if m else -1
        if m == 0 or slack[p] >= -violation_tol(x):
            break
        n_p = G[p]
        u_p = 0.0
        while True:
            iterations += 1
            if iterations > max_iter:
                raise RuntimeError(f"QP did not terminate within {max_iter} iterations")
            if active:
                NA = G[active].T
                HN = Hinv @ NA
                M = NA.T @ HN
                r = np.linalg.solve(M, HN.T @ n_p)
                z = Hinv @ (n_p - NA @ r)
            else:
                r = np.zeros(0)
                z = Hinv @ n_p

            # dual step length: first active multiplier to reach zero
            t1, k_drop = np.inf, -1
            pos = np.flatnonzero(r > 0)
            if pos.size:
                ratios = u[pos] / r[pos]
                j = int(np.argmin(ratios))
                t1, k_drop = float(ratios[j]), int(pos[j])

            # primal step length: reach the violated constraint
            curv = float(z @ n_p)
            scale = float(n_p @ Hinv @ n_p)
            t2 = np.inf
            if curv > 1e-12 * scale:
                t2 = -(float(n_p @ x) - b[p]) / curv

            if np.isinf(t1) and np.isinf(t2):
                raise NotStaticallyFeasibleError(
                    f"constraint {p} cannot be satisfied together with the active set"
                )
            if np.isinf(t2):
                u = u - t1 * r
                u_p += t1
                del active[k_drop]
                u = np.delete(u, k_drop)
                continue

            t = min(t1, t2)
            x = x + t * z
            u = u - t * r
            u_p += t
            if t2 <= t1:
                active.append(p)
                u = np.append(u, u_p)
                break
            del active[k_drop]
            u = np.delete(u, k_drop)

    mult = np.zeros(m)
    if active:
        mult[active] = u
    return QPResult(x=x, multipliers=mult, active=tuple(active), iterations=iterations)
