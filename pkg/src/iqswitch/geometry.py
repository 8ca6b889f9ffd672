"""Projections onto the row/column-sum cone and its linear span.

The cone consists of matrices expressible as w_i + wt_j with nonnegative
weight vectors w (rows) and wt (columns); its span drops the sign
constraint.  Queue states are split as q = q_para + q_perp with q_para the
Euclidean projection onto the cone; the perpendicular part is the object
the collapse diagnostics track.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceFailure

DEFAULT_TOL = 1e-8
DEFAULT_BUDGET = 100_000


def project_onto_subspace(x: np.ndarray) -> np.ndarray:
    """Orthogonal projection onto the span {w_i + wt_j : w, wt free}.

    Closed form: entry (i, j) of the projection is the row-i average plus
    the column-j average minus the grand average.
    """
    x = np.asarray(x, dtype=np.float64)
    row = x.mean(axis=1, keepdims=True)
    col = x.mean(axis=0, keepdims=True)
    return row + col - x.mean()


def additivity_residual(x: np.ndarray) -> float:
    """Largest entrywise deviation of x from its additive row+column fit.

    Zero exactly when x lies in the span of the row/column generators.
    """
    x = np.asarray(x, dtype=np.float64)
    return float(np.abs(x - project_onto_subspace(x)).max())


@dataclass(frozen=True)
class ConeDecomposition:
    """Split q = q_para + q_perp with q_para = w_i + wt_j, w, wt >= 0.

    kkt_residual is the largest optimality-certificate violation: positive
    inner products of q_perp with any generator ray, loss of orthogonality
    between the two parts (relative to 1 + ||q||^2), or a Pythagoras
    mismatch at the same scale.
    """

    q_para: np.ndarray
    q_perp: np.ndarray
    w: np.ndarray
    w_tilde: np.ndarray
    kkt_residual: float
    iterations: int


def _certificate(x, w, wt):
    """Max certificate violation per item; returns (kkt, row_ip, col_ip).

    Three checks share the budget: positive overlap of the residual with
    any generator ray (absolute), loss of orthogonality between the two
    parts (relative to 1 + ||x||^2), and the implied Pythagoras defect
    (relative to max(1, ||x||^2)).
    """
    res = x - w[:, :, None] - wt[:, None, :]
    row_ip = res.sum(axis=2)
    col_ip = res.sum(axis=1)
    sq = (x * x).sum(axis=(1, 2))
    polar = np.maximum(row_ip.max(axis=1), col_ip.max(axis=1))
    polar = np.maximum(polar, 0.0)
    ortho_abs = np.abs((w * row_ip).sum(axis=1) + (wt * col_ip).sum(axis=1))
    ortho = ortho_abs / (1.0 + sq)
    pyth = 2.0 * ortho_abs / np.maximum(1.0, sq)
    return np.maximum(polar, np.maximum(ortho, pyth)), row_ip, col_ip


def project_batch(
    x: np.ndarray, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_BUDGET
) -> tuple[np.ndarray, np.ndarray, np.ndarray, int]:
    """Project a stack of matrices (B, n, n) onto the cone.

    Accelerated projected gradient on the weight vectors with fixed step
    1/(2n), the inverse curvature of the quadratic objective
    0.5 * ||x - (w_i + wt_j)||^2.  Returns (w, wt, kkt, iterations) where
    kkt holds the per-item certificate residual actually reached.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 2:
        x = x[None]
    b, n, _ = x.shape
    step = 1.0 / (2.0 * n)

    # warm start from the unconstrained additive fit, clipped
    row = x.mean(axis=2)
    col = x.mean(axis=1)
    tot = x.mean(axis=(1, 2))[:, None]
    w = np.maximum(row - 0.5 * tot, 0.0)
    wt = np.maximum(col - 0.5 * tot, 0.0)

    kkt, _, _ = _certificate(x, w, wt)
    if kkt.max() <= tol:
        return w, wt, kkt, 0

    yw, ywt = w.copy(), wt.copy()
    t_mom = 1.0
    it = 0
    while it < max_iter:
        it += 1
        res = x - yw[:, :, None] - ywt[:, None, :]
        gw = -res.sum(axis=2)
        gwt = -res.sum(axis=1)
        w_new = np.maximum(yw - step * gw, 0.0)
        wt_new = np.maximum(ywt - step * gwt, 0.0)
        # gradient-based adaptive restart keeps the momentum honest
        if ((gw * (w_new - w)).sum() + (gwt * (wt_new - wt)).sum()) > 0.0:
            t_next = 1.0
        else:
            t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t_mom * t_mom))
        beta = (t_mom - 1.0) / t_next
        yw = w_new + beta * (w_new - w)
        ywt = wt_new + beta * (wt_new - wt)
        w, wt = w_new, wt_new
        t_mom = t_next
        kkt, _, _ = _certificate(x, w, wt)
        if kkt.max() <= tol:
            break
    return w, wt, kkt, it


def project_onto_cone(
    x: np.ndarray, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_BUDGET
) -> ConeDecomposition:
    """Euclidean projection of one matrix onto the cone.

    Raises ConvergenceFailure if the certificate residual cannot be driven
    below tol within the iteration budget.  The returned weights are
    canonicalized by shifting the flat direction so min(w) = 0.
    """
    x = np.asarray(x, dtype=np.float64)
    w, wt, kkt, it = project_batch(x[None], tol=tol, max_iter=max_iter)
    kkt_val = float(kkt[0])
    if kkt_val > tol:
        raise ConvergenceFailure(
            f"cone projection stalled at certificate residual {kkt_val:.3e} "
            f"after {it} iterations (tol {tol:.1e})"
        )
    w, wt = w[0], wt[0]
    shift = w.min()
    w = w - shift
    wt = wt + shift
    q_para = w[:, None] + wt[None, :]
    return ConeDecomposition(
        q_para=q_para,
        q_perp=x - q_para,
        w=w,
        w_tilde=wt,
        kkt_residual=kkt_val,
        iterations=it,
    )


def perp_norms(x: np.ndarray, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_BUDGET):
    """Norms (||q_para||, ||q_perp||) for a stack of matrices (B, n, n).

    Batch companion of project_onto_cone for diagnostic streams; raises
    ConvergenceFailure if any item misses the certificate tolerance.
    """
    x = np.asarray(x, dtype=np.float64)
    w, wt, kkt, it = project_batch(x, tol=tol, max_iter=max_iter)
    worst = float(kkt.max()) if kkt.size else 0.0
    if worst > tol:
        raise ConvergenceFailure(
            f"batch cone projection stalled at residual {worst:.3e} after {it} iterations"
        )
    para = w[:, :, None] + wt[:, None, :]
    perp = x - para
    return (
        np.sqrt((para * para).sum(axis=(1, 2))),
        np.sqrt((perp * perp).sum(axis=(1, 2))),
    )


def cone_membership(x: np.ndarray, tol: float = 1e-8) -> bool:
    """True when x is within distance tol of the cone.

    Solves well below the membership tolerance so the distance estimate
    itself is trustworthy at the tol scale.
    """
    d = project_onto_cone(x, tol=min(tol, DEFAULT_TOL) / 16.0)
    return float(np.linalg.norm(d.q_perp)) <= tol
