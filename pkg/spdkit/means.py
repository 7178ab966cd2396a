"""
Weighted Fréchet (Karcher) means under the affine-invariant metric, and their
Log-Euclidean counterpart.
"""

import logging

import numpy as np

from .exceptions import DimensionMismatch, MaxIterExceeded
from .optim import is_simplex, uniform_weights
from .params import MeanParams
from .spd import _frozen, _require_positive, expm, logm, sym_eig, whiten

logger = logging.getLogger(__name__)


def _prepare(points, weights):
    points = [np.asarray(p, dtype=float) for p in points]
    if not points:
        raise ValueError("need at least one point")
    if len({p.shape for p in points}) != 1:
        raise DimensionMismatch("all points must share one dimension")
    if weights is None:
        weights = uniform_weights(len(points))
    weights = np.asarray(weights, dtype=float).ravel()
    if weights.size != len(points):
        raise DimensionMismatch(f"{len(points)} points but {weights.size} weights")
    if not is_simplex(weights):
        raise ValueError("weights must be nonnegative and sum to one")
    return points, weights


def _whitened_logs(inv_root, points):
    logs = np.empty((len(points),) + inv_root.shape)
    for i, x in enumerate(points):
        pair = sym_eig(inv_root @ x @ inv_root)
        _require_positive(pair, "log")
        q = pair.vectors
        logs[i] = (q * np.log(pair.values)) @ q.T
    return logs


def le_mean(points, weights=None):
    """Log-Euclidean weighted mean exp(Σ wᵢ log Xᵢ)."""
    points, weights = _prepare(points, weights)
    acc = sum(w * logm(x) for w, x in zip(weights, points) if w > 0)
    return expm(acc)


def frechet_objective(points, weights, m):
    """Σ wᵢ d_g²(M, Xᵢ)."""
    points, weights = _prepare(points, weights)
    _, inv_root = whiten(m)
    logs = _whitened_logs(inv_root, points)
    return float(np.einsum("i,ijk,ijk->", weights, logs, logs))


def karcher_residual(points, weights, m):
    """Norm, in the metric at M, of the weighted sum of log_map(M, Xᵢ).

    Zero exactly at the weighted Fréchet mean. Measured in the metric at M it
    equals the Frobenius norm of Σ wᵢ log(M^{-1/2} Xᵢ M^{-1/2}). This is the norm
    `frechet_mean` stops on rather than the plain Frobenius norm of the tangent
    sum, so the residual is unchanged under X ↦ AXAᵀ.
    """
    points, weights = _prepare(points, weights)
    _, inv_root = whiten(m)
    logs = _whitened_logs(inv_root, points)
    return float(np.linalg.norm(np.tensordot(weights, logs, axes=1), "fro"))


def _curvature_step(weights, logs):
    """Step 2/(1 + H) for the Karcher update, H = Σ wᵢ (δᵢ/2)·coth(δᵢ/2).

    δᵢ is the eigenvalue spread of log(M^{-1/2} Xᵢ M^{-1/2}); (δ/2)·coth(δ/2) bounds the
    Hessian of ½d²(·, Xᵢ) at M, whose smallest eigenvalue is 1.
    """
    values = np.linalg.eigvalsh(logs)
    half = (values[:, -1] - values[:, 0]) / 2.0
    safe = np.where(half > 1e-12, half, 1.0)
    bounds = np.where(half > 1e-12, safe / np.tanh(safe), 1.0)
    return 2.0 / (1.0 + float(weights @ bounds))


def frechet_mean(points, weights=None, params=None):
    """Weighted Fréchet mean by Riemannian gradient descent.

    Starts at the Log-Euclidean mean and repeats M ← exp_map(M, t·Σ wᵢ log_map(M, Xᵢ)).
    Each iteration takes t = 2/(1 + H) from the curvature bound of the current logs
    (t = 1 when every Xᵢ is a multiple of M), capped at `params.step`, and halves it
    while the weighted sum of squared distances would increase.

    Raises:
        MaxIterExceeded: the Karcher residual is still above tolerance after
            `params.max_iter` iterations; carries the last iterate and residual.
    """
    params = params or MeanParams()
    points, weights = _prepare(points, weights)
    keep = weights > 0
    points = [p for p, k in zip(points, keep) if k]
    weights = weights[keep]
    if len(points) == 1:
        return _frozen(np.array(points[0]))

    tol = params.tolerance(points[0].shape[0])
    m = np.array(le_mean(points, weights))
    root, inv_root = whiten(m)
    logs = _whitened_logs(inv_root, points)
    objective = float(np.einsum("i,ijk,ijk->", weights, logs, logs))

    for iteration in range(params.max_iter):
        tangent = np.tensordot(weights, logs, axes=1)
        residual = float(np.linalg.norm(tangent, "fro"))
        if residual <= tol:
            logger.debug("frechet_mean converged after %d iterations (residual %.3e)", iteration, residual)
            return _frozen(m)

        step = min(params.step, _curvature_step(weights, logs))
        while True:
            candidate = root @ expm(step * tangent) @ root
            candidate = (candidate + candidate.T) / 2.0
            c_root, c_inv_root = whiten(candidate)
            c_logs = _whitened_logs(c_inv_root, points)
            c_objective = float(np.einsum("i,ijk,ijk->", weights, c_logs, c_logs))
            if c_objective <= objective + 1e-12 * (1.0 + objective) or step < 1e-8:
                break
            step /= 2.0

        m, root, inv_root, logs, objective = candidate, c_root, c_inv_root, c_logs, c_objective

    residual = float(np.linalg.norm(np.tensordot(weights, logs, axes=1), "fro"))
    if residual <= tol:
        return _frozen(m)
    raise MaxIterExceeded(
        f"Karcher iteration did not reach tolerance {tol:.1e} in {params.max_iter} iterations "
        f"(residual {residual:.3e})",
        iterate=_frozen(m),
        residual=residual,
    )
