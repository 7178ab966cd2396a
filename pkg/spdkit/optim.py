"""
Solvers over the probability simplex

- project_simplex: Euclidean projection onto {w ≥ 0, Σw = 1}
- spg_minimize: spectral projected gradient with a nonmonotone Armijo line search
- qp_simplex: min wᵀGw − 2bᵀw over the simplex, SPG followed by a KKT polish and check
"""

import logging
from collections import deque
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .exceptions import InvalidGram, SolverDivergence
from .params import SolveReport, SpgParams

logger = logging.getLogger(__name__)

SimplexWeights = NDArray[np.float64]

SIMPLEX_SUM_TOL = 1e-10
KKT_TOL = 1e-7
SUPPORT_TOL = 1e-8


def uniform_weights(n):
    if n < 1:
        raise ValueError("need at least one weight")
    return np.full(n, 1.0 / n)


def is_simplex(w, tol=SIMPLEX_SUM_TOL):
    w = np.asarray(w, dtype=float)
    return bool(w.ndim == 1 and w.size >= 1 and np.all(w >= 0) and abs(w.sum() - 1.0) <= tol)


def project_simplex(v):
    """Euclidean projection of `v` onto the probability simplex.

    Sort-based algorithm: find the largest ρ with u_ρ − (Σ_{j≤ρ} u_j − 1)/ρ > 0 on the
    values sorted in decreasing order, then shift and clip.
    """
    v = np.asarray(v, dtype=np.float64).ravel()
    if v.size == 0:
        raise ValueError("cannot project an empty vector onto the simplex")
    if not np.all(np.isfinite(v)):
        raise ValueError("cannot project a vector with non-finite entries")
    u = -np.sort(-v, kind="stable")
    css = np.cumsum(u)
    k = np.arange(1, v.size + 1)
    rho = np.nonzero(u - (css - 1.0) / k > 0)[0][-1]
    theta = (css[rho] - 1.0) / (rho + 1.0)
    w = np.maximum(v - theta, 0.0)
    return w / w.sum()


def _projected_grad_norm(w, g):
    return float(np.max(np.abs(project_simplex(w - g) - w)))


def spg_minimize(f, grad, w0=None, params=None, n=None):
    """Minimize a smooth function over the probability simplex.

    Args:
        f: objective, maps a weight vector to a float.
        grad: gradient of `f`, maps a weight vector to an array of the same shape.
        w0: feasible starting point. Defaults to uniform weights (requires `n`).
        params: SpgParams; defaults used when omitted.

    Returns:
        tuple: (weights, SolveReport). The returned weights are the best iterate
        seen, so f(weights) ≤ f(w0).

    Raises:
        SolverDivergence: the objective or gradient produced a non-finite value.
    """
    params = params or SpgParams()
    if w0 is None:
        if n is None:
            raise ValueError("either w0 or n is required")
        w0 = uniform_weights(n)
    w = project_simplex(w0)

    fw = float(f(w))
    g = np.asarray(grad(w), dtype=float)
    if not np.isfinite(fw) or not np.all(np.isfinite(g)):
        raise SolverDivergence("objective is not finite at the starting point", iterate=w)

    best_w, best_f = w, fw
    history = deque([fw], maxlen=params.line_search_memory)
    pg = _projected_grad_norm(w, g)
    alpha = float(np.clip(1.0 / max(pg, 1e-300), params.step_min, params.step_max))
    converged = pg <= params.grad_tol
    iterations = 0

    while not converged and iterations < params.max_iter:
        iterations += 1
        target = project_simplex(w - alpha * g)
        d = target - w
        gtd = float(g @ d)
        if gtd >= 0:
            # no descent left at machine precision
            break

        # nonmonotone Armijo test against the worst of the last few objective values
        f_ref = max(history)
        lam = 1.0
        accepted = False
        while lam * np.max(np.abs(d)) >= 1e-16:
            w_new = (1.0 - lam) * w + lam * target
            f_new = float(f(w_new))
            if not np.isfinite(f_new):
                raise SolverDivergence(f"objective became non-finite at iteration {iterations}", iterate=w_new)
            if f_new <= f_ref + params.armijo_c * lam * gtd:
                accepted = True
                break
            denom = f_new - fw - lam * gtd
            lam_next = -0.5 * gtd * lam * lam / denom if denom > 0 else 0.5 * lam
            if not 0.1 * lam <= lam_next <= 0.5 * lam:
                lam_next = 0.5 * lam
            lam = lam_next

        if not accepted:
            logger.debug("SPG line search stalled at iteration %d (f=%.6e)", iterations, fw)
            break

        g_new = np.asarray(grad(w_new), dtype=float)
        if not np.all(np.isfinite(g_new)):
            raise SolverDivergence(f"gradient became non-finite at iteration {iterations}", iterate=w_new)

        s = w_new - w
        y = g_new - g
        sty = float(s @ y)
        alpha = params.step_max if sty <= 0 else float(np.clip((s @ s) / sty, params.step_min, params.step_max))

        w, fw, g = w_new, f_new, g_new
        history.append(fw)
        if fw < best_f:
            best_w, best_f = w, fw
        pg = _projected_grad_norm(w, g)
        converged = pg <= params.grad_tol

    if best_w is not w:
        pg = _projected_grad_norm(best_w, np.asarray(grad(best_w), dtype=float))
        converged = pg <= params.grad_tol
    if not converged:
        logger.debug("SPG stopped after %d iterations with projected gradient %.3e", iterations, pg)

    report = SolveReport(
        iterations=iterations,
        final_objective=best_f,
        final_projected_grad_norm=pg,
        converged=converged,
    )
    return best_w, report


@dataclass(frozen=True)
class KktReport:
    stationarity: float
    dual_feasibility: float
    complementarity: float

    @property
    def max_residual(self):
        return max(self.stationarity, self.dual_feasibility, self.complementarity)

    @property
    def certified(self):
        return self.max_residual <= KKT_TOL


def kkt_residuals(G, b, w):
    """KKT residuals of min wᵀGw − 2bᵀw over the simplex at `w`.

    Residuals are scaled by max(1, max|G|, max|b|) so the certificate does not
    depend on the units of the Gram matrix.
    """
    G, b, w = np.asarray(G, float), np.asarray(b, float), np.asarray(w, float)
    grad = 2.0 * (G @ w - b)
    support = w > SUPPORT_TOL
    if not support.any():
        support = w == w.max()
    lam = float(grad[support].mean())
    mu = grad - lam
    scale = max(1.0, float(np.abs(G).max(initial=0.0)), float(np.abs(b).max(initial=0.0)))
    return KktReport(
        stationarity=float(np.abs(mu[support]).max()) / scale,
        dual_feasibility=float(np.maximum(-mu[~support], 0.0).max(initial=0.0)) / scale,
        complementarity=float(np.abs(mu * w).max()) / scale,
    )


def _quadratic(G, b):
    def f(w):
        return float(w @ G @ w - 2.0 * b @ w)

    def grad(w):
        return 2.0 * (G @ w - b)

    return f, grad


def polish_support(G, b, w):
    """Solve the equality-constrained QP on the support of `w`.

    Returns the polished weights when they stay feasible and do not increase the
    objective; otherwise returns `w` unchanged.
    """
    G, b, w = np.asarray(G, float), np.asarray(b, float), np.asarray(w, float)
    support = np.nonzero(w > SUPPORT_TOL)[0]
    if support.size == 0:
        return w
    k = support.size
    system = np.zeros((k + 1, k + 1))
    system[:k, :k] = 2.0 * G[np.ix_(support, support)]
    system[:k, k] = -1.0
    system[k, :k] = 1.0
    rhs = np.concatenate([2.0 * b[support], [1.0]])
    solution = np.linalg.lstsq(system, rhs, rcond=None)[0]
    w_s = solution[:k]
    if not np.all(np.isfinite(w_s)) or np.any(w_s < 0):
        return w
    polished = np.zeros_like(w)
    polished[support] = w_s
    polished /= polished.sum()
    f, _ = _quadratic(G, b)
    if f(polished) <= f(w) + 1e-12 * (1.0 + abs(f(w))):
        return polished
    return w


def check_gram(G, tol=1e-8):
    G = np.asarray(G, dtype=float)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise InvalidGram(f"Gram matrix must be square, got shape {G.shape}")
    if not np.all(np.isfinite(G)):
        raise InvalidGram("Gram matrix has non-finite entries")
    scale = max(1.0, float(np.abs(G).max(initial=0.0)))
    if np.abs(G - G.T).max(initial=0.0) > tol * scale:
        raise InvalidGram("Gram matrix is not symmetric")
    G = (G + G.T) / 2.0
    lowest = float(np.linalg.eigvalsh(G)[0])
    if lowest < -tol * scale:
        raise InvalidGram(f"Gram matrix is not positive semi-definite (min eigenvalue {lowest:.3e})")
    return G


def qp_simplex(G, b, params=None, w0=None):
    """Minimize wᵀGw − 2bᵀw subject to Σw = 1, w ≥ 0.

    Runs SPG, polishes the result on its support and certifies it against the
    KKT conditions. `report.converged` is True only for certified solutions.

    Raises:
        InvalidGram: G is not symmetric positive semi-definite within 1e-8.
    """
    G = check_gram(G)
    b = np.asarray(b, dtype=float).ravel()
    if b.size != G.shape[0]:
        raise InvalidGram(f"Gram matrix is {G.shape[0]}x{G.shape[0]} but b has {b.size} entries")
    f, grad = _quadratic(G, b)

    if b.size == 1:
        w = np.ones(1)
        return w, SolveReport(iterations=0, final_objective=f(w), final_projected_grad_norm=0.0, converged=True)

    w, report = spg_minimize(f, grad, w0=w0, params=params, n=b.size)
    w = polish_support(G, b, w)
    kkt = kkt_residuals(G, b, w)
    if not kkt.certified:
        logger.warning("qp_simplex: KKT residual %.3e above %.0e after %d iterations", kkt.max_residual, KKT_TOL, report.iterations)
    return w, SolveReport(
        iterations=report.iterations,
        final_objective=f(w),
        final_projected_grad_norm=_projected_grad_norm(w, grad(w)),
        converged=kkt.certified,
    )
