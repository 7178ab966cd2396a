"""
Manifold convex class models

A class is represented by the convex model spanned by its training points on
the SPD manifold: every weighted Fréchet mean of those points. The distance from
a query to that set is approximated three ways:

- FM: tangent-space approximation at the query, min ‖Σ wᵢ log(Y^{-1/2}XᵢY^{-1/2})‖²
- CS: Euclidean combination of the points, min d_g²(Y, Σ wᵢXᵢ)
- LE: Log-Euclidean flattening, min ‖log Y − Σ wᵢ log Xᵢ‖²_F (a simplex QP)

A query is assigned to the class whose convex model is nearest. Geodesic
nearest neighbour and the Euclidean convex-hull distance are provided as
baselines.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Any, Hashable, List, Sequence, Tuple

import numpy as np

from .exceptions import ClassDistanceError, DimensionMismatch, SpdError
from .optim import polish_support, qp_simplex, spg_minimize
from .params import SolveReport, SpgParams
from .spd import _require_positive, as_spd, le_vectorize, logm, sym_eig, whiten

logger = logging.getLogger(__name__)


class MccmVariant(str, Enum):
    FM = "fm"
    CS = "cs"
    LE = "le"


@dataclass(frozen=True)
class ConvexClassModel:
    """A labelled, non-empty set of SPD training points of one dimension."""

    label: Hashable
    points: Tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.points) == 0:
            raise ValueError(f"class {self.label!r} has no points")
        points = tuple(as_spd(p, name=f"point {i} of class {self.label!r}") for i, p in enumerate(self.points))
        if len({p.shape for p in points}) != 1:
            raise DimensionMismatch(f"class {self.label!r} mixes matrix dimensions")
        object.__setattr__(self, "points", points)

    @property
    def dim(self):
        return self.points[0].shape[0]

    def __len__(self):
        return len(self.points)

    @cached_property
    def log_vectors(self):
        """Rows are le_vectorize(log Xᵢ)."""
        return np.stack([le_vectorize(logm(p)) for p in self.points])

    @cached_property
    def frobenius_vectors(self):
        """Rows are le_vectorize(Xᵢ); Euclidean geometry on the raw matrices."""
        return le_vectorize(np.stack(self.points))

    @classmethod
    def from_labeled(cls, labeled):
        """Group (label, matrix) pairs into models, ordered by first appearance of each label."""
        groups = {}
        for label, matrix in labeled:
            groups.setdefault(label, []).append(matrix)
        return [cls(label, tuple(points)) for label, points in groups.items()]


@dataclass(frozen=True)
class DistanceResult:
    distance: float
    weights: np.ndarray
    report: SolveReport = field(repr=False)


def _check_query(y, model):
    y = np.asarray(y, dtype=float)
    if y.shape != (model.dim, model.dim):
        raise DimensionMismatch(f"query is {y.shape} but class {model.label!r} holds {model.dim}x{model.dim} points")
    return y


def _tangent_vectors(y, model):
    _, inv_root = whiten(y)
    return np.stack([le_vectorize(logm(inv_root @ x @ inv_root)) for x in model.points])


def fm_objective(y, model):
    """Objective and gradient of the FM approximation at query Y.

    With Lᵢ = log(Y^{-1/2} Xᵢ Y^{-1/2}), g(w) = Tr((Σ wᵢLᵢ)²) and
    ∂g/∂wⱼ = 2·Tr(Lⱼ Σ wᵢLᵢ). The Lᵢ are held as isometric vectors, so both
    reduce to products with their Gram matrix.
    """
    f, grad, _, _ = _fm_parts(y, model)
    return f, grad


def _fm_parts(y, model):
    y = _check_query(y, model)
    tangents = _tangent_vectors(y, model)
    gram = tangents @ tangents.T

    def f(w):
        v = tangents.T @ w
        return float(v @ v)

    def grad(w):
        return 2.0 * (gram @ w)

    return f, grad, tangents, gram


def cs_objective(y, model):
    """Objective and gradient of the CS approximation at query Y.

    f(w) = d_g²(Y, M) with M = Σ wᵢXᵢ, and
    ∂f/∂wᵢ = 2·Tr{log(Y^{-1/2}MY^{-1/2}) Y^{1/2} M⁻¹ Xᵢ Y^{-1/2}}.
    The eigendecomposition of Y^{-1/2}MY^{-1/2} is shared between the objective
    and gradient evaluated at the same weights.
    """
    y = _check_query(y, model)
    _, inv_root = whiten(y)
    whitened = np.stack([inv_root @ x @ inv_root for x in model.points])
    cache = {}

    def _eig(w):
        key = np.asarray(w, dtype=float).tobytes()
        if key not in cache:
            a = np.tensordot(w, whitened, axes=1)
            pair = sym_eig((a + a.T) / 2.0)
            _require_positive(pair, "log")
            cache.clear()
            cache[key] = pair
        return cache[key]

    def f(w):
        return float(np.sum(np.log(_eig(w).values) ** 2))

    def grad(w):
        pair = _eig(w)
        q = pair.vectors
        # log(A)·A⁻¹ shares A's eigenvectors
        b = (q * (np.log(pair.values) / pair.values)) @ q.T
        return 2.0 * np.einsum("ijk,jk->i", whitened, b)

    return f, grad


def dist_fm(y, model, params=None):
    f, grad, tangents, gram = _fm_parts(y, model)
    w, report = spg_minimize(f, grad, n=len(model), params=params)
    w = polish_support(gram, np.zeros(len(model)), w)
    value = f(w)
    return DistanceResult(
        distance=float(np.linalg.norm(tangents.T @ w)),
        weights=w,
        report=report.model_copy(update={"final_objective": value}),
    )


def dist_cs(y, model, params=None):
    f, grad = cs_objective(y, model)
    w, report = spg_minimize(f, grad, n=len(model), params=params)
    # f is not convex in w; restart from the best vertex when it beats the first solve
    vertices = np.eye(len(model))
    vertex_values = [f(v) for v in vertices]
    best = int(np.argmin(vertex_values))
    if vertex_values[best] < f(w):
        logger.debug("dist_cs class %r: restarting from vertex %d", model.label, best)
        w, report = spg_minimize(f, grad, w0=vertices[best], params=params)
    if logger.isEnabledFor(logging.DEBUG):
        gap = np.asarray(y, float) - np.tensordot(w, np.stack(model.points), axes=1)
        lowest = float(np.linalg.eigvalsh((gap + gap.T) / 2.0)[0])
        logger.debug(
            "dist_cs class %r: Y - Σ wᵢXᵢ %s PSD (min eigenvalue %.3e)",
            model.label,
            "is" if lowest >= -1e-12 * max(1.0, float(np.abs(gap).max())) else "is not",
            lowest,
        )
    return DistanceResult(distance=float(np.sqrt(max(f(w), 0.0))), weights=w, report=report)


def dist_le(y, model, params=None):
    y = _check_query(y, model)
    target = le_vectorize(logm(y))
    logs = model.log_vectors
    w, report = qp_simplex(logs @ logs.T, logs @ target, params=params)
    return DistanceResult(distance=float(np.linalg.norm(target - logs.T @ w)), weights=w, report=report)


def euclidean_hull_dist(y, points, params=None):
    """Distance from vector `y` to the Euclidean convex hull of `points` (rows)."""
    y = np.asarray(y, dtype=float).ravel()
    x = np.atleast_2d(np.asarray(points, dtype=float))
    if x.shape[1] != y.size:
        raise DimensionMismatch(f"query has {y.size} entries but points have {x.shape[1]}")
    w, report = qp_simplex(x @ x.T, x @ y, params=params)
    return DistanceResult(distance=float(np.linalg.norm(y - x.T @ w)), weights=w, report=report)


_SOLVERS = {
    MccmVariant.FM: dist_fm,
    MccmVariant.CS: dist_cs,
    MccmVariant.LE: dist_le,
}


def distance(y, model, variant, params=None):
    return _SOLVERS[MccmVariant(variant)](y, model, params=params)


TIE_RTOL = 1e-12


def first_nearest(dists, rtol=TIE_RTOL):
    """Index of the first distance within `rtol` (relative) of the minimum.

    Distances equal up to roundoff count as ties and go to the earliest index.
    """
    dists = np.asarray(dists, dtype=float)
    lowest = dists.min()
    return int(np.flatnonzero(dists <= lowest + rtol * max(abs(lowest), 1.0))[0])


def _argmin_label(models, results):
    return models[first_nearest([r.distance for r in results])].label


def classify(y, models: Sequence[ConvexClassModel], variant, params: SpgParams = None):
    """Assign Y to the class whose convex model is nearest.

    Returns:
        tuple: (label, per-class DistanceResult list in model order). Ties go to
        the model listed first.

    Raises:
        ClassDistanceError: a per-class solve failed; `label` names the class.
    """
    if not models:
        raise ValueError("need at least one class model")
    results = []
    for model in models:
        try:
            results.append(distance(y, model, variant, params=params))
        except SpdError as exc:
            raise ClassDistanceError(model.label, exc) from exc
    return _argmin_label(models, results), results


def euclid_hull_classify(y, models, params=None):
    """Nearest Euclidean convex hull, treating each matrix as its vectorized entries."""
    if not models:
        raise ValueError("need at least one class model")
    target = le_vectorize(np.asarray(y, dtype=float))
    results = []
    for model in models:
        try:
            results.append(euclidean_hull_dist(target, model.frobenius_vectors, params=params))
        except SpdError as exc:
            raise ClassDistanceError(model.label, exc) from exc
    return _argmin_label(models, results), results


def _whitened_dist(inv_root, x):
    pair = sym_eig(inv_root @ np.asarray(x, dtype=float) @ inv_root)
    _require_positive(pair, "log")
    return float(np.sqrt(np.sum(np.log(pair.values) ** 2)))


def geodesic_dists(y, points):
    """Geodesic distances from Y to each point, whitening by Y once."""
    _, inv_root = whiten(y)
    return np.array([_whitened_dist(inv_root, x) for x in points])


def geo_nn(y, labeled: List[Tuple[Any, np.ndarray]]):
    """Geodesic nearest neighbour; ties go to the first point in dataset order."""
    if not labeled:
        raise ValueError("need at least one training point")
    dists = geodesic_dists(y, [x for _, x in labeled])
    nearest = first_nearest(dists)
    return labeled[nearest][0], float(dists[nearest])
