"""
Synthetic SPD experiments

- random_spd / equidistant_triple / cluster_dataset: seeded generators
- approx_error_trial: how far each convex-model distance is from the known answer
  when the query moves away along a geodesic through the model
- nn_trap_case: a query that geodesic nearest neighbour gets wrong and the
  convex model gets right
- frechet_augment / augmentation_sweep: enlarging training classes with weighted
  Fréchet means and measuring Geo-NN against it
"""

import logging
from typing import Dict, List, NamedTuple, Tuple

import numpy as np
from pydantic import BaseModel, Field
from tenacity import RetryError, Retrying, retry_if_exception_type, stop_after_attempt

from .exceptions import ConstructionFailed, SpdError
from .mccm import ConvexClassModel, MccmVariant, classify, distance, geo_nn
from .means import frechet_mean
from .params import ErrorTrialConfig, MeanParams, SpgParams
from .spd import _frozen, as_spd, expm, geodesic_dist, geodesic_point, le_unvectorize, sqrtm

logger = logging.getLogger(__name__)


def _rng(rng):
    return rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)


def random_spd(dim, rng=None, condition_cap=1e3):
    """QΛQᵀ with Haar-random Q and log-uniform eigenvalues whose ratio is at most `condition_cap`."""
    if dim < 1:
        raise ValueError("dim must be at least 1")
    rng = _rng(rng)
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    q = q * np.sign(np.diag(r))
    values = np.exp(rng.uniform(0.0, np.log(condition_cap), size=dim))
    return as_spd(q @ np.diag(values) @ q.T)


def random_unit_sym(dim, rng=None, orthogonal_to=()):
    """Random symmetric matrix of unit Frobenius norm, orthogonal to the given ones."""
    rng = _rng(rng)
    s = rng.standard_normal((dim, dim))
    s = (s + s.T) / 2.0
    for other in orthogonal_to:
        s = s - np.sum(s * other) * other
    return s / np.linalg.norm(s, "fro")


def _move(root, whitened_tangent):
    out = root @ expm(whitened_tangent) @ root
    return _frozen((out + out.T) / 2.0)


class Triple(NamedTuple):
    x1: np.ndarray
    x2: np.ndarray
    x3: np.ndarray
    center: np.ndarray


def equidistant_triple(dim, rng=None, spread=1.0, condition_cap=1e3, scaling_axis=False):
    """Three points at geodesic distance `spread` from a random centre M1.

    The tangent vectors at M1 are spread·(cos θᵢ E1 + sin θᵢ E2) at θᵢ 120° apart
    in whitened coordinates, so they have equal norm and sum to zero: M1 is the
    equal-weight Fréchet mean of the three points.

    With `scaling_axis` E1 is I/√dim, E2 a random traceless direction and the
    angles are −60°, 60° and 180°. X1 and X2 then mirror each other across the
    scaling axis, their midpoint is a multiple of M1, and every point on the
    M1→midpoint geodesic is a multiple of M1 with the same condition number.
    """
    if dim < 2:
        raise ValueError("dim must be at least 2")
    rng = _rng(rng)
    center = random_spd(dim, rng, condition_cap)
    if scaling_axis:
        e1 = np.eye(dim) / np.sqrt(dim)
        phase = -np.pi / 3.0
    else:
        e1 = random_unit_sym(dim, rng)
    e2 = random_unit_sym(dim, rng, orthogonal_to=(e1,))
    if not scaling_axis:
        phase = rng.uniform(0.0, 2.0 * np.pi)
    root = sqrtm(center)
    points = [
        _move(root, spread * (np.cos(phase + k * 2.0 * np.pi / 3.0) * e1 + np.sin(phase + k * 2.0 * np.pi / 3.0) * e2))
        for k in range(3)
    ]
    return Triple(*points, center)


class TrialFailure(BaseModel):
    trial: int
    error: str


class TrialErrors(BaseModel):
    """Absolute errors of one trial, per variant and multiplier."""

    trial: int
    base_distance: float
    errors: Dict[str, List[float]] = Field(default_factory=dict)


class ErrorTable(BaseModel):
    multipliers: List[float]
    mean_error: Dict[str, List[float]]
    trials: int
    completed: int
    mean_base_distance: float
    failures: List[TrialFailure] = Field(default_factory=list)


def error_trial(config: ErrorTrialConfig, index, spg_params=None, mean_params=None):
    """Run trial `index` of the approximation-error study on its own random stream."""
    rng = np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=(index,)))
    x1, x2, x3, m1 = equidistant_triple(
        config.dim, rng, spread=config.spread, condition_cap=config.condition_cap, scaling_axis=True
    )
    m2 = frechet_mean([x1, x2], [0.5, 0.5], params=mean_params)
    base = geodesic_dist(m1, m2)
    model = ConvexClassModel("C3", (x1, x2, x3))

    errors = {v.value: [] for v in MccmVariant}
    for multiplier in config.multipliers:
        query = geodesic_point(m1, m2, multiplier)
        truth = geodesic_dist(query, m2)
        for variant in MccmVariant:
            estimate = distance(query, model, variant, params=spg_params).distance
            errors[variant.value].append(abs(estimate - truth))
    return TrialErrors(trial=index, base_distance=base, errors=errors)


def summarize_errors(config: ErrorTrialConfig, outcomes):
    """Average per-trial errors; `outcomes` holds TrialErrors or TrialFailure items."""
    done = [o for o in outcomes if isinstance(o, TrialErrors)]
    failures = [o for o in outcomes if isinstance(o, TrialFailure)]
    mean_error = {}
    for variant in MccmVariant:
        if done:
            stacked = np.array([o.errors[variant.value] for o in done])
            mean_error[variant.value] = stacked.mean(axis=0).tolist()
        else:
            mean_error[variant.value] = [float("nan")] * len(config.multipliers)
    return ErrorTable(
        multipliers=list(config.multipliers),
        mean_error=mean_error,
        trials=config.trials,
        completed=len(done),
        mean_base_distance=float(np.mean([o.base_distance for o in done])) if done else float("nan"),
        failures=failures,
    )


def guarded_trial(config, index, spg_params=None, mean_params=None):
    try:
        return error_trial(config, index, spg_params, mean_params)
    except SpdError as exc:
        logger.warning("error trial %d failed: %s", index, exc)
        return TrialFailure(trial=index, error=f"{type(exc).__name__}: {exc}")


def approx_error_trial(config: ErrorTrialConfig = None, spg_params=None, mean_params=None):
    """Approximation-error study over `config.trials` independent trials.

    Per trial: three points equidistant from M1, M2 the Fréchet mean of the first
    two, D = d_g(M1, M2). For each multiplier m the query is placed on the
    M1→M2 geodesic at distance m·D from M1; the nearest point of the model is
    M2, so the correct distance is d_g(Q, M2). Reports the mean absolute error
    of every variant. Failed trials are listed and left out of the means.
    """
    config = config or ErrorTrialConfig()
    outcomes = [guarded_trial(config, i, spg_params, mean_params) for i in range(config.trials)]
    return summarize_errors(config, outcomes)


class NnTrapFixture(NamedTuple):
    train: List[Tuple[str, np.ndarray]]
    query: np.ndarray
    nn_label: str
    convex_label: str


class _Rejected(Exception):
    pass


def _draw_nn_trap(dim, rng, condition_cap):
    query = random_spd(dim, rng, condition_cap)
    root = sqrtm(query)
    u = random_unit_sym(dim, rng)
    v = random_unit_sym(dim, rng, orthogonal_to=(u,))
    w = random_unit_sym(dim, rng)
    half_span = rng.uniform(1.5, 2.5)
    offset = rng.uniform(0.1, 0.3)
    vertex_dist = np.hypot(half_span, offset)
    single_dist = rng.uniform(0.6, 0.9) * vertex_dist

    c2 = [_move(root, half_span * u + offset * v), _move(root, -half_span * u + offset * v)]
    c1 = [_move(root, single_dist * w)]
    train = [("C1", c1[0]), ("C2", c2[0]), ("C2", c2[1])]

    nn_label, _ = geo_nn(query, train)
    models = ConvexClassModel.from_labeled(train)
    fm_label, _ = classify(query, models, MccmVariant.FM)
    if nn_label != "C1" or fm_label != "C2":
        raise _Rejected(f"nn={nn_label} fm={fm_label}")
    return NnTrapFixture(train, query, nn_label, fm_label)


def nn_trap_case(dim, rng=None, condition_cap=1e3, max_attempts=20):
    """Two-class fixture where Geo-NN picks C1 but the FM convex model picks C2.

    C2 is a pair of points whose connecting geodesic passes close to the query;
    C1 is a single point nearer to the query than either C2 point.

    Raises:
        ConstructionFailed: no draw satisfied both inequalities within `max_attempts`.
    """
    if dim < 2:
        raise ValueError("dim must be at least 2")
    rng = _rng(rng)
    try:
        for attempt in Retrying(stop=stop_after_attempt(max_attempts), retry=retry_if_exception_type(_Rejected)):
            with attempt:
                return _draw_nn_trap(dim, rng, condition_cap)
    except RetryError as exc:
        raise ConstructionFailed(f"no nearest-neighbour trap found in {max_attempts} attempts") from exc


def frechet_augment(points, count, rng=None, params: MeanParams = None):
    """`count` weighted Fréchet means of `points` with Dirichlet(1, …, 1) weights."""
    if len(points) == 0:
        raise ValueError("class has no points")
    rng = _rng(rng)
    alpha = np.ones(len(points))
    return [frechet_mean(points, rng.dirichlet(alpha), params=params) for _ in range(count)]


def cluster_dataset(classes, per_class, queries, dim, rng=None, spread=0.1, separation=3.0):
    """Well separated labelled clusters.

    Class centres are exp(separation·Eₖ) with Eₖ orthonormal symmetric directions;
    points are drawn at geodesic distance `spread` around their centre. Queries
    cycle through the classes.

    Returns:
        tuple: (train, test), lists of (label, matrix).
    """
    rng = _rng(rng)
    size = dim * (dim + 1) // 2
    if classes > size:
        raise ValueError(f"at most {size} well separated classes fit in dimension {dim}")
    directions, _ = np.linalg.qr(rng.standard_normal((size, classes)))
    roots = [sqrtm(expm(separation * le_unvectorize(directions[:, k], dim))) for k in range(classes)]
    labels = [f"class-{k}" for k in range(classes)]

    def draw(k):
        return labels[k], _move(roots[k], spread * random_unit_sym(dim, rng))

    train = [draw(k) for k in range(classes) for _ in range(per_class)]
    test = [draw(q % classes) for q in range(queries)]
    return train, test


def random_split(labeled, per_class, rng=None):
    """Per-class random train/test split keeping dataset order inside each part."""
    rng = _rng(rng)
    by_label = {}
    for i, (label, _) in enumerate(labeled):
        by_label.setdefault(label, []).append(i)
    chosen = set()
    for indices in by_label.values():
        picked = rng.permutation(len(indices))[:per_class]
        chosen.update(indices[p] for p in picked)
    train = [item for i, item in enumerate(labeled) if i in chosen]
    test = [item for i, item in enumerate(labeled) if i not in chosen]
    return train, test


class AugmentationResult(BaseModel):
    counts: List[int]
    geo_nn_accuracy: List[float]
    fm_accuracy: float


def augmentation_sweep(train, test, counts, rng=None, spg_params: SpgParams = None, mean_params: MeanParams = None):
    """Geo-NN accuracy as weighted-Fréchet-mean points are added to every class.

    Points are generated progressively: the set for a larger count extends the
    set for a smaller one. MCCM-FM accuracy on the original training set is
    reported alongside.
    """
    if not test:
        raise ValueError("test set is empty")
    rng = _rng(rng)
    counts = sorted({int(c) for c in counts})
    models = ConvexClassModel.from_labeled(train)
    truth = [label for label, _ in test]

    fm_hits = [classify(y, models, MccmVariant.FM, params=spg_params)[0] == label for label, y in test]
    extra = {m.label: frechet_augment(m.points, counts[-1] if counts else 0, rng, mean_params) for m in models}

    accuracy = []
    for count in counts:
        augmented = list(train) + [(label, p) for label, pts in extra.items() for p in pts[:count]]
        predicted = [geo_nn(y, augmented)[0] for _, y in test]
        accuracy.append(float(np.mean([p == t for p, t in zip(predicted, truth)])))
    return AugmentationResult(counts=counts, geo_nn_accuracy=accuracy, fm_accuracy=float(np.mean(fm_hits)))

