"""
SPD Toolkit Package

Classification of symmetric positive definite (SPD) matrices with manifold
convex class models. This package is framework-free; the Django app in
`classifier` wraps it with dataset I/O and management commands.

Main Functions:
    - classify: nearest convex class model (variants FM, CS, LE)
    - geo_nn: geodesic nearest neighbour baseline
    - dist_fm / dist_cs / dist_le: convex-model distances
    - frechet_mean / le_mean: weighted means on the manifold
    - covariance_descriptor and the pixel/DCT feature recipes
    - approx_error_trial / nn_trap_case / frechet_augment: synthetic experiments

Usage:
    from spdkit import ConvexClassModel, MccmVariant, classify

    models = ConvexClassModel.from_labeled(training_points)
    label, results = classify(query, models, MccmVariant.FM)
"""

from .descriptors import (
    FeatureTable,
    brodatz_pixel_features,
    covariance_descriptor,
    dct_features,
    ethz_pixel_features,
    frame_set_features,
    set_covariance,
    table_features,
)
from .exceptions import SpdError
from .mccm import (
    ConvexClassModel,
    DistanceResult,
    MccmVariant,
    classify,
    dist_cs,
    dist_fm,
    dist_le,
    distance,
    euclid_hull_classify,
    euclidean_hull_dist,
    first_nearest,
    geo_nn,
)
from .means import frechet_mean, le_mean
from .optim import project_simplex, qp_simplex, spg_minimize
from .params import ErrorTrialConfig, MeanParams, SolveReport, SpgParams
from .spd import (
    as_spd,
    exp_map,
    geodesic_dist,
    geodesic_point,
    le_dist,
    le_vectorize,
    log_map,
)
from .synthbench import approx_error_trial, frechet_augment, nn_trap_case, random_spd

__all__ = [
    'FeatureTable',
    'brodatz_pixel_features',
    'covariance_descriptor',
    'dct_features',
    'ethz_pixel_features',
    'frame_set_features',
    'set_covariance',
    'table_features',
    'SpdError',
    'ConvexClassModel',
    'DistanceResult',
    'MccmVariant',
    'classify',
    'dist_cs',
    'dist_fm',
    'dist_le',
    'distance',
    'euclid_hull_classify',
    'euclidean_hull_dist',
    'first_nearest',
    'geo_nn',
    'frechet_mean',
    'le_mean',
    'project_simplex',
    'qp_simplex',
    'spg_minimize',
    'ErrorTrialConfig',
    'MeanParams',
    'SolveReport',
    'SpgParams',
    'as_spd',
    'exp_map',
    'geodesic_dist',
    'geodesic_point',
    'le_dist',
    'le_vectorize',
    'log_map',
    'approx_error_trial',
    'nn_trap_case',
    'frechet_augment',
    'random_spd',
]
