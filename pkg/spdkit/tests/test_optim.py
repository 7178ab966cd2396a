"""
Unit tests for simplex projection, SPG and the simplex QP.
"""

import numpy as np
import pytest
from pydantic import ValidationError

from spdkit.exceptions import InvalidGram, SolverDivergence
from spdkit.optim import (
    check_gram,
    is_simplex,
    kkt_residuals,
    polish_support,
    project_simplex,
    qp_simplex,
    spg_minimize,
    uniform_weights,
)
from spdkit.params import SpgParams


@pytest.mark.unit
def test_project_simplex_known_values():
    np.testing.assert_allclose(project_simplex([0.5, 0.5, 2.0]), [0.0, 0.0, 1.0])
    np.testing.assert_allclose(project_simplex([1.0, 1.0]), [0.5, 0.5])
    np.testing.assert_allclose(project_simplex([0.2, 0.3, 0.5]), [0.2, 0.3, 0.5])
    np.testing.assert_allclose(project_simplex([-1.0, -1.0, -1.0]), [1 / 3, 1 / 3, 1 / 3])


@pytest.mark.unit
def test_project_simplex_output_is_feasible(rng):
    for _ in range(20):
        w = project_simplex(rng.standard_normal(7) * 5.0)
        assert is_simplex(w)
        assert np.all(w >= 0.0)


@pytest.mark.unit
def test_project_simplex_is_nearest_point(rng):
    v = rng.standard_normal(4)
    w = project_simplex(v)
    for _ in range(200):
        other = rng.dirichlet(np.ones(4))
        assert np.linalg.norm(v - w) <= np.linalg.norm(v - other) + 1e-12


@pytest.mark.unit
def test_project_simplex_rejects_bad_input():
    with pytest.raises(ValueError):
        project_simplex([])
    with pytest.raises(ValueError):
        project_simplex([1.0, np.nan])


@pytest.mark.unit
def test_uniform_weights():
    np.testing.assert_allclose(uniform_weights(4), np.full(4, 0.25))


@pytest.mark.unit
def test_spg_matches_projection_for_distance_objective():
    c = np.array([0.9, 0.6, -0.4, 0.1])

    def f(w):
        return float(np.sum((w - c) ** 2))

    def grad(w):
        return 2.0 * (w - c)

    w, report = spg_minimize(f, grad, n=4)
    np.testing.assert_allclose(w, project_simplex(c), atol=1e-6)
    assert report.converged
    assert report.final_objective == pytest.approx(f(w))


@pytest.mark.unit
def test_spg_report_when_iteration_cap_hit():
    g = np.diag([1.0, 100.0, 1e4])
    b = np.array([0.3, 0.2, 0.1])

    def f(w):
        return float(w @ g @ w - 2.0 * b @ w)

    def grad(w):
        return 2.0 * (g @ w - b)

    w, report = spg_minimize(f, grad, n=3, params=SpgParams(max_iter=1, grad_tol=1e-14))
    assert is_simplex(w)
    assert report.iterations <= 1
    assert not report.converged


@pytest.mark.unit
def test_spg_rejects_non_finite_start():
    def f(w):
        return np.nan

    def grad(w):
        return np.zeros_like(w)

    with pytest.raises(SolverDivergence):
        spg_minimize(f, grad, n=2)


@pytest.mark.unit
def test_spg_params_validation():
    with pytest.raises(ValidationError):
        SpgParams(step_min=1.0, step_max=0.1)
    with pytest.raises(ValidationError):
        SpgParams(max_iter=0)
    with pytest.raises(ValidationError):
        SpgParams(unknown=1)


@pytest.mark.unit
def test_qp_simplex_recovers_interior_point(rng):
    points = rng.standard_normal((4, 6))
    true_w = np.array([0.1, 0.2, 0.3, 0.4])
    y = points.T @ true_w
    w, report = qp_simplex(points @ points.T, points @ y)
    assert np.linalg.norm(points.T @ w - y) < 1e-6
    assert report.converged


@pytest.mark.unit
def test_qp_simplex_vertex_solution():
    points = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    y = np.array([-1.0, -1.0])
    w, report = qp_simplex(points @ points.T, points @ y)
    np.testing.assert_allclose(w, [1.0, 0.0, 0.0], atol=1e-8)
    assert report.converged
    kkt = kkt_residuals(points @ points.T, points @ y, w)
    assert kkt.certified


@pytest.mark.unit
def test_qp_simplex_single_point():
    w, report = qp_simplex(np.array([[2.0]]), np.array([1.0]))
    np.testing.assert_allclose(w, [1.0])
    assert report.iterations == 0
    assert report.converged


@pytest.mark.unit
def test_qp_simplex_rank_deficient_gram_still_optimal():
    # two identical points: any split between them is optimal
    points = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    y = np.array([1.0, 0.0])
    w, _ = qp_simplex(points @ points.T, points @ y)
    assert w[0] + w[1] == pytest.approx(1.0, abs=1e-7)
    assert np.linalg.norm(points.T @ w - y) < 1e-6


@pytest.mark.unit
def test_check_gram_rejects_invalid_matrices():
    with pytest.raises(InvalidGram):
        check_gram(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(InvalidGram):
        check_gram(np.diag([1.0, -1.0]))
    with pytest.raises(InvalidGram):
        qp_simplex(np.eye(2), np.ones(3))


@pytest.mark.unit
def test_polish_support_solves_on_support():
    g = np.eye(3)
    b = np.array([0.6, 0.4, 0.0])
    w = np.array([0.55, 0.45, 0.0])
    polished = polish_support(g, b, w)
    np.testing.assert_allclose(polished, [0.6, 0.4, 0.0], atol=1e-12)
    assert is_simplex(polished)


@pytest.mark.unit
def test_polish_support_refuses_infeasible_candidates():
    g = np.eye(2)
    b = np.array([2.0, -1.0])
    w = np.array([0.5, 0.5])
    # the equality-constrained optimum (2, -1) leaves the simplex
    np.testing.assert_allclose(polish_support(g, b, w), w)


def _enumerate_active_sets(v):
    """Closest feasible point over every support, each solved by its equality KKT system."""
    from itertools import combinations

    v = np.asarray(v, dtype=float)
    best, best_dist = None, np.inf
    for size in range(1, v.size + 1):
        for support in combinations(range(v.size), size):
            idx = list(support)
            w = np.zeros_like(v)
            w[idx] = v[idx] - (v[idx].sum() - 1.0) / size
            if np.all(w >= 0) and np.linalg.norm(w - v) < best_dist:
                best, best_dist = w, np.linalg.norm(w - v)
    return best


@pytest.mark.unit
def test_project_simplex_matches_active_set_enumeration(rng):
    np.testing.assert_allclose(project_simplex([0.6, 0.4, -0.2]), [0.6, 0.4, 0.0], atol=1e-15)
    np.testing.assert_allclose(project_simplex([0.6, 0.4, -0.2]), _enumerate_active_sets([0.6, 0.4, -0.2]), atol=1e-15)
    for _ in range(20):
        v = rng.normal(0.0, 1.0, 4)
        np.testing.assert_allclose(project_simplex(v), _enumerate_active_sets(v), atol=1e-12)


@pytest.mark.unit
def test_project_simplex_is_idempotent_and_nonexpansive(rng):
    for _ in range(50):
        a, b = rng.normal(0.0, 2.0, 5), rng.normal(0.0, 2.0, 5)
        pa, pb = project_simplex(a), project_simplex(b)
        np.testing.assert_allclose(project_simplex(pa), pa, atol=1e-14)
        assert np.linalg.norm(pa - pb) <= np.linalg.norm(a - b) + 1e-12


@pytest.mark.unit
def test_spg_agrees_with_qp_simplex_on_convex_quadratic(rng):
    a = rng.standard_normal((4, 4))
    G = a @ a.T + np.eye(4)
    b = rng.standard_normal(4) * 2.0
    expected, _ = qp_simplex(G, b)

    w, _ = spg_minimize(
        lambda w: float(w @ G @ w - 2.0 * b @ w),
        lambda w: 2.0 * (G @ w - b),
        n=4,
        params=SpgParams(grad_tol=1e-12, max_iter=5000),
    )
    assert is_simplex(w)
    np.testing.assert_allclose(w, expected, atol=1e-6)


@pytest.mark.unit
def test_kkt_report_carries_scaled_residuals_only():
    from dataclasses import fields

    G = np.array([[2.0, 0.0], [0.0, 1.0]])
    b = np.array([1.0, 0.0])
    report = kkt_residuals(G, b, np.array([2.0, 1.0]) / 3.0)
    assert [f.name for f in fields(report)] == ["stationarity", "dual_feasibility", "complementarity"]
    assert report.max_residual == max(report.stationarity, report.dual_feasibility, report.complementarity)
    assert report.certified
