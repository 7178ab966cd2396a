"""
Unit tests for SPD geometry primitives.

Run with: pytest spdkit/tests/test_spd.py
"""

import numpy as np
import pytest

from spdkit.exceptions import DegenerateMatrix, DimensionMismatch, InvalidSpd
from spdkit.spd import (
    airm_norm,
    as_spd,
    as_sym,
    exp_map,
    expm,
    geodesic_dist,
    geodesic_point,
    inv_spd,
    invsqrtm,
    is_spd,
    le_dist,
    le_unvectorize,
    le_vectorize,
    log_map,
    logm,
    sqrtm,
    whiten,
)


@pytest.mark.unit
def test_as_spd_accepts_and_freezes():
    a = as_spd([[2.0, 0.5], [0.5, 1.0]])
    assert a.flags.writeable is False
    with pytest.raises(ValueError):
        a[0, 0] = 3.0


@pytest.mark.unit
def test_as_spd_rejects_asymmetric():
    with pytest.raises(InvalidSpd):
        as_spd([[1.0, 2.0], [0.0, 1.0]])


@pytest.mark.unit
def test_as_spd_rejects_indefinite_with_min_eigenvalue():
    with pytest.raises(InvalidSpd) as excinfo:
        as_spd(np.diag([1.0, -1.0]))
    assert excinfo.value.min_eigenvalue == pytest.approx(-1.0)


@pytest.mark.unit
def test_as_spd_rejects_bad_shapes():
    with pytest.raises(DimensionMismatch):
        as_spd(np.ones((2, 3)))
    with pytest.raises(InvalidSpd):
        as_spd([[np.nan, 0.0], [0.0, 1.0]])
    assert not is_spd(np.zeros((2, 2)))


@pytest.mark.unit
def test_as_sym_symmetrizes_tiny_asymmetry():
    a = np.array([[1.0, 0.3], [0.3 + 1e-12, 2.0]])
    s = as_sym(a)
    assert s[0, 1] == s[1, 0]


@pytest.mark.unit
@pytest.mark.parametrize("dim", [2, 3, 6])
def test_exp_log_roundtrip(dim, spd_factory, sym_factory):
    x = spd_factory(dim)
    np.testing.assert_allclose(expm(logm(x)), x, rtol=1e-9, atol=1e-10)
    s = sym_factory(dim)
    np.testing.assert_allclose(logm(expm(s)), s, atol=1e-9)


@pytest.mark.unit
def test_matrix_functions_agree(spd_factory):
    x = spd_factory(4)
    root = sqrtm(x)
    np.testing.assert_allclose(root @ root, x, rtol=1e-9, atol=1e-10)
    np.testing.assert_allclose(invsqrtm(x) @ root, np.eye(4), atol=1e-9)
    np.testing.assert_allclose(inv_spd(x) @ x, np.eye(4), atol=1e-9)
    w_root, w_inv_root = whiten(x)
    np.testing.assert_allclose(w_root, root, atol=1e-10)
    np.testing.assert_allclose(w_inv_root, invsqrtm(x), atol=1e-10)


@pytest.mark.unit
def test_log_of_singular_matrix_is_degenerate():
    with pytest.raises(DegenerateMatrix):
        logm(np.diag([1.0, 0.0]))


@pytest.mark.unit
def test_geodesic_dist_known_value():
    x = np.eye(2)
    y = np.diag([np.e, np.e ** 2])
    assert geodesic_dist(x, y) == pytest.approx(np.sqrt(5.0))
    assert geodesic_dist(y, y) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.unit
def test_geodesic_dist_affine_invariance(spd_factory, rng):
    x, y = spd_factory(4), spd_factory(4)
    a = rng.standard_normal((4, 4)) + 4.0 * np.eye(4)
    d = geodesic_dist(x, y)
    assert geodesic_dist(a @ x @ a.T, a @ y @ a.T) == pytest.approx(d, rel=1e-8)
    assert geodesic_dist(y, x) == pytest.approx(d, rel=1e-10)
    assert geodesic_dist(inv_spd(x), inv_spd(y)) == pytest.approx(d, rel=1e-8)


@pytest.mark.unit
def test_commuting_matrices_geodesic_equals_log_euclidean(rng):
    q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    x = q @ np.diag([0.5, 2.0, 7.0]) @ q.T
    y = q @ np.diag([3.0, 0.1, 1.0]) @ q.T
    assert geodesic_dist(x, y) == pytest.approx(le_dist(x, y), rel=1e-9)


@pytest.mark.unit
def test_exp_log_map_roundtrip_and_airm_norm(spd_factory):
    y, z = spd_factory(3), spd_factory(3)
    tangent = log_map(y, z)
    np.testing.assert_allclose(exp_map(y, tangent), z, rtol=1e-8, atol=1e-10)
    assert airm_norm(y, tangent) == pytest.approx(geodesic_dist(y, z), rel=1e-8)


@pytest.mark.unit
def test_geodesic_point_interpolates_and_extrapolates(spd_factory):
    x, y = spd_factory(3), spd_factory(3)
    d = geodesic_dist(x, y)
    np.testing.assert_allclose(geodesic_point(x, y, 0.0), x, rtol=1e-9, atol=1e-10)
    np.testing.assert_allclose(geodesic_point(x, y, 1.0), y, rtol=1e-8, atol=1e-10)
    for t in (0.3, 2.0):
        p = geodesic_point(x, y, t)
        assert geodesic_dist(x, p) == pytest.approx(t * d, rel=1e-7)
    mid = geodesic_point(x, y, 0.5)
    assert geodesic_dist(mid, x) == pytest.approx(geodesic_dist(mid, y), rel=1e-7)


@pytest.mark.unit
def test_le_vectorize_order_and_scaling():
    a = np.array([[1.0, 2.0, 4.0], [2.0, 3.0, 5.0], [4.0, 5.0, 6.0]])
    r2 = np.sqrt(2.0)
    np.testing.assert_allclose(le_vectorize(a), [1.0, 2.0 * r2, 3.0, 4.0 * r2, 5.0 * r2, 6.0])
    np.testing.assert_allclose(le_unvectorize(le_vectorize(a), 3), a)


@pytest.mark.unit
def test_le_vectorize_isometry_on_stacks(sym_factory):
    a, b = sym_factory(5), sym_factory(5)
    assert le_vectorize(a) @ le_vectorize(b) == pytest.approx(np.sum(a * b), rel=1e-12)
    stacked = le_vectorize(np.stack([a, b]))
    assert stacked.shape == (2, 15)
    np.testing.assert_allclose(stacked[1], le_vectorize(b))


@pytest.mark.unit
def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        geodesic_dist(np.eye(2), np.eye(3))
    with pytest.raises(DimensionMismatch):
        le_unvectorize(np.ones(4), 2)


@pytest.mark.slow
def test_manifold_invariants_random_sweep(rng):
    from spdkit.synthbench import random_spd

    for _ in range(100):
        dim = int(rng.integers(2, 7))
        x = random_spd(dim, rng, 1e2)
        y = random_spd(dim, rng, 1e2)
        a = rng.standard_normal((dim, dim)) + dim * np.eye(dim)
        d = geodesic_dist(x, y)
        assert geodesic_dist(a @ x @ a.T, a @ y @ a.T) == pytest.approx(d, rel=1e-7)
        np.testing.assert_allclose(exp_map(x, log_map(x, y)), y, rtol=1e-7, atol=1e-9)
        np.testing.assert_allclose(expm(logm(x)), x, rtol=1e-9, atol=1e-10)
        s, t = logm(x), logm(y)
        assert le_vectorize(s) @ le_vectorize(t) == pytest.approx(np.sum(s * t), rel=1e-10, abs=1e-12)
