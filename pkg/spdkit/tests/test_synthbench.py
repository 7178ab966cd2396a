"""
Tests for the synthetic generators and experiments.

The full-size approximation-error study and the timing comparison are marked slow:
    pytest -m "not slow"     # skip them
    pytest -m slow           # run only them
"""

import time

import numpy as np
import pytest

from spdkit.exceptions import ConstructionFailed
from spdkit.mccm import ConvexClassModel, MccmVariant, classify, dist_fm, dist_le, geo_nn
from spdkit.means import frechet_mean, karcher_residual
from spdkit.params import ErrorTrialConfig
from spdkit.spd import expm, geodesic_dist, geodesic_point, is_spd
from spdkit.synthbench import (
    approx_error_trial,
    augmentation_sweep,
    cluster_dataset,
    equidistant_triple,
    error_trial,
    frechet_augment,
    nn_trap_case,
    random_spd,
    random_split,
)


@pytest.mark.unit
def test_random_spd_respects_condition_cap(rng):
    for _ in range(10):
        x = random_spd(5, rng, condition_cap=50.0)
        values = np.linalg.eigvalsh(x)
        assert values[0] > 0
        assert values[-1] / values[0] <= 50.0 * (1 + 1e-9)


@pytest.mark.unit
def test_random_spd_is_reproducible():
    a = random_spd(4, np.random.default_rng(3))
    b = random_spd(4, np.random.default_rng(3))
    np.testing.assert_array_equal(a, b)


@pytest.mark.unit
def test_equidistant_triple_geometry(rng):
    triple = equidistant_triple(4, rng, spread=0.7)
    for x in (triple.x1, triple.x2, triple.x3):
        assert geodesic_dist(triple.center, x) == pytest.approx(0.7, rel=1e-8)
    assert karcher_residual([triple.x1, triple.x2, triple.x3], None, triple.center) < 1e-9


@pytest.mark.unit
def test_error_trial_is_deterministic_per_index():
    config = ErrorTrialConfig(dim=3, trials=2, multipliers=[5.0, 10.0], seed=11)
    first = error_trial(config, 1)
    again = error_trial(config, 1)
    other = error_trial(config, 0)
    assert first.errors == again.errors
    assert first.errors != other.errors


@pytest.mark.unit
def test_small_error_study_shape_and_fm_accuracy():
    config = ErrorTrialConfig(dim=3, trials=4, multipliers=[5.0, 10.0], seed=0)
    table = approx_error_trial(config)
    assert table.completed == 4
    assert not table.failures
    assert set(table.mean_error) == {"fm", "cs", "le"}
    assert all(len(v) == 2 for v in table.mean_error.values())
    assert max(table.mean_error["fm"]) <= 5e-3
    assert table.mean_base_distance > 0


@pytest.mark.unit
def test_query_at_nearest_point_gives_zero_fm_error():
    config = ErrorTrialConfig(dim=4, trials=3, multipliers=[1.0], seed=5)
    table = approx_error_trial(config)
    assert table.mean_error["fm"][0] < 1e-6


@pytest.mark.unit
def test_scaling_axis_triple_keeps_far_queries_well_conditioned():
    rng = np.random.default_rng(7)
    triple = equidistant_triple(4, rng, spread=0.8, condition_cap=10.0, scaling_axis=True)
    for x in (triple.x1, triple.x2, triple.x3):
        assert geodesic_dist(triple.center, x) == pytest.approx(0.8, rel=1e-8)
    assert karcher_residual([triple.x1, triple.x2, triple.x3], None, triple.center) < 1e-9
    midpoint = frechet_mean([triple.x1, triple.x2], [0.5, 0.5])
    assert geodesic_dist(triple.center, midpoint) == pytest.approx(0.4, rel=1e-7)
    query = geodesic_point(triple.center, midpoint, 200.0)
    ratio = query @ np.linalg.inv(triple.center)
    np.testing.assert_allclose(ratio, ratio[0, 0] * np.eye(4), rtol=1e-5, atol=1e-5 * ratio[0, 0])
    assert np.linalg.cond(query) <= 10.0 * (1 + 1e-5)


@pytest.mark.unit
def test_small_error_study_orders_variants():
    config = ErrorTrialConfig(dim=3, trials=4, multipliers=[5.0, 100.0], seed=2)
    table = approx_error_trial(config)
    assert table.completed == 4
    assert table.mean_base_distance == pytest.approx(config.spread / 2.0, rel=1e-6)
    fm, cs, le = (np.array(table.mean_error[v.value]) for v in MccmVariant)
    assert np.all(fm < le)
    assert np.all(le < cs)
    assert np.all(cs <= 0.2)


@pytest.mark.slow
def test_error_study_with_defaults():
    start = time.perf_counter()
    table = approx_error_trial(ErrorTrialConfig())
    elapsed = time.perf_counter() - start

    assert table.completed == table.trials == 50
    fm, cs, le = (np.array(table.mean_error[v.value]) for v in MccmVariant)
    assert np.all(fm <= 5e-3)
    assert np.all(fm < cs)
    assert np.all(fm < le)
    assert np.all(le < cs)
    assert np.all(cs <= 0.2)
    assert np.all(le <= 0.2)
    assert np.all(np.diff(fm) >= -1e-9)
    assert elapsed < 120.0


@pytest.mark.unit
@pytest.mark.parametrize("seed", [0, 1])
def test_nn_trap_case_disagreement(seed):
    fixture = nn_trap_case(3, np.random.default_rng(seed))
    assert geo_nn(fixture.query, fixture.train)[0] == "C1"
    label, _ = classify(fixture.query, ConvexClassModel.from_labeled(fixture.train), MccmVariant.FM)
    assert label == "C2"
    assert (fixture.nn_label, fixture.convex_label) == ("C1", "C2")


@pytest.mark.slow
def test_nn_trap_case_many_seeds():
    for seed in range(10):
        fixture = nn_trap_case(4, np.random.default_rng(seed))
        models = ConvexClassModel.from_labeled(fixture.train)
        assert geo_nn(fixture.query, fixture.train)[0] == "C1"
        assert classify(fixture.query, models, MccmVariant.FM)[0] == "C2"


@pytest.mark.unit
def test_nn_trap_case_gives_up(mocker):
    from spdkit import synthbench

    mocker.patch.object(synthbench, "_draw_nn_trap", side_effect=synthbench._Rejected("no"))
    with pytest.raises(ConstructionFailed):
        nn_trap_case(3, np.random.default_rng(0), max_attempts=3)
    assert synthbench._draw_nn_trap.call_count == 3


@pytest.mark.unit
def test_frechet_augment(spd_factory, rng):
    points = [spd_factory(3) for _ in range(3)]
    extra = frechet_augment(points, 4, rng)
    assert len(extra) == 4
    assert all(is_spd(p) for p in extra)
    single = frechet_augment(points[:1], 2, rng)
    np.testing.assert_allclose(single[0], points[0])
    with pytest.raises(ValueError):
        frechet_augment([], 2, rng)


@pytest.mark.unit
def test_frechet_augment_points_lie_in_the_convex_model(spd_factory, rng):
    points = [spd_factory(3) for _ in range(3)]
    model = ConvexClassModel("A", tuple(points))
    for p in frechet_augment(points, 3, rng):
        assert dist_fm(p, model).distance < 1e-4


@pytest.mark.unit
def test_cluster_dataset_layout(rng):
    train, test = cluster_dataset(3, 4, 7, 3, rng)
    assert len(train) == 12
    assert [label for label, _ in test] == ["class-0", "class-1", "class-2", "class-0", "class-1", "class-2", "class-0"]
    assert all(is_spd(x) for _, x in train + test)
    with pytest.raises(ValueError):
        cluster_dataset(4, 1, 1, 2, rng)


@pytest.mark.unit
def test_random_split_per_class(rng):
    labeled = [(label, np.eye(2) * (i + 1)) for i, label in enumerate("aaabbbb")]
    train, test = random_split(labeled, 2, rng)
    assert [label for label, _ in train].count("a") == 2
    assert [label for label, _ in train].count("b") == 2
    assert len(test) == 3
    # dataset order is kept within each part
    scales = [x[0, 0] for _, x in train]
    assert scales == sorted(scales)


@pytest.mark.unit
def test_augmentation_flips_geo_nn_on_commuting_fixture():
    u = np.diag([1.0, -1.0]) / np.sqrt(2.0)
    v = np.diag([1.0, 1.0]) / np.sqrt(2.0)
    train = [
        ("C1", expm(-v)),
        ("C2", expm(2.0 * u + 0.2 * v)),
        ("C2", expm(-2.0 * u + 0.2 * v)),
    ]
    test = [("C2", np.eye(2))]
    result = augmentation_sweep(train, test, [0, 50], np.random.default_rng(0))
    assert result.counts == [0, 50]
    assert result.geo_nn_accuracy == [0.0, 1.0]
    assert result.fm_accuracy == 1.0


@pytest.mark.unit
def test_augmentation_sweep_counts_are_sorted(rng):
    train, test = cluster_dataset(2, 2, 4, 2, rng, spread=0.3, separation=1.0)
    result = augmentation_sweep(train, test, [3, 0], rng)
    assert result.counts == [0, 3]
    assert len(result.geo_nn_accuracy) == 2
    assert all(0.0 <= a <= 1.0 for a in result.geo_nn_accuracy)


@pytest.mark.slow
def test_le_is_faster_than_fm_on_benchmark_scale():
    rng = np.random.default_rng(0)
    train, test = cluster_dataset(3, 10, 60, 20, rng, spread=0.1, separation=3.0)
    models = ConvexClassModel.from_labeled(train)

    def total(solver):
        start = time.perf_counter()
        for _, y in test:
            for model in models:
                solver(y, model)
        return time.perf_counter() - start

    for _ in range(3):
        assert total(dist_le) < total(dist_fm)


@pytest.mark.unit
def test_frechet_mean_of_augmented_class_matches_weights():
    points = [np.diag([1.0, 4.0]), np.diag([4.0, 1.0])]
    m = frechet_mean(points, [0.5, 0.5])
    np.testing.assert_allclose(m, np.diag([2.0, 2.0]), rtol=1e-10)
