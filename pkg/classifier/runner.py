"""
Async runners behind the management commands.

Queries (or trials) fan out the way concurrent API requests do: one coroutine
per item, `asyncio.gather` over all of them, outputs placed by index. The numeric
work runs in worker threads via `asyncio.to_thread`, at most `config.threads`
at a time, so results never depend on completion order.

Main Functions:
    - run_classify: classify a test file against convex class models of a training file
    - run_benchmark: the same inputs through several methods, with timings
    - run_synthetic: the approximation-error study or the augmentation sweep
    - run_descriptor: CSV grids/tables to SPD dataset records
"""

import asyncio
import logging
import math
import time
from pathlib import Path

import numpy as np

from spdkit.descriptors import (
    brodatz_pixel_features,
    covariance_descriptor,
    ethz_pixel_features,
    frame_set_features,
    resolve_ridge,
    set_covariance,
    table_features,
)
from spdkit.exceptions import DimensionMismatch
from spdkit.mccm import ConvexClassModel, classify, euclid_hull_classify, first_nearest, geodesic_dists
from spdkit.synthbench import augmentation_sweep, cluster_dataset, guarded_trial, summarize_errors

from .config import Method, RunConfig
from .datasets import DatasetParseError, dataset_dim, load_dataset, read_grid, read_rgb_grid, save_dataset
from .reports import (
    BenchmarkReport,
    BenchmarkRow,
    ClassifyReport,
    DescriptorReport,
    QueryResult,
    SyntheticReport,
)

logger = logging.getLogger(__name__)

RECIPES = ('brodatz', 'ethz', 'dct-set', 'table')
DEFAULT_AUGMENT_COUNTS = (0, 5, 10, 20)


async def solve_all(solve, items, threads=1):
    """Call `solve(index, item)` for every item in worker threads.

    Args:
        solve: Blocking callable.
        items: Sequence of inputs.
        threads: Maximum number of concurrent calls.

    Returns:
        list: Outputs in the order of `items`. The first exception raised by any
        call propagates.
    """
    outputs = [None] * len(items)
    semaphore = asyncio.Semaphore(max(1, threads))

    async def one(index, item):
        async with semaphore:
            return index, await asyncio.to_thread(solve, index, item)

    tasks = [one(i, item) for i, item in enumerate(items)]
    for index, output in await asyncio.gather(*tasks):
        outputs[index] = output
    return outputs


def load_pair(train_path, test_path):
    """Load training and test datasets and check they share one dimension."""
    train = load_dataset(train_path)
    test = load_dataset(test_path)
    if not train:
        raise DatasetParseError("training set is empty", path=train_path)
    train_dim = dataset_dim(train)
    test_dim = dataset_dim(test)
    if test_dim is not None and test_dim != train_dim:
        raise DimensionMismatch(f"training points are {train_dim}x{train_dim} but test points are {test_dim}x{test_dim}")
    return train, test, train_dim


class QueryClassifier:
    """Classifies single queries against a fixed training set with one method."""

    def __init__(self, train, config: RunConfig):
        self.train = train
        self.config = config
        self.method = Method(config.variant)
        self.models = ConvexClassModel.from_labeled(train)

    @property
    def classes(self):
        return [str(m.label) for m in self.models]

    def __call__(self, index, item):
        true_label, y = item
        start = time.perf_counter()
        if self.method is Method.GEO_NN:
            predicted, distances, weights, converged = self._geo_nn(y)
        else:
            predicted, distances, weights, converged = self._convex(y)
        elapsed_ms = (time.perf_counter() - start) * 1000.0
        if not converged:
            logger.warning("query %d: a per-class solve stopped before convergence", index)
        return QueryResult(
            index=index,
            true_label=true_label or None,
            predicted=str(predicted),
            distances=distances,
            weights=weights,
            converged=converged,
            elapsed_ms=elapsed_ms,
        )

    def _geo_nn(self, y):
        dists = geodesic_dists(y, [x for _, x in self.train])
        predicted = self.train[first_nearest(dists)][0]
        per_class = {}
        for (label, _), d in zip(self.train, dists):
            per_class[str(label)] = min(per_class.get(str(label), math.inf), float(d))
        return predicted, per_class, None, True

    def _convex(self, y):
        if self.method is Method.EUCLID_HULL:
            predicted, results = euclid_hull_classify(y, self.models, params=self.config.spg)
        else:
            predicted, results = classify(y, self.models, self.method.mccm_variant, params=self.config.spg)
        distances = {str(m.label): r.distance for m, r in zip(self.models, results)}
        weights = None
        if self.config.include_weights:
            weights = {str(m.label): r.weights.tolist() for m, r in zip(self.models, results)}
        converged = all(r.report.converged for r in results)
        return predicted, distances, weights, converged


def _accuracy(queries):
    labelled = [q for q in queries if q.true_label is not None]
    if not labelled:
        return None
    return sum(q.predicted == q.true_label for q in labelled) / len(labelled)


async def classify_points(train, test, config: RunConfig, dim=None):
    """Classify in-memory (label, matrix) test points; see run_classify."""
    classifier = QueryClassifier(train, config)
    start = time.perf_counter()
    queries = await solve_all(classifier, test, threads=config.threads)
    total_ms = (time.perf_counter() - start) * 1000.0
    report = ClassifyReport(
        variant=classifier.method.value,
        dim=dim if dim is not None else dataset_dim(train),
        classes=classifier.classes,
        queries=queries,
        accuracy=_accuracy(queries),
        total_ms=total_ms,
    )
    logger.info("classified %d queries with %s in %.1f ms", len(queries), report.variant, total_ms)
    return report


async def run_classify(train_path, test_path, config: RunConfig):
    """Classify every point of `test_path` against the classes of `train_path`.

    Training points are grouped into one convex class model per label, in order
    of first appearance. Test labels are used only for the accuracy field.

    Returns:
        ClassifyReport: per-query predictions, per-class distances and timings.
    """
    train, test, dim = load_pair(train_path, test_path)
    return await classify_points(train, test, config, dim=dim)


async def run_benchmark(train_path, test_path, variants, config: RunConfig):
    """Time several methods on identical inputs.

    Returns:
        BenchmarkReport: one row per method with total and per-query wall time
        in milliseconds and accuracy.
    """
    train, test, dim = load_pair(train_path, test_path)
    rows = []
    for variant in variants:
        report = await classify_points(train, test, config.model_copy(update={'variant': Method(variant)}), dim=dim)
        count = len(report.queries)
        rows.append(BenchmarkRow(
            variant=report.variant,
            queries=count,
            total_ms=report.total_ms,
            per_query_ms=report.total_ms / count if count else 0.0,
            accuracy=report.accuracy,
        ))
    return BenchmarkReport(dim=dim, threads=config.threads, rows=rows)


async def run_synthetic(config: RunConfig, experiment='error', train_path=None, test_path=None, counts=None):
    """Run a synthetic experiment.

    Args:
        config: Run configuration; `config.seed` seeds every draw.
        experiment: 'error' for the approximation-error study, 'augment' for the
            Fréchet-mean augmentation sweep.
        train_path, test_path: Datasets for 'augment'; generated clusters when omitted.
        counts: Augmentation counts per class for 'augment'.

    Returns:
        SyntheticReport
    """
    if experiment == 'error':
        trial_config = config.error_trial.model_copy(update={'seed': config.seed})
        outcomes = await solve_all(
            lambda index, _: guarded_trial(trial_config, index, config.spg, config.mean),
            range(trial_config.trials),
            threads=config.threads,
        )
        table = summarize_errors(trial_config, outcomes)
        logger.info("error study: %d of %d trials completed", table.completed, table.trials)
        return SyntheticReport(experiment='error', seed=config.seed, error_table=table)

    if experiment != 'augment':
        raise ValueError(f"unknown experiment {experiment!r}")
    if train_path and test_path:
        train, test, _ = load_pair(train_path, test_path)
    else:
        data_rng = np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=(0,)))
        train, test = cluster_dataset(3, 3, 30, 3, data_rng, spread=0.6, separation=1.0)
    sweep_rng = np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=(1,)))
    result = await asyncio.to_thread(
        augmentation_sweep,
        train,
        test,
        list(counts or DEFAULT_AUGMENT_COUNTS),
        sweep_rng,
        config.spg,
        config.mean,
    )
    return SyntheticReport(experiment='augment', seed=config.seed, augmentation=result)


def _descriptor_tables(inputs, recipe, k=None, subtract_mean_frame=False, normalize_variance=False, resize=None):
    """Yield (default label, FeatureTable, set-centred) per output record."""
    if recipe == 'dct-set':
        if not k:
            raise ValueError("the dct-set recipe needs --k")
        frames = [read_grid(path) for path in inputs]
        table = frame_set_features(frames, k, subtract_mean_frame, normalize_variance, resize=resize)
        return [(Path(inputs[0]).parent.name or Path(inputs[0]).stem, table, True)]
    if resize is not None:
        raise ValueError("--resize only applies to the dct-set recipe")
    if recipe == 'brodatz':
        return [(Path(p).stem, brodatz_pixel_features(read_grid(p)), False) for p in inputs]
    if recipe == 'ethz':
        return [(Path(p).stem, ethz_pixel_features(read_rgb_grid(p)), False) for p in inputs]
    if recipe == 'table':
        return [(Path(p).stem, table_features(read_grid(p), provenance=str(p)), False) for p in inputs]
    raise ValueError(f"unknown recipe {recipe!r}")


def run_descriptor(inputs, recipe, out, config: RunConfig, label=None, k=None,
                   subtract_mean_frame=False, normalize_variance=False, resize=None, append=False):
    """Turn CSV inputs into covariance descriptors and write them as dataset records.

    Per-file recipes (brodatz, ethz, table) give one record per input file;
    dct-set treats all inputs as the frames of one set and gives one record,
    optionally resizing every frame to `resize` = (rows, cols) first.
    Each record stores the ridge it was built with.

    Raises:
        RankDeficient: a covariance is singular at the requested ridge; carries a
            suggested ridge.
    """
    if not inputs:
        raise ValueError("no input files")
    records = []
    for default_label, table, centred in _descriptor_tables(
        inputs, recipe, k, subtract_mean_frame, normalize_variance, resize
    ):
        ridge = resolve_ridge(table, config.ridge)
        matrix = set_covariance(table, ridge=ridge) if centred else covariance_descriptor(table, ridge=ridge)
        records.append((label or default_label, matrix, ridge))
    save_dataset(out, records, append=append)
    logger.info("wrote %d %s descriptors to %s", len(records), recipe, out)
    return DescriptorReport(
        recipe=recipe,
        out=str(out),
        records=len(records),
        dim=records[0][1].shape[0],
        ridges=[r for _, _, r in records],
    )
