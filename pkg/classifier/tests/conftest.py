"""
Pytest configuration and fixtures for the classifier app tests.
"""

import json

import numpy as np
import pytest


@pytest.fixture
def cluster_files(tmp_path):
    """Three well separated 3x3 classes: 5 training points each, 9 test points."""
    from classifier.datasets import save_dataset
    from spdkit.synthbench import cluster_dataset

    train, test = cluster_dataset(3, 5, 9, 3, np.random.default_rng(7), spread=0.1, separation=3.0)
    train_path = save_dataset(tmp_path / 'train.jsonl', train)
    test_path = save_dataset(tmp_path / 'test.jsonl', test)
    return train_path, test_path


@pytest.fixture
def write_lines(tmp_path):
    """Write raw JSON Lines records (dicts or strings) to a file and return its path."""

    def write(name, records):
        path = tmp_path / name
        lines = [r if isinstance(r, str) else json.dumps(r) for r in records]
        path.write_text('\n'.join(lines) + ('\n' if lines else ''), encoding='utf-8')
        return path

    return write


@pytest.fixture
def grid_file(tmp_path):
    """Write a 2-D array as a CSV grid."""

    def write(name, grid):
        path = tmp_path / name
        np.savetxt(path, np.asarray(grid, dtype=float), delimiter=',')
        return path

    return write


@pytest.fixture
def run_command(capsys):
    """Run a management command; returns (parsed stdout JSON or text, stderr)."""
    from django.core.management import call_command

    def run(*args, parse=True):
        call_command(*args)
        captured = capsys.readouterr()
        return (json.loads(captured.out) if parse else captured.out), captured.err

    return run
