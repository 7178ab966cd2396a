"""
SPD dataset files and numeric grid inputs.

Datasets are JSON Lines, one point per line:
    {"label": "...", "dim": d, "matrix": [d*d floats, row-major]}
An optional "ridge" field records the regularization a descriptor was built with.

Grids are CSV files of numbers; a 3-channel grid is three CSV blocks separated
by blank lines (R, G, B).
"""

import io
import json
import logging
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from spdkit.exceptions import InvalidSpd
from spdkit.spd import as_spd

logger = logging.getLogger(__name__)


class DatasetError(Exception):
    """Base class for dataset and grid file errors; `line` is 1-based when known."""

    def __init__(self, message, line=None, path=None):
        location = f"{path}:{line}: " if path and line else f"line {line}: " if line else ""
        super().__init__(f"{location}{message}")
        self.line = line
        self.path = str(path) if path else None


class DatasetParseError(DatasetError):
    pass


class DatasetInvalidSpd(DatasetError):
    def __init__(self, message, line=None, path=None, min_eigenvalue=None):
        super().__init__(message, line=line, path=path)
        self.min_eigenvalue = min_eigenvalue


class SpdDatasetRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    label: str = Field(description="Class label")
    dim: int = Field(ge=1, description="Matrix dimension d")
    matrix: List[float] = Field(description="d*d entries, row-major")
    ridge: Optional[float] = Field(None, ge=0, description="Ridge added when the descriptor was built")

    @model_validator(mode="after")
    def _entry_count(self):
        if len(self.matrix) != self.dim * self.dim:
            raise ValueError(f"matrix has {len(self.matrix)} entries, expected {self.dim * self.dim}")
        return self

    @classmethod
    def from_matrix(cls, label, matrix, ridge=None):
        matrix = np.asarray(matrix, dtype=float)
        return cls(label=str(label), dim=matrix.shape[0], matrix=matrix.ravel().tolist(), ridge=ridge)


def load_dataset(path) -> List[Tuple[str, np.ndarray]]:
    """Read a JSON Lines SPD dataset.

    Blank lines are skipped. Every matrix is checked against the SPD invariants.

    Raises:
        DatasetParseError: a line is not valid JSON or not a valid record.
        DatasetInvalidSpd: a matrix is asymmetric or not positive definite.
    """
    path = Path(path)
    points = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                record = SpdDatasetRecord.model_validate_json(line)
            except ValidationError as exc:
                raise DatasetParseError(_first_error(exc), line=lineno, path=path) from exc
            matrix = np.asarray(record.matrix, dtype=float).reshape(record.dim, record.dim)
            try:
                matrix = as_spd(matrix, name=f"matrix of {record.label!r}")
            except InvalidSpd as exc:
                raise DatasetInvalidSpd(str(exc), line=lineno, path=path, min_eigenvalue=exc.min_eigenvalue) from exc
            points.append((record.label, matrix))
    logger.debug("loaded %d points from %s", len(points), path)
    return points


def _first_error(exc):
    error = exc.errors()[0]
    where = ".".join(str(p) for p in error.get("loc", ()))
    return f"{where}: {error['msg']}" if where else error["msg"]


def save_dataset(path, records, ridge=None, append=False):
    """Write (label, matrix) or (label, matrix, ridge) items as JSON Lines.

    Floats are written with Python's shortest round-trip representation, so
    loading the file gives back the same doubles.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "a" if append else "w", encoding="utf-8") as f:
        for label, matrix, *extra in records:
            record = SpdDatasetRecord.from_matrix(label, matrix, ridge=extra[0] if extra else ridge)
            f.write(json.dumps(record.model_dump(exclude_none=True)) + "\n")
    return path


def dataset_dim(points):
    dims = {m.shape[0] for _, m in points}
    if len(dims) > 1:
        raise DatasetParseError(f"dataset mixes matrix dimensions {sorted(dims)}")
    return dims.pop() if dims else None


def read_grid(path):
    """A 2-D numeric grid from a CSV file."""
    path = Path(path)
    try:
        grid = np.loadtxt(path, delimiter=",", ndmin=2, dtype=float)
    except ValueError as exc:
        raise DatasetParseError(f"not a numeric CSV grid: {exc}", path=path) from exc
    if grid.size == 0:
        raise DatasetParseError("grid is empty", path=path)
    return grid


def read_rgb_grid(path):
    """A (rows, cols, 3) grid from three blank-line separated CSV blocks."""
    path = Path(path)
    blocks, current = [], []
    for line in path.read_text(encoding="utf-8").splitlines():
        if line.strip():
            current.append(line)
        elif current:
            blocks.append(current)
            current = []
    if current:
        blocks.append(current)
    if len(blocks) != 3:
        raise DatasetParseError(f"expected 3 CSV blocks (R, G, B), found {len(blocks)}", path=path)
    try:
        channels = [np.loadtxt(io.StringIO("\n".join(b)), delimiter=",", ndmin=2, dtype=float) for b in blocks]
    except ValueError as exc:
        raise DatasetParseError(f"not a numeric CSV grid: {exc}", path=path) from exc
    if len({c.shape for c in channels}) != 1:
        raise DatasetParseError("R, G and B blocks differ in shape", path=path)
    return np.stack(channels, axis=-1)
