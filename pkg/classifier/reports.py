"""
JSON report schemas emitted by the management commands.

Every top-level report carries "schema": 1.
"""

from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from spdkit.synthbench import AugmentationResult, ErrorTable

SCHEMA_VERSION = 1


class _Report(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    schema_version: int = Field(SCHEMA_VERSION, alias="schema")

    def to_json(self, indent=None):
        return self.model_dump_json(by_alias=True, indent=indent)


class QueryResult(BaseModel):
    index: int = Field(description="Position of the query in the test file")
    true_label: Optional[str] = Field(None, description="Label in the test file; None when empty")
    predicted: str
    distances: Dict[str, float] = Field(description="Per-class distance; geo-nn reports the nearest point per class")
    weights: Optional[Dict[str, List[float]]] = Field(None, description="Optimal simplex weights per class")
    converged: bool = Field(True, description="Every per-class solve met its stopping criterion")
    elapsed_ms: float


class ClassifyReport(_Report):
    command: Literal["classify"] = "classify"
    variant: str
    dim: int
    classes: List[str]
    queries: List[QueryResult]
    accuracy: Optional[float] = Field(None, description="correct / labelled queries")
    total_ms: float


class BenchmarkRow(BaseModel):
    variant: str
    queries: int
    total_ms: float
    per_query_ms: float
    accuracy: Optional[float]


class BenchmarkReport(_Report):
    command: Literal["benchmark"] = "benchmark"
    dim: int
    threads: int
    rows: List[BenchmarkRow]


class SyntheticReport(_Report):
    command: Literal["synthetic"] = "synthetic"
    experiment: Literal["error", "augment"]
    seed: int
    error_table: Optional[ErrorTable] = None
    augmentation: Optional[AugmentationResult] = None


class DescriptorReport(_Report):
    command: Literal["descriptor"] = "descriptor"
    recipe: str
    out: str
    records: int
    dim: int
    ridges: List[float] = Field(description="Ridge added to each record, in output order")


class GenReport(_Report):
    command: Literal["gen"] = "gen"
    mode: str
    files: Dict[str, int] = Field(description="Output path to number of records written")


class ErrorDetail(BaseModel):
    type: str
    message: str
    line: Optional[int] = None
    label: Optional[str] = None
    min_eigenvalue: Optional[float] = None
    suggested_ridge: Optional[float] = None


class ErrorReport(_Report):
    error: ErrorDetail

    @classmethod
    def from_exception(cls, exc):
        label = getattr(exc, 'label', None)
        return cls(error=ErrorDetail(
            type=type(exc).__name__,
            message=str(exc),
            line=getattr(exc, 'line', None),
            label=None if label is None else str(label),
            min_eigenvalue=getattr(exc, 'min_eigenvalue', None),
            suggested_ridge=getattr(exc, 'suggested_ridge', None),
        ))
