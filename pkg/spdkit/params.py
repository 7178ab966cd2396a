"""
Validated parameter and report models shared across spdkit.
"""

from typing import List

from pydantic import BaseModel, ConfigDict, Field, model_validator


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class SpgParams(_Frozen):
    """Spectral projected gradient settings."""

    max_iter: int = Field(500, ge=1, description="Iteration cap")
    grad_tol: float = Field(1e-7, gt=0, description="Stop when ‖P(w − ∇f) − w‖∞ falls below this")
    line_search_memory: int = Field(10, ge=1, description="Objective values kept for the nonmonotone Armijo test")
    step_min: float = Field(1e-10, gt=0, description="Lower clamp of the Barzilai–Borwein step")
    step_max: float = Field(1e10, gt=0, description="Upper clamp of the Barzilai–Borwein step")
    armijo_c: float = Field(1e-4, gt=0, lt=1, description="Sufficient-decrease constant")

    @model_validator(mode="after")
    def _step_bounds(self):
        if self.step_min > self.step_max:
            raise ValueError("step_min must not exceed step_max")
        return self


class MeanParams(_Frozen):
    """Karcher mean fixed-point iteration settings.

    `tol` left unset means 1e-9 times the matrix dimension.
    """

    tol: float | None = Field(None, gt=0, description="Karcher residual threshold")
    max_iter: int = Field(200, ge=1)
    step: float = Field(1.0, gt=0, le=1, description="Cap on the curvature-bounded step; halved whenever the objective increases")

    def tolerance(self, dim):
        return self.tol if self.tol is not None else 1e-9 * dim


class SolveReport(_Frozen):
    iterations: int
    final_objective: float
    final_projected_grad_norm: float
    converged: bool


class ErrorTrialConfig(_Frozen):
    """Settings of the synthetic approximation-error study."""

    dim: int = Field(5, ge=2)
    trials: int = Field(50, ge=1)
    multipliers: List[float] = Field(default_factory=lambda: [5.0, 10.0, 100.0, 200.0])
    seed: int = Field(0, ge=0, lt=2**64)
    condition_cap: float = Field(10.0, ge=1)
    spread: float = Field(0.8, gt=0, description="AIRM norm of the tangent vectors placing X1..X3 around M1")

    @model_validator(mode="after")
    def _positive_multipliers(self):
        if not self.multipliers or any(m <= 0 for m in self.multipliers):
            raise ValueError("multipliers must be a non-empty list of positive numbers")
        return self
