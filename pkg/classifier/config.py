"""
Run configuration for the classifier commands.

Values are layered: Django settings (`SPD_*`, read from env/.env.dev), then a
`--config` JSON file, then explicit command-line flags.
"""

import json
from enum import Enum
from pathlib import Path
from typing import Optional

from django.conf import settings
from pydantic import BaseModel, ConfigDict, Field

from spdkit.mccm import MccmVariant
from spdkit.params import ErrorTrialConfig, MeanParams, SpgParams


class Method(str, Enum):
    FM = "fm"
    CS = "cs"
    LE = "le"
    GEO_NN = "geo-nn"
    EUCLID_HULL = "euclid-hull"

    @property
    def mccm_variant(self) -> Optional[MccmVariant]:
        """The convex-model variant behind this method, None for the baselines."""
        try:
            return MccmVariant(self.value)
        except ValueError:
            return None


METHOD_CHOICES = [m.value for m in Method]


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    variant: Method = Field(Method.FM, description="Classifier: an MCCM variant or a baseline")
    spg: SpgParams = Field(default_factory=SpgParams, description="Spectral projected gradient settings")
    mean: MeanParams = Field(default_factory=MeanParams, description="Karcher mean settings")
    error_trial: ErrorTrialConfig = Field(default_factory=ErrorTrialConfig, description="Synthetic error study")
    ridge: Optional[float] = Field(None, ge=0, description="Descriptor ridge; None uses 1e-6 times the mean variance")
    seed: int = Field(0, ge=0, description="Seed for every random draw of a run")
    threads: int = Field(1, ge=1, description="Queries solved concurrently")
    include_weights: bool = Field(False, description="Report the optimal simplex weights per class")

    @classmethod
    def from_settings(cls, config_path=None, **overrides):
        """Build the effective configuration.

        Args:
            config_path: Optional JSON file with any RunConfig fields.
            **overrides: Flag values; None means "not given".

        Returns:
            RunConfig: validated configuration.
        """
        data = {
            'seed': settings.SPD_SEED,
            'threads': settings.SPD_THREADS,
            'ridge': settings.SPD_RIDGE,
        }
        if config_path:
            data.update(json.loads(Path(config_path).read_text(encoding='utf-8')))
        data.update({key: value for key, value in overrides.items() if value is not None})
        return cls.model_validate(data)
