"""
Experiment Configuration
Flat JSON documents routed into validated, nested experiment settings
"""

import json
from pathlib import Path
from typing import Any, Dict, Literal, Optional, Union

import structlog
from pydantic import BaseModel, ConfigDict, Field, ValidationInfo, field_validator

from src.errors import ConfigurationError, coerce_model
from src.mpb import MPBSettings
from src.swarm_core import Bounds, PsoParams

logger = structlog.get_logger()


class ExperimentConfig(BaseModel):
    """Everything a run needs besides its seed"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    M: int = Field(70, ge=2)
    max_subsize: int = Field(3, ge=2)
    pso: PsoParams = PsoParams()
    R_overlap: float = Field(0.7, ge=0.0, le=1.0)
    overlap_merge_when: Literal["greater", "less"] = "greater"
    eps_conv: float = Field(1e-4, gt=0.0)
    eps_peak: float = Field(0.5, ge=0.0)
    diversity_enabled: bool = True
    confidence_enabled: bool = False
    confidence_decimals: int = Field(1, ge=0)
    spread: float = Field(0.5, ge=0.0)
    lbest_learning_cap: Optional[int] = Field(1, ge=0)
    skip_stale_recombination: bool = True
    strict_audit: bool = False
    mpb: MPBSettings = MPBSettings()
    U_cf: int = Field(10000, ge=1)
    n_environments: int = Field(100, ge=1)
    runs: int = Field(50, ge=1)
    base_seed: int = Field(0, ge=0)

    @field_validator("U_cf")
    @classmethod
    def _budget_covers_swarm(cls, v: int, info: ValidationInfo) -> int:
        m = info.data.get("M")
        if m is not None and v < m:
            raise ValueError(f"U_cf ({v}) must be at least M ({m})")
        return v

    @property
    def bounds(self) -> Bounds:
        return Bounds(self.mpb.bounds_low, self.mpb.bounds_high, self.mpb.dims)

    @property
    def mode(self) -> str:
        """Label of the algorithm variant: the diversity-disabled ablation is 'cpso'"""
        return "dcpso" if self.diversity_enabled else "cpso"

    def with_overrides(self, **overrides: Any) -> "ExperimentConfig":
        """Copy with flat keys replaced (same routing and validation as parse_config)"""
        flat = flatten_config(self)
        flat.update(overrides)
        return build_config(flat)


MPB_KEYS = frozenset(MPBSettings.model_fields)
PSO_KEYS = frozenset(PsoParams.model_fields)
TOP_KEYS = frozenset(ExperimentConfig.model_fields) - {"mpb", "pso"}


def build_config(flat: Dict[str, Any]) -> ExperimentConfig:
    """Route flat keys to their section and validate; unknown keys are rejected"""
    top: Dict[str, Any] = {}
    mpb: Dict[str, Any] = {}
    pso: Dict[str, Any] = {}
    for key, value in flat.items():
        if key in MPB_KEYS:
            mpb[key] = value
        elif key in PSO_KEYS:
            pso[key] = value
        elif key in TOP_KEYS:
            top[key] = value
        else:
            raise ConfigurationError("unknown configuration key", key=key)

    top["mpb"] = coerce_model(MPBSettings, mpb)
    top["pso"] = coerce_model(PsoParams, pso)
    return coerce_model(ExperimentConfig, top)


def flatten_config(config: ExperimentConfig) -> Dict[str, Any]:
    flat = config.model_dump(exclude={"mpb", "pso"})
    flat.update(config.mpb.model_dump())
    flat.update(config.pso.model_dump())
    return flat


def parse_config(file: Union[str, Path, None]) -> ExperimentConfig:
    """Load a flat JSON config; missing keys take their defaults"""
    if file is None:
        return build_config({})

    path = Path(file)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError as e:
        raise ConfigurationError(f"config file not found: {path}") from e
    except OSError as e:
        raise ConfigurationError(f"cannot read config file {path}: {e}") from e

    if not text.strip():
        document: Any = {}
    else:
        try:
            document = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"malformed config document {path}: {e.msg} (line {e.lineno})") from e
    if not isinstance(document, dict):
        raise ConfigurationError(f"config document {path} must be a flat JSON object")

    config = build_config(document)
    logger.info("config_loaded", path=str(path), overrides=sorted(document))
    return config
