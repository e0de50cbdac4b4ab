"""
Moving Peaks Benchmark
Seedable dynamic landscape: evaluation, per-change dynamics, oracle optimum and peak coverage
"""

from dataclasses import dataclass
from typing import Any, List, Literal, Sequence, Tuple, Union

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, Field, ValidationInfo, field_validator
from scipy.spatial.distance import cdist

from src.errors import ContractViolation, coerce_model

logger = structlog.get_logger()

Sphere = Tuple[np.ndarray, float]


# =============================================================================
# SETTINGS
# =============================================================================

class MPBSettings(BaseModel):
    """Benchmark settings; defaults are the standard scenario (10 peaks in [0,100]^5)"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    dims: int = Field(5, ge=1)
    n_peaks: int = Field(10, ge=1)
    bounds_low: float = 0.0
    bounds_high: float = 100.0
    height_min: float = 30.0
    height_max: float = 70.0
    width_min: float = Field(1.0, ge=0.0)
    width_max: float = 12.0
    initial_height: float = 50.0
    shift_length: float = Field(1.0, ge=0.0)
    height_severity: float = Field(7.0, ge=0.0)
    width_severity: float = Field(1.0, ge=0.0)
    correlation_lambda: float = Field(0.0, ge=0.0, le=1.0)
    peak_shape: Literal["sharp", "cone"] = "sharp"

    @field_validator("bounds_high")
    @classmethod
    def _bounds_ordered(cls, v: float, info: ValidationInfo) -> float:
        low = info.data.get("bounds_low")
        if low is not None and v < low:
            raise ValueError(f"inverted bounds [{low}, {v}]")
        return v

    @field_validator("height_max")
    @classmethod
    def _heights_ordered(cls, v: float, info: ValidationInfo) -> float:
        low = info.data.get("height_min")
        if low is not None and v < low:
            raise ValueError(f"inverted height range [{low}, {v}]")
        return v

    @field_validator("width_max")
    @classmethod
    def _widths_ordered(cls, v: float, info: ValidationInfo) -> float:
        low = info.data.get("width_min")
        if low is not None and v < low:
            raise ValueError(f"inverted width range [{low}, {v}]")
        return v


# =============================================================================
# LANDSCAPE
# =============================================================================

@dataclass
class Peak:
    """Read-only view of one peak"""
    height: float
    width: float
    location: np.ndarray
    velocity: np.ndarray


@dataclass
class Landscape:
    """Mutable benchmark state owned by a single run.

    Peak parameters are stored column-wise so evaluation is one vectorized
    pass over all peaks. `evaluations` counts algorithm-side calls only.
    """
    settings: MPBSettings
    heights: np.ndarray
    widths: np.ndarray
    locations: np.ndarray
    velocities: np.ndarray
    rng: np.random.Generator
    change_count: int = 0
    evaluations: int = 0

    @property
    def dims(self) -> int:
        return self.settings.dims

    @property
    def n_peaks(self) -> int:
        return self.settings.n_peaks

    @property
    def bounds(self) -> Tuple[float, float]:
        return self.settings.bounds_low, self.settings.bounds_high

    @property
    def peaks(self) -> List[Peak]:
        return [
            Peak(
                height=float(self.heights[i]),
                width=float(self.widths[i]),
                location=self.locations[i].copy(),
                velocity=self.velocities[i].copy(),
            )
            for i in range(self.n_peaks)
        ]

    def state_fingerprint(self) -> Tuple[bytes, ...]:
        """Byte snapshot of the peak state, for equality checks (-0.0 folded into 0.0)"""
        return tuple(
            (np.asarray(a, dtype=float) + 0.0).tobytes()
            for a in (self.heights, self.widths, self.locations, self.velocities)
        )


def init_landscape(settings: Union[MPBSettings, dict], seed: Any) -> Landscape:
    """Create the t=0 landscape.

    Heights start at `initial_height`, widths uniform in the width range and
    locations uniform in the domain. `seed` may be an int or a numpy SeedSequence.
    """
    settings = coerce_model(MPBSettings, settings)
    rng = np.random.default_rng(seed)

    p, d = settings.n_peaks, settings.dims
    locations = rng.uniform(settings.bounds_low, settings.bounds_high, size=(p, d))
    widths = rng.uniform(settings.width_min, settings.width_max, size=p)
    heights = np.full(p, float(settings.initial_height))
    np.clip(heights, settings.height_min, settings.height_max, out=heights)

    landscape = Landscape(
        settings=settings,
        heights=heights,
        widths=widths,
        locations=locations,
        velocities=np.zeros((p, d)),
        rng=rng,
    )
    logger.debug("landscape_initialized", peaks=p, dims=d, shape=settings.peak_shape)
    return landscape


# =============================================================================
# EVALUATION
# =============================================================================

def _peak_values(landscape: Landscape, X: np.ndarray) -> np.ndarray:
    """Per-peak contributions for a (n, D) batch -> (n, p)"""
    sq_dist = ((X[:, None, :] - landscape.locations[None, :, :]) ** 2).sum(axis=2)
    if landscape.settings.peak_shape == "cone":
        return landscape.heights[None, :] - landscape.widths[None, :] * np.sqrt(sq_dist)
    return landscape.heights[None, :] / (1.0 + landscape.widths[None, :] * sq_dist)


def _fitness(landscape: Landscape, x: np.ndarray) -> float:
    return float(_peak_values(landscape, x[None, :])[0].max())


def _as_position(landscape: Landscape, x: Sequence[float]) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (landscape.dims,):
        raise ContractViolation(f"position has shape {x.shape}, expected ({landscape.dims},)")
    return x


def evaluate(landscape: Landscape, x: Sequence[float]) -> float:
    """Fitness of one position; counts one evaluation"""
    x = _as_position(landscape, x)
    landscape.evaluations += 1
    return _fitness(landscape, x)


def evaluate_many(landscape: Landscape, X: np.ndarray) -> np.ndarray:
    """Fitness of each row of X; counts one evaluation per row"""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != landscape.dims:
        raise ContractViolation(f"batch has shape {X.shape}, expected (n, {landscape.dims})")
    landscape.evaluations += X.shape[0]
    if X.shape[0] == 0:
        return np.empty(0)
    return _peak_values(landscape, X).max(axis=1)


# =============================================================================
# DYNAMICS
# =============================================================================

def advance(landscape: Landscape) -> Landscape:
    """Apply one environment change in place and return the landscape.

    Each peak draws r ~ U[-1,1]^D and two independent N(0,1) values. The
    shift is the combined direction (1-λ)r + λv rescaled to norm s; height
    and width take additive severity steps. Everything is clamped to range.
    """
    s = landscape.settings
    p, d = s.n_peaks, s.dims
    rng = landscape.rng

    r = rng.uniform(-1.0, 1.0, size=(p, d))
    sigma_height = rng.standard_normal(p)
    sigma_width = rng.standard_normal(p)

    direction = (1.0 - s.correlation_lambda) * r + s.correlation_lambda * landscape.velocities
    norms = np.linalg.norm(direction, axis=1, keepdims=True)
    safe = np.where(norms > 0.0, norms, 1.0)
    shift = np.where(norms > 0.0, s.shift_length * direction / safe, 0.0)

    landscape.velocities = shift
    landscape.locations = np.clip(landscape.locations + shift, s.bounds_low, s.bounds_high)
    landscape.heights = np.clip(
        landscape.heights + s.height_severity * sigma_height, s.height_min, s.height_max
    )
    landscape.widths = np.clip(
        landscape.widths + s.width_severity * sigma_width, s.width_min, s.width_max
    )
    landscape.change_count += 1
    return landscape


# =============================================================================
# ORACLE ACCESS (not counted)
# =============================================================================

def current_optimum(landscape: Landscape) -> Tuple[np.ndarray, float]:
    """Location and fitness of the highest peak; ties go to the lowest index"""
    idx = int(np.argmax(landscape.heights))
    position = landscape.locations[idx].copy()
    return position, _fitness(landscape, position)


def peaks_found(landscape: Landscape, spheres: Sequence[Sphere]) -> int:
    """Number of peaks lying within radius of at least one sphere"""
    if len(spheres) == 0:
        return 0
    centers = np.vstack([np.asarray(c, dtype=float) for c, _ in spheres])
    radii = np.asarray([r for _, r in spheres], dtype=float)
    distances = cdist(landscape.locations, centers)
    covered = (distances <= radii[None, :]).any(axis=1)
    return int(covered.sum())
