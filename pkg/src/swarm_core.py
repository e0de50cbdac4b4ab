"""
Swarm Core
Particles, clusters, the PSO step with clamping, inertia schedule and dimension-wise lbest learning
"""

from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationInfo, field_validator

from src.errors import ContractViolation

Evaluator = Callable[[np.ndarray], float]


# =============================================================================
# CORE DATA MODELS
# =============================================================================

class PsoParams(BaseModel):
    """PSO constants; `v_max` is resolved from the domain when left unset"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    w_max: float = Field(0.6, ge=0.0, le=1.0)
    w_min: float = Field(0.3, ge=0.0, le=1.0)
    eta1: float = Field(1.7, ge=0.0)
    eta2: float = Field(1.7, ge=0.0)
    v_max: Optional[float] = Field(None, gt=0.0)

    @field_validator("w_min")
    @classmethod
    def _w_ordered(cls, v: float, info: ValidationInfo) -> float:
        w_max = info.data.get("w_max")
        if w_max is not None and v > w_max:
            raise ValueError(f"w_min {v} exceeds w_max {w_max}")
        return v

    def resolve_v_max(self, bounds: "Bounds") -> float:
        if self.v_max is not None:
            return self.v_max
        return max(bounds.width / 2.0, np.finfo(float).tiny)


@dataclass(frozen=True)
class Bounds:
    """Box domain [low, high]^dims"""
    low: float
    high: float
    dims: int

    @property
    def width(self) -> float:
        return self.high - self.low

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.uniform(self.low, self.high, size=(n, self.dims))

    def clip(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.low, self.high)


@dataclass
class Particle:
    position: np.ndarray
    velocity: np.ndarray
    pbest_position: np.ndarray
    pbest_fitness: float

    @classmethod
    def at_rest(cls, position: np.ndarray, fitness: float) -> "Particle":
        """Particle with zero velocity whose pbest is its current position"""
        position = np.asarray(position, dtype=float).copy()
        return cls(
            position=position,
            velocity=np.zeros_like(position),
            pbest_position=position.copy(),
            pbest_fitness=float(fitness),
        )


@dataclass
class Cluster:
    """Sub-swarm with its own local best.

    `iterations` is the c_itr counter of the inertia schedule.
    """
    members: List[Particle]
    lbest_position: np.ndarray
    lbest_fitness: float
    iterations: int = 0

    @classmethod
    def from_members(cls, members: List[Particle]) -> "Cluster":
        """Cluster whose lbest is the best member pbest (ties: first member)"""
        if not members:
            raise ContractViolation("a cluster needs at least one member")
        best = members[0]
        for particle in members[1:]:
            if particle.pbest_fitness > best.pbest_fitness:
                best = particle
        return cls(
            members=list(members),
            lbest_position=best.pbest_position.copy(),
            lbest_fitness=best.pbest_fitness,
        )

    def __len__(self) -> int:
        return len(self.members)

    @property
    def positions(self) -> np.ndarray:
        return np.vstack([p.position for p in self.members])

    @property
    def center(self) -> np.ndarray:
        return cluster_geometry(self)[0]

    @property
    def radius(self) -> float:
        return cluster_geometry(self)[1]


# =============================================================================
# SCHEDULES
# =============================================================================

def inertia(w_max: float, w_min: float, c_itr: int, r_itr: int) -> float:
    """Linearly decreasing inertia weight"""
    if r_itr <= 0:
        raise ContractViolation(f"r_itr must be >= 1, got {r_itr}")
    if c_itr < 0 or c_itr > r_itr:
        raise ContractViolation(f"c_itr {c_itr} outside [0, {r_itr}]")
    return w_max - (w_max - w_min) * c_itr / r_itr


def remaining_iterations(u_cf: int, evals: int, p_size: int) -> int:
    """Iterations left before the next change at the current population size"""
    if p_size <= 0:
        raise ContractViolation(f"p_size must be >= 1, got {p_size}")
    return max(1, (u_cf - evals) // p_size)


# =============================================================================
# PARTICLE UPDATES
# =============================================================================

def step_particle(p: Particle, lbest: np.ndarray, w: float, params: PsoParams,
                  rng: np.random.Generator, bounds: Bounds) -> Particle:
    """Velocity and position update in place; returns the particle.

    r1, r2 are drawn per dimension. A dimension clamped to the domain has its
    velocity zeroed.
    """
    v_max = params.resolve_v_max(bounds)
    dims = p.position.shape[0]
    r1 = rng.random(dims)
    r2 = rng.random(dims)

    velocity = (
        w * p.velocity
        + params.eta1 * r1 * (p.pbest_position - p.position)
        + params.eta2 * r2 * (lbest - p.position)
    )
    velocity = np.clip(velocity, -v_max, v_max)
    position = p.position + velocity

    clipped = bounds.clip(position)
    velocity = np.where(clipped != position, 0.0, velocity)

    p.position = clipped
    p.velocity = velocity
    return p


def update_pbest(p: Particle, new_fitness: float) -> Particle:
    """Adopt the current position as pbest on strict improvement (ties keep the incumbent)"""
    if new_fitness > p.pbest_fitness:
        p.pbest_position = p.position.copy()
        p.pbest_fitness = float(new_fitness)
    return p


def learn_lbest_dimensionwise(c: Cluster, candidate: np.ndarray, evaluator: Evaluator,
                              candidate_fitness: Optional[float] = None) -> Cluster:
    """Pull improving dimensions of `candidate` into the cluster lbest.

    Dimensions are tried in index order, each against the lbest as updated
    so far; exactly D evaluations. When `candidate_fitness` is known and still
    beats the learned lbest, the whole candidate is adopted (no evaluation).
    """
    for d in range(candidate.shape[0]):
        trial = c.lbest_position.copy()
        trial[d] = candidate[d]
        fitness = evaluator(trial)
        if fitness > c.lbest_fitness:
            c.lbest_position = trial
            c.lbest_fitness = float(fitness)

    if candidate_fitness is not None and candidate_fitness > c.lbest_fitness:
        c.lbest_position = np.asarray(candidate, dtype=float).copy()
        c.lbest_fitness = float(candidate_fitness)
    return c


def cluster_geometry(c: Cluster) -> Tuple[np.ndarray, float]:
    """Center (mean member position) and radius (max member distance to it)"""
    if not c.members:
        raise ContractViolation("geometry of an empty cluster")
    positions = c.positions
    center = positions.mean(axis=0)
    radius = float(np.linalg.norm(positions - center, axis=1).max())
    return center, radius


def particle_count(clusters: List[Cluster]) -> int:
    return sum(len(c) for c in clusters)


def spawn_particles(n: int, bounds: Bounds, rng: np.random.Generator,
                    evaluator: Evaluator, extra_positions: Optional[List[np.ndarray]] = None) -> List[Particle]:
    """n uniform random particles at rest, followed by one per extra position; all evaluated"""
    positions = [row for row in bounds.sample(rng, n)]
    positions.extend(np.asarray(x, dtype=float) for x in (extra_positions or []))
    return [Particle.at_rest(x, evaluator(x)) for x in positions]
