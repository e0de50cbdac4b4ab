"""
Diversity Mechanism
Recombine the best dimensions of other clusters' lbests and relocate the worst cluster there
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
import structlog

from src.clustering import ClusterList
from src.swarm_core import Bounds, Cluster, Evaluator, Particle

logger = structlog.get_logger()

Candidate = Tuple[np.ndarray, float]


@dataclass
class ConfidenceTable:
    """How many times each (rounded) candidate position has been produced this environment"""
    decimals: int = 1
    counts: Dict[Tuple[float, ...], int] = field(default_factory=dict)

    def key(self, position: np.ndarray) -> Tuple[float, ...]:
        return tuple(float(v) for v in np.round(np.asarray(position, dtype=float), self.decimals))

    def clear(self) -> None:
        self.counts.clear()


def select_worst_cluster(G: ClusterList) -> Optional[int]:
    """Index of the lowest lbest (first on ties); None when fewer than two clusters"""
    if len(G) < 2:
        return None
    worst = 0
    for i in range(1, len(G)):
        if G[i].lbest_fitness < G[worst].lbest_fitness:
            worst = i
    return worst


def recombine_best_dimensions(worst_lbest: Candidate, donors: List[Candidate],
                              evaluator: Evaluator) -> Candidate:
    """Greedy per-dimension crossover of donor coordinates into the worst lbest.

    For each dimension, each donor's value is tried in turn and kept on strict
    improvement. Costs D x len(donors) evaluations.
    """
    position = np.asarray(worst_lbest[0], dtype=float).copy()
    fitness = float(worst_lbest[1])
    for d in range(position.shape[0]):
        for donor_position, _ in donors:
            trial = position.copy()
            trial[d] = donor_position[d]
            trial_fitness = evaluator(trial)
            if trial_fitness > fitness:
                position, fitness = trial, float(trial_fitness)
    return position, fitness


def relocate_cluster(c: Cluster, target: Candidate, rng: np.random.Generator, spread: float,
                     evaluator: Evaluator, bounds: Optional[Bounds] = None) -> Cluster:
    """Move every member next to `target` and restart them there.

    Members land within ±spread per dimension of the target, at rest, with
    pbest re-evaluated (one evaluation each). The inertia schedule restarts.
    """
    target_position = np.asarray(target[0], dtype=float)
    c.lbest_position = target_position.copy()
    c.lbest_fitness = float(target[1])

    relocated = []
    for _ in c.members:
        position = target_position + rng.uniform(-spread, spread, size=target_position.shape)
        if bounds is not None:
            position = bounds.clip(position)
        particle = Particle.at_rest(position, evaluator(position))
        if particle.pbest_fitness > c.lbest_fitness:
            c.lbest_position = particle.pbest_position.copy()
            c.lbest_fitness = particle.pbest_fitness
        relocated.append(particle)
    c.members = relocated
    c.iterations = 0
    return c


def confidence_gate(table: ConfidenceTable, position: np.ndarray) -> bool:
    """Count one more sighting of `position`; True from the second sighting on"""
    key = table.key(position)
    table.counts[key] = table.counts.get(key, 0) + 1
    return table.counts[key] >= 2


@dataclass
class RecombinationMemo:
    """Worst-cluster lbest whose last recombination found no improvement"""
    stale: Optional[bytes] = None

    @staticmethod
    def key(lbest: Candidate) -> bytes:
        return np.append(np.asarray(lbest[0], dtype=float), float(lbest[1])).tobytes()

    def clear(self) -> None:
        self.stale = None


def distinct_donors(worst_position: np.ndarray, donors: List[Candidate]) -> List[Candidate]:
    """Donors with pairwise distinct positions, none equal to the worst lbest; first one wins"""
    seen = {np.asarray(worst_position, dtype=float).tobytes()}
    distinct = []
    for position, fitness in donors:
        key = np.asarray(position, dtype=float).tobytes()
        if key not in seen:
            seen.add(key)
            distinct.append((position, fitness))
    return distinct


def explore_area(G: ClusterList, evaluator: Evaluator, rng: np.random.Generator, spread: float,
                 bounds: Optional[Bounds] = None, table: Optional[ConfidenceTable] = None,
                 memo: Optional[RecombinationMemo] = None) -> bool:
    """Run one round of the diversity mechanism on G in place.

    Returns True when the worst cluster was relocated. With a confidence
    table the move also requires the recombined position to recur. With a
    memo, a worst lbest that already failed to improve is not recombined
    again until it moves.
    """
    worst = select_worst_cluster(G)
    if worst is None:
        return False

    cluster = G[worst]
    lbest = (cluster.lbest_position, cluster.lbest_fitness)
    if memo is not None and memo.stale == memo.key(lbest):
        return False

    donors = distinct_donors(cluster.lbest_position,
                             [(c.lbest_position, c.lbest_fitness) for i, c in enumerate(G) if i != worst])
    if not donors:
        return False
    position, fitness = recombine_best_dimensions(lbest, donors, evaluator)
    if not fitness > cluster.lbest_fitness:
        if memo is not None:
            memo.stale = memo.key(lbest)
        return False
    if table is not None and not confidence_gate(table, position):
        return False

    relocate_cluster(cluster, (position, fitness), rng, spread, evaluator, bounds)
    return True
