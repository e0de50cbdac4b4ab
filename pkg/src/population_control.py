"""
Population Control
Overlap merging, overcrowding trim, convergence archiving, repopulation and change handling
"""

from dataclasses import dataclass, field
from typing import List, Literal, Optional, Tuple

import numpy as np
import structlog
from scipy.spatial.distance import cdist

from src.clustering import ClusterList, cluster_population
from src.swarm_core import Bounds, Cluster, Evaluator, spawn_particles

logger = structlog.get_logger()

MergeRule = Literal["greater", "less"]
CHANGE_TOLERANCE = 1e-9


@dataclass
class ArchiveEntry:
    position: np.ndarray
    fitness: float
    environment: int


@dataclass
class Archive:
    """lbests of converged clusters, kept for re-injection at the next change"""
    entries: List[ArchiveEntry] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    def add(self, position: np.ndarray, fitness: float, environment: int) -> None:
        self.entries.append(ArchiveEntry(np.asarray(position, dtype=float).copy(), float(fitness), environment))

    def clear(self) -> None:
        self.entries.clear()


# =============================================================================
# OVERLAP
# =============================================================================

def _fraction_inside(a: Cluster, b: Cluster) -> float:
    center, radius = b.center, b.radius
    inside = np.linalg.norm(a.positions - center, axis=1) <= radius
    return float(inside.sum()) / len(a)


def overlap_ratio(a: Cluster, b: Cluster) -> float:
    """Smaller of the two mutual containment fractions"""
    return min(_fraction_inside(a, b), _fraction_inside(b, a))


def merge_clusters(a: Cluster, b: Cluster) -> Cluster:
    """Union of members; keeps the better lbest and the later schedule position"""
    better = a if a.lbest_fitness >= b.lbest_fitness else b
    return Cluster(
        members=a.members + b.members,
        lbest_position=better.lbest_position.copy(),
        lbest_fitness=better.lbest_fitness,
        iterations=max(a.iterations, b.iterations),
    )


def apply_overlap_check(G: ClusterList, r_overlap: float, rule: MergeRule = "greater") -> ClusterList:
    """Merge overlapping pairs until a full scan finds none.

    Pairs are scanned in index order and the scan restarts after each merge;
    the merged cluster takes the first index. Member-to-center distances are
    computed once, and a merge only refreshes the merged cluster's column.
    """
    clusters = list(G)
    if len(clusters) < 2:
        return clusters

    positions = np.vstack([c.positions for c in clusters])
    owner = np.repeat(np.arange(len(clusters)), [len(c) for c in clusters])
    centers = np.vstack([c.positions.mean(axis=0) for c in clusters])
    distances = cdist(positions, centers)
    radii = np.zeros(len(clusters))
    np.maximum.at(radii, owner, distances[np.arange(len(owner)), owner])

    while len(clusters) > 1:
        k = len(clusters)
        # counts[a, b]: members of a inside the sphere of b
        counts = np.zeros((k, k))
        np.add.at(counts, owner, distances <= radii)
        fractions = counts / np.bincount(owner, minlength=k)[:, None]
        ratios = np.minimum(fractions, fractions.T)
        mergeable = ratios < r_overlap if rule == "less" else ratios > r_overlap
        candidates = np.argwhere(np.triu(mergeable, k=1))
        if len(candidates) == 0:
            break

        i, j = (int(v) for v in candidates[0])
        clusters[i] = merge_clusters(clusters[i], clusters[j])
        clusters.pop(j)

        owner[owner == j] = i
        owner[owner > j] -= 1
        distances = np.delete(distances, j, axis=1)
        radii = np.delete(radii, j)
        rows = owner == i
        distances[:, i] = cdist(positions, positions[rows].mean(axis=0)[None, :])[:, 0]
        radii[i] = distances[rows, i].max()
    return clusters


# =============================================================================
# OVERCROWDING / CONVERGENCE
# =============================================================================

def apply_overcrowd_check(c: Cluster, max_subsize: int) -> Cluster:
    """Drop the worst members (by pbest) beyond max_subsize; later index loses ties"""
    excess = len(c) - max_subsize
    if excess <= 0:
        return c
    ranked = sorted(range(len(c)), key=lambda k: (-c.members[k].pbest_fitness, k))
    survivors = sorted(ranked[:max_subsize])
    c.members = [c.members[k] for k in survivors]
    return c


def apply_convergence_check(G: ClusterList, eps_conv: float, archive: Archive,
                            environment: int = 0) -> Tuple[ClusterList, Archive]:
    """Archive and remove clusters whose radius fell below eps_conv"""
    survivors = []
    for c in G:
        if c.radius < eps_conv:
            archive.add(c.lbest_position, c.lbest_fitness, environment)
        else:
            survivors.append(c)
    if len(survivors) < len(G):
        logger.debug("clusters_converged", count=len(G) - len(survivors), archived=len(archive))
    return survivors, archive


# =============================================================================
# REPOPULATION / CHANGE HANDLING
# =============================================================================

def repopulate_if_empty(G: ClusterList, m: int, max_subsize: int, bounds: Bounds,
                        rng: np.random.Generator, evaluator: Evaluator) -> ClusterList:
    """Fresh cradle swarm of m particles when no cluster is left"""
    if G:
        return G
    logger.debug("cluster_list_empty_repopulating", particles=m)
    return cluster_population(spawn_particles(m, bounds, rng, evaluator), max_subsize)


def detect_change(G: ClusterList, evaluator: Evaluator) -> bool:
    """Re-evaluate every lbest; True when any stored fitness is stale"""
    changed = False
    for c in G:
        if abs(evaluator(c.lbest_position) - c.lbest_fitness) > CHANGE_TOLERANCE:
            changed = True
    return changed


def distinct_preserved(candidates: List[Tuple[np.ndarray, float]],
                       merge_radius: Optional[float] = None) -> List[np.ndarray]:
    """Positions to re-inject, dropping any within merge_radius of a better one.

    Without a radius every candidate is kept. Survivors keep their input order.
    """
    positions = [np.asarray(p, dtype=float) for p, _ in candidates]
    if merge_radius is None or len(positions) < 2:
        return positions

    distances = cdist(np.vstack(positions), np.vstack(positions))
    ranked = sorted(range(len(candidates)), key=lambda k: (-candidates[k][1], k))
    kept: List[int] = []
    for k in ranked:
        if all(distances[k, other] > merge_radius for other in kept):
            kept.append(k)
    return [positions[k] for k in sorted(kept)]


def rebuild_after_change(G: ClusterList, archive: Archive, m: int, max_subsize: int,
                         bounds: Bounds, rng: np.random.Generator, evaluator: Evaluator,
                         merge_radius: Optional[float] = None) -> Tuple[ClusterList, Archive]:
    """New cradle swarm: m random particles plus one per preserved lbest, re-clustered.

    With merge_radius, near-duplicate preserved lbests collapse onto the best of them.
    """
    candidates = [(c.lbest_position, c.lbest_fitness) for c in G]
    candidates.extend((e.position, e.fitness) for e in archive.entries)
    preserved = distinct_preserved(candidates, merge_radius)
    particles = spawn_particles(m, bounds, rng, evaluator, extra_positions=preserved)
    archive.clear()
    clusters = cluster_population(particles, max_subsize)
    logger.debug("swarm_rebuilt", particles=len(particles), preserved=len(preserved),
                 merged_away=len(candidates) - len(preserved), clusters=len(clusters))
    return clusters, archive
