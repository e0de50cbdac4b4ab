"""
Cradle Swarm Clustering
Size-constrained single-linkage agglomeration of particles into sub-swarms
"""

from typing import List, Optional, Tuple

import numpy as np
import structlog
from scipy.spatial.distance import cdist

from src.errors import ContractViolation
from src.swarm_core import Cluster, Particle

logger = structlog.get_logger()

ClusterList = List[Cluster]


def single_linkage_distance(a: Cluster, b: Cluster) -> float:
    """Smallest distance between any member of a and any member of b"""
    return float(cdist(a.positions, b.positions).min())


def find_nearest_pair(G: ClusterList, max_subsize: int) -> Optional[Tuple[int, int]]:
    """Closest mergeable pair of clusters, or None when every merge would exceed max_subsize.

    Ties keep the lexicographically smallest (i, j).
    """
    best: Optional[Tuple[int, int]] = None
    best_distance = np.inf
    for i in range(len(G)):
        for j in range(i + 1, len(G)):
            if len(G[i]) + len(G[j]) > max_subsize:
                continue
            distance = single_linkage_distance(G[i], G[j])
            if distance < best_distance:
                best, best_distance = (i, j), distance
    return best


def cluster_population(particles: List[Particle], max_subsize: int) -> ClusterList:
    """Agglomerate particles until no singleton is left or no merge is legal.

    Same merge sequence as repeatedly calling find_nearest_pair and merging
    the pair into its first cluster, but single-linkage distances between
    clusters are maintained incrementally in one matrix.
    """
    if not particles:
        raise ContractViolation("cannot cluster an empty population")
    if max_subsize < 2:
        raise ContractViolation(f"max_subsize must be >= 2, got {max_subsize}")

    positions = np.vstack([p.position for p in particles])
    linkage = cdist(positions, positions)
    np.fill_diagonal(linkage, np.inf)

    members = [[p] for p in particles]
    sizes = np.ones(len(particles), dtype=int)
    order = list(range(len(particles)))

    while any(sizes[k] == 1 for k in order):
        idx = np.asarray(order)
        sub = linkage[np.ix_(idx, idx)].copy()
        too_big = (sizes[idx][:, None] + sizes[idx][None, :]) > max_subsize
        sub[too_big] = np.inf
        sub[np.tril_indices(len(idx))] = np.inf

        flat = int(np.argmin(sub))
        i, j = divmod(flat, len(idx))
        if not np.isfinite(sub[i, j]):
            break

        keep, drop = order[i], order[j]
        members[keep].extend(members[drop])
        sizes[keep] += sizes[drop]
        merged = np.minimum(linkage[keep], linkage[drop])
        linkage[keep, :] = merged
        linkage[:, keep] = merged
        linkage[keep, keep] = np.inf
        order.pop(j)

    clusters = [Cluster.from_members(members[k]) for k in order]
    logger.debug("population_clustered", particles=len(particles), clusters=len(clusters))
    return clusters
