"""
DCPSO Optimizer
One instance drives the clustered swarm through repeated iterations against a budgeted objective
"""

from typing import List, Protocol

import numpy as np
import structlog

from src.clustering import ClusterList, cluster_population
from src.config import ExperimentConfig
from src.diversity import ConfidenceTable, RecombinationMemo, explore_area
from src.population_control import (
    Archive,
    apply_convergence_check,
    apply_overcrowd_check,
    apply_overlap_check,
    detect_change,
    rebuild_after_change,
    repopulate_if_empty,
)
from src.swarm_core import (
    Cluster,
    Particle,
    inertia,
    learn_lbest_dimensionwise,
    particle_count,
    remaining_iterations,
    spawn_particles,
    step_particle,
    update_pbest,
)

logger = structlog.get_logger()


class Objective(Protocol):
    """Counted fitness function that reports budget use in the current environment and pending changes"""

    def __call__(self, x: np.ndarray) -> float: ...

    @property
    def evaluations_in_environment(self) -> int: ...

    def acknowledge_change(self) -> None: ...


class DCPSOptimizer:
    """Diverse clustering PSO state machine.

    `iterate()` runs one full pass: PSO updates with dimension-wise lbest
    learning, the diversity mechanism, overlap / overcrowding / convergence
    checks, repopulation and change detection (rebuilding on change).
    """

    def __init__(self, config: ExperimentConfig, objective: Objective, rng: np.random.Generator):
        self.config = config
        self.objective = objective
        self.rng = rng
        self.bounds = config.bounds
        self.clusters: ClusterList = []
        self.archive = Archive()
        self.confidence = ConfidenceTable(decimals=config.confidence_decimals)
        self.memo = RecombinationMemo()
        self.environment = 0
        self.clusters_generated = 0
        self.relocations = 0

    def initialize(self) -> None:
        """Cradle swarm of M particles, clustered"""
        cfg = self.config
        particles = spawn_particles(cfg.M, self.bounds, self.rng, self.objective)
        self.clusters = cluster_population(particles, cfg.max_subsize)
        self.clusters_generated += len(self.clusters)

    def iterate(self) -> bool:
        """One iteration; returns True when a change was detected (and the swarm rebuilt)"""
        cfg = self.config

        self._move_clusters()

        if cfg.diversity_enabled:
            table = self.confidence if cfg.confidence_enabled else None
            memo = self.memo if cfg.skip_stale_recombination else None
            if explore_area(self.clusters, self.objective, self.rng, cfg.spread, self.bounds, table, memo):
                self.relocations += 1

        self.clusters = apply_overlap_check(self.clusters, cfg.R_overlap, cfg.overlap_merge_when)
        self.clusters = [apply_overcrowd_check(c, cfg.max_subsize) for c in self.clusters]
        self.clusters, self.archive = apply_convergence_check(
            self.clusters, cfg.eps_conv, self.archive, self.environment
        )

        if not self.clusters:
            self.clusters = repopulate_if_empty(
                self.clusters, cfg.M, cfg.max_subsize, self.bounds, self.rng, self.objective
            )
            self.clusters_generated += len(self.clusters)

        if detect_change(self.clusters, self.objective):
            self.rebuild()
            return True
        return False

    def rebuild(self) -> None:
        """React to an environment change: new cradle swarm seeded with the preserved lbests.

        The objective's pending change is acknowledged first, so a boundary
        crossed by the rebuild's own evaluations stays visible.
        """
        cfg = self.config
        self.objective.acknowledge_change()
        self.clusters, self.archive = rebuild_after_change(
            self.clusters, self.archive, cfg.M, cfg.max_subsize, self.bounds, self.rng, self.objective,
            merge_radius=cfg.eps_peak,
        )
        self.confidence.clear()
        self.memo.clear()
        self.environment += 1
        self.clusters_generated += len(self.clusters)

    def _move_clusters(self) -> None:
        cfg = self.config
        p_size = particle_count(self.clusters)
        if p_size == 0:
            return
        evals = min(self.objective.evaluations_in_environment, cfg.U_cf)
        r_itr = remaining_iterations(cfg.U_cf, evals, p_size)

        for cluster in self.clusters:
            w = inertia(cfg.pso.w_max, cfg.pso.w_min, min(cluster.iterations, r_itr), r_itr)
            improved: List[Particle] = []
            for particle in cluster.members:
                step_particle(particle, cluster.lbest_position, w, cfg.pso, self.rng, self.bounds)
                previous = particle.pbest_fitness
                update_pbest(particle, self.objective(particle.position))
                if particle.pbest_fitness > previous:
                    improved.append(particle)
            self._learn_from(cluster, improved)
            cluster.iterations += 1

    def _learn_from(self, cluster: Cluster, improved: List[Particle]) -> None:
        """Dimension-wise learning from the best improvers up to the cap; the rest only replace a worse lbest"""
        cap = self.config.lbest_learning_cap
        ranked = sorted(improved, key=lambda p: -p.pbest_fitness)
        for rank, particle in enumerate(ranked):
            if cap is None or rank < cap:
                learn_lbest_dimensionwise(cluster, particle.pbest_position, self.objective, particle.pbest_fitness)
            elif particle.pbest_fitness > cluster.lbest_fitness:
                cluster.lbest_position = particle.pbest_position.copy()
                cluster.lbest_fitness = particle.pbest_fitness
