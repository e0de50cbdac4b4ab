"""
Experiment Harness
Budget accounting against the moving peaks, per-environment records and offline error
"""

from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np
import structlog

from src.config import ExperimentConfig
from src.dcpso import DCPSOptimizer
from src.errors import BudgetExhausted, ChangeDetectionAudit, ContractViolation
from src.mpb import Landscape, advance, current_optimum, evaluate, init_landscape, peaks_found

logger = structlog.get_logger()

BoundaryCallback = Callable[[int, float, int], None]


# =============================================================================
# RESULT MODELS
# =============================================================================

@dataclass
class ChangeRecord:
    """What the algorithm achieved in one environment, taken just before the change"""
    environment_index: int
    best_found: float
    optimum: float
    peaks_found: int
    clusters_generated: int
    survived_clusters: int
    evaluations_used: int
    missed_detection: bool = False

    @property
    def error(self) -> float:
        return self.optimum - self.best_found


@dataclass
class RunResult:
    seed: int
    records: List[ChangeRecord]
    offline_error: float
    M: int
    max_subsize: int
    mode: str
    missed_detections: int = 0
    diversity_relocations: int = 0
    total_evaluations: int = 0


def offline_error(records: List[ChangeRecord]) -> float:
    """Mean gap between each environment's optimum and the best value found in it"""
    if not records:
        raise ContractViolation("offline error of an empty record list")
    return float(np.mean([r.optimum - r.best_found for r in records]))


# =============================================================================
# BUDGETED OBJECTIVE
# =============================================================================

class BudgetedEvaluator:
    """Counted access to the landscape; the evaluation counter is the only clock.

    When the current environment has consumed U_cf evaluations the boundary
    callback sees the pre-change landscape, then the landscape advances. The
    last environment's boundary raises BudgetExhausted instead.
    """

    def __init__(self, landscape: Landscape, u_cf: int, n_environments: int,
                 on_boundary: Optional[BoundaryCallback] = None):
        self.landscape = landscape
        self.u_cf = u_cf
        self.n_environments = n_environments
        self.on_boundary = on_boundary
        self.environment = 1
        self.best_found = -np.inf
        self.unacknowledged_change = False
        self.finished = False
        self._environment_start = landscape.evaluations

    @property
    def evaluations_in_environment(self) -> int:
        return self.landscape.evaluations - self._environment_start

    def __call__(self, x: np.ndarray) -> float:
        if self.finished:
            raise BudgetExhausted(f"all {self.n_environments} environments consumed")
        fitness = evaluate(self.landscape, x)
        if fitness > self.best_found:
            self.best_found = fitness
        if self.evaluations_in_environment >= self.u_cf:
            self._close_environment()
        return fitness

    def acknowledge_change(self) -> None:
        self.unacknowledged_change = False

    def _close_environment(self) -> None:
        if self.on_boundary is not None:
            self.on_boundary(self.environment, self.best_found, self.evaluations_in_environment)
        if self.environment >= self.n_environments:
            self.finished = True
            raise BudgetExhausted(f"all {self.n_environments} environments consumed")

        before = self.landscape.state_fingerprint()
        advance(self.landscape)
        if self.landscape.state_fingerprint() != before:
            self.unacknowledged_change = True

        self.environment += 1
        self.best_found = -np.inf
        self._environment_start = self.landscape.evaluations


# =============================================================================
# RUN
# =============================================================================

def _coverage_spheres(optimizer: DCPSOptimizer, eps_peak: float) -> list:
    spheres = [(c.center, max(c.radius, eps_peak)) for c in optimizer.clusters]
    spheres.extend((entry.position, eps_peak) for entry in optimizer.archive.entries)
    return spheres


def run(config: ExperimentConfig, seed: int) -> RunResult:
    """Execute one seeded DCPSO run over config.n_environments environments.

    The landscape and the algorithm draw from two independent streams spawned
    from `seed`, so algorithm choices never perturb the landscape dynamics.
    """
    landscape_seed, algorithm_seed = np.random.SeedSequence(seed).spawn(2)
    landscape = init_landscape(config.mpb, landscape_seed)
    evaluator = BudgetedEvaluator(landscape, config.U_cf, config.n_environments)
    optimizer = DCPSOptimizer(config, evaluator, np.random.default_rng(algorithm_seed))
    records: List[ChangeRecord] = []

    def record_environment(environment: int, best_found: float, evaluations_used: int) -> None:
        _, optimum = current_optimum(landscape)
        records.append(ChangeRecord(
            environment_index=environment,
            best_found=best_found,
            optimum=optimum,
            peaks_found=peaks_found(landscape, _coverage_spheres(optimizer, config.eps_peak)),
            clusters_generated=optimizer.clusters_generated,
            survived_clusters=len(optimizer.clusters) + len(optimizer.archive),
            evaluations_used=evaluations_used,
        ))
        optimizer.clusters_generated = 0
        logger.debug("environment_closed", seed=seed, environment=environment,
                     error=optimum - best_found, peaks_found=records[-1].peaks_found)

    evaluator.on_boundary = record_environment
    missed = 0
    iterations_since_change = 0

    try:
        optimizer.initialize()
        while True:
            detected = optimizer.iterate()
            if detected:
                iterations_since_change = 0
                continue
            if not evaluator.unacknowledged_change:
                continue

            iterations_since_change += 1
            if iterations_since_change > 1:
                if config.strict_audit:
                    raise ChangeDetectionAudit(
                        f"change before environment {evaluator.environment} went undetected (seed {seed})"
                    )
                logger.warning("change_detection_missed", seed=seed, environment=evaluator.environment)
                missed += 1
                if records:
                    records[-1].missed_detection = True
                optimizer.rebuild()
                iterations_since_change = 0
    except BudgetExhausted:
        pass

    result = RunResult(
        seed=seed,
        records=records,
        offline_error=offline_error(records),
        M=config.M,
        max_subsize=config.max_subsize,
        mode=config.mode,
        missed_detections=missed,
        diversity_relocations=optimizer.relocations,
        total_evaluations=landscape.evaluations,
    )
    logger.info("run_completed", seed=seed, M=config.M, max_subsize=config.max_subsize,
                mode=config.mode, offline_error=round(result.offline_error, 6))
    return result
