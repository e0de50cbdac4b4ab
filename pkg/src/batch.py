"""
Batch Run Processor
Execute many seeded runs with bounded concurrency; results come back in seed order
"""

import asyncio
from concurrent.futures import Executor, ProcessPoolExecutor
from typing import List, Optional, Sequence

import structlog

from src.config import ExperimentConfig
from src.harness import RunResult, run

logger = structlog.get_logger()


def run_seeds(config: ExperimentConfig) -> List[int]:
    """Seed of every run of a config: base_seed + run index"""
    return [config.base_seed + i for i in range(config.runs)]


class BatchRunProcessor:
    """Fan independent runs out to worker processes"""

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.results: List[RunResult] = []

    async def process_batch(self, seeds: Sequence[int], concurrency: int = 1,
                            executor: Optional[Executor] = None) -> List[RunResult]:
        """Run every seed; concurrency 1 runs inline in this process"""

        logger.info("batch_started", runs=len(seeds), concurrency=concurrency,
                    M=self.config.M, max_subsize=self.config.max_subsize, mode=self.config.mode)

        if concurrency <= 1 and executor is None:
            self.results = [run(self.config, seed) for seed in seeds]
            logger.info("batch_completed", runs=len(self.results))
            return self.results

        loop = asyncio.get_running_loop()
        semaphore = asyncio.Semaphore(concurrency)
        owned = executor is None
        pool = executor or ProcessPoolExecutor(max_workers=concurrency)

        async def run_with_semaphore(seed: int) -> RunResult:
            async with semaphore:
                return await loop.run_in_executor(pool, run, self.config, seed)

        try:
            tasks = [run_with_semaphore(seed) for seed in seeds]
            self.results = list(await asyncio.gather(*tasks))
        finally:
            if owned:
                pool.shutdown()

        logger.info("batch_completed", runs=len(self.results))
        return self.results


def run_configs(configs: Sequence[ExperimentConfig], concurrency: int = 1) -> List[RunResult]:
    """Synchronous helper: every run of every config, grouped by config in input order"""

    async def _all() -> List[RunResult]:
        results: List[RunResult] = []
        for config in configs:
            processor = BatchRunProcessor(config)
            results.extend(await processor.process_batch(run_seeds(config), concurrency))
        return results

    return asyncio.run(_all())
