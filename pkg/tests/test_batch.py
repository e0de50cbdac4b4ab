from concurrent.futures import ThreadPoolExecutor

from src.batch import BatchRunProcessor, run_configs, run_seeds
from src.harness import run


def test_run_seeds(small_config):
    assert run_seeds(small_config) == [7, 8]
    assert run_seeds(small_config.with_overrides(runs=3, base_seed=100)) == [100, 101, 102]


async def test_inline_batch_matches_direct_runs(small_config):
    processor = BatchRunProcessor(small_config)
    results = await processor.process_batch([7, 8])
    assert [r.seed for r in results] == [7, 8]
    assert results[1].records == run(small_config, 8).records
    assert processor.results is results


async def test_concurrent_batch_keeps_seed_order(small_config):
    processor = BatchRunProcessor(small_config)
    inline = await processor.process_batch([3, 4, 5])

    with ThreadPoolExecutor(max_workers=3) as pool:
        concurrent = await processor.process_batch([3, 4, 5], concurrency=3, executor=pool)

    assert [r.seed for r in concurrent] == [3, 4, 5]
    assert [r.offline_error for r in concurrent] == [r.offline_error for r in inline]


def test_run_configs_groups_by_config(small_config):
    configs = [small_config.with_overrides(runs=1), small_config.with_overrides(runs=1, diversity_enabled=False)]
    results = run_configs(configs)
    assert [(r.mode, r.seed) for r in results] == [("dcpso", 7), ("cpso", 7)]


async def test_both_paths_log_completion(small_config, mocker):
    logger = mocker.patch("src.batch.logger")
    processor = BatchRunProcessor(small_config.with_overrides(runs=1))

    await processor.process_batch([7])
    with ThreadPoolExecutor(max_workers=2) as pool:
        await processor.process_batch([7, 8], concurrency=2, executor=pool)

    events = [c.args[0] for c in logger.info.call_args_list]
    assert events == ["batch_started", "batch_completed", "batch_started", "batch_completed"]
    assert logger.info.call_args_list[1].kwargs == {"runs": 1}
