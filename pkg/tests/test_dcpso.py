import numpy as np
import pytest

from src.dcpso import DCPSOptimizer
from src.harness import BudgetedEvaluator
from src.mpb import init_landscape

from tests.helpers import cluster_of, particle


def optimizer_for(config, n_environments=50, seed=0):
    evaluator = BudgetedEvaluator(init_landscape(config.mpb, seed), config.U_cf, n_environments)
    return DCPSOptimizer(config, evaluator, np.random.default_rng(seed)), evaluator


class TestRebuild:

    def test_pending_change_is_acknowledged(self, small_config):
        optimizer, evaluator = optimizer_for(small_config)
        optimizer.initialize()
        evaluator.unacknowledged_change = True

        optimizer.rebuild()

        assert evaluator.unacknowledged_change is False
        assert optimizer.environment == 1

    def test_boundary_crossed_by_the_rebuild_stays_pending(self, small_config):
        optimizer, evaluator = optimizer_for(small_config)
        optimizer.initialize()
        evaluator.u_cf = evaluator.evaluations_in_environment + 3

        optimizer.rebuild()

        assert evaluator.environment == 2
        assert evaluator.unacknowledged_change is True

    def test_clears_recombination_memo(self, small_config):
        optimizer, _ = optimizer_for(small_config)
        optimizer.initialize()
        optimizer.memo.stale = b"stale"
        optimizer.rebuild()
        assert optimizer.memo.stale is None


class TestLearnFrom:

    def improvers(self):
        return [particle([1.0], 3.0), particle([2.0], 9.0), particle([3.0], 5.0)]

    def test_cap_picks_the_best_improvers(self, small_config, mocker):
        learn = mocker.patch("src.dcpso.learn_lbest_dimensionwise")
        optimizer, _ = optimizer_for(small_config.with_overrides(lbest_learning_cap=2))
        cluster = cluster_of([[0.0]], fitnesses=[0.0])

        optimizer._learn_from(cluster, self.improvers())

        assert [c.args[1][0] for c in learn.call_args_list] == [2.0, 3.0]
        assert [c.args[3] for c in learn.call_args_list] == [9.0, 5.0]

    def test_unlimited_learns_from_every_improver(self, small_config, mocker):
        learn = mocker.patch("src.dcpso.learn_lbest_dimensionwise")
        optimizer, _ = optimizer_for(small_config.with_overrides(lbest_learning_cap=None))
        optimizer._learn_from(cluster_of([[0.0]]), self.improvers())
        assert learn.call_count == 3

    def test_past_the_cap_a_better_pbest_is_adopted(self, small_config, mocker):
        learn = mocker.patch("src.dcpso.learn_lbest_dimensionwise")
        optimizer, _ = optimizer_for(small_config.with_overrides(lbest_learning_cap=0))
        cluster = cluster_of([[0.0]], fitnesses=[4.0])

        optimizer._learn_from(cluster, self.improvers())

        learn.assert_not_called()
        np.testing.assert_array_equal(cluster.lbest_position, [2.0])
        assert cluster.lbest_fitness == 9.0

    def test_default_cap_costs_one_learning_per_cluster(self, small_config):
        optimizer, evaluator = optimizer_for(small_config)
        optimizer.initialize()
        cluster = optimizer.clusters[0]
        improvers = [particle(x, 1e6 + k) for k, x in enumerate(np.full((3, 2), 50.0))]
        before = evaluator.evaluations_in_environment

        optimizer._learn_from(cluster, improvers)

        assert evaluator.evaluations_in_environment - before == small_config.mpb.dims


class TestIterate:

    def test_keeps_the_swarm_inside_the_domain(self, small_config):
        optimizer, evaluator = optimizer_for(small_config)
        optimizer.initialize()
        for _ in range(20):
            optimizer.iterate()
        positions = np.vstack([c.positions for c in optimizer.clusters])
        assert np.all((positions >= 0.0) & (positions <= 100.0))
        assert all(len(c) <= small_config.max_subsize for c in optimizer.clusters)

    @pytest.mark.parametrize("diversity", [True, False])
    def test_same_seed_same_swarm(self, small_config, diversity):
        config = small_config.with_overrides(diversity_enabled=diversity)
        swarms = []
        for _ in range(2):
            optimizer, _ = optimizer_for(config, seed=4)
            optimizer.initialize()
            for _ in range(10):
                optimizer.iterate()
            swarms.append([c.positions.tolist() for c in optimizer.clusters])
        assert swarms[0] == swarms[1]
