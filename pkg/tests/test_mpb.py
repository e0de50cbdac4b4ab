import copy

import numpy as np
import pytest

from src.errors import ConfigurationError, ContractViolation
from src.mpb import (
    MPBSettings,
    advance,
    current_optimum,
    evaluate,
    evaluate_many,
    init_landscape,
    peaks_found,
)

from tests.helpers import make_landscape


class TestInitLandscape:

    def test_default_settings(self):
        landscape = init_landscape(MPBSettings(), seed=42)

        assert landscape.n_peaks == 10
        assert np.all(landscape.heights == 50.0)
        assert np.all((landscape.locations >= 0.0) & (landscape.locations <= 100.0))
        assert np.all((landscape.widths >= 1.0) & (landscape.widths <= 12.0))
        assert landscape.locations.shape == (10, 5)
        assert landscape.change_count == 0
        assert landscape.evaluations == 0

    def test_degenerate_domain_forces_location(self):
        landscape = init_landscape({"n_peaks": 1, "dims": 1, "bounds_low": 0, "bounds_high": 0}, seed=1)
        assert landscape.locations.tolist() == [[0.0]]

    def test_same_seed_is_bit_identical(self):
        a = init_landscape(MPBSettings(), seed=3)
        b = init_landscape(MPBSettings(), seed=3)
        assert a.state_fingerprint() == b.state_fingerprint()

        for _ in range(5):
            advance(a)
            advance(b)
        assert a.state_fingerprint() == b.state_fingerprint()
        x = np.full(5, 33.0)
        assert evaluate(a, x) == evaluate(b, x)

    @pytest.mark.parametrize("settings,key", [
        ({"n_peaks": 0}, "n_peaks"),
        ({"bounds_low": 10, "bounds_high": 0}, "bounds_high"),
        ({"height_severity": -1.0}, "height_severity"),
        ({"peak_count": 3}, "peak_count"),
    ])
    def test_invalid_settings(self, settings, key):
        with pytest.raises(ConfigurationError) as err:
            init_landscape(settings, seed=0)
        assert err.value.key == key

    def test_peak_views(self):
        landscape = init_landscape(MPBSettings(n_peaks=2, dims=3), seed=0)
        peaks = landscape.peaks
        assert len(peaks) == 2
        assert peaks[1].height == 50.0
        np.testing.assert_array_equal(peaks[1].location, landscape.locations[1])


class TestEvaluate:

    def test_on_peak_returns_height(self):
        landscape = make_landscape([50.0, 40.0], [3.0, 3.0], [[10, 10], [90, 90]])
        assert evaluate(landscape, [10, 10]) == 50.0

    def test_single_peak_substitution(self):
        landscape = make_landscape([50.0], [1.0], [[0.0, 0.0]])
        assert evaluate(landscape, [2.0, 0.0]) == pytest.approx(10.0)

    def test_max_over_peaks(self):
        landscape = make_landscape([50.0, 70.0], [1.0, 1.0], [[0, 0], [100, 100]])
        assert evaluate(landscape, [100, 100]) == 70.0

    def test_cone_shape(self):
        landscape = make_landscape([50.0], [2.0], [[0.0, 0.0]], peak_shape="cone")
        assert evaluate(landscape, [3.0, 4.0]) == pytest.approx(40.0)

    def test_counts_evaluations(self):
        landscape = make_landscape([50.0], [1.0], [[0.0]])
        evaluate(landscape, [1.0])
        evaluate(landscape, [2.0])
        evaluate_many(landscape, np.zeros((5, 1)))
        assert landscape.evaluations == 7

    def test_dimension_mismatch(self):
        landscape = make_landscape([50.0], [1.0], [[0.0, 0.0]])
        with pytest.raises(ContractViolation):
            evaluate(landscape, [1.0, 2.0, 3.0])

    def test_never_exceeds_max_height(self):
        landscape = init_landscape(MPBSettings(), seed=5)
        rng = np.random.default_rng(0)
        X = rng.uniform(-20, 120, size=(2000, 5))
        assert np.all(evaluate_many(landscape, X) <= landscape.heights.max())

    def test_many_matches_single(self):
        landscape = init_landscape(MPBSettings(), seed=6)
        X = np.random.default_rng(1).uniform(0, 100, size=(20, 5))
        batch = evaluate_many(landscape, X)
        singles = [evaluate(landscape, x) for x in X]
        np.testing.assert_allclose(batch, singles)


class TestAdvance:

    def test_shift_norm_equals_shift_length(self):
        landscape = init_landscape(MPBSettings(shift_length=1.0, correlation_lambda=0.0), seed=11)
        advance(landscape)
        norms = np.linalg.norm(landscape.velocities, axis=1)
        np.testing.assert_allclose(norms, 1.0, rtol=1e-9)
        assert landscape.change_count == 1

    def test_zero_dynamics(self):
        landscape = init_landscape(
            MPBSettings(shift_length=0.0, height_severity=0.0, width_severity=0.0), seed=2
        )
        heights, widths, locations = landscape.heights.copy(), landscape.widths.copy(), landscape.locations.copy()
        advance(landscape)
        np.testing.assert_array_equal(landscape.heights, heights)
        np.testing.assert_array_equal(landscape.widths, widths)
        np.testing.assert_array_equal(landscape.locations, locations)
        assert landscape.change_count == 1

    def test_height_clamped_at_max(self):
        landscape = init_landscape(MPBSettings(height_severity=7.0), seed=9)
        landscape.heights[:] = 70.0
        replay = copy.deepcopy(landscape.rng)
        replay.uniform(-1.0, 1.0, size=(landscape.n_peaks, landscape.dims))
        sigma_height = replay.standard_normal(landscape.n_peaks)

        advance(landscape)

        assert np.all(landscape.heights[sigma_height > 0] == 70.0)
        assert np.all(landscape.heights <= 70.0)

    def test_correlated_direction_still_has_norm_s(self):
        landscape = init_landscape(MPBSettings(shift_length=2.5, correlation_lambda=0.5), seed=4)
        for _ in range(3):
            advance(landscape)
        np.testing.assert_allclose(np.linalg.norm(landscape.velocities, axis=1), 2.5, rtol=1e-9)

    def test_ranges_hold_over_many_changes(self):
        landscape = init_landscape(MPBSettings(), seed=123)
        for _ in range(10_000):
            advance(landscape)
            assert landscape.heights.min() >= 30.0 and landscape.heights.max() <= 70.0
            assert landscape.widths.min() >= 1.0 and landscape.widths.max() <= 12.0
            assert landscape.locations.min() >= 0.0 and landscape.locations.max() <= 100.0
            assert np.all(np.abs(np.linalg.norm(landscape.velocities, axis=1) - 1.0) <= 1e-9)
        assert landscape.n_peaks == 10


class TestOracle:

    def test_highest_peak(self):
        landscape = make_landscape([50.0, 70.0, 40.0], [5.0, 5.0, 5.0], [[10, 10], [50, 50], [90, 90]])
        position, fitness = current_optimum(landscape)
        np.testing.assert_array_equal(position, [50, 50])
        assert fitness == 70.0
        assert landscape.evaluations == 0

    def test_single_peak(self):
        landscape = make_landscape([45.0], [2.0], [[3.0, 4.0]])
        position, fitness = current_optimum(landscape)
        np.testing.assert_array_equal(position, [3.0, 4.0])
        assert fitness == 45.0

    def test_tie_breaks_to_lowest_index(self):
        landscape = make_landscape([60.0, 60.0], [5.0, 5.0], [[10, 10], [90, 90]])
        position, _ = current_optimum(landscape)
        np.testing.assert_array_equal(position, [10, 10])

    def test_optimum_is_consistent_with_evaluate(self):
        landscape = init_landscape(MPBSettings(), seed=8)
        for _ in range(20):
            advance(landscape)
            position, fitness = current_optimum(landscape)
            assert evaluate(landscape, position) == fitness


class TestPeaksFound:

    def test_sphere_on_every_peak(self):
        landscape = init_landscape(MPBSettings(), seed=1)
        spheres = [(loc, 0.0) for loc in landscape.locations]
        assert peaks_found(landscape, spheres) == 10

    def test_no_spheres(self):
        landscape = init_landscape(MPBSettings(), seed=1)
        assert peaks_found(landscape, []) == 0

    def test_coverage_counts_each_peak_once(self):
        landscape = make_landscape([50.0, 50.0, 50.0], [1.0] * 3, [[0, 0], [1, 0], [50, 50]])
        assert peaks_found(landscape, [(np.array([0.5, 0.0]), 1.0)]) == 2
        assert peaks_found(landscape, [(np.array([50, 50]), 0.1), (np.array([50.0, 50.05]), 0.1)]) == 1
