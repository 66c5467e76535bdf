import numpy as np
import pytest

from tigris_ipp.belief import (
    PROB_EPSILON,
    BeliefGrid,
    GaussianCentroid,
    GridSpec,
    NoFlyZone,
    bayes_update,
    build_prior,
    entropy,
)


@pytest.fixture
def spec():
    return GridSpec.from_extent(100.0, 50.0, 10.0)


class TestGrid:
    def test_spec(self, spec):
        assert (spec.width_cells, spec.height_cells) == (10, 5)
        assert spec.size == 50
        assert spec.extent == (0.0, 100.0, 0.0, 50.0)
        assert spec.contains(100.0, 0.0)
        assert not spec.contains(100.1, 0.0)

    def test_row_major_centers(self, spec):
        grid = BeliefGrid(spec=spec, probs=np.zeros(spec.size))
        assert tuple(grid.centers[0]) == (5.0, 5.0)
        assert tuple(grid.centers[1]) == (15.0, 5.0)
        assert tuple(grid.centers[10]) == (5.0, 15.0)

    def test_cells_in_box(self, spec):
        grid = BeliefGrid(spec=spec, probs=np.zeros(spec.size))
        assert grid.cells_in_box(0.0, 20.0, 0.0, 10.0).tolist() == [0, 1]
        assert grid.cells_in_box(-50.0, -10.0, 0.0, 10.0).size == 0
        assert grid.cells_in_box(-1e6, 1e6, -1e6, 1e6).size == spec.size

    def test_probabilities_are_checked(self, spec):
        with pytest.raises(ValueError):
            BeliefGrid(spec=spec, probs=np.zeros(3))
        with pytest.raises(ValueError):
            BeliefGrid(spec=spec, probs=np.full(spec.size, 1.5))

    def test_grid_is_read_only(self, spec):
        grid = BeliefGrid(spec=spec, probs=np.zeros(spec.size))
        with pytest.raises(ValueError):
            grid.probs[0] = 0.5


class TestPrior:
    def test_background_only(self, spec):
        grid = build_prior(spec, [], background=0.1)
        assert np.all(grid.probs == 0.1)

    def test_clamped_below_one(self, spec):
        peak = GaussianCentroid(center=(45.0, 25.0), peak_prob=0.95, sigma=20.0)
        grid = build_prior(spec, [peak], background=0.1)
        assert grid.probs.max() == 1.0 - PROB_EPSILON
        # The bump decays away from the centroid.
        assert grid.probs[0] < grid.probs[24]

    def test_bad_background(self, spec):
        with pytest.raises(ValueError):
            build_prior(spec, [], background=1.0)


class TestEntropy:
    def test_values(self):
        assert entropy(0.5) == pytest.approx(1.0)
        assert entropy(0.0) == 0.0
        assert entropy(1.0) == 0.0
        assert entropy(0.1) == pytest.approx(entropy(0.9))
        assert entropy(0.8) == pytest.approx(0.7219, abs=1e-4)
        assert np.allclose(entropy(np.array([0.5, 0.0])), [1.0, 0.0])


class TestBayesUpdate:
    def test_detection(self):
        assert bayes_update(0.5, 0.9, 0.1, True) == pytest.approx(0.9)
        assert bayes_update(0.5, 0.9, 0.1, False) == pytest.approx(0.1)
        assert bayes_update(0.8, 0.9, 0.1, True) == pytest.approx(0.9730, abs=1e-4)

    def test_stays_a_probability(self):
        rng = np.random.default_rng(0)
        prior, tpr, fpr = rng.uniform(0.0, 1.0, (3, 1000))
        for measurement in (True, False):
            posterior = bayes_update(prior, tpr, fpr, measurement)
            assert np.all((posterior >= 0.0) & (posterior <= 1.0))

    def test_zero_denominator_keeps_prior(self):
        assert bayes_update(1.0, 0.0, 0.3, True) == 1.0

    def test_uninformative_sensor(self):
        assert bayes_update(0.3, 0.5, 0.5, True) == pytest.approx(0.3)

    @pytest.mark.parametrize("measurement", [True, False])
    def test_repeated_observations_are_monotonic(self, measurement):
        posteriors = [0.3]
        for _ in range(30):
            posteriors.append(bayes_update(posteriors[-1], 0.8, 0.2, measurement))
        steps = np.diff(posteriors)
        if measurement:
            assert np.all(steps >= 0) and steps[0] > 0
            assert posteriors[-1] == pytest.approx(1.0)
        else:
            assert np.all(steps <= 0) and steps[0] < 0
            assert posteriors[-1] == pytest.approx(0.0, abs=1e-9)


class TestNoFlyZone:
    def test_contains(self):
        zone = NoFlyZone(polygon=((0, 0), (10, 0), (10, 10), (0, 10)))
        inside = zone.contains(np.array([[5.0, 5.0], [15.0, 5.0]]))
        assert inside.tolist() == [True, False]

    def test_invalid(self):
        with pytest.raises(ValueError):
            NoFlyZone(polygon=((0, 0), (10, 0)))
        with pytest.raises(ValueError):
            NoFlyZone(polygon=((0, 0), (10, 10), (10, 0), (0, 10)))
