"""Tests for the chirp-rate information bound and zone-decision probabilities."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.special import erf

from nyfold.crb import (
    ChirpModel,
    crb_variance,
    fisher_information,
    nz_probability_from_crb,
    quartic_power_sum,
    simulate_nz_trials,
)
from nyfold.signal_clock import ClockConfig, LinearChirp, TimeGrid


def brute_fisher(model):
    """Sum the per-sample score magnitudes directly.

    For y_i = A exp(j(phi + 2 pi f0 t_i + pi alpha t_i^2)) + noise at
    t_i = i Delta, i = 1..K, the derivative wrt alpha is j pi t_i^2 y_i, so
    each sample contributes 2 A^2 pi^2 t_i^4 / sigma^2 of information.
    """
    total = 0.0
    for i in range(1, model.count + 1):
        t = i * model.step
        total += 2.0 * model.amplitude**2 * math.pi**2 * t**4 / model.noise_variance
    return total


def make_model(rng):
    return ChirpModel(
        amplitude=float(rng.uniform(0.5, 3.0)),
        chirp_rate=float(rng.uniform(1e9, 1e12)),
        start_frequency=0.0,
        phase=float(rng.uniform(0, 2 * math.pi)),
        step=float(rng.uniform(1e-9, 1e-7)),
        count=int(rng.integers(2, 500)),
        noise_variance=float(rng.uniform(0.1, 30.0)),
    )


class TestFisherInformation:
    def test_matches_brute_force(self):
        rng = np.random.default_rng(0)
        for _ in range(25):
            model = make_model(rng)
            assert_allclose(fisher_information(model), brute_fisher(model), rtol=1e-11)

    def test_scales_with_amplitude_and_noise(self):
        base = ChirpModel(1.0, 1e12, 0.0, 0.0, 5e-9, 100, 1.0)
        double_amp = ChirpModel(2.0, 1e12, 0.0, 0.0, 5e-9, 100, 1.0)
        double_noise = ChirpModel(1.0, 1e12, 0.0, 0.0, 5e-9, 100, 2.0)
        assert_allclose(fisher_information(double_amp), 4 * fisher_information(base))
        assert_allclose(fisher_information(double_noise), fisher_information(base) / 2)

    def test_crb_is_reciprocal(self):
        model = ChirpModel(1.0, 1e12, 0.0, 0.0, 5e-9, 200, 25.0)
        assert_allclose(crb_variance(model), 1.0 / fisher_information(model), rtol=1e-14)

    def test_single_sample_value(self):
        # one sample at t = step contributes 2 A^2 pi^2 step^4 / sigma^2
        model = ChirpModel(1.5, 1e12, 0.0, 0.0, 5e-9, 1, 2.0)
        expected = 2.0 * 1.5**2 * math.pi**2 * (5e-9) ** 4 / 2.0
        assert_allclose(fisher_information(model), expected, rtol=1e-14)

    def test_model_validation(self):
        with pytest.raises(ValueError):
            ChirpModel(0.0, 1e12, 0.0, 0.0, 5e-9, 100, 1.0)
        with pytest.raises(ValueError):
            ChirpModel(1.0, 1e12, 0.0, 0.0, 0.0, 100, 1.0)
        with pytest.raises(ValueError):
            ChirpModel(1.0, 1e12, 0.0, 0.0, 5e-9, 0, 1.0)
        with pytest.raises(ValueError):
            ChirpModel(1.0, 1e12, 0.0, 0.0, 5e-9, 100, 0.0)


class TestQuarticPowerSum:
    def test_exact_against_integer_sum(self):
        running = 0
        for k in range(1, 2001):
            running += k**4
            assert quartic_power_sum(k) == running

    def test_zero_case(self):
        assert quartic_power_sum(0) == 0

    def test_large_value_is_exact_integer(self):
        k = 10**6
        expected = k * (k + 1) * (2 * k + 1) * (3 * k * k + 3 * k - 1) // 30
        assert quartic_power_sum(k) == expected


class TestZoneProbability:
    def _model(self, count):
        return ChirpModel(1.0, 1e12, 0.0, 0.0, 5e-9, count, 25.0)

    def test_interior_zone_uses_two_sided_window(self):
        model = self._model(500)
        p = nz_probability_from_crb(model, slope_spacing=1e12, n_zones=20)
        sigma = math.sqrt(crb_variance(model))
        d = 1e12 / (2.0 * sigma)
        assert_allclose(p, erf(d / math.sqrt(2.0)), rtol=1e-12)

    def test_edge_zone_is_one_sided(self):
        model = self._model(300)
        interior = nz_probability_from_crb(model, 1e12, 20)
        low_edge = nz_probability_from_crb(model, 1e12, 20, zone=0)
        high_edge = nz_probability_from_crb(model, 1e12, 20, zone=19)
        assert low_edge == high_edge
        assert low_edge >= interior
        sigma = math.sqrt(crb_variance(model))
        d = 1e12 / (2.0 * sigma)
        assert_allclose(low_edge, 0.5 * (1.0 + erf(d / math.sqrt(2.0))), rtol=1e-12)

    def test_vanishing_spacing_rejected(self):
        model = self._model(500)
        with pytest.raises(ValueError):
            nz_probability_from_crb(model, 0.0, 20)

    def test_probability_saturates_with_samples(self):
        p_small = nz_probability_from_crb(self._model(50), 1e12, 20)
        p_large = nz_probability_from_crb(self._model(2000), 1e12, 20)
        assert p_small < p_large
        assert p_large > 1.0 - 1e-9

    def test_zone_argument_validated(self):
        with pytest.raises(ValueError):
            nz_probability_from_crb(self._model(100), 1e12, 20, zone=20)


@pytest.fixture(scope="module")
def config():
    grid = TimeGrid(1e-10, 100_000)
    clock = ClockConfig(2e8, LinearChirp(1e7, 1e-5))
    return grid, clock


class TestSimulatedZoneTrials:

    def test_fractions_are_probabilities(self, config):
        grid, clock = config
        fractions = simulate_nz_trials(
            grid, clock, snr_db=-14.0, n_zones=20, k_values=[200, 800], trials=8, seed=5
        )
        assert fractions.shape == (2,)
        assert np.all((0.0 <= fractions) & (fractions <= 1.0))

    def test_reproducible(self, config):
        grid, clock = config
        a = simulate_nz_trials(grid, clock, -14.0, 20, [400], 8, seed=5)
        b = simulate_nz_trials(grid, clock, -14.0, 20, [400], 8, seed=5)
        assert_allclose(a, b)

    def test_more_samples_help(self, config):
        grid, clock = config
        fractions = simulate_nz_trials(
            grid, clock, snr_db=-14.0, n_zones=20, k_values=[100, 1500], trials=24, seed=1
        )
        assert fractions[1] >= fractions[0] + 0.25

    def test_clean_high_k_is_reliable(self, config):
        grid, clock = config
        fractions = simulate_nz_trials(
            grid, clock, snr_db=60.0, n_zones=20, k_values=[1500], trials=12, seed=2
        )
        assert fractions[0] == 1.0
