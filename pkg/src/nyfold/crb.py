"""Chirp-rate estimation limits and the zone-identification experiment.

A tone folded from zone n carries the clock modulation scaled by a signed
integer, so under a linear sweep its chirp rate is an integer multiple of the
sweep slope. Identifying the zone is therefore a chirp-rate classification
problem, and the Cramer-Rao variance bound on the rate estimate converts into
a ceiling on the zone-identification probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .omp import omp_recover
from .sensing import SensingOperator
from .signal_clock import (
    ClockConfig,
    SampleSchedule,
    TimeGrid,
    ToneSpec,
    add_noise,
    compute_sample_schedule,
    synthesize_signal,
)


@dataclass(frozen=True)
class ChirpModel:
    """Complex chirp observed at K uniform steps in white noise.

    Sample i (i = 1..count) is
    ``amplitude * exp(j (2 pi (chirp_rate/2 (step i)^2 + start_frequency step i) + phase))``
    plus circular complex noise of variance noise_variance.

    Parameters
    ----------
    amplitude : float
        Tone amplitude A > 0.
    chirp_rate : float
        Sweep rate alpha in Hz/s, the parameter under estimation.
    start_frequency : float
        Initial frequency in Hz (a nuisance parameter; the rate bound does not
        depend on it).
    phase : float
        Initial phase in radians.
    step : float
        Sample spacing Delta in seconds.
    count : int
        Number of samples K.
    noise_variance : float
        Per-sample complex noise variance sigma^2 > 0.
    """

    amplitude: float
    chirp_rate: float
    start_frequency: float
    phase: float
    step: float
    count: int
    noise_variance: float

    def __post_init__(self) -> None:
        if self.amplitude <= 0.0:
            raise ValueError("amplitude must be positive")
        if self.step <= 0.0:
            raise ValueError("step must be positive")
        if self.count < 1:
            raise ValueError("count must be at least 1")
        if self.noise_variance <= 0.0:
            raise ValueError("noise_variance must be positive")


def fisher_information(model: ChirpModel) -> float:
    """Fisher information for the chirp rate.

    I(alpha) = A^2 pi^2 Delta^4 K (K+1) (2K+1) (3K^2 + 3K - 1) / (15 sigma^2),
    the closed form of ``2 A^2 pi^2 Delta^4 sum_{i=1}^K i^4 / sigma^2``.
    """
    k = model.count
    poly = k * (k + 1) * (2 * k + 1) * (3 * k * k + 3 * k - 1)  # exact integer
    return (
        model.amplitude**2
        * math.pi**2
        * model.step**4
        * poly
        / (15.0 * model.noise_variance)
    )


def crb_variance(model: ChirpModel) -> float:
    """Cramer-Rao lower bound on the variance of an unbiased rate estimate."""
    return 1.0 / fisher_information(model)


def quartic_power_sum(k: int) -> int:
    """sum_{i=1}^{k} i^4 = k (k+1) (2k+1) (3k^2 + 3k - 1) / 30, exactly."""
    if k < 0:
        raise ValueError("k must be non-negative")
    return k * (k + 1) * (2 * k + 1) * (3 * k * k + 3 * k - 1) // 30


def nz_probability_from_crb(
    model: ChirpModel,
    slope_spacing: float,
    n_zones: int,
    zone: Optional[int] = None,
) -> float:
    """Zone-identification probability of a CRB-attaining rate estimator.

    The estimate is modeled Gaussian and unbiased with the CRB variance; the
    zone is read correctly when the estimate lands within half a slope spacing
    of the truth. Interior zones get the central two-sided probability; the
    outermost zones (``zone`` equal to 0 or n_zones - 1) have competitors on
    one side only and get the one-sided probability.
    """
    if slope_spacing <= 0.0:
        raise ValueError("slope_spacing must be positive")
    if n_zones < 1:
        raise ValueError("n_zones must be at least 1")
    if zone is not None and not (0 <= zone < n_zones):
        raise ValueError("zone out of range")
    d = slope_spacing / (2.0 * math.sqrt(crb_variance(model)))
    if zone is not None and n_zones >= 2 and zone in (0, n_zones - 1):
        return 0.5 * (1.0 + math.erf(d / math.sqrt(2.0)))
    return math.erf(d / math.sqrt(2.0))


def simulate_nz_trials(
    grid: TimeGrid,
    clock: ClockConfig,
    snr_db: float,
    n_zones: int,
    k_values: Sequence[int],
    trials: int,
    seed: int,
) -> np.ndarray:
    """Monte Carlo zone identification through one-step greedy detection.

    Per trial a single tone is drawn uniformly over the first ``n_zones``
    zones, synthesized on the grid, noised at ``snr_db`` (per-sample, against
    the tone's mean power), and measured through the modulated schedule
    truncated to K samples. The strongest dictionary bin maps back to a zone
    by its frequency; the trial succeeds when that zone is the tone's.

    Returns the success fraction per entry of ``k_values``.
    """
    if n_zones < 1:
        raise ValueError("n_zones must be at least 1")
    if trials < 1:
        raise ValueError("need at least one trial")
    if n_zones * clock.f_s1 / 2.0 > grid.f_atomic / 2.0:
        raise ValueError("zone span exceeds the representable band")
    schedule = compute_sample_schedule(clock, grid)
    for k in k_values:
        if not (1 <= k <= schedule.size):
            raise ValueError(f"K = {k} exceeds the {schedule.size} available samples")

    band = n_zones * clock.f_s1 / 2.0
    fractions = np.empty(len(k_values), dtype=float)
    for ki, k in enumerate(k_values):
        op = SensingOperator(grid, schedule.truncated(int(k)))
        hits = 0
        for trial in range(trials):
            rng = np.random.default_rng([seed, ki, trial])
            freq = rng.uniform(0.0, band)
            phase = rng.uniform(0.0, 2.0 * math.pi)
            tone = ToneSpec(frequency=freq, amplitude=1.0, phase=phase)
            signal = synthesize_signal([tone], grid, complex_mode=True)
            noisy = add_noise(signal, snr_db, seed=int(rng.integers(2**63)))
            result = omp_recover(op, noisy[op.schedule.indices], max_iters=1)
            detected = result.support[0]
            zone_est = int(math.floor(2.0 * detected * grid.f_res / clock.f_s1))
            zone_true = int(math.floor(2.0 * freq / clock.f_s1))
            hits += int(zone_est == zone_true)
        fractions[ki] = hits / trials
    return fractions
