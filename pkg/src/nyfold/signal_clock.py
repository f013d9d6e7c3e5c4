"""Wideband tones on an atomic time grid and the phase-modulated sample clock.

A slow phase modulation theta(t) rides on a sine-wave sample clock with mean
rate ``f_s1``. Samples are taken at the positive-slope zero crossings of the
clock, which lands them non-uniformly on a fine uniform "atomic" grid of step
``t_atom``. A tone above the clock's first Nyquist zone aliases ("folds") to
an intermediate frequency below ``f_s1 / 2`` and picks up the clock modulation
scaled by a small signed integer that identifies its original zone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

TWO_PI = 2.0 * math.pi


class ScheduleError(RuntimeError):
    """Zero-crossing search failed or the grid cannot resolve the schedule."""


@dataclass(frozen=True)
class TimeGrid:
    """Uniform atomic time grid: ``n_points`` steps of ``t_atom`` seconds.

    The grid fixes the discrete bandwidth ``f_atomic = 1 / t_atom`` and the
    frequency resolution ``f_res = 1 / (n_points * t_atom)``.
    """

    t_atom: float
    n_points: int

    def __post_init__(self) -> None:
        if not (self.t_atom > 0.0 and math.isfinite(self.t_atom)):
            raise ValueError("t_atom must be positive and finite")
        if self.n_points < 2:
            raise ValueError("grid needs at least two points")

    @property
    def f_atomic(self) -> float:
        return 1.0 / self.t_atom

    @property
    def duration(self) -> float:
        return self.n_points * self.t_atom

    @property
    def f_res(self) -> float:
        return 1.0 / self.duration

    def times(self) -> np.ndarray:
        return np.arange(self.n_points) * self.t_atom


@dataclass(frozen=True)
class ToneSpec:
    """Single tone: frequency in Hz, non-negative amplitude, phase in [0, 2pi)."""

    frequency: float
    amplitude: float = 1.0
    phase: float = 0.0

    def __post_init__(self) -> None:
        if self.frequency < 0.0 or not math.isfinite(self.frequency):
            raise ValueError("frequency must be non-negative and finite")
        if self.amplitude < 0.0:
            raise ValueError("amplitude must be non-negative")
        object.__setattr__(self, "phase", self.phase % TWO_PI)


@dataclass(frozen=True)
class LinearChirp:
    """Sawtooth frequency sweep: the instantaneous clock rate climbs linearly
    from f_s1 to f_s1 + f_dev over each period, then snaps back.

    Phase law ``theta(t) = pi * (f_dev / period) * (t mod period)**2``. The
    phase is intentionally not made continuous across the resweep instant; an
    idealized resweep resets it.
    """

    f_dev: float
    period: float

    def __post_init__(self) -> None:
        if self.f_dev < 0.0:
            raise ValueError("f_dev must be non-negative")
        if self.period <= 0.0:
            raise ValueError("period must be positive")


@dataclass(frozen=True)
class Sinusoid:
    """Sinusoidal frequency modulation with total deviation span f_dev.

    Phase law ``theta(t) = (f_dev / (2 f_m)) * sin(2 pi f_m t)`` with
    ``f_m = 1 / period``, so the instantaneous rate swings f_s1 +/- f_dev / 2.
    """

    f_dev: float
    period: float

    def __post_init__(self) -> None:
        if self.f_dev < 0.0:
            raise ValueError("f_dev must be non-negative")
        if self.period <= 0.0:
            raise ValueError("period must be positive")


Modulation = Union[None, LinearChirp, Sinusoid]


@dataclass(frozen=True)
class ClockConfig:
    """Sample clock: mean rate f_s1 plus an optional phase modulation law."""

    f_s1: float
    modulation: Modulation = None

    def __post_init__(self) -> None:
        if not (self.f_s1 > 0.0 and math.isfinite(self.f_s1)):
            raise ValueError("f_s1 must be positive and finite")
        if self.modulation is not None and self.modulation.f_dev >= self.f_s1:
            raise ValueError("modulation deviation must stay below f_s1")

    @property
    def f_dev(self) -> float:
        return 0.0 if self.modulation is None else self.modulation.f_dev


def theta_eval(modulation: Modulation, t):
    """Evaluate the clock phase modulation theta(t) in radians.

    Accepts a scalar time or an ndarray; the return type mirrors the input.
    """
    if modulation is None:
        return np.zeros_like(t, dtype=float) if isinstance(t, np.ndarray) else 0.0
    if isinstance(modulation, LinearChirp):
        tau = np.mod(t, modulation.period)
        out = math.pi * (modulation.f_dev / modulation.period) * tau * tau
    else:
        f_m = 1.0 / modulation.period
        out = (modulation.f_dev / (2.0 * f_m)) * np.sin(TWO_PI * f_m * t)
    return out if isinstance(t, np.ndarray) else float(out)


def theta_rate(modulation: Modulation, t):
    """Evaluate the analytic derivative theta'(t) in rad/s."""
    if modulation is None:
        return np.zeros_like(t, dtype=float) if isinstance(t, np.ndarray) else 0.0
    if isinstance(modulation, LinearChirp):
        tau = np.mod(t, modulation.period)
        out = TWO_PI * (modulation.f_dev / modulation.period) * tau
    else:
        f_m = 1.0 / modulation.period
        out = math.pi * modulation.f_dev * np.cos(TWO_PI * f_m * t)
    return out if isinstance(t, np.ndarray) else float(out)


@dataclass(frozen=True)
class SampleSchedule:
    """Non-uniform sample times: exact crossing times plus their grid indices."""

    indices: np.ndarray
    times: np.ndarray

    def __post_init__(self) -> None:
        indices = np.asarray(self.indices, dtype=np.int64)
        times = np.asarray(self.times, dtype=float)
        if len(indices) != len(times):
            raise ValueError("indices and times must have equal length")
        if len(indices) == 0:
            raise ValueError("schedule is empty")
        if len(indices) > 1 and (np.any(np.diff(indices) <= 0) or np.any(np.diff(times) <= 0)):
            raise ValueError("schedule must be strictly increasing")
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "times", times)

    @property
    def size(self) -> int:
        return len(self.indices)

    def truncated(self, k: int) -> "SampleSchedule":
        if not (1 <= k <= self.size):
            raise ValueError("truncation length out of range")
        return SampleSchedule(self.indices[:k], self.times[:k])


def _robust_cycle_count(f_s1: float, duration: float) -> int:
    # floor with one-ulp forgiveness so exact-integer products do not drop a cycle
    x = f_s1 * duration
    return int(math.floor(x * (1.0 + 1e-12) + 1e-12))


def compute_sample_schedule(clock: ClockConfig, grid: TimeGrid) -> SampleSchedule:
    """Solve for the clock's positive-slope zero crossings and snap them to the grid.

    Crossing k satisfies ``2 pi f_s1 t_k + theta(t_k) = 2 pi k``. Each solve is
    a damped Newton iteration seeded from the previous crossing; crossings are
    enumerated for k = 0 .. floor(f_s1 * duration) - 1 and kept while they fit
    inside the observation window.

    Raises
    ------
    ScheduleError
        If a crossing search fails to converge, the schedule is non-monotonic
        beyond repair, or two crossings quantize to the same grid index.
    """
    f_s1 = clock.f_s1
    omega = TWO_PI * f_s1
    duration = grid.duration
    if duration < 1.0 / f_s1:
        raise ScheduleError("grid shorter than one clock cycle")
    mod = clock.modulation
    k_target = _robust_cycle_count(f_s1, duration)
    tol = 1e-9 * TWO_PI
    max_step = 0.5 / f_s1

    times = np.empty(k_target, dtype=float)
    indices = np.empty(k_target, dtype=np.int64)
    count = 0
    t_prev = -math.inf
    theta_prev = 0.0

    for k in range(k_target):
        target = TWO_PI * k
        t = (target - theta_prev) / omega
        t = _newton_crossing(mod, omega, target, t, tol, max_step)
        if t is None or t <= t_prev:
            # A sawtooth resweep can re-cross earlier phase lines; take the
            # first crossing after the previous sample instead.
            t = _bracketed_crossing(mod, omega, target, t_prev, f_s1, tol)
        if t >= duration:
            break
        idx = int(math.ceil(t / grid.t_atom - 0.5))  # ties round to the earlier index
        if idx >= grid.n_points:
            break
        if count > 0 and idx == indices[count - 1]:
            raise ScheduleError(
                f"crossings {count - 1} and {count} both quantize to grid index "
                f"{idx}; atomic grid too coarse for this clock"
            )
        times[count] = t
        indices[count] = idx
        count += 1
        t_prev = t
        theta_prev = theta_eval(mod, t)

    if count == 0:
        raise ScheduleError("no clock crossings inside the observation window")
    return SampleSchedule(indices[:count].copy(), times[:count].copy())


def _newton_crossing(mod, omega, target, t, tol, max_step) -> Optional[float]:
    for _ in range(50):
        phi = omega * t + theta_eval(mod, t) - target
        if abs(phi) < tol:
            return t
        step = phi / (omega + theta_rate(mod, t))
        if step > max_step:
            step = max_step
        elif step < -max_step:
            step = -max_step
        t -= step
    return None


def _bracketed_crossing(mod, omega, target, t_prev, f_s1, tol) -> float:
    if not math.isfinite(t_prev):
        raise ScheduleError("crossing search failed to converge")
    lo = t_prev
    hi = t_prev
    # grow the probe geometrically: a sawtooth resweep can throw the phase
    # many cycles backward, leaving the next crossing far downstream
    span = 0.25 / f_s1
    for _ in range(64):
        hi += span
        if omega * hi + theta_eval(mod, hi) - target >= 0.0:
            break
        lo = hi
        span *= 1.5
    else:
        raise ScheduleError("no zero crossing found beyond the previous sample")
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if omega * mid + theta_eval(mod, mid) - target < 0.0:
            lo = mid
        else:
            hi = mid
    t = _newton_crossing(mod, omega, target, hi, tol, 0.5 / f_s1)
    if t is None or t <= t_prev:
        raise ScheduleError("crossing search failed to converge after resweep")
    return t


def synthesize_signal(
    tones: Sequence[ToneSpec], grid: TimeGrid, complex_mode: bool = True
) -> np.ndarray:
    """Sum of tones evaluated on the atomic grid.

    In complex mode each tone is ``A exp(j (2 pi f t + phase))``; in real mode
    a cosine. Tones at or above ``f_atomic / 2`` are rejected as unrepresentable.
    """
    half = grid.f_atomic / 2.0
    for tone in tones:
        if tone.frequency >= half:
            raise ValueError(
                f"tone at {tone.frequency:g} Hz is at or above f_atomic/2 = {half:g} Hz"
            )
    t = grid.times()
    out = np.zeros(grid.n_points, dtype=complex if complex_mode else float)
    for tone in tones:
        ph = TWO_PI * tone.frequency * t + tone.phase
        if complex_mode:
            out += tone.amplitude * np.exp(1j * ph)
        else:
            out += tone.amplitude * np.cos(ph)
    return out


def add_noise(signal: np.ndarray, snr_db: float, seed: int) -> np.ndarray:
    """Add white Gaussian noise at a target SNR relative to the signal's mean power.

    Complex input gets circular complex noise (variance split evenly between
    quadratures); real input gets real noise. ``snr_db = inf`` returns a copy.
    """
    if math.isinf(snr_db) and snr_db > 0:
        return signal.copy()
    power = float(np.mean(np.abs(signal) ** 2))
    if power <= 0.0:
        raise ValueError("cannot set an SNR against an all-zero signal")
    sigma2 = power / (10.0 ** (snr_db / 10.0))
    rng = np.random.default_rng(seed)
    if np.iscomplexobj(signal):
        scale = math.sqrt(sigma2 / 2.0)
        noise = scale * (rng.standard_normal(len(signal)) + 1j * rng.standard_normal(len(signal)))
    else:
        noise = math.sqrt(sigma2) * rng.standard_normal(len(signal))
    return signal + noise


@dataclass(frozen=True)
class FoldedTone:
    """Where a tone lands after folding through the sampling clock.

    f_if is the folded (intermediate) frequency in [0, f_s1/2]; k_h the nearest
    clock harmonic; beta the fold side (+1/-1); m_index = beta * k_h the signed
    modulation scaling; nyquist_zone the index of the f_s1/2-wide zone holding
    the original tone.
    """

    f_if: float
    k_h: int
    beta: int
    m_index: int
    nyquist_zone: int


def fold_tone(f_c: float, clock: ClockConfig) -> FoldedTone:
    """Fold an RF tone at f_c through the clock: nearest-harmonic aliasing.

    ``k_h = round(f_c / f_s1)`` (half-way cases round up), ``beta`` is the sign
    of ``f_c - k_h f_s1`` with ``sign(0) := +1``, and the folded tone carries
    the clock modulation scaled by ``-m_index`` where ``m_index = beta * k_h``.
    """
    if f_c < 0.0 or not math.isfinite(f_c):
        raise ValueError("f_c must be non-negative and finite")
    f_s1 = clock.f_s1
    k_h = int(math.floor(f_c / f_s1 + 0.5))
    diff = f_c - k_h * f_s1
    beta = 1 if diff >= 0.0 else -1
    zone = int(math.floor(2.0 * f_c / f_s1))
    return FoldedTone(
        f_if=abs(diff), k_h=k_h, beta=beta, m_index=beta * k_h, nyquist_zone=zone
    )


def modulation_index_for_zone(zone: int) -> int:
    """Signed modulation scaling for a Nyquist zone: 0, -1, 1, -2, 2, ..."""
    if zone < 0:
        raise ValueError("zone must be non-negative")
    return zone // 2 if zone % 2 == 0 else -(zone + 1) // 2


def zone_for_modulation_index(m: int) -> int:
    """Inverse of modulation_index_for_zone."""
    if m == 0:
        return 0
    return 2 * m if m > 0 else -2 * m - 1


def folded_spectrum(
    signal: np.ndarray,
    schedule: SampleSchedule,
    grid: TimeGrid,
    clock: ClockConfig,
) -> tuple[np.ndarray, np.ndarray]:
    """Magnitude spectrum of the sampled signal over the first Nyquist zone.

    The signal is kept only at schedule indices (zero elsewhere), transformed
    with a unitary DFT, and cut to [0, f_s1 / 2]. Returns (frequencies, magnitudes).
    """
    if len(signal) != grid.n_points:
        raise ValueError("signal length does not match the grid")
    if schedule.indices.max() >= grid.n_points:
        raise ValueError("schedule indices fall outside the grid")
    z = np.zeros(grid.n_points, dtype=complex)
    z[schedule.indices] = signal[schedule.indices]
    spec = np.fft.fft(z, norm="ortho")
    n_keep = int(math.floor((clock.f_s1 / 2.0) / grid.f_res)) + 1
    n_keep = min(n_keep, grid.n_points)
    freqs = np.arange(n_keep) * grid.f_res
    return freqs, np.abs(spec[:n_keep])
