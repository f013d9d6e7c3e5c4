"""Seeded batch experiments with CSV/manifest outputs.

Every experiment resolves its configuration from built-in presets (a ``full``
scale matching the headline operating points and a reduced ``desk`` scale that
preserves the governing dimensionless ratios), overlays an optional INI file,
and produces a ResultManifest holding the result records, the resolved config
echo, and derived summary notes. Reruns with the same config and seed
reproduce the records byte-for-byte; trial seeds are derived from the master
seed, the experiment id, and the sweep/trial position, so execution order is
immaterial.
"""

from __future__ import annotations

import configparser
import csv
import hashlib
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.signal import ShortTimeFFT
from scipy.signal.windows import hann

from . import __version__
from .crb import ChirpModel, nz_probability_from_crb, simulate_nz_trials
from .omp import detection_probability_bound, omp_recover, score_recovery
from .rip import (
    SQRT2_MINUS_1,
    estimate_modulation_constant,
    guaranteed_sparsity_convex,
    max_recoverable_sparsity,
    pairwise_deviation_bound,
    strip_failure_probability,
)
from .sensing import SensingOperator, empirical_rip
from .signal_clock import (
    ClockConfig,
    LinearChirp,
    Sinusoid,
    TimeGrid,
    ToneSpec,
    add_noise,
    compute_sample_schedule,
    fold_tone,
    folded_spectrum,
)
from .svgplot import line_plot

EXPERIMENTS = (
    "strip-table",
    "mod-constant",
    "spectrum",
    "recovery-sweep",
    "zone-id",
    "deviation-sweep",
)
SCALES = ("full", "desk")


class ConfigError(Exception):
    """Invalid experiment configuration (unknown keys, malformed values)."""


@dataclass
class ResultManifest:
    """One experiment run: records for the CSV plus a provenance manifest."""

    experiment: str
    scale: str
    seed: int
    config: dict[str, dict[str, str]]
    fieldnames: list[str]
    records: list[dict]
    notes: dict[str, str] = field(default_factory=dict)
    version: str = __version__
    wall_clock_s: float = 0.0
    extra_tables: dict[str, list[list[str]]] = field(default_factory=dict)

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(self.fieldnames)
            for record in self.records:
                writer.writerow([_cell(record[name]) for name in self.fieldnames])

    def as_sections(self) -> dict[str, dict[str, str]]:
        sections = {
            "run": {
                "experiment": self.experiment,
                "scale": self.scale,
                "seed": str(self.seed),
                "version": self.version,
                "records": str(len(self.records)),
                "wall_clock_s": repr(self.wall_clock_s),
            }
        }
        for name, keys in self.config.items():
            sections[f"config:{name}"] = dict(keys)
        if self.notes:
            sections["notes"] = dict(self.notes)
        return sections

    def write_manifest(self, path) -> None:
        write_sections(path, self.as_sections())


def _cell(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_sections(path, sections: dict[str, dict[str, str]]) -> None:
    lines = []
    for name, keys in sections.items():
        lines.append(f"[{name}]")
        for key, value in keys.items():
            lines.append(f"{key} = {value}")
        lines.append("")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines))


def read_sections(path) -> dict[str, dict[str, str]]:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    with open(path, "r", encoding="utf-8") as fh:
        parser.read_file(fh)
    return {name: dict(parser[name]) for name in parser.sections()}


def load_config_file(path) -> dict[str, dict[str, str]]:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        return read_sections(path)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config file {path}: {exc}") from exc


def fanout_seed(master: int, experiment: str, sweep_index: int, trial_index: int) -> int:
    """Stable per-trial seed: a truncated SHA-256 of the run coordinates."""
    message = f"{master}|{experiment}|{sweep_index}|{trial_index}".encode()
    return int.from_bytes(hashlib.sha256(message).digest()[:8], "big") >> 1


# ---------------------------------------------------------------------------
# presets

_SQRT2_M1 = repr(SQRT2_MINUS_1)


def default_config(experiment: str, scale: str) -> dict[str, dict[str, str]]:
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}")
    if scale not in SCALES:
        raise ConfigError(f"unknown scale {scale!r}")
    desk = scale == "desk"
    if experiment == "strip-table":
        return {
            "run": {"seed": "1234567"},
            "strip": {
                "n_bins": "1000000",
                "k_measurements": "20000",
                "delta": _SQRT2_M1,
                "tolerances": "0.1 0.05 0.01 0.005",
            },
        }
    if experiment == "mod-constant":
        # desk scale keeps the same clock but a 10x shorter window
        n_points = "100000" if desk else "1000000"
        period = "1e-5" if desk else "1e-4"
        return {
            "run": {"seed": "1234567"},
            "grid": {"t_atom_s": "1e-10", "n_points": n_points},
            "clock": {
                "f_s1_hz": "2e8",
                "modulation": "chirp",
                "f_dev_hz": "1e7",
                "period_s": period,
            },
            "estimate": {"k_max": "20", "sparsity_for_bound": "3"},
        }
    if experiment == "spectrum":
        n_points = "262144" if desk else "1000000"
        period = "2.62144e-6" if desk else "1e-5"
        return {
            "run": {"seed": "1234567"},
            "grid": {"t_atom_s": "1e-11", "n_points": n_points},
            "clock": {
                "f_s1_hz": "2e9",
                "modulation": "chirp",
                "f_dev_hz": "1e8",
                "period_s": period,
            },
            "tones": {
                "frequencies_hz": "5e8 2.5e9 4.5e9 6.5e9",
                "amplitudes": "1 1 1 1",
                "phases_rad": "0 0 0 0",
            },
            "spectrum": {
                "signal_mode": "real",
                "stft_window": "4096",
                "stft_hop": "2048",
            },
        }
    if experiment == "recovery-sweep":
        n_points = "262144" if desk else "1000000"
        period = "2.62144e-5" if desk else "1e-4"
        return {
            "run": {"seed": "1234567"},
            "grid": {"t_atom_s": "1e-10", "n_points": n_points},
            "clock": {
                "f_s1_hz": "2e8",
                "modulation": "chirp",
                "f_dev_hz": "1e7",
                "period_s": period,
            },
            "sweep": {
                "sparsity": "3:60:3",
                "snr_db": "20 10 0",
                "trials": "50",
                "tol_bins": "1",
                "min_separation_bins": "2.5",
                "amplitude": "1.0",
            },
        }
    if experiment == "zone-id":
        return {
            "run": {"seed": "1234567"},
            "grid": {"t_atom_s": "1e-10", "n_points": "100000"},
            "clock": {
                "f_s1_hz": "2e8",
                "modulation": "chirp",
                "f_dev_hz": "1e7",
                "period_s": "1e-5",
            },
            "zones": {
                "n_zones": "20",
                "trials": "50",
                "noise_sigma2": "25.0",
                "k_values": "100 150 200 250 300 400 500 600 800 1000 1200 1400 1600 1800 2000",
                "k_max": "20",
            },
        }
    # deviation-sweep
    n_points = "262144" if desk else "1000000"
    period = "1.31072e-6" if desk else "5e-6"
    sparsity = "200:2000:200" if desk else "400:4000:400"
    return {
        "run": {"seed": "1234567"},
        "grid": {"t_atom_s": "1e-11", "n_points": n_points},
        "clock": {
            "f_s1_hz": "2e9",
            "modulation": "sine",
            "f_dev_hz": "unused",  # swept below
            "period_s": period,
        },
        "sweep": {
            "f_dev_hz": "0 1e7 1e8",
            "sparsity": sparsity,
            "trials": "100",
        },
    }


def resolve_config(
    experiment: str,
    scale: str,
    overrides: Optional[dict[str, dict[str, str]]] = None,
) -> dict[str, dict[str, str]]:
    config = default_config(experiment, scale)
    for section, keys in (overrides or {}).items():
        if section not in config:
            raise ConfigError(f"unknown config section [{section}]")
        for key, value in keys.items():
            if key not in config[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
            config[section][key] = value
    return config


# ---------------------------------------------------------------------------
# typed config access

def _get(config, section, key) -> str:
    try:
        return config[section][key]
    except KeyError as exc:
        raise ConfigError(f"missing config value [{section}] {key}") from exc


def _float(config, section, key) -> float:
    raw = _get(config, section, key)
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key} = {raw!r} is not a number") from exc


def _int(config, section, key) -> int:
    raw = _get(config, section, key)
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key} = {raw!r} is not an integer") from exc


def _floats(config, section, key) -> list[float]:
    raw = _get(config, section, key)
    try:
        return [float(tok) for tok in raw.split()]
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key} = {raw!r} is not a number list") from exc


def _ints(config, section, key) -> list[int]:
    raw = _get(config, section, key)
    try:
        return [int(tok) for tok in raw.split()]
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key} = {raw!r} is not an integer list") from exc


def _int_range(config, section, key) -> list[int]:
    """Parse 'start:stop:step' (stop inclusive) or a plain integer list."""
    raw = _get(config, section, key)
    if ":" in raw:
        try:
            start, stop, step = (int(tok) for tok in raw.split(":"))
        except ValueError as exc:
            raise ConfigError(f"[{section}] {key} = {raw!r} is not start:stop:step") from exc
        if step <= 0 or stop < start:
            raise ConfigError(f"[{section}] {key} = {raw!r} is an empty range")
        return list(range(start, stop + 1, step))
    return _ints(config, section, key)


def _build_grid(config) -> TimeGrid:
    try:
        return TimeGrid(t_atom=_float(config, "grid", "t_atom_s"),
                        n_points=_int(config, "grid", "n_points"))
    except ValueError as exc:
        raise ConfigError(f"invalid grid: {exc}") from exc


def _build_clock(config, f_dev_override: Optional[float] = None) -> ClockConfig:
    kind = _get(config, "clock", "modulation").strip().lower()
    f_s1 = _float(config, "clock", "f_s1_hz")
    f_dev = f_dev_override
    if f_dev is None and kind != "none":
        f_dev = _float(config, "clock", "f_dev_hz")
    try:
        if kind == "none" or (f_dev is not None and f_dev == 0.0):
            modulation = None
        elif kind == "chirp":
            modulation = LinearChirp(f_dev, _float(config, "clock", "period_s"))
        elif kind == "sine":
            modulation = Sinusoid(f_dev, _float(config, "clock", "period_s"))
        else:
            raise ConfigError(f"unknown modulation kind {kind!r}")
        return ClockConfig(f_s1=f_s1, modulation=modulation)
    except ValueError as exc:
        raise ConfigError(f"invalid clock: {exc}") from exc


# ---------------------------------------------------------------------------
# runners

def run_strip_table(config, seed: int, scale: str) -> ResultManifest:
    t0 = time.perf_counter()
    n = _int(config, "strip", "n_bins")
    k = _int(config, "strip", "k_measurements")
    delta = _float(config, "strip", "delta")
    tolerances = _floats(config, "strip", "tolerances")
    records = []
    for tol in tolerances:
        s = max_recoverable_sparsity(n, k, delta, tol)
        bound = strip_failure_probability(n, k, 2 * s, delta) if s >= 1 else math.inf
        records.append(
            {
                "tolerance": tol,
                "max_sparsity": s,
                "bound_at_doubled_support": bound,
            }
        )
    manifest = ResultManifest(
        experiment="strip-table",
        scale=scale,
        seed=seed,
        config=config,
        fieldnames=["tolerance", "max_sparsity", "bound_at_doubled_support"],
        records=records,
        notes={"delta": repr(delta), "n_bins": str(n), "k_measurements": str(k)},
    )
    manifest.wall_clock_s = time.perf_counter() - t0
    return manifest


def run_mod_constant(config, seed: int, scale: str) -> ResultManifest:
    t0 = time.perf_counter()
    grid = _build_grid(config)
    clock = _build_clock(config)
    k_max = _int(config, "estimate", "k_max")
    s_bound = _int(config, "estimate", "sparsity_for_bound")
    constant = estimate_modulation_constant(clock, grid, k_max)
    delta2, delta_s = pairwise_deviation_bound(
        constant.c_value, grid.f_res, clock.f_dev, s_bound
    )
    records = [
        {"k": i + 1, "c_k": float(c)} for i, c in enumerate(constant.per_k)
    ]
    notes = {
        "c_value": repr(constant.c_value),
        "f_res_hz": repr(grid.f_res),
        "f_dev_hz": repr(clock.f_dev),
        "delta2_bound": repr(delta2),
        f"delta{s_bound}_bound": repr(delta_s),
        "guaranteed_sparsity_convex": str(guaranteed_sparsity_convex(delta2)),
        "band_definition": constant.band_definition,
    }
    manifest = ResultManifest(
        experiment="mod-constant",
        scale=scale,
        seed=seed,
        config=config,
        fieldnames=["k", "c_k"],
        records=records,
        notes=notes,
    )
    manifest.wall_clock_s = time.perf_counter() - t0
    return manifest


def run_spectrum(config, seed: int, scale: str) -> ResultManifest:
    t0 = time.perf_counter()
    grid = _build_grid(config)
    clock = _build_clock(config)
    freqs = _floats(config, "tones", "frequencies_hz")
    amps = _floats(config, "tones", "amplitudes")
    phases = _floats(config, "tones", "phases_rad")
    if not (len(freqs) == len(amps) == len(phases)):
        raise ConfigError("tone frequency/amplitude/phase lists differ in length")
    mode = _get(config, "spectrum", "signal_mode").strip().lower()
    if mode not in ("real", "complex"):
        raise ConfigError(f"signal_mode must be real or complex, got {mode!r}")
    tones = [ToneSpec(f, a, p) for f, a, p in zip(freqs, amps, phases)]

    from .signal_clock import synthesize_signal

    signal = synthesize_signal(tones, grid, complex_mode=(mode == "complex"))
    schedule = compute_sample_schedule(clock, grid)
    spectrum_freqs, magnitudes = folded_spectrum(signal, schedule, grid, clock)
    records = [
        {"frequency_hz": float(f), "magnitude": float(m)}
        for f, m in zip(spectrum_freqs, magnitudes)
    ]
    notes = {
        "k_samples": str(schedule.size),
        "signal_mode": mode,
    }
    for i, tone in enumerate(tones):
        fold = fold_tone(tone.frequency, clock)
        notes[f"tone{i}"] = (
            f"f_c={tone.frequency:g} f_if={fold.f_if:g} m={fold.m_index} "
            f"zone={fold.nyquist_zone} width={abs(fold.m_index) * clock.f_dev:g}"
        )
    manifest = ResultManifest(
        experiment="spectrum",
        scale=scale,
        seed=seed,
        config=config,
        fieldnames=["frequency_hz", "magnitude"],
        records=records,
        notes=notes,
    )
    manifest.extra_tables = {
        "spectrogram.csv": _spectrogram_table(signal, schedule, grid, clock, config)
    }
    manifest.wall_clock_s = time.perf_counter() - t0
    return manifest


def _spectrogram_table(signal, schedule, grid, clock, config) -> list[list[str]]:
    window = _int(config, "spectrum", "stft_window")
    hop = _int(config, "spectrum", "stft_hop")
    if window < 8 or hop < 1:
        raise ConfigError("stft_window/stft_hop too small")
    z = np.zeros(grid.n_points, dtype=float)
    z[schedule.indices] = np.real(signal[schedule.indices])
    stft = ShortTimeFFT(hann(window, sym=False), hop=hop, fs=grid.f_atomic)
    spectrogram = np.abs(stft.stft(z))
    keep = stft.f <= clock.f_s1 / 2.0
    frame_times = stft.t(grid.n_points)
    header = ["freq_hz"] + [repr(float(t)) for t in frame_times]
    rows = [header]
    for fi in np.nonzero(keep)[0]:
        rows.append(
            [repr(float(stft.f[fi]))] + [repr(float(v)) for v in spectrogram[fi]]
        )
    return rows


def _tones_at_times(tones: Sequence[ToneSpec], times: np.ndarray) -> np.ndarray:
    out = np.zeros(len(times), dtype=complex)
    for tone in tones:
        out += tone.amplitude * np.exp(
            1j * (2.0 * math.pi * tone.frequency * times + tone.phase)
        )
    return out


def _draw_tones(rng, sparsity, f_res, band, min_sep_bins, amplitude) -> list[ToneSpec]:
    lo, hi = band
    min_sep = min_sep_bins * f_res
    freqs: list[float] = []
    attempts = 0
    while len(freqs) < sparsity:
        f = rng.uniform(lo, hi)
        if all(abs(f - g) >= min_sep for g in freqs):
            freqs.append(f)
        attempts += 1
        if attempts > 1000 * sparsity:
            raise RuntimeError("cannot place tones with the requested separation")
    return [ToneSpec(f, amplitude, rng.uniform(0.0, 2.0 * math.pi)) for f in freqs]


def run_recovery_sweep(config, seed: int, scale: str) -> ResultManifest:
    t0 = time.perf_counter()
    grid = _build_grid(config)
    clock = _build_clock(config)
    sparsities = _int_range(config, "sweep", "sparsity")
    snrs = _floats(config, "sweep", "snr_db")
    trials = _int(config, "sweep", "trials")
    tol_bins = _int(config, "sweep", "tol_bins")
    min_sep = _float(config, "sweep", "min_separation_bins")
    amplitude = _float(config, "sweep", "amplitude")

    schedule = compute_sample_schedule(clock, grid)
    op = SensingOperator(grid, schedule)
    sample_times = schedule.indices * grid.t_atom
    band = (2.0 * grid.f_res, grid.f_atomic / 2.0 - 2.0 * grid.f_res)

    records = []
    for si, s in enumerate(sparsities):
        for ni, snr_db in enumerate(snrs):
            point = si * len(snrs) + ni
            failures = 0
            for trial in range(trials):
                rng = np.random.default_rng(
                    fanout_seed(seed, "recovery-sweep", point, trial)
                )
                tones = _draw_tones(rng, s, grid.f_res, band, min_sep, amplitude)
                clean = _tones_at_times(tones, sample_times)
                y = add_noise(clean, snr_db, seed=int(rng.integers(2**63)))
                result = omp_recover(op, y, max_iters=s, residual_tol=1e-12)
                ok, _ = score_recovery(result, tones, grid, tol_bins=tol_bins)
                failures += int(not ok)
            fraction = failures / trials
            records.append(
                {
                    "sparsity": s,
                    "snr_db": snr_db,
                    "trials": trials,
                    "failures": failures,
                    "failure_fraction": fraction,
                    "standard_error": math.sqrt(fraction * (1.0 - fraction) / trials),
                }
            )
    manifest = ResultManifest(
        experiment="recovery-sweep",
        scale=scale,
        seed=seed,
        config=config,
        fieldnames=[
            "sparsity",
            "snr_db",
            "trials",
            "failures",
            "failure_fraction",
            "standard_error",
        ],
        records=records,
        notes={
            "k_samples": str(schedule.size),
            "snr_reference": "mean power of the sampled multitone signal",
        },
    )
    manifest.wall_clock_s = time.perf_counter() - t0
    return manifest


def run_zone_id(config, seed: int, scale: str) -> ResultManifest:
    t0 = time.perf_counter()
    grid = _build_grid(config)
    clock = _build_clock(config)
    if not isinstance(clock.modulation, LinearChirp):
        raise ConfigError("zone-id needs a chirp-modulated clock")
    n_zones = _int(config, "zones", "n_zones")
    trials = _int(config, "zones", "trials")
    sigma2 = _float(config, "zones", "noise_sigma2")
    k_values = _ints(config, "zones", "k_values")
    k_max = _int(config, "zones", "k_max")
    if sigma2 <= 0.0:
        raise ConfigError("noise_sigma2 must be positive")

    constant = estimate_modulation_constant(clock, grid, k_max)
    delta2, _ = pairwise_deviation_bound(constant.c_value, grid.f_res, clock.f_dev, 1)
    slope_spacing = clock.f_dev / clock.modulation.period
    step = 1.0 / clock.f_s1
    snr_db = -10.0 * math.log10(sigma2)

    empirical = simulate_nz_trials(
        grid,
        clock,
        snr_db,
        n_zones,
        k_values,
        trials,
        seed=fanout_seed(seed, "zone-id", 0, 0),
    )
    records = []
    for ki, k in enumerate(k_values):
        model = ChirpModel(
            amplitude=1.0,
            chirp_rate=slope_spacing,
            start_frequency=0.0,
            phase=0.0,
            step=step,
            count=int(k),
            noise_variance=sigma2,
        )
        crb_p = nz_probability_from_crb(model, slope_spacing, n_zones)
        t5 = detection_probability_bound(int(k), grid.n_points, delta2, sigma2)
        fraction = float(empirical[ki])
        records.append(
            {
                "k_samples": int(k),
                "theorem_lower_bound": t5.p_lower,
                "crb_probability": crb_p,
                "empirical_probability": fraction,
                "successes": int(round(fraction * trials)),
                "trials": trials,
                "standard_error": math.sqrt(fraction * (1.0 - fraction) / trials),
            }
        )
    mid = min(records, key=lambda r: abs(r["crb_probability"] - 0.9))
    notes = {
        "c_value": repr(constant.c_value),
        "delta2_bound": repr(delta2),
        "noise_sigma2": repr(sigma2),
        "per_sample_snr_db": repr(snr_db),
        "slope_spacing_hz_per_s": repr(slope_spacing),
        "midpoint_k": str(mid["k_samples"]),
        "midpoint_gap_crb_minus_bound": repr(
            mid["crb_probability"] - mid["theorem_lower_bound"]
        ),
    }
    manifest = ResultManifest(
        experiment="zone-id",
        scale=scale,
        seed=seed,
        config=config,
        fieldnames=[
            "k_samples",
            "theorem_lower_bound",
            "crb_probability",
            "empirical_probability",
            "successes",
            "trials",
            "standard_error",
        ],
        records=records,
        notes=notes,
    )
    manifest.wall_clock_s = time.perf_counter() - t0
    return manifest


def run_deviation_sweep(config, seed: int, scale: str) -> ResultManifest:
    t0 = time.perf_counter()
    grid = _build_grid(config)
    f_devs = _floats(config, "sweep", "f_dev_hz")
    sparsities = _int_range(config, "sweep", "sparsity")
    trials = _int(config, "sweep", "trials")

    records = []
    notes: dict[str, str] = {}
    for fi, f_dev in enumerate(f_devs):
        clock = _build_clock(config, f_dev_override=f_dev)
        schedule = compute_sample_schedule(clock, grid)
        op = SensingOperator(grid, schedule)
        maxima = []
        for si, s in enumerate(sparsities):
            base = fanout_seed(seed, "deviation-sweep", fi * len(sparsities) + si, 0)
            report = empirical_rip(op, s, trials, seed=base)
            maxima.append(report.max_deviation)
            records.append(
                {
                    "f_dev_hz": f_dev,
                    "sparsity": s,
                    "trials": trials,
                    "max_deviation": report.max_deviation,
                    "p95_deviation": report.percentile(95.0),
                    "mean_deviation": float(np.mean(report.deviations)),
                }
            )
        slope, intercept, r2 = _linear_fit(np.asarray(sparsities, float), np.asarray(maxima))
        label = f"f_dev_{f_dev:g}"
        notes[f"{label}_slope_per_tone"] = repr(slope)
        notes[f"{label}_intercept"] = repr(intercept)
        notes[f"{label}_r_squared"] = repr(r2)
        notes[f"{label}_k_samples"] = str(schedule.size)
    manifest = ResultManifest(
        experiment="deviation-sweep",
        scale=scale,
        seed=seed,
        config=config,
        fieldnames=[
            "f_dev_hz",
            "sparsity",
            "trials",
            "max_deviation",
            "p95_deviation",
            "mean_deviation",
        ],
        records=records,
        notes=notes,
    )
    manifest.wall_clock_s = time.perf_counter() - t0
    return manifest


def _linear_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    slope, intercept = np.polyfit(x, y, 1)
    predicted = slope * x + intercept
    ss_res = float(np.sum((y - predicted) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2


RUNNERS: dict[str, Callable] = {
    "strip-table": run_strip_table,
    "mod-constant": run_mod_constant,
    "spectrum": run_spectrum,
    "recovery-sweep": run_recovery_sweep,
    "zone-id": run_zone_id,
    "deviation-sweep": run_deviation_sweep,
}


def write_plots(manifest: ResultManifest, out_dir: Path) -> list[Path]:
    """Render SVG line plots from the result records."""
    paths = []
    records = manifest.records
    name = manifest.experiment

    def col(key, rows=None):
        return [float(r[key]) for r in (rows if rows is not None else records)]

    path = out_dir / f"plot_{name.replace('-', '_')}.svg"
    if name == "strip-table":
        line_plot(
            path,
            [("max sparsity", col("tolerance"), col("max_sparsity"))],
            "Recoverable sparsity vs failure tolerance",
            "failure tolerance",
            "max sparsity",
        )
    elif name == "mod-constant":
        line_plot(
            path,
            [("C_k", col("k"), col("c_k"))],
            "Modulation constant per harmonic scaling",
            "k",
            "C_k",
        )
    elif name == "spectrum":
        line_plot(
            path,
            [("magnitude", col("frequency_hz"), col("magnitude"))],
            "Folded magnitude spectrum",
            "frequency (Hz)",
            "magnitude",
        )
    elif name == "recovery-sweep":
        series = []
        for snr in sorted({r["snr_db"] for r in records}, reverse=True):
            rows = [r for r in records if r["snr_db"] == snr]
            series.append(
                (f"{snr:g} dB", col("sparsity", rows), col("failure_fraction", rows))
            )
        line_plot(path, series, "Recovery failure vs sparsity", "tones", "failure fraction")
    elif name == "zone-id":
        line_plot(
            path,
            [
                ("CRB ceiling", col("k_samples"), col("crb_probability")),
                ("empirical", col("k_samples"), col("empirical_probability")),
                ("detection bound", col("k_samples"), col("theorem_lower_bound")),
            ],
            "Zone identification probability vs sample count",
            "samples",
            "probability",
        )
    elif name == "deviation-sweep":
        series = []
        for f_dev in sorted({r["f_dev_hz"] for r in records}):
            rows = [r for r in records if r["f_dev_hz"] == f_dev]
            series.append(
                (f"f_dev {f_dev:g}", col("sparsity", rows), col("max_deviation", rows))
            )
        line_plot(path, series, "Max isometry deviation vs sparsity", "tones", "max deviation")
    else:
        return paths
    paths.append(path)
    return paths


def write_outputs(manifest: ResultManifest, out_dir, plots: bool = False) -> list[Path]:
    """Write results.csv, manifest.txt, any extra tables, and optional plots."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    csv_path = out_dir / "results.csv"
    manifest.write_csv(csv_path)
    written.append(csv_path)
    manifest_path = out_dir / "manifest.txt"
    manifest.write_manifest(manifest_path)
    written.append(manifest_path)
    for name, rows in manifest.extra_tables.items():
        extra_path = out_dir / name
        with open(extra_path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerows(rows)
        written.append(extra_path)
    if plots:
        written.extend(write_plots(manifest, out_dir))
    return written
