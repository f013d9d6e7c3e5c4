"""Row-subsampled Fourier sensing operator and isometry diagnostics.

The measurement model is ``y = Phi x_hat`` where ``x_hat`` is the length-N
unitary-DFT spectrum of the signal and ``Phi`` keeps the K inverse-transform
rows indexed by the sample schedule. Column j of ``Phi`` is the unit-norm atom
``a_j[m] = exp(2 pi i k_m j / N) / sqrt(K)`` with ``k_m`` the m-th schedule
index. Small supports are handled by direct summation, large ones through the
FFT; the two paths agree to machine precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .signal_clock import SampleSchedule, TimeGrid

_GRAM_SUPPORT_LIMIT = 64
_DENSE_MATRIX_LIMIT = 4096


@dataclass(frozen=True)
class SparseSpectrum:
    """Sparse frequency-domain vector: strictly increasing bins, complex weights."""

    bins: np.ndarray
    coefficients: np.ndarray

    def __post_init__(self) -> None:
        bins = np.asarray(self.bins, dtype=np.int64)
        coefficients = np.asarray(self.coefficients, dtype=complex)
        if bins.ndim != 1 or coefficients.ndim != 1 or len(bins) != len(coefficients):
            raise ValueError("bins and coefficients must be 1-d and equal length")
        if len(bins) == 0:
            raise ValueError("spectrum has no entries")
        if np.any(bins < 0):
            raise ValueError("bins must be non-negative")
        if np.any(np.diff(bins) <= 0):
            raise ValueError("bins must be strictly increasing")
        object.__setattr__(self, "bins", bins)
        object.__setattr__(self, "coefficients", coefficients)

    @property
    def sparsity(self) -> int:
        return len(self.bins)

    def to_dense(self, n: int) -> np.ndarray:
        if self.bins[-1] >= n:
            raise ValueError("spectrum bins exceed the requested length")
        dense = np.zeros(n, dtype=complex)
        dense[self.bins] = self.coefficients
        return dense


@dataclass(frozen=True)
class DeviationReport:
    """Monte Carlo record of restricted spectral-norm deviations at one sparsity."""

    sparsity: int
    deviations: np.ndarray
    max_deviation: float

    def __post_init__(self) -> None:
        deviations = np.asarray(self.deviations, dtype=float)
        object.__setattr__(self, "deviations", deviations)
        if len(deviations) == 0:
            raise ValueError("report needs at least one trial")
        if not math.isclose(self.max_deviation, float(deviations.max()), rel_tol=1e-12):
            raise ValueError("max_deviation does not match the trial list")

    def percentile(self, q: float) -> float:
        return float(np.percentile(self.deviations, q))


class SensingOperator:
    """K x N partial inverse-DFT operator defined by a sample schedule."""

    def __init__(self, grid: TimeGrid, schedule: SampleSchedule) -> None:
        if schedule.indices.max() >= grid.n_points:
            raise ValueError("schedule indices fall outside the grid")
        if schedule.indices.min() < 0:
            raise ValueError("schedule indices must be non-negative")
        self.grid = grid
        self.schedule = schedule

    @property
    def n_bins(self) -> int:
        return self.grid.n_points

    @property
    def k_measurements(self) -> int:
        return self.schedule.size

    def _use_direct(self, sparsity: int) -> bool:
        # complex exponentials cost roughly 8x an FFT butterfly per element
        n = self.n_bins
        return 8 * sparsity * self.k_measurements < n * math.log2(n)

    def atoms(self, bins: Sequence[int]) -> np.ndarray:
        """Materialize unit-norm columns for the given bins (K x len(bins))."""
        bins = np.asarray(bins, dtype=np.int64)
        if len(bins) and (bins.min() < 0 or bins.max() >= self.n_bins):
            raise ValueError("bin out of range")
        phase = np.outer(self.schedule.indices, bins) % self.n_bins
        return np.exp((2j * math.pi / self.n_bins) * phase) / math.sqrt(self.k_measurements)

    def atom(self, j: int) -> np.ndarray:
        return self.atoms([j])[:, 0]

    def forward(self, x) -> np.ndarray:
        """Apply Phi. Accepts a SparseSpectrum or a dense length-N vector."""
        if isinstance(x, SparseSpectrum):
            if x.bins[-1] >= self.n_bins:
                raise ValueError("spectrum bins exceed the operator size")
            if self._use_direct(x.sparsity):
                return self.atoms(x.bins) @ x.coefficients
            return self._forward_dense(x.to_dense(self.n_bins))
        x = np.asarray(x)
        if x.shape != (self.n_bins,):
            raise ValueError("dense input must have length N")
        return self._forward_dense(x.astype(complex, copy=False))

    def _forward_dense(self, dense: np.ndarray) -> np.ndarray:
        full = np.fft.ifft(dense) * (self.n_bins / math.sqrt(self.k_measurements))
        return full[self.schedule.indices]

    def adjoint(self, y: np.ndarray) -> np.ndarray:
        """Apply Phi*: correlate measurements against every atom (length N)."""
        y = np.asarray(y)
        if y.shape != (self.k_measurements,):
            raise ValueError("measurement vector must have length K")
        z = np.zeros(self.n_bins, dtype=complex)
        z[self.schedule.indices] = y  # schedule indices are strictly increasing
        return np.fft.fft(z) / math.sqrt(self.k_measurements)

    def adjoint_restricted(self, y: np.ndarray, bins: Sequence[int]) -> np.ndarray:
        """Adjoint evaluated only on the given bins, by direct summation."""
        y = np.asarray(y)
        if y.shape != (self.k_measurements,):
            raise ValueError("measurement vector must have length K")
        return self.atoms(bins).conj().T @ y

    def gram_matrix(self, support: Sequence[int]) -> np.ndarray:
        """Hermitian Gram of the restricted columns, by direct summation."""
        support = np.asarray(support, dtype=np.int64)
        if len(support) == 0:
            raise ValueError("support is empty")
        if len(np.unique(support)) != len(support):
            raise ValueError("support bins must be distinct")
        a = self.atoms(support)
        g = a.conj().T @ a
        return 0.5 * (g + g.conj().T)

    def gram_eigen_bounds(self, support: Sequence[int]) -> tuple[float, float, float]:
        """(lambda_min, lambda_max, deviation) of the restricted Gram.

        The deviation ``max(1 - lambda_min, lambda_max - 1)`` is the tightest
        symmetric isometry constant for this support. Supports above
        64 bins are refused; use empirical_rip for large-support statistics.
        """
        support = np.asarray(support, dtype=np.int64)
        if len(support) > _GRAM_SUPPORT_LIMIT:
            raise ValueError(
                f"eigen bounds limited to supports of {_GRAM_SUPPORT_LIMIT} bins"
            )
        w = np.linalg.eigvalsh(self.gram_matrix(support))
        lo, hi = float(w[0]), float(w[-1])
        return lo, hi, max(1.0 - lo, hi - 1.0)

    def spectral_norm_deviation(self, spectrum: SparseSpectrum) -> float:
        """Signal-specific isometry deviation | ||Phi*_S Phi x|| / ||x|| - 1 |.

        Phi*_S is the adjoint restricted to the support of ``spectrum``.
        """
        x_norm = float(np.linalg.norm(spectrum.coefficients))
        if x_norm == 0.0:
            raise ValueError("spectrum has zero norm")
        y = self.forward(spectrum)
        if self._use_direct(spectrum.sparsity):
            c = self.adjoint_restricted(y, spectrum.bins)
        else:
            c = self.adjoint(y)[spectrum.bins]
        return abs(float(np.linalg.norm(c)) / x_norm - 1.0)

    def dense_matrix(self) -> np.ndarray:
        """Materialize Phi in full. Guarded to small test grids."""
        if self.n_bins > _DENSE_MATRIX_LIMIT:
            raise ValueError("dense matrix only available for small grids")
        return self.atoms(np.arange(self.n_bins))


def empirical_rip(
    op: SensingOperator, sparsity: int, trials: int, seed: int
) -> DeviationReport:
    """Sample spectral_norm_deviation over random supports and Gaussian weights.

    Trial t draws its own generator seeded ``seed + t``, so any subset of
    trials can be reproduced independently of execution order. Supports are
    uniform without replacement; weights are standard circular complex Gaussian.
    """
    if not (1 <= sparsity <= op.n_bins):
        raise ValueError("sparsity out of range")
    if trials < 1:
        raise ValueError("need at least one trial")
    deviations = np.empty(trials, dtype=float)
    for t in range(trials):
        rng = np.random.default_rng(seed + t)
        bins = rng.choice(op.n_bins, size=sparsity, replace=False)
        bins.sort()
        coeff = (
            rng.standard_normal(sparsity) + 1j * rng.standard_normal(sparsity)
        ) / math.sqrt(2.0)
        deviations[t] = op.spectral_norm_deviation(SparseSpectrum(bins, coeff))
    return DeviationReport(
        sparsity=sparsity, deviations=deviations, max_deviation=float(deviations.max())
    )
