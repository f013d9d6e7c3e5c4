"""Greedy sparse recovery from schedule measurements, plus a detection bound.

Orthogonal matching pursuit against the full Fourier dictionary: at every
iteration the residual is correlated with all N atoms through one FFT, the
strongest bin joins the support, and the coefficients are re-fit by least
squares on the support's Hermitian Gram system (Cholesky, no regularization;
a singular Gram raises rather than being silently regularized).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .sensing import SensingOperator
from .signal_clock import TimeGrid, ToneSpec


class GramSingularError(RuntimeError):
    """Least-squares step hit a singular restricted Gram (colliding atoms)."""

    def __init__(self, support: Sequence[int]):
        super().__init__(
            f"restricted Gram is singular on support {list(support)}; "
            "atoms are linearly dependent under this schedule"
        )
        self.support = list(support)


@dataclass(frozen=True)
class RecoveryResult:
    """OMP output: support bins, LS coefficients, and the per-iteration log.

    selection_log holds one (bin, correlation magnitude, residual norm) triple
    per iteration, in selection order.
    """

    support: list[int]
    coefficients: np.ndarray
    residual_norm: float
    iterations: int
    selection_log: list[tuple[int, float, float]]


@dataclass(frozen=True)
class DetectionBound:
    """Lower bound on single-tone detection probability in white noise."""

    k_measurements: int
    n_bins: int
    delta2: float
    sigma2: float
    p_lower: float


def omp_recover(
    op: SensingOperator,
    y: np.ndarray,
    max_iters: int,
    residual_tol: float = 0.0,
) -> RecoveryResult:
    """Recover a sparse spectrum from measurements y.

    Stops after ``max_iters`` selections or once the residual norm drops to
    ``residual_tol * ||y||``. Ties in the correlation magnitude resolve to the
    lowest bin, which makes the selection order deterministic.

    Raises
    ------
    GramSingularError
        If the selected atoms become linearly dependent.
    """
    y = np.asarray(y, dtype=complex)
    if y.shape != (op.k_measurements,):
        raise ValueError("measurement vector must have length K")
    if not (1 <= max_iters <= op.k_measurements):
        raise ValueError("max_iters must lie in [1, K]")
    if residual_tol < 0.0:
        raise ValueError("residual_tol must be non-negative")

    y_norm = float(np.linalg.norm(y))
    if y_norm == 0.0:
        return RecoveryResult([], np.zeros(0, dtype=complex), 0.0, 0, [])

    k = op.k_measurements
    selected = np.empty((k, max_iters), dtype=complex)
    gram = np.zeros((max_iters, max_iters), dtype=complex)
    rhs = np.empty(max_iters, dtype=complex)
    support: list[int] = []
    log: list[tuple[int, float, float]] = []
    residual = y.copy()
    coefficients = np.zeros(0, dtype=complex)
    residual_norm = y_norm

    for it in range(max_iters):
        correlation = op.adjoint(residual)
        magnitude = np.abs(correlation)
        if support:
            magnitude[support] = -1.0
        bin_j = int(np.argmax(magnitude))  # argmax takes the lowest bin on ties
        corr_mag = float(magnitude[bin_j])

        atom = op.atom(bin_j)
        i = len(support)
        if i:
            cross = selected[:, :i].conj().T @ atom
            gram[:i, i] = cross
            gram[i, :i] = cross.conj()
        gram[i, i] = np.vdot(atom, atom).real
        selected[:, i] = atom
        rhs[i] = np.vdot(atom, y)
        support.append(bin_j)

        try:
            factor = cho_factor(gram[: i + 1, : i + 1], lower=True)
            coefficients = cho_solve(factor, rhs[: i + 1])
        except LinAlgError as exc:
            raise GramSingularError(support) from exc

        residual = y - selected[:, : i + 1] @ coefficients
        residual_norm = float(np.linalg.norm(residual))
        log.append((bin_j, corr_mag, residual_norm))
        if residual_norm <= residual_tol * y_norm:
            break

    return RecoveryResult(support, coefficients, residual_norm, len(support), log)


def score_recovery(
    result: RecoveryResult,
    truth: Sequence[ToneSpec],
    grid: TimeGrid,
    tol_bins: int = 1,
) -> tuple[bool, list[Optional[int]]]:
    """Match recovered bins against true tones within a bin tolerance.

    Each tone's target is its nearest grid bin; matching is greedy by distance
    and injective (a recovered bin serves at most one tone). Returns a success
    flag (every tone matched) and the matched bin per tone, None where unmatched.
    """
    if tol_bins < 0:
        raise ValueError("tol_bins must be non-negative")
    targets = [int(round(t.frequency / grid.f_res)) for t in truth]
    pairs = sorted(
        (abs(b - target), ti, b)
        for ti, target in enumerate(targets)
        for b in result.support
        if abs(b - target) <= tol_bins
    )
    matched: list[Optional[int]] = [None] * len(targets)
    used_bins: set[int] = set()
    for _, ti, b in pairs:
        if matched[ti] is None and b not in used_bins:
            matched[ti] = b
            used_bins.add(b)
    return all(m is not None for m in matched), matched


def detection_probability_bound(
    k: int, n: int, delta2: float, sigma2: float
) -> DetectionBound:
    """Lower-bound the probability that a single tone's bin wins the correlation.

    p >= [1 - exp(-K (1 - delta_2)^2 / (4 sigma^2))]^N, evaluated in the log
    domain so that N in the millions cannot underflow the bracket.
    """
    if k < 1 or n < 1:
        raise ValueError("k and n must be positive")
    if not (0.0 <= delta2 < 1.0):
        raise ValueError("delta2 must lie in [0, 1)")
    if sigma2 <= 0.0:
        raise ValueError("sigma2 must be positive")
    exponent = k * (1.0 - delta2) ** 2 / (4.0 * sigma2)
    if exponent == 0.0:
        p = 0.0
    else:
        inner = -math.exp(-exponent)
        p = 0.0 if inner <= -1.0 else math.exp(n * math.log1p(inner))
    return DetectionBound(k, n, delta2, sigma2, p)
