"""Scoring mathematics for prediction benchmarks.

Three raw relative errors S are defined:

* short-time: Frobenius-norm relative error over the leading `short_k`
  rows of prediction vs truth,
* long-time spectral: Frobenius-norm relative error between log power
  spectra of the trailing `long_k` rows (spatio-temporal data),
* long-time histogram: per-coordinate L1 distance between value
  histograms of the trailing `long_k` rows (low-dimensional state data).

Each S maps to a score E = clamp(100*(1 - S), -100, 100), so E = 100 is
a perfect match and an all-zero prediction lands exactly at E = 0 for the
short-time and spectral errors.

Zero-power convention: the spectral error takes ln(|FFT|^2), which is
undefined on exactly-zero rows. Any power below 1e-300 is assigned
log-power 0 instead. An all-zero prediction therefore has a zero spectrum
matrix and scores S = 1 (E = 0) exactly, anchoring the zeros baseline.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .exceptions import MetricError

logger = logging.getLogger(__name__)

SCORE_IDS = tuple(f"E{i}" for i in range(1, 13))

#: Powers below this are treated as exact zeros and given log-power 0.
ZERO_POWER_FLOOR = 1e-300


class MetricKind(str, Enum):
    SHORT_TIME = "short_time"
    LONG_TIME_SPECTRAL = "long_time_spectral"
    LONG_TIME_HISTOGRAM = "long_time_histogram"


@dataclass(frozen=True)
class MetricWindows:
    """Window parameters for the scoring metrics.

    short_k: leading rows compared by the short-time error (forecast tasks;
    reconstruction tasks always use their full window). long_k: trailing
    rows entering the long-time metrics. kmax: wavenumber half-width of the
    spectral comparison band. bins: histogram bin count.
    """

    short_k: int = 100
    long_k: int = 500
    kmax: int = 100
    bins: int = 41

    def __post_init__(self):
        if self.short_k < 1:
            raise ValueError("short_k must be >= 1")
        if self.long_k < 1:
            raise ValueError("long_k must be >= 1")
        if self.kmax < 1:
            raise ValueError("kmax must be >= 1")
        if self.bins < 2:
            raise ValueError("bins must be >= 2")


def _check_same_shape(pred: np.ndarray, truth: np.ndarray) -> None:
    if pred.shape != truth.shape:
        raise MetricError(f"shape mismatch: prediction {pred.shape} vs truth {truth.shape}")


def score_short_time(pred: np.ndarray, truth: np.ndarray, short_k: int) -> float:
    """Relative Frobenius error over the first `short_k` rows.

    S = ||pred[:k] - truth[:k]||_F / ||truth[:k]||_F. Raises MetricError if
    the truth window has zero norm (the score would be undefined).
    """
    pred = np.asarray(pred, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    _check_same_shape(pred, truth)
    if not 1 <= short_k <= truth.shape[0]:
        raise MetricError(f"short_k={short_k} outside [1, {truth.shape[0]}]")
    ref = np.linalg.norm(truth[:short_k])
    if ref == 0.0:
        raise MetricError("zero-norm truth window: short-time score undefined")
    return float(np.linalg.norm(pred[:short_k] - truth[:short_k]) / ref)


def power_spectrum_rows(x: np.ndarray, long_k: int, kmax: int) -> np.ndarray:
    """Log power spectrum of the trailing `long_k` rows along the space axis.

    Each row is transformed with a complex DFT, squared in magnitude,
    center-shifted so wavenumber zero sits at column n/2, and restricted to
    the 2*kmax+1 bins around it. The natural log is taken with the
    zero-power convention (module docstring).
    """
    x = np.asarray(x, dtype=np.float64)
    rows, n = x.shape
    if n % 2 != 0:
        raise MetricError(f"spectral metric requires an even column count, got {n}")
    if n < 2 * kmax + 2:
        raise MetricError(f"need at least {2 * kmax + 2} columns for kmax={kmax}, got {n}")
    if not 1 <= long_k <= rows:
        raise MetricError(f"long_k={long_k} outside [1, {rows}]")
    power = np.abs(np.fft.fft(x[rows - long_k :], axis=1)) ** 2
    power = np.fft.fftshift(power, axes=1)
    sel = power[:, n // 2 - kmax : n // 2 + kmax + 1]
    out = np.zeros_like(sel)
    live = sel >= ZERO_POWER_FLOOR
    out[live] = np.log(sel[live])
    return out


def score_long_time_spectral(
    pred: np.ndarray, truth: np.ndarray, windows: MetricWindows
) -> float:
    """Relative Frobenius error between truth and prediction log spectra."""
    pred = np.asarray(pred, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    _check_same_shape(pred, truth)
    p_truth = power_spectrum_rows(truth, windows.long_k, windows.kmax)
    p_pred = power_spectrum_rows(pred, windows.long_k, windows.kmax)
    ref = np.linalg.norm(p_truth)
    if ref == 0.0:
        raise MetricError("zero-norm truth spectrum: spectral score undefined")
    return float(np.linalg.norm(p_pred - p_truth) / ref)


def histogram_l1(truth_series: np.ndarray, pred_series: np.ndarray, bins: int) -> float:
    """Normalized L1 distance between value histograms of two equal-length
    series.

    Bin edges are `bins` equal-width bins spanning [min, max] of the truth
    series; both series are binned with those shared edges, prediction
    values outside the range clamping into the nearest end bin. Counts are
    compared: s = sum_b |h_truth[b] - h_pred[b]| / len, which lies in [0, 2].
    A degenerate truth range (max == min) collapses to a single bin.
    """
    t = np.asarray(truth_series, dtype=np.float64).ravel()
    p = np.asarray(pred_series, dtype=np.float64).ravel()
    if t.size != p.size:
        raise MetricError(f"series lengths differ: {t.size} vs {p.size}")
    if t.size < 1:
        raise MetricError("empty series")
    lo, hi = float(t.min()), float(t.max())
    if lo == hi:
        # Single bin; every clamped value lands in it.
        return 0.0
    edges = np.linspace(lo, hi, bins + 1)
    h_t, _ = np.histogram(t, bins=edges)
    h_p, _ = np.histogram(np.clip(p, lo, hi), bins=edges)
    return float(np.abs(h_t - h_p).sum() / t.size)


def score_long_time_histogram(
    pred: np.ndarray, truth: np.ndarray, windows: MetricWindows
) -> float:
    """Mean per-coordinate histogram distance over the trailing `long_k` rows.

    Defined for 3-column state trajectories; the three coordinate distances
    are averaged, so S lies in [0, 2].
    """
    pred = np.asarray(pred, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    _check_same_shape(pred, truth)
    if truth.shape[1] != 3:
        raise MetricError(f"histogram metric requires 3 columns, got {truth.shape[1]}")
    rows = truth.shape[0]
    if not 1 <= windows.long_k <= rows:
        raise MetricError(f"long_k={windows.long_k} outside [1, {rows}]")
    t = truth[rows - windows.long_k :]
    p = pred[rows - windows.long_k :]
    parts = [histogram_l1(t[:, c], p[:, c], windows.bins) for c in range(3)]
    return float(np.mean(parts))


def to_score(s: float) -> float:
    """Map a raw relative error S to the clipped score E = 100*(1 - S).

    Non-finite S is recorded as a warning and scored -100.
    """
    if not np.isfinite(s):
        logger.warning("non-finite relative error %r scored as -100", s)
        return -100.0
    return float(np.clip(100.0 * (1.0 - s), -100.0, 100.0))


def composite(scores: list[float | None]) -> float:
    """Average the twelve scores; absent (None) entries count as -100."""
    if len(scores) != len(SCORE_IDS):
        raise ValueError(f"expected {len(SCORE_IDS)} scores, got {len(scores)}")
    filled = [-100.0 if e is None else float(e) for e in scores]
    return float(np.mean(filled))
