"""Histogram-based Shannon entropy, mutual information, and co-information over
sliding windows of quantized position data, plus trend-sign detection.

All quantities are in bits. Binning uses a fixed global origin so entropy values
of overlapping windows stay comparable.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from math import log2

import numpy as np

MI_FLOOR = 1e-12  # clamp tiny negative rounding artifacts of H(x)+H(y)-H(x,y)
ENTROPY_FLOOR = 1e-9  # |H| below this is rounding residue of log2(n) - sum/n


def _snap(h: float) -> float:
    """Exact zero for constant windows despite floating-point residue."""
    return 0.0 if abs(h) < ENTROPY_FLOOR else h


@dataclass(frozen=True)
class QuantizationGrid:
    """Fixed-width binning of scalar measurements: bin(v) = floor((v - origin) / q)."""

    q: float
    origin: float = 0.0

    def __post_init__(self):
        if self.q <= 0:
            raise ValueError("quantization interval q must be > 0")

    def bin_indices(self, values) -> np.ndarray:
        v = np.asarray(values, dtype=float)
        return np.floor((v - self.origin) / self.q).astype(np.int64)


@dataclass
class TimeSeries:
    """Scalar series aligned to recording frames; defined only where a full window existed."""

    start_frame: int
    values: np.ndarray

    @property
    def end_frame(self) -> int:
        return self.start_frame + len(self.values) - 1

    def at(self, k: int) -> float:
        i = k - self.start_frame
        if i < 0 or i >= len(self.values):
            raise IndexError(f"frame {k} outside series [{self.start_frame}, {self.end_frame}]")
        return float(self.values[i])


def _entropy_from_counts(counts, total: int) -> float:
    # H = log2(n) - sum(c*log2 c)/n; empty bins contribute 0 by convention
    s = 0.0
    for c in counts:
        if c > 0:
            s += c * log2(c)
    return _snap(log2(total) - s / total) if total > 1 else 0.0


def entropy(samples, grid: QuantizationGrid) -> float:
    """Shannon entropy of the binned sample distribution."""
    codes = grid.bin_indices(samples)
    if codes.size == 0:
        raise ValueError("empty sample list")
    _, counts = np.unique(codes, return_counts=True)
    return _entropy_from_counts(counts, codes.size)


def joint_entropy(x, y, grid: QuantizationGrid) -> float:
    """Entropy of the 2D binned pair distribution."""
    cx = grid.bin_indices(x)
    cy = grid.bin_indices(y)
    if cx.size == 0:
        raise ValueError("empty sample list")
    if cx.size != cy.size:
        raise ValueError(f"length mismatch: {cx.size} vs {cy.size}")
    pairs = np.stack([cx, cy], axis=1)
    _, counts = np.unique(pairs, axis=0, return_counts=True)
    return _entropy_from_counts(counts, cx.size)


def mutual_information(x, y, grid: QuantizationGrid) -> float:
    """MI = H(x) + H(y) - H(x, y), clamped to be nonnegative."""
    mi = entropy(x, grid) + entropy(y, grid) - joint_entropy(x, y, grid)
    return 0.0 if mi < MI_FLOOR else mi


def mutual_information_nd(points_a: np.ndarray, points_b: np.ndarray,
                          axes, grid: QuantizationGrid) -> float:
    """Sum of per-axis mutual information over the configured axes.

    `points_a` / `points_b` are (n, d) windowed position arrays.
    """
    pa = np.asarray(points_a, dtype=float)
    pb = np.asarray(points_b, dtype=float)
    return sum(mutual_information(pa[:, ax], pb[:, ax], grid) for ax in axes)


def _joint_entropy_multi(code_matrix: np.ndarray) -> float:
    _, counts = np.unique(code_matrix, axis=0, return_counts=True)
    return _entropy_from_counts(counts, code_matrix.shape[0])


def co_information(signals, grid: QuantizationGrid) -> float:
    """Interaction-information generalization of MI via inclusion-exclusion over
    joint entropies of all nonempty signal subsets.

    The sign convention makes the two-signal case reduce to mutual information.
    """
    sigs = [grid.bin_indices(s) for s in signals]
    if len(sigs) < 2:
        raise ValueError("co_information needs at least 2 signals")
    n = sigs[0].size
    if n == 0:
        raise ValueError("empty sample list")
    if any(s.size != n for s in sigs):
        raise ValueError("signals must have equal length")
    matrix = np.stack(sigs, axis=1)
    total = 0.0
    for r in range(1, len(sigs) + 1):
        sign = 1.0 if r % 2 == 1 else -1.0
        for subset in combinations(range(len(sigs)), r):
            total += sign * _joint_entropy_multi(matrix[:, list(subset)])
    return total


def _sliding_counts(codes, w: int, valid: np.ndarray) -> np.ndarray:
    """Incremental sliding-window entropy over a sequence of hashable codes.

    Window at center t covers samples [t - w/2, t + w/2). Returns NaN where the
    window is incomplete or touches an invalid sample.
    """
    n = len(codes)
    half = w // 2
    out = np.full(n, np.nan)
    if n < w:
        return out
    counts: Counter = Counter()
    s = 0.0  # running sum of c * log2(c)
    bad = 0

    def add(i):
        nonlocal s, bad
        if not valid[i]:
            bad += 1
            return
        c = counts[codes[i]]
        if c > 0:
            s -= c * log2(c)
        counts[codes[i]] = c + 1
        s += (c + 1) * log2(c + 1)

    def remove(i):
        nonlocal s, bad
        if not valid[i]:
            bad -= 1
            return
        c = counts[codes[i]]
        s -= c * log2(c)
        if c == 1:
            del counts[codes[i]]
        else:
            counts[codes[i]] = c - 1
            s += (c - 1) * log2(c - 1)

    for i in range(w):
        add(i)
    for t in range(half, n - half + 1):
        if bad == 0:
            out[t] = _snap(log2(w) - s / w)
        hi = t + half
        if hi < n:
            remove(t - half)
            add(hi)
    return out


def sliding_entropy(values: np.ndarray, w: int, grid: QuantizationGrid) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    valid = np.isfinite(v)
    codes = grid.bin_indices(np.where(valid, v, 0.0))
    return _sliding_counts(codes.tolist(), w, valid)


def sliding_joint_entropy(x: np.ndarray, y: np.ndarray, w: int, grid: QuantizationGrid) -> np.ndarray:
    vx = np.asarray(x, dtype=float)
    vy = np.asarray(y, dtype=float)
    valid = np.isfinite(vx) & np.isfinite(vy)
    cx = grid.bin_indices(np.where(valid, vx, 0.0))
    cy = grid.bin_indices(np.where(valid, vy, 0.0))
    codes = list(zip(cx.tolist(), cy.tolist()))
    return _sliding_counts(codes, w, valid)


def sliding_mi(x: np.ndarray, y: np.ndarray, w: int, grid: QuantizationGrid) -> np.ndarray:
    mi = sliding_entropy(x, w, grid) + sliding_entropy(y, w, grid) - sliding_joint_entropy(x, y, w, grid)
    with np.errstate(invalid="ignore"):
        mi[mi < MI_FLOOR] = 0.0
    return mi


def sliding_mi_nd(points_a: np.ndarray, points_b: np.ndarray, axes, w: int,
                  grid: QuantizationGrid) -> np.ndarray:
    """Per-frame MI summed over the configured axes for two dense position tracks."""
    total = None
    for ax in axes:
        mi = sliding_mi(points_a[:, ax], points_b[:, ax], w, grid)
        total = mi if total is None else total + mi
    return total


def trend_sign(series: np.ndarray, t: int, horizon: int) -> str:
    """'negative' iff strictly more than half of the consecutive differences over
    the last `horizon` steps ending at frame t are decreasing; ties and missing
    history count as 'non_negative'."""
    if t - horizon < 0 or t >= len(series):
        raise ValueError(f"insufficient history for trend at frame {t}")
    window = np.asarray(series[t - horizon : t + 1], dtype=float)
    if not np.all(np.isfinite(window)):
        raise ValueError(f"series undefined within trend window ending at {t}")
    diffs = np.diff(window)
    return "negative" if np.sum(diffs < 0) > horizon / 2 else "non_negative"


def trend_sign_or_default(series: np.ndarray, t: int, horizon: int, default: str = "non_negative") -> str:
    try:
        return trend_sign(series, t, horizon)
    except ValueError:
        return default
