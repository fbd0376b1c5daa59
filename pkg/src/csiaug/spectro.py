"""Amplitude time series and fixed-size spectrogram segmentation.

A spectrogram here is a ``w x h`` matrix: ``w`` time steps (one per CSI
packet) by ``h`` subcarriers, time-major.  Values are non-negative
amplitudes.  The defaults (400 x 52) correspond to roughly four seconds of
packets at the nominal 100 Hz send rate over the 52 usable L-LTF
subcarriers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BoundsError

DEFAULT_WIDTH = 400
DEFAULT_HEIGHT = 52
DEFAULT_RATE_HZ = 100.0


def _amplitude_matrix(values, name: str) -> np.ndarray:
    """Validate and freeze a 2-D non-negative float64 matrix."""
    arr = np.array(values, dtype=np.float64, order="C", copy=True)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must be non-empty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    if np.any(arr < 0.0):
        raise ValueError(f"{name} contains negative values")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Spectrogram:
    """A ``w x h`` (time x subcarrier) block of non-negative amplitudes."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _amplitude_matrix(self.values, "spectrogram"))

    @property
    def w(self) -> int:
        """Number of time columns."""
        return self.values.shape[0]

    @property
    def h(self) -> int:
        """Number of subcarrier rows."""
        return self.values.shape[1]


@dataclass(frozen=True, eq=False)
class AmplitudeSeries:
    """Time-ordered per-packet amplitude vectors plus the nominal packet rate."""

    rows: np.ndarray
    rate_hz: float = DEFAULT_RATE_HZ

    def __post_init__(self):
        object.__setattr__(self, "rows", _amplitude_matrix(self.rows, "amplitude series"))
        if not (self.rate_hz > 0):
            raise ValueError(f"rate_hz must be positive, got {self.rate_hz}")

    def __len__(self) -> int:
        return self.rows.shape[0]


def trim(series: AmplitudeSeries, start: int, end: int) -> AmplitudeSeries:
    """Keep rows ``[start, end)``; the packet rate is preserved.

    Trim indices typically come from an external annotation pass (e.g.
    camera footage aligned with the capture); they are not derived here.
    """
    n = len(series)
    if not (0 <= start < end <= n):
        raise BoundsError(f"trim range [{start}, {end}) invalid for {n} rows")
    return AmplitudeSeries(series.rows[start:end], series.rate_hz)


def segment(series: AmplitudeSeries, window: int = DEFAULT_WIDTH, hop: int | None = None) -> list[Spectrogram]:
    """Cut a series into fixed-width spectrograms.

    Windows start at offsets 0, hop, 2*hop, ... and any trailing remainder
    shorter than ``window`` is dropped.  The default hop equals the window,
    i.e. non-overlapping segments.
    """
    if window < 1:
        raise BoundsError(f"window must be >= 1, got {window}")
    if hop is None:
        hop = window
    if hop < 1:
        raise BoundsError(f"hop must be >= 1, got {hop}")
    out = []
    offset = 0
    n = len(series)
    while offset + window <= n:
        out.append(Spectrogram(series.rows[offset:offset + window]))
        offset += hop
    return out
