"""Synthetic spectrogram datasets for harness checks and demos.

Two generators:

* :func:`level_dataset` -- trivially separable data where class k fills its
  own subcarrier band at a class-specific level; any working training loop
  reaches high validation accuracy on it within a few epochs.

* :func:`shifted_blob_dataset` -- a domain-gap construction.  Every sample
  contains one energy blob in each of three disjoint subcarrier bands: one
  strong blob and two weak distractors.  The class is the band of the
  strong blob, an intrinsic, time-shift-invariant cue.  In the training
  split the strong blob always sits at time offset 0 (hugging the circular
  boundary), so "which band touches the edge" is a perfectly predictive
  positional shortcut there.  In the test split the strong blob's offset is
  uniform on [0, w), which makes the shortcut worthless: whatever band
  happens to sit near the edge is uninformative.  A classifier made
  effectively shift-invariant (e.g. by training under random circular
  rotations) must rely on the strong-vs-weak distinction and keeps its
  accuracy; a classifier trained on the raw data tends to bind the class
  to the edge position and drops sharply.

Dataset noise uses numpy's PCG64 generator seeded through the package key
derivation, so generated fixtures are reproducible.
"""

from __future__ import annotations

import numpy as np

from .data import Sample
from .rng import derive_key
from .spectro import Spectrogram


def _background(rng, w, h, noise):
    return np.abs(rng.normal(0.0, noise, size=(w, h)))


def level_dataset(seed: int, n_per_class: int = 20, w: int = 64, h: int = 16,
                  noise: float = 0.05) -> list[Sample]:
    """Linearly separable three-class data: class k lights its own band."""
    rng = np.random.Generator(np.random.PCG64(derive_key(seed, 0x4C56)))
    bands = class_bands(h)
    samples = []
    for label in (0, 1, 2):
        lo, hi = bands[label]
        for i in range(n_per_class):
            values = _background(rng, w, h, noise)
            values[:, lo:hi] += label + 1.0
            samples.append(Sample(Spectrogram(values), label,
                                  source_id=f"level-{label}-{i}"))
    return samples


def class_bands(h: int, band_height: int | None = None) -> list[tuple[int, int]]:
    """Three disjoint subcarrier bands, one per class."""
    if band_height is None:
        band_height = max(2, h // 6)
    centers = [int(round((2 * k + 1) * h / 6)) for k in range(3)]
    return [(max(0, c - band_height // 2), min(h, c - band_height // 2 + band_height))
            for c in centers]


def _blob(w: int, h: int, band: tuple[int, int], offset: int,
          amp: float, t_sigma: float) -> np.ndarray:
    """A band-limited energy bump, circularly centered at time ``offset``."""
    t = np.arange(w, dtype=np.float64)
    dist = np.minimum(t, w - t)  # circular distance from column 0
    profile = amp * np.exp(-0.5 * (dist / t_sigma) ** 2)
    values = np.zeros((w, h))
    lo, hi = band
    values[:, lo:hi] = profile[:, None]
    return np.roll(values, offset, axis=0)


def _separated_offsets(rng, w: int, anchor: int, n_free: int, min_sep: int) -> list[int]:
    """``n_free`` offsets keeping circular distance >= min_sep from the anchor
    and from each other (rejection sampling)."""
    while True:
        offsets = [anchor] + [int(rng.integers(0, w)) for _ in range(n_free)]
        ok = True
        for i in range(len(offsets)):
            for j in range(i + 1, len(offsets)):
                d = abs(offsets[i] - offsets[j])
                if min(d, w - d) < min_sep:
                    ok = False
        if ok:
            return offsets[1:]


def _blob_sample(rng, label: int, signal_offset: int, w: int, h: int,
                 noise: float, amp: float, distractor_amp: float,
                 t_sigma: float, min_sep: int) -> np.ndarray:
    bands = class_bands(h)
    others = [k for k in (0, 1, 2) if k != label]
    d_offsets = _separated_offsets(rng, w, signal_offset, 2, min_sep)
    values = _background(rng, w, h, noise)
    values += _blob(w, h, bands[label], signal_offset, amp, t_sigma)
    for k, off in zip(others, d_offsets):
        values += _blob(w, h, bands[k], off, distractor_amp, t_sigma)
    return values


def shifted_blob_dataset(seed: int, n_train_per_class: int = 40,
                         n_test_per_class: int = 60, w: int = 64, h: int = 12,
                         noise: float = 0.35, amp: float = 1.0,
                         distractor_amp: float = 0.6, t_sigma: float = 3.0,
                         train_offset: int = 0, min_sep: int | None = None):
    """Build (train, test) splits of the position-shortcut dataset.

    Train: the class-evidence (strong) blob sits at ``train_offset``.
    Test: its offset is integer-uniform on [0, w) with circular wrap.
    Distractor blobs sit at random offsets in both splits.
    """
    rng = np.random.Generator(np.random.PCG64(derive_key(seed, 0x5342)))
    if min_sep is None:
        min_sep = int(round(4 * t_sigma))

    train = []
    for label in (0, 1, 2):
        for i in range(n_train_per_class):
            values = _blob_sample(rng, label, train_offset, w, h, noise, amp,
                                  distractor_amp, t_sigma, min_sep)
            train.append(Sample(Spectrogram(values), label,
                                source_id=f"blob-train-{label}-{i}"))
    test = []
    for label in (0, 1, 2):
        for i in range(n_test_per_class):
            offset = int(rng.integers(0, w))
            values = _blob_sample(rng, label, offset, w, h, noise, amp,
                                  distractor_amp, t_sigma, min_sep)
            test.append(Sample(Spectrogram(values), label,
                               source_id=f"blob-test-{label}-{i}"))
    return train, test
