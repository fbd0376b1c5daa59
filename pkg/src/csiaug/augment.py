"""Seeded spectrogram augmentation operators and the gated pipeline.

Four operators, each split into a deterministic core and a random wrapper:

* ``circular_rotation`` -- shift all time columns by ``n`` positions along
  positive time, wrapping at the boundary; ``n`` drawn integer-uniform on
  ``{1, ..., w}``.
* ``resized_crop`` -- either crop ``c`` time columns and stretch them back
  to width ``w`` (slow-down), or compress the full width down to ``c``
  columns and tile the result circularly back to ``w`` (speed-up);
  ``c`` drawn by rounding a real uniform on ``[w/2, w]``.
* ``amplitude`` -- multiply each subcarrier row by its own factor, drawn
  uniform on ``[0.75, 1.25]``.
* ``contrast`` -- scale each subcarrier row's deviation from its time mean
  by a per-row factor from the same distribution, clamping at zero.

Pipeline semantics: the per-sample stream is ``Stream(derive_key(
global_seed, epoch, sample_index))`` (see :mod:`csiaug.rng` for the exact
mixing function).  For every operator in order, the gate and all parameters
are always drawn -- a fixed draw count per operator -- and the operator is
applied only when ``gate < gate_p``.  Always consuming the draws keeps the
streams of different pipeline variants aligned: dropping or never-applying
a later operator cannot change what an earlier one draws, and two arms that
share a prefix of operators see identical draws for that prefix.

Resampling convention (both resized-crop modes): output column ``j`` of
``m`` columns samples input position ``j * (c - 1) / (m - 1)`` from a
segment of length ``c`` (position 0 when ``m == 1``), linearly
interpolated.  Endpoints align exactly, so a full-width crop is the
identity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ParameterError
from .rng import Stream, derive_key
from .spectro import Spectrogram

KIND_ROTATION = "circular_rotation"
KIND_RESIZED_CROP = "resized_crop"
KIND_AMPLITUDE = "amplitude"
KIND_CONTRAST = "contrast"

# Canonical composition order: geometric operators before photometric ones.
COMBINED_ORDER = (KIND_ROTATION, KIND_RESIZED_CROP, KIND_AMPLITUDE, KIND_CONTRAST)
KINDS = frozenset(COMBINED_ORDER)

MODE_CROP_STRETCH = "crop_stretch"
MODE_COMPRESS_TILE = "compress_tile"
# Literal down-then-up resampling; a near-identity blur, kept as an
# alternative reading of "compress and re-scale" selectable per pipeline.
MODE_COMPRESS_STRETCH = "compress_stretch"

COMPRESS_MODES = (MODE_COMPRESS_TILE, MODE_COMPRESS_STRETCH)

DEFAULT_GATE_P = 0.5
DEFAULT_FACTOR_LO = 0.75
DEFAULT_FACTOR_HI = 1.25


@dataclass(frozen=True)
class AugmentationSpec:
    """One operator with its gate probability and factor bounds.

    ``param_lo``/``param_hi`` default to the operator's standard range when
    left as None: ``(1, w)`` for rotation counts, ``(w/2, w)`` for the
    resized-crop extent, and ``(0.75, 1.25)`` for amplitude and contrast
    factors.
    """

    kind: str
    gate_p: float = DEFAULT_GATE_P
    param_lo: float | None = None
    param_hi: float | None = None
    compress_mode: str = MODE_COMPRESS_TILE  # resized_crop only

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown augmentation kind {self.kind!r}")
        if not (0.0 <= self.gate_p <= 1.0):
            raise ParameterError(f"gate_p must be in [0, 1], got {self.gate_p}")
        if (self.param_lo is None) != (self.param_hi is None):
            raise ParameterError("param_lo and param_hi must be set together")
        if self.param_lo is not None and not (self.param_lo <= self.param_hi):
            raise ParameterError(
                f"param_lo must be <= param_hi, got ({self.param_lo}, {self.param_hi})"
            )
        if self.compress_mode not in COMPRESS_MODES:
            raise ParameterError(f"compress_mode must be one of {COMPRESS_MODES}")

    def bounds(self, w: int) -> tuple[float, float]:
        """Resolve the factor bounds for a spectrogram of width ``w``."""
        if self.param_lo is not None:
            return float(self.param_lo), float(self.param_hi)
        if self.kind == KIND_ROTATION:
            return 1.0, float(w)
        if self.kind == KIND_RESIZED_CROP:
            return w / 2.0, float(w)
        return DEFAULT_FACTOR_LO, DEFAULT_FACTOR_HI


@dataclass(frozen=True)
class PipelineSpec:
    """Ordered operator list plus the 64-bit seed all sample streams derive from."""

    operators: tuple[AugmentationSpec, ...] = ()
    global_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "operators", tuple(self.operators))
        kinds = [op.kind for op in self.operators]
        if len(set(kinds)) != len(kinds):
            raise ParameterError(f"duplicate operator kinds in pipeline: {kinds}")

    @classmethod
    def from_kinds(cls, kinds, global_seed: int = 0, gate_p: float = DEFAULT_GATE_P) -> "PipelineSpec":
        """Build a pipeline in the canonical combined order from a set of kinds."""
        wanted = set(kinds)
        unknown = wanted - KINDS
        if unknown:
            raise ParameterError(f"unknown augmentation kinds: {sorted(unknown)}")
        ops = tuple(AugmentationSpec(k, gate_p=gate_p) for k in COMBINED_ORDER if k in wanted)
        return cls(ops, global_seed)

    def reseeded(self, global_seed: int) -> "PipelineSpec":
        return replace(self, global_seed=global_seed)


@dataclass(frozen=True)
class OpDraw:
    """Record of one operator application: gate draw, parameter draws, outcome."""

    kind: str
    gate: float
    applied: bool
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class DrawLog:
    """Per-sample record of all draws; replaying it reproduces the output bit-exactly."""

    ops: tuple[OpDraw, ...] = ()

    def to_json_line(self, sample_key=None) -> str:
        entry = {"ops": [
            {"kind": op.kind, "gate": op.gate, "applied": op.applied, "params": op.params}
            for op in self.ops
        ]}
        if sample_key is not None:
            entry["key"] = list(sample_key)
        return json.dumps(entry, sort_keys=True)

    @classmethod
    def from_json_line(cls, line: str) -> "DrawLog":
        entry = json.loads(line)
        return cls(tuple(
            OpDraw(op["kind"], op["gate"], op["applied"], op["params"])
            for op in entry["ops"]
        ))


# ---------------------------------------------------------------------------
# Deterministic cores
# ---------------------------------------------------------------------------

def circular_rotate(x: Spectrogram, n: int) -> Spectrogram:
    """Shift time columns so output column ``(t + n) mod w`` holds input column ``t``."""
    w = x.w
    if not (0 <= n <= w):
        raise ParameterError(f"rotation count {n} outside [0, {w}]")
    if n == 0 or n == w:
        return Spectrogram(x.values)
    return Spectrogram(np.roll(x.values, n, axis=0))


def _resample_time(values: np.ndarray, m: int) -> np.ndarray:
    """Linearly resample along the time axis to ``m`` columns, endpoints aligned.

    Output column ``j`` samples position ``j * (c - 1) / (m - 1)``; integer
    positions are copied exactly, so ``m == c`` is the identity.
    """
    c = values.shape[0]
    if m == 1:
        return values[0:1].copy()
    if c == 1:
        return np.repeat(values, m, axis=0)
    pos = (np.arange(m, dtype=np.float64) * (c - 1)) / (m - 1)
    lo = np.minimum(pos.astype(np.int64), c - 2)
    frac = pos - lo
    return values[lo] * (1.0 - frac)[:, None] + values[lo + 1] * frac[:, None]


def resized_crop(x: Spectrogram, mode: str, c: int, start: int = 0) -> Spectrogram:
    """Crop-and-stretch or compress-and-tile along time, output width exactly ``w``."""
    w = x.w
    c_min = (w + 1) // 2
    if not (c_min <= c <= w):
        raise ParameterError(f"crop extent {c} outside [{c_min}, {w}] for width {w}")
    if mode == MODE_CROP_STRETCH:
        if not (0 <= start <= w - c):
            raise ParameterError(f"crop start {start} outside [0, {w - c}]")
        return Spectrogram(_resample_time(x.values[start:start + c], w))
    if mode == MODE_COMPRESS_TILE:
        compressed = _resample_time(x.values, c)
        return Spectrogram(compressed[np.arange(w) % c])
    if mode == MODE_COMPRESS_STRETCH:
        return Spectrogram(_resample_time(_resample_time(x.values, c), w))
    raise ParameterError(f"unknown resized_crop mode {mode!r}")


def amplitude_scale(x: Spectrogram, factors) -> Spectrogram:
    """Multiply each subcarrier row by its own positive factor."""
    f = _check_factors(factors, x.h)
    return Spectrogram(x.values * f[None, :])


def contrast_scale(x: Spectrogram, factors) -> Spectrogram:
    """Scale each row's deviation from its time mean, clamped below at zero."""
    f = _check_factors(factors, x.h)
    mu = x.values.mean(axis=0)
    out = mu[None, :] + f[None, :] * (x.values - mu[None, :])
    return Spectrogram(np.maximum(out, 0.0))


def _check_factors(factors, h: int) -> np.ndarray:
    f = np.asarray(factors, dtype=np.float64)
    if f.shape != (h,):
        raise ParameterError(f"need {h} per-row factors, got shape {f.shape}")
    if not np.all(np.isfinite(f)) or np.any(f <= 0.0):
        raise ParameterError("factors must be finite and > 0")
    return f


# ---------------------------------------------------------------------------
# Random wrappers (parameter draws are exposed separately so their
# distributions can be tested without touching pixel data)
# ---------------------------------------------------------------------------

def draw_rotation(stream: Stream, lo: int, hi: int) -> int:
    """Integer uniform rotation count on ``{lo, ..., hi}``."""
    return stream.randint(lo, hi)


def draw_resized_crop(stream: Stream, w: int, lo: float, hi: float,
                      compress_mode: str = MODE_COMPRESS_TILE):
    """Draw (mode, raw extent, rounded extent, start) for a resized crop.

    Draw order is fixed: mode coin, extent uniform on ``[lo, hi]``, start.
    The raw extent rounds half-up to the nearest integer and clamps into
    ``[ceil(w/2), w]``.  The start column is always drawn (for stream
    alignment) even though only crop-stretch mode uses it.
    """
    mode_draw = stream.uniform()
    mode = MODE_CROP_STRETCH if mode_draw < 0.5 else compress_mode
    c_real = stream.uniform(lo, hi)
    c_min = (w + 1) // 2
    c = min(max(int(np.floor(c_real + 0.5)), c_min), w)
    start = stream.randint(0, w - c)
    return mode, mode_draw, c_real, c, start


def random_circular_rotation(x: Spectrogram, stream: Stream) -> Spectrogram:
    """Rotate by ``n`` drawn integer-uniform on ``{1, ..., w}``."""
    return circular_rotate(x, draw_rotation(stream, 1, x.w))


def random_resized_crop(x: Spectrogram, stream: Stream) -> Spectrogram:
    """Apply a resized crop with extent drawn uniform on ``[w/2, w]``."""
    mode, _, _, c, start = draw_resized_crop(stream, x.w, x.w / 2.0, float(x.w))
    return resized_crop(x, mode, c, start)


def random_channel_factors(stream: Stream, h: int, lo: float, hi: float) -> np.ndarray:
    """``h`` independent uniforms on ``[lo, hi]``, consumed in row order."""
    if not (0.0 < lo <= hi):
        raise ParameterError(f"factor bounds must satisfy 0 < lo <= hi, got ({lo}, {hi})")
    return np.array([stream.uniform(lo, hi) for _ in range(h)], dtype=np.float64)


# ---------------------------------------------------------------------------
# Gated pipeline
# ---------------------------------------------------------------------------

def sample_stream(global_seed: int, epoch: int, index: int) -> Stream:
    """Per-sample stream for augmentation draws: key = derive_key(seed, epoch, index)."""
    return Stream(derive_key(global_seed, epoch, index))


def apply_operator(x: Spectrogram, spec: AugmentationSpec, stream: Stream) -> tuple[Spectrogram, OpDraw]:
    """Draw the gate and all parameters, then apply the operator if gated in."""
    gate = stream.uniform()
    lo, hi = spec.bounds(x.w)
    applied = gate < spec.gate_p

    if spec.kind == KIND_ROTATION:
        n = draw_rotation(stream, int(lo), int(hi))
        params = {"n": n}
        if applied:
            x = circular_rotate(x, n)
    elif spec.kind == KIND_RESIZED_CROP:
        mode, mode_draw, c_real, c, start = draw_resized_crop(
            stream, x.w, lo, hi, compress_mode=spec.compress_mode)
        params = {"mode": mode, "mode_draw": mode_draw, "c_real": c_real, "c": c, "start": start}
        if applied:
            x = resized_crop(x, mode, c, start)
    elif spec.kind == KIND_AMPLITUDE:
        factors = random_channel_factors(stream, x.h, lo, hi)
        params = {"factors": factors.tolist()}
        if applied:
            x = amplitude_scale(x, factors)
    else:  # KIND_CONTRAST
        factors = random_channel_factors(stream, x.h, lo, hi)
        params = {"factors": factors.tolist()}
        if applied:
            x = contrast_scale(x, factors)

    return x, OpDraw(spec.kind, gate, applied, params)


def apply_pipeline(x: Spectrogram, spec: PipelineSpec, sample_key: tuple[int, int]) -> tuple[Spectrogram, DrawLog]:
    """Run the gated pipeline on one sample.

    ``sample_key`` is (epoch, sample index); together with the pipeline's
    global seed it selects the per-sample stream.  An empty pipeline is the
    identity.
    """
    epoch, index = sample_key
    stream = sample_stream(spec.global_seed, epoch, index)
    out = x
    entries = []
    for op in spec.operators:
        out, entry = apply_operator(out, op, stream)
        entries.append(entry)
    return out, DrawLog(tuple(entries))


def replay(x: Spectrogram, log: DrawLog) -> Spectrogram:
    """Re-apply the operators recorded in a draw log, bit-exactly."""
    out = x
    for op in log.ops:
        if not op.applied:
            continue
        if op.kind == KIND_ROTATION:
            out = circular_rotate(out, op.params["n"])
        elif op.kind == KIND_RESIZED_CROP:
            out = resized_crop(out, op.params["mode"], op.params["c"], op.params["start"])
        elif op.kind == KIND_AMPLITUDE:
            out = amplitude_scale(out, op.params["factors"])
        elif op.kind == KIND_CONTRAST:
            out = contrast_scale(out, op.params["factors"])
        else:
            raise ParameterError(f"unknown kind in draw log: {op.kind!r}")
    return out
