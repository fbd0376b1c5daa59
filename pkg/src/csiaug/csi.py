"""Raw CSI packet log parsing and complex-to-amplitude conversion.

Input logs are delimiter-separated text, one received packet per line, with
the raw subcarrier I/Q values embedded as a bracketed integer list (the
format ESP32 CSI dumps typically use).  Because captured releases vary, the
column layout, delimiter, and I/Q component order are all described by a
:class:`ColumnMapping` rather than hard-coded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BoundsError, ParseError, StructureError
from .spectro import DEFAULT_RATE_HZ, AmplitudeSeries

IQ_IMAG_REAL = "imag_real"
IQ_REAL_IMAG = "real_imag"


@dataclass(frozen=True)
class ColumnMapping:
    """Where each field lives in a log line.

    ``csi`` names the column holding the bracketed I/Q array; ``rssi`` may
    be None when the log carries no signal-strength column.  ``iq_order``
    states which component comes first inside each interleaved pair; it is
    (imaginary, real) in common ESP32 dumps, which is the default here.
    """

    delimiter: str = ","
    timestamp: int = 0
    seq: int = 1
    rssi: int | None = 2
    csi: int = 3
    iq_order: str = IQ_IMAG_REAL
    has_header: bool = False

    def __post_init__(self):
        if self.iq_order not in (IQ_IMAG_REAL, IQ_REAL_IMAG):
            raise ValueError(f"iq_order must be imag_real or real_imag, got {self.iq_order!r}")
        if len(self.delimiter) != 1:
            raise ValueError(f"delimiter must be one character, got {self.delimiter!r}")


DEFAULT_MAPPING = ColumnMapping()


@dataclass(frozen=True, eq=False)
class CsiRecord:
    """One received CSI packet.

    ``iq`` has shape (pairs, 2) holding (imaginary, real) signed integers.
    A full capture carries at least 52 usable pairs per packet, but the
    parser accepts any even-length array; pair availability is checked when
    a subcarrier selection is applied.
    """

    timestamp_ms: int
    seq: int
    rssi_dbm: int | None
    iq: np.ndarray

    def __post_init__(self):
        arr = np.array(self.iq, dtype=np.int64, copy=True)
        if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 1:
            raise StructureError(f"iq must have shape (pairs, 2), got {arr.shape}")
        arr.flags.writeable = False
        object.__setattr__(self, "iq", arr)

    @property
    def n_pairs(self) -> int:
        return self.iq.shape[0]


@dataclass(frozen=True)
class SubcarrierSelection:
    """An ordered choice of 52 raw I/Q slots to keep, lowest frequency first."""

    indices: tuple[int, ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))
        if len(self.indices) != 52:
            raise ValueError(f"selection needs exactly 52 indices, got {len(self.indices)}")
        if len(set(self.indices)) != 52:
            raise ValueError("selection indices must be distinct")
        if min(self.indices) < 0:
            raise ValueError("selection indices must be non-negative")


# The 64-slot L-LTF layout stores subcarriers in natural FFT order: slots
# 0..31 hold subcarriers 0..+31 and slots 32..63 hold -32..-1.  The 52
# usable (non-null) subcarriers are -26..-1 and +1..+26; DC (slot 0), the
# guard bands, and slot 32 are null.  Ordered low frequency to high:
LLTF_64 = SubcarrierSelection(tuple(range(38, 64)) + tuple(range(1, 27)), name="lltf64")

SELECTION_PRESETS = {"lltf64": LLTF_64}


def _split_outside_brackets(line: str, delimiter: str) -> list[str]:
    """Split on the delimiter, but never inside a [...] run."""
    fields, buf, depth = [], [], 0
    for ch in line:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth = max(depth - 1, 0)
        if ch == delimiter and depth == 0:
            fields.append("".join(buf))
            buf = []
        else:
            buf.append(ch)
    fields.append("".join(buf))
    return fields


def _parse_int(text: str, what: str, line_no=None) -> int:
    loc = f"line {line_no}: " if line_no is not None else ""
    try:
        value = float(text.strip())
    except ValueError:
        raise ParseError(f"{loc}malformed {what} field {text.strip()!r}") from None
    if not math.isfinite(value):
        raise ParseError(f"{loc}non-finite {what} field {text.strip()!r}")
    return int(round(value))


def parse_csi_line(line: str, mapping: ColumnMapping = DEFAULT_MAPPING, line_no: int | None = None) -> CsiRecord:
    """Parse one log line into a :class:`CsiRecord`.

    Raises :class:`ParseError` for malformed numeric fields and
    :class:`StructureError` for missing columns or an odd-length I/Q array.
    """
    loc = f"line {line_no}: " if line_no is not None else ""
    fields = _split_outside_brackets(line.rstrip("\n"), mapping.delimiter)
    needed = [mapping.timestamp, mapping.seq, mapping.csi]
    if mapping.rssi is not None:
        needed.append(mapping.rssi)
    if max(needed) >= len(fields):
        raise StructureError(
            f"{loc}expected at least {max(needed) + 1} columns, got {len(fields)}"
        )

    timestamp_ms = _parse_int(fields[mapping.timestamp], "timestamp", line_no)
    seq = _parse_int(fields[mapping.seq], "seq", line_no)
    rssi_dbm = None
    if mapping.rssi is not None:
        raw = fields[mapping.rssi].strip()
        if raw:
            rssi_dbm = _parse_int(raw, "rssi", line_no)

    raw_csi = fields[mapping.csi].strip().strip('"')
    if not (raw_csi.startswith("[") and raw_csi.endswith("]")):
        raise StructureError(f"{loc}csi column is not a bracketed array: {raw_csi[:32]!r}")
    body = raw_csi[1:-1].replace(",", " ").split()
    if not body:
        raise StructureError(f"{loc}csi array is empty")
    if len(body) % 2 != 0:
        raise StructureError(f"{loc}csi array has odd length {len(body)}")
    try:
        flat = [int(tok) for tok in body]
    except ValueError as exc:
        raise ParseError(f"{loc}malformed csi integer: {exc}") from None

    pairs = np.array(flat, dtype=np.int64).reshape(-1, 2)
    if mapping.iq_order == IQ_REAL_IMAG:
        pairs = pairs[:, ::-1]
    return CsiRecord(timestamp_ms, seq, rssi_dbm, pairs)


def format_csi_line(record: CsiRecord, mapping: ColumnMapping = DEFAULT_MAPPING) -> str:
    """Serialize a record back to one log line under the given mapping."""
    width = max(mapping.timestamp, mapping.seq, mapping.csi,
                mapping.rssi if mapping.rssi is not None else 0) + 1
    fields = [""] * width
    fields[mapping.timestamp] = str(record.timestamp_ms)
    fields[mapping.seq] = str(record.seq)
    if mapping.rssi is not None and record.rssi_dbm is not None:
        fields[mapping.rssi] = str(record.rssi_dbm)
    iq = record.iq if mapping.iq_order == IQ_IMAG_REAL else record.iq[:, ::-1]
    fields[mapping.csi] = "[" + " ".join(str(int(v)) for v in iq.reshape(-1)) + "]"
    return mapping.delimiter.join(fields)


@dataclass
class LogReport:
    """Bookkeeping from reading one capture log."""

    n_lines: int = 0
    n_records: int = 0
    non_monotonic: int = 0

    def warnings(self) -> list[str]:
        out = []
        if self.non_monotonic:
            out.append(f"{self.non_monotonic} packets with non-increasing timestamps")
        return out


def read_csi_log(lines, mapping: ColumnMapping = DEFAULT_MAPPING) -> tuple[list[CsiRecord], LogReport]:
    """Parse an iterable of log lines (e.g. an open file).

    Blank lines are skipped.  Out-of-order timestamps are counted in the
    report rather than treated as fatal, since real captures contain
    reordered packets.
    """
    records: list[CsiRecord] = []
    report = LogReport()
    last_ts = None
    start = 2 if mapping.has_header else 1
    for line_no, line in enumerate(lines, start=1):
        report.n_lines += 1
        if line_no < start or not line.strip():
            continue
        record = parse_csi_line(line, mapping, line_no=line_no)
        if last_ts is not None and record.timestamp_ms < last_ts:
            report.non_monotonic += 1
        last_ts = record.timestamp_ms
        records.append(record)
    report.n_records = len(records)
    return records, report


def amplitudes(record: CsiRecord, sel: SubcarrierSelection) -> np.ndarray:
    """Per-subcarrier amplitudes ``sqrt(imag^2 + real^2)`` for the selected slots."""
    idx = np.asarray(sel.indices, dtype=np.int64)
    if idx.max() >= record.n_pairs:
        raise BoundsError(
            f"selection {sel.name or sel.indices[:4]} needs pair {int(idx.max())} "
            f"but record has {record.n_pairs}"
        )
    pairs = record.iq[idx].astype(np.float64)
    return np.sqrt(pairs[:, 0] ** 2 + pairs[:, 1] ** 2)


def to_amplitude_series(records, sel: SubcarrierSelection, rate_hz: float = DEFAULT_RATE_HZ) -> AmplitudeSeries:
    """Stack per-packet amplitude vectors into a time-ordered series."""
    if not records:
        raise StructureError("no records to convert")
    rows = np.stack([amplitudes(r, sel) for r in records])
    return AmplitudeSeries(rows, rate_hz)
