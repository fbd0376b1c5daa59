"""Exception taxonomy shared across the toolkit.

Each class corresponds to one CLI failure category, so commands can map
exceptions to stable exit codes (see :mod:`csiaug.cli`).
"""


class CsiAugError(Exception):
    """Base class for all toolkit errors."""


class ParseError(CsiAugError):
    """A numeric field in a raw CSI log could not be parsed."""


class StructureError(CsiAugError):
    """A log record is structurally invalid (missing column, odd I/Q length)."""


class BoundsError(CsiAugError):
    """An index or range lies outside the addressed data."""


class ParameterError(CsiAugError):
    """An operator parameter violates its allowed range."""


class FormatError(CsiAugError):
    """A binary spectrogram file is malformed or inconsistent."""


class SchemaError(CsiAugError):
    """A configuration document is missing or mistypes required fields."""


class SamplerError(CsiAugError):
    """Batch sampling cannot proceed (e.g. an activity class has no samples)."""


class SplitError(CsiAugError):
    """A dataset split cannot satisfy its stratification contract."""
