"""Dataset management: labels, subset manifests, splits, balanced sampling.

The Wallhack1.8k collection is organized into four subsets named
``W1.8k_XY`` where X is the scenario (L = line-of-sight, N = through-wall)
and Y the antenna system (B = biquad, P = PIFA).  Activity labels are
0 = no presence, 1 = walking, 2 = walking + arm-waving.

A subset manifest is a JSON document::

    {
      "subset": "W1.8k_LB",
      "files": [
        {"path": "...", "label": 0, "scenario": "LOS", "system": "BQ",
         "zone": null, "digest": "sha256:..."},
        ...
      ],
      "counts": {"0": 149, "1": 154, "2": 155}
    }

``digest`` is the SHA-256 of the file bytes and may be null for synthetic
placeholder manifests that only carry counts.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

from . import io as sio
from .errors import SamplerError, SchemaError, SplitError
from .rng import Stream, derive_key
from .spectro import Spectrogram

LABELS = (0, 1, 2)
LABEL_NAMES = {0: "no presence", 1: "walking", 2: "walking + arm-waving"}
SCENARIOS = ("LOS", "NLOS")
SYSTEMS = ("PIFA", "BQ")

WALLHACK_SUBSETS = ("W1.8k_LB", "W1.8k_LP", "W1.8k_NB", "W1.8k_NP")
WALLHACK_TAGS = {
    "W1.8k_LB": ("LOS", "BQ"),
    "W1.8k_LP": ("LOS", "PIFA"),
    "W1.8k_NB": ("NLOS", "BQ"),
    "W1.8k_NP": ("NLOS", "PIFA"),
}
# Published per-class sample counts (no presence, walking, walking+arm-waving).
WALLHACK_CLASS_COUNTS = {
    "W1.8k_LB": (149, 154, 155),
    "W1.8k_LP": (149, 160, 152),
    "W1.8k_NB": (148, 150, 152),
    "W1.8k_NP": (143, 147, 147),
}


@dataclass(frozen=True, eq=False)
class Sample:
    """One labeled spectrogram with its provenance tags."""

    spectrogram: Spectrogram
    label: int
    scenario: str = "LOS"
    system: str = "BQ"
    zone: int | None = None
    source_id: str = ""

    def __post_init__(self):
        if self.label not in LABELS:
            raise ValueError(f"label must be one of {LABELS}, got {self.label}")
        if self.scenario not in SCENARIOS:
            raise ValueError(f"scenario must be one of {SCENARIOS}, got {self.scenario!r}")
        if self.system not in SYSTEMS:
            raise ValueError(f"system must be one of {SYSTEMS}, got {self.system!r}")
        if self.zone is not None and not (1 <= self.zone <= 5):
            raise ValueError(f"zone must be in 1..5 or None, got {self.zone}")


@dataclass(frozen=True)
class FileEntry:
    path: str
    label: int
    scenario: str | None = None
    system: str | None = None
    zone: int | None = None
    digest: str | None = None


@dataclass(frozen=True)
class SubsetManifest:
    """File inventory plus declared per-class counts for one subset."""

    subset: str
    files: tuple[FileEntry, ...]
    counts: tuple[int, int, int]

    def total(self) -> int:
        return sum(self.counts)

    def to_json_dict(self) -> dict:
        return {
            "subset": self.subset,
            "files": [
                {"path": f.path, "label": f.label, "scenario": f.scenario,
                 "system": f.system, "zone": f.zone, "digest": f.digest}
                for f in self.files
            ],
            "counts": {str(k): self.counts[k] for k in LABELS},
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "SubsetManifest":
        try:
            files = tuple(
                FileEntry(f["path"], int(f["label"]), f.get("scenario"),
                          f.get("system"), f.get("zone"), f.get("digest"))
                for f in doc["files"]
            )
            counts = tuple(int(doc["counts"][str(k)]) for k in LABELS)
            return cls(str(doc["subset"]), files, counts)
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"invalid manifest document: {exc}") from None


def save_manifest(manifest: SubsetManifest, path) -> None:
    Path(path).write_text(json.dumps(manifest.to_json_dict(), indent=1, sort_keys=True))


def load_manifest(path) -> SubsetManifest:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from None
    return SubsetManifest.from_json_dict(doc)


def file_digest(path) -> str:
    return "sha256:" + hashlib.sha256(Path(path).read_bytes()).hexdigest()


def build_manifest(subset: str, entries: Sequence[FileEntry], root=None) -> SubsetManifest:
    """Assemble a manifest, computing digests and per-class counts from disk."""
    base = Path(root) if root is not None else Path(".")
    files = []
    counts = [0, 0, 0]
    for e in entries:
        digest = e.digest or file_digest(base / e.path)
        files.append(FileEntry(e.path, e.label, e.scenario, e.system, e.zone, digest))
        counts[e.label] += 1
    return SubsetManifest(subset, tuple(files), tuple(counts))


@dataclass
class VerificationReport:
    """Outcome of checking a manifest against its declared counts and files."""

    subset: str
    declared_counts: tuple[int, int, int]
    observed_counts: tuple[int, int, int]
    missing: list[str] = field(default_factory=list)
    digest_mismatches: list[str] = field(default_factory=list)

    @property
    def total(self) -> int:
        return sum(self.observed_counts)

    @property
    def counts_match(self) -> bool:
        return self.declared_counts == self.observed_counts

    @property
    def passed(self) -> bool:
        return self.counts_match and not self.missing and not self.digest_mismatches

    def lines(self) -> list[str]:
        out = [
            f"{self.subset}: {self.total} files, per-class "
            f"{self.observed_counts} (declared {self.declared_counts})"
        ]
        if not self.counts_match:
            out.append(f"{self.subset}: COUNT MISMATCH")
        for p in self.missing:
            out.append(f"{self.subset}: missing {p}")
        for p in self.digest_mismatches:
            out.append(f"{self.subset}: digest mismatch {p}")
        out.append(f"{self.subset}: {'PASS' if self.passed else 'FAIL'}")
        return out


def verify_manifest(manifest: SubsetManifest, root=None) -> VerificationReport:
    """Recount classes from the file list and, when ``root`` is given, check
    that every file exists and matches its recorded digest."""
    observed = [0, 0, 0]
    missing: list[str] = []
    mismatched: list[str] = []
    base = Path(root) if root is not None else None
    for entry in manifest.files:
        if entry.label in LABELS:
            observed[entry.label] += 1
        if base is not None:
            target = base / entry.path
            if not target.is_file():
                missing.append(entry.path)
            elif entry.digest is not None and file_digest(target) != entry.digest:
                mismatched.append(entry.path)
    return VerificationReport(manifest.subset, manifest.counts, tuple(observed),
                              missing, mismatched)


def synthetic_wallhack_manifests() -> dict[str, SubsetManifest]:
    """Placeholder manifests carrying the published Wallhack1.8k counts.

    File entries use synthetic paths and no digests; they stand in for the
    real dataset when it is not on disk, so count bookkeeping can still be
    verified end to end.
    """
    out = {}
    for subset in WALLHACK_SUBSETS:
        scenario, system = WALLHACK_TAGS[subset]
        files = []
        for label in LABELS:
            for i in range(WALLHACK_CLASS_COUNTS[subset][label]):
                files.append(FileEntry(
                    path=f"{subset}/{label}/{subset.lower()}_{label}_{i:04d}.csis",
                    label=label, scenario=scenario, system=system, zone=None,
                    digest=None,
                ))
        out[subset] = SubsetManifest(subset, tuple(files), WALLHACK_CLASS_COUNTS[subset])
    return out


def load_samples(manifest: SubsetManifest, root=None) -> list[Sample]:
    """Load every spectrogram file referenced by a manifest."""
    base = Path(root) if root is not None else Path(".")
    samples = []
    for entry in manifest.files:
        spec, _ = sio.read_spectrogram(base / entry.path)
        samples.append(Sample(
            spectrogram=spec,
            label=entry.label,
            scenario=entry.scenario or "LOS",
            system=entry.system or "BQ",
            zone=entry.zone,
            source_id=entry.path,
        ))
    return samples


# ---------------------------------------------------------------------------
# Splits and sampling
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SplitSpec:
    """Train/validation split parameters; rounding favors the train side."""

    train_fraction: float = 0.8
    stratified: bool = True
    split_seed: int = 0

    def __post_init__(self):
        if not (0.0 < self.train_fraction < 1.0):
            raise SplitError(f"train_fraction must be in (0, 1), got {self.train_fraction}")


def _train_count(n: int, fraction: float) -> int:
    # ceil with the float product quantized, so 0.8 * 10 stays exactly 8
    return min(math.ceil(round(fraction * n, 9)), n)


def split(samples: Sequence[Sample], spec: SplitSpec) -> tuple[list[Sample], list[Sample]]:
    """Deterministic, disjoint, exhaustive train/validation partition."""
    stream = Stream(derive_key(spec.split_seed, 0x53504C54))  # "SPLT"
    if spec.stratified:
        groups = {label: [i for i, s in enumerate(samples) if s.label == label]
                  for label in LABELS}
        empty = [label for label, idx in groups.items() if not idx]
        if empty:
            raise SplitError(f"cannot stratify: no samples for classes {empty}")
        group_lists = [groups[label] for label in LABELS]
    else:
        group_lists = [list(range(len(samples)))]
        if not group_lists[0]:
            raise SplitError("cannot split an empty sample list")

    train_idx: list[int] = []
    val_idx: list[int] = []
    for idx in group_lists:
        stream.shuffle(idx)
        k = _train_count(len(idx), spec.train_fraction)
        train_idx.extend(idx[:k])
        val_idx.extend(idx[k:])
    return [samples[i] for i in sorted(train_idx)], [samples[i] for i in sorted(val_idx)]


def balanced_batches(samples: Sequence[Sample], batch: int, stream: Stream) -> Iterator[list[int]]:
    """Yield ``ceil(N / batch)`` batches of sample indices for one epoch.

    Each draw picks an activity class uniformly, then a uniform member of
    that class, with replacement; this equalizes class exposure regardless
    of the underlying class imbalance.
    """
    if batch < 1:
        raise SamplerError(f"batch must be >= 1, got {batch}")
    by_class = {label: [i for i, s in enumerate(samples) if s.label == label]
                for label in LABELS}
    empty = [label for label, idx in by_class.items() if not idx]
    if empty:
        raise SamplerError(f"no samples for classes {empty}")
    n_batches = math.ceil(len(samples) / batch)
    for _ in range(n_batches):
        chosen = []
        for _ in range(batch):
            label = LABELS[stream.randint(0, len(LABELS) - 1)]
            members = by_class[label]
            chosen.append(members[stream.randint(0, len(members) - 1)])
        yield chosen
