"""Run configuration: one JSON document per invocation, validated up front.

Top-level keys (each subcommand reads the sections it needs)::

    {
      "seed": 1234,                # required for augment/ablate
      "out": "results",            # default output directory
      "ingest": {...},             # see IngestConfig
      "pipeline": {...},           # operator list for cmd_augment
      "dataset": {"root": ".", "manifests": {"W1.8k_LB": "path.json"}},
      "experiment": {...}          # see build_experiment
    }

Validation collects every offending field and reports them together in one
SchemaError, so a bad config fails with a complete list instead of
one-field-at-a-time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .augment import DEFAULT_GATE_P, KINDS, AugmentationSpec, PipelineSpec
from .csi import SELECTION_PRESETS, ColumnMapping, SubcarrierSelection
from .errors import SchemaError
from .harness import STANDARD_ARM_KINDS, Arm, ExperimentSpec
from .model import ClassifierConfig
from .spectro import DEFAULT_RATE_HZ, DEFAULT_WIDTH


class _Check:
    """Collects schema problems as 'field.path: problem' strings."""

    def __init__(self):
        self.problems: list[str] = []

    def fail(self, path: str, problem: str):
        self.problems.append(f"{path}: {problem}")

    def expect(self, doc: dict, path: str, key: str, types, required=True, default=None):
        if key not in doc:
            if required:
                self.fail(f"{path}.{key}" if path else key, "missing")
            return default
        value = doc[key]
        if types is not None and not isinstance(value, types):
            self.fail(f"{path}.{key}" if path else key,
                      f"expected {getattr(types, '__name__', types)}, got {type(value).__name__}")
            return default
        return value

    def raise_if_failed(self):
        if self.problems:
            raise SchemaError("invalid config: " + "; ".join(self.problems))


@dataclass
class IngestInput:
    path: Path
    label: int
    scenario: str | None = None
    system: str | None = None
    zone: int | None = None
    trim: tuple[int, int] | None = None


@dataclass
class IngestConfig:
    mapping: ColumnMapping
    selection: SubcarrierSelection
    rate_hz: float = DEFAULT_RATE_HZ
    window: int = DEFAULT_WIDTH
    hop: int | None = None
    subset: str = "ingested"
    inputs: list[IngestInput] = field(default_factory=list)


@dataclass
class DatasetConfig:
    # Explicit base for manifest file entries; when None, entries resolve
    # against each manifest's own directory.
    root: Path | None
    manifests: dict  # subset name -> manifest path


@dataclass
class RunConfig:
    seed: int | None = None
    out: Path | None = None
    ingest: IngestConfig | None = None
    pipeline: PipelineSpec | None = None
    dataset: DatasetConfig | None = None
    experiment: ExperimentSpec | None = None


def _parse_mapping(doc: dict, check: _Check) -> ColumnMapping:
    if doc is None:
        return ColumnMapping()
    kwargs = {}
    for key, caster in (("delimiter", str), ("timestamp", int), ("seq", int),
                        ("csi", int), ("iq_order", str), ("has_header", bool)):
        if key in doc:
            kwargs[key] = doc[key]
    if "rssi" in doc:
        kwargs["rssi"] = doc["rssi"]  # may be null
    try:
        return ColumnMapping(**kwargs)
    except (TypeError, ValueError) as exc:
        check.fail("ingest.mapping", str(exc))
        return ColumnMapping()


def _parse_selection(value, check: _Check) -> SubcarrierSelection:
    if value is None:
        return SELECTION_PRESETS["lltf64"]
    if isinstance(value, str):
        if value not in SELECTION_PRESETS:
            check.fail("ingest.selection", f"unknown preset {value!r}")
            return SELECTION_PRESETS["lltf64"]
        return SELECTION_PRESETS[value]
    try:
        return SubcarrierSelection(tuple(value), name="custom")
    except (TypeError, ValueError) as exc:
        check.fail("ingest.selection", str(exc))
        return SELECTION_PRESETS["lltf64"]


def _parse_ingest(doc: dict, check: _Check, base: Path) -> IngestConfig:
    mapping = _parse_mapping(check.expect(doc, "ingest", "mapping", dict, required=False), check)
    selection = _parse_selection(doc.get("selection"), check)
    rate_hz = check.expect(doc, "ingest", "rate_hz", (int, float), required=False, default=DEFAULT_RATE_HZ)
    window = check.expect(doc, "ingest", "window", int, required=False, default=DEFAULT_WIDTH)
    hop = check.expect(doc, "ingest", "hop", int, required=False)
    subset = check.expect(doc, "ingest", "subset", str, required=False, default="ingested")
    inputs = []
    for i, item in enumerate(doc.get("inputs", [])):
        path_str = check.expect(item, f"ingest.inputs[{i}]", "path", str)
        label = check.expect(item, f"ingest.inputs[{i}]", "label", int)
        if path_str is None or label is None:
            continue
        path = (base / path_str).resolve() if not Path(path_str).is_absolute() else Path(path_str)
        if not path.is_file():
            check.fail(f"ingest.inputs[{i}].path", f"no such file: {path}")
        trim = item.get("trim")
        if trim is not None:
            if (not isinstance(trim, list) or len(trim) != 2
                    or not all(isinstance(v, int) for v in trim)):
                check.fail(f"ingest.inputs[{i}].trim", "expected [start, end] integers")
                trim = None
            else:
                trim = (trim[0], trim[1])
        inputs.append(IngestInput(path, label, item.get("scenario"), item.get("system"),
                                  item.get("zone"), trim))
    return IngestConfig(mapping, selection, float(rate_hz), window, hop, subset, inputs)


def parse_pipeline(doc: dict, check: _Check, seed: int = 0, path: str = "pipeline") -> PipelineSpec:
    ops = []
    for i, item in enumerate(doc.get("operators", [])):
        kind = check.expect(item, f"{path}.operators[{i}]", "kind", str)
        if kind is None:
            continue
        if kind not in KINDS:
            check.fail(f"{path}.operators[{i}].kind", f"unknown kind {kind!r}")
            continue
        kwargs = {"kind": kind}
        if "gate_p" in item:
            kwargs["gate_p"] = item["gate_p"]
        if "param_lo" in item or "param_hi" in item:
            kwargs["param_lo"] = item.get("param_lo")
            kwargs["param_hi"] = item.get("param_hi")
        if "compress_mode" in item:
            kwargs["compress_mode"] = item["compress_mode"]
        try:
            ops.append(AugmentationSpec(**kwargs))
        except Exception as exc:
            check.fail(f"{path}.operators[{i}]", str(exc))
    try:
        return PipelineSpec(tuple(ops), global_seed=seed)
    except Exception as exc:
        check.fail(path, str(exc))
        return PipelineSpec((), global_seed=seed)


def _parse_arm(item: dict, i: int, check: _Check) -> Arm | None:
    name = check.expect(item, f"experiment.arms[{i}]", "name", str)
    if name is None:
        return None
    if "operators" in item:
        pipeline = parse_pipeline(item, check, path=f"experiment.arms[{i}]")
    elif "kinds" in item:
        kinds = item["kinds"]
        unknown = [k for k in kinds if k not in KINDS]
        if unknown:
            check.fail(f"experiment.arms[{i}].kinds", f"unknown kinds {unknown}")
            return None
        pipeline = PipelineSpec.from_kinds(kinds, gate_p=item.get("gate_p", DEFAULT_GATE_P))
    elif name in STANDARD_ARM_KINDS:
        pipeline = PipelineSpec.from_kinds(STANDARD_ARM_KINDS[name],
                                           gate_p=item.get("gate_p", DEFAULT_GATE_P))
    else:
        check.fail(f"experiment.arms[{i}]", "needs 'kinds' or 'operators' (or a standard name)")
        return None
    return Arm(name, pipeline)


def build_experiment(doc: dict, check: _Check, seed: int) -> ExperimentSpec | None:
    train_subset = check.expect(doc, "experiment", "train_subset", str)
    eval_subsets = check.expect(doc, "experiment", "eval_subsets", list)
    arms_doc = check.expect(doc, "experiment", "arms", list)
    arms: list[Arm] = []
    if arms_doc:
        for i, item in enumerate(arms_doc):
            arm = _parse_arm(item, i, check)
            if arm is not None:
                arms.append(arm)
    clf_doc = check.expect(doc, "experiment", "classifier", dict, required=False, default={})
    try:
        classifier = ClassifierConfig(
            height=clf_doc.get("height", 52),
            width=clf_doc.get("width", DEFAULT_WIDTH),
            channels=tuple(clf_doc.get("channels", (16, 32, 64))),
        )
    except ValueError as exc:
        check.fail("experiment.classifier", str(exc))
        classifier = ClassifierConfig()
    if check.problems:
        return None
    try:
        return ExperimentSpec(
            train_subset=train_subset,
            eval_subsets=tuple(eval_subsets),
            arms=tuple(arms),
            runs=doc.get("runs", 10),
            epochs=doc.get("epochs", 50),
            lr=doc.get("lr", 1e-4),
            batch=doc.get("batch", 16),
            classifier=classifier,
            seed=seed,
            train_fraction=doc.get("train_fraction", 0.8),
            stratified=doc.get("stratified", True),
        )
    except SchemaError as exc:
        check.fail("experiment", str(exc))
        return None


def load_config(path, seed_override: int | None = None, out_override=None,
                require_seed: bool = False) -> RunConfig:
    """Load and validate a run configuration file."""
    cfg_path = Path(path)
    if not cfg_path.is_file():
        raise SchemaError(f"config: no such file: {cfg_path}")
    try:
        doc = json.loads(cfg_path.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"config: not valid JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise SchemaError("config: top level must be a JSON object")

    check = _Check()
    base = cfg_path.parent
    seed = seed_override if seed_override is not None else doc.get("seed")
    if seed is not None and not isinstance(seed, int):
        check.fail("seed", f"expected integer, got {type(seed).__name__}")
        seed = None
    if require_seed and seed is None:
        check.fail("seed", "missing (set it in the config or pass --seed)")

    out = out_override or doc.get("out")
    out_path = Path(out) if out is not None else None

    ingest = None
    if "ingest" in doc:
        ingest = _parse_ingest(check.expect(doc, "", "ingest", dict) or {}, check, base)

    pipeline = None
    if "pipeline" in doc:
        pipeline = parse_pipeline(check.expect(doc, "", "pipeline", dict) or {},
                                  check, seed=seed or 0)

    dataset = None
    if "dataset" in doc:
        ds = check.expect(doc, "", "dataset", dict) or {}
        root_str = ds.get("root")
        root = None
        if root_str is not None:
            root = (base / root_str) if not Path(root_str).is_absolute() else Path(root_str)
        manifests = ds.get("manifests", {})
        if not isinstance(manifests, dict):
            check.fail("dataset.manifests", "expected an object of subset -> path")
            manifests = {}
        resolved = {}
        for name, mpath in manifests.items():
            full = (base / mpath) if not Path(mpath).is_absolute() else Path(mpath)
            if not full.is_file():
                check.fail(f"dataset.manifests.{name}", f"no such file: {full}")
            resolved[name] = full
        dataset = DatasetConfig(root, resolved)

    experiment = None
    if "experiment" in doc:
        experiment = build_experiment(check.expect(doc, "", "experiment", dict) or {},
                                      check, seed=seed or 0)

    check.raise_if_failed()
    return RunConfig(seed, out_path, ingest, pipeline, dataset, experiment)
