"""Ablation harness: train one classifier per (arm, run), aggregate accuracies.

Protocol per experiment:

* the training subset is split once into train/validation (stratified,
  seeded); validation and evaluation data are never augmented;
* each arm (a named augmentation pipeline, always including the baseline
  arm ``none`` with an empty pipeline) is trained for ``runs`` independent
  runs; run-level streams derive from the experiment seed and the run
  index, so arms share initial weights and batch orders within a run and
  differ only in the augmentations applied;
* within a run, every epoch draws balanced batches, augments the training
  samples through the arm's pipeline (keyed by epoch and dataset index),
  and takes Adam steps; after each epoch the validation accuracy is
  recorded, and the checkpoint with the highest validation accuracy wins,
  earliest epoch on ties;
* each winning checkpoint is evaluated on every evaluation subset, and the
  per-arm mean and sample standard deviation (n - 1) over runs are reported
  together with the difference against the ``none`` arm.

Desk-scale defaults train 50 epochs; the full-scale protocol (400 epochs,
10 runs, batch 16, Adam at 1e-4) is reproduced by setting those fields.
"""

from __future__ import annotations

import csv
import io as stdio
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .augment import (KIND_AMPLITUDE, KIND_CONTRAST, KIND_RESIZED_CROP,
                      KIND_ROTATION, PipelineSpec, apply_pipeline)
from .data import SplitSpec, balanced_batches, split
from .errors import SchemaError
from .model import Adam, ClassifierConfig, Params, ReferenceClassifier, copy_params
from .rng import Stream, derive_key

PAPER_EPOCHS = 400
PAPER_RUNS = 10

# Role tags for deriving independent per-run streams from one seed.
ROLE_SPLIT = 1
ROLE_INIT = 2
ROLE_BATCH = 3
ROLE_AUG = 4

BASELINE_ARM = "none"

STANDARD_ARM_KINDS = {
    "none": (),
    "randomCircularRotation": (KIND_ROTATION,),
    "randomResizedCrop": (KIND_RESIZED_CROP,),
    "randomAmplitude": (KIND_AMPLITUDE,),
    "randomContrast": (KIND_CONTRAST,),
    "combined": (KIND_ROTATION, KIND_RESIZED_CROP, KIND_AMPLITUDE, KIND_CONTRAST),
}


@dataclass(frozen=True)
class Arm:
    """A named augmentation configuration under test."""

    name: str
    pipeline: PipelineSpec


def standard_arms(names=None, gate_p: float = 0.5) -> tuple[Arm, ...]:
    """The usual ablation arms: baseline, one per operator, all combined."""
    if names is None:
        names = tuple(STANDARD_ARM_KINDS)
    arms = []
    for name in names:
        if name not in STANDARD_ARM_KINDS:
            raise SchemaError(f"unknown standard arm {name!r}")
        arms.append(Arm(name, PipelineSpec.from_kinds(STANDARD_ARM_KINDS[name], gate_p=gate_p)))
    return tuple(arms)


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything one ablation experiment needs, minus the data itself."""

    train_subset: str
    eval_subsets: tuple[str, ...]
    arms: tuple[Arm, ...]
    runs: int = PAPER_RUNS
    epochs: int = 50
    lr: float = 1e-4
    batch: int = 16
    classifier: ClassifierConfig = ClassifierConfig()
    seed: int = 0
    train_fraction: float = 0.8
    stratified: bool = True

    def __post_init__(self):
        object.__setattr__(self, "eval_subsets", tuple(self.eval_subsets))
        object.__setattr__(self, "arms", tuple(self.arms))
        if self.runs < 1:
            raise SchemaError(f"runs must be >= 1, got {self.runs}")
        if self.epochs < 1:
            raise SchemaError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch < 1:
            raise SchemaError(f"batch must be >= 1, got {self.batch}")
        if not self.eval_subsets:
            raise SchemaError("eval_subsets must not be empty")
        names = [a.name for a in self.arms]
        if len(set(names)) != len(names):
            raise SchemaError(f"duplicate arm names: {names}")
        baseline = [a for a in self.arms if a.name == BASELINE_ARM]
        if not baseline or baseline[0].pipeline.operators:
            raise SchemaError('arms must include an arm "none" with an empty pipeline')


@dataclass
class TrainResult:
    """Outcome of one training run (checkpoint selection included)."""

    params: Params | None
    best_epoch: int  # 1-based; 0 when the run failed before finishing an epoch
    best_val_accuracy: float
    val_history: tuple[float, ...]
    failed: bool = False
    error: str | None = None


@dataclass
class RunRecord:
    arm: str
    run_index: int
    best_epoch: int
    best_val_accuracy: float
    eval_accuracy: dict  # subset name -> accuracy
    val_history: tuple[float, ...]
    failed: bool = False
    error: str | None = None


@dataclass
class ArmStats:
    arm: str
    subset: str
    n_runs: int
    mean: float
    std: float
    delta: float | None  # vs the baseline arm; None for the baseline itself


@dataclass
class RunSummary:
    arms: tuple[str, ...]
    eval_subsets: tuple[str, ...]
    records: tuple[RunRecord, ...]
    stats: tuple[ArmStats, ...]

    @property
    def failed_runs(self) -> tuple[RunRecord, ...]:
        return tuple(r for r in self.records if r.failed)

    def stat(self, arm: str, subset: str) -> ArmStats:
        for s in self.stats:
            if s.arm == arm and s.subset == subset:
                return s
        raise KeyError((arm, subset))

    def to_json_dict(self) -> dict:
        return {
            "arms": list(self.arms),
            "eval_subsets": list(self.eval_subsets),
            "runs": [
                {
                    "arm": r.arm, "run_index": r.run_index, "failed": r.failed,
                    "error": r.error, "best_epoch": r.best_epoch,
                    "best_val_accuracy": r.best_val_accuracy,
                    "eval_accuracy": dict(sorted(r.eval_accuracy.items())),
                    "val_history": list(r.val_history),
                }
                for r in self.records
            ],
            "stats": [
                {
                    "arm": s.arm, "subset": s.subset, "n_runs": s.n_runs,
                    "mean": s.mean, "std": s.std, "delta": s.delta,
                }
                for s in self.stats
            ],
        }


# ---------------------------------------------------------------------------
# Training and evaluation
# ---------------------------------------------------------------------------

def samples_to_inputs(samples):
    """Stack samples into a (n, 1, height, width) batch and a label vector."""
    x = np.stack([s.spectrogram.values.T for s in samples])[:, None, :, :]
    y = np.array([s.label for s in samples], dtype=np.int64)
    return x, y


def evaluate(classifier: ReferenceClassifier, params: Params, samples, chunk: int = 64) -> float:
    """Fraction of argmax-correct predictions; no augmentation applied."""
    if not samples:
        raise ValueError("cannot evaluate on an empty sample list")
    correct = 0
    for lo in range(0, len(samples), chunk):
        x, y = samples_to_inputs(samples[lo:lo + chunk])
        correct += int((classifier.predict(params, x) == y).sum())
    return correct / len(samples)


def select_best(val_history) -> int:
    """Index of the highest validation accuracy, earliest on ties."""
    best = 0
    for i, acc in enumerate(val_history):
        if acc > val_history[best]:
            best = i
    return best


def train_one(pipeline: PipelineSpec, train, val, cfg: ExperimentSpec, run_index: int) -> TrainResult:
    """Train one model under one arm's pipeline; returns the best-validation checkpoint.

    Fully deterministic given (cfg.seed, run_index): model init, batch
    order, and augmentation draws all derive from them.  Augmentation
    streams are keyed by (epoch, dataset index) and do not depend on the
    arm name, so arms sharing operators see aligned draws.
    """
    if not train or not val:
        raise SchemaError("train and validation sets must be non-empty")
    classifier = ReferenceClassifier(cfg.classifier)
    params = classifier.init_params(Stream(derive_key(cfg.seed, ROLE_INIT, run_index)))
    batch_stream = Stream(derive_key(cfg.seed, ROLE_BATCH, run_index))
    run_pipeline = pipeline.reseeded(derive_key(cfg.seed, ROLE_AUG, run_index, pipeline.global_seed))
    optimizer = Adam(params, lr=cfg.lr)

    labels = np.array([s.label for s in train], dtype=np.int64)
    history: list[float] = []
    best_params = None
    best_acc = -1.0
    best_epoch = 0
    for epoch in range(cfg.epochs):
        for batch_idx in balanced_batches(train, cfg.batch, batch_stream):
            x = np.stack([
                apply_pipeline(train[i].spectrogram, run_pipeline, (epoch, i))[0].values.T
                for i in batch_idx
            ])[:, None, :, :]
            y = labels[batch_idx]
            loss, grads = classifier.loss_and_grad(params, x, y)
            if not math.isfinite(loss):
                return TrainResult(None, 0, float("nan"), tuple(history), failed=True,
                                   error=f"non-finite loss at epoch {epoch + 1}")
            optimizer.step(params, grads)
        acc = evaluate(classifier, params, val)
        history.append(acc)
        if acc > best_acc:
            best_acc = acc
            best_epoch = epoch + 1
            best_params = copy_params(params)
    return TrainResult(best_params, best_epoch, best_acc, tuple(history))


def _run_task(task):
    cfg, arm, run_index, train, val, eval_sets = task
    result = train_one(arm.pipeline, train, val, cfg, run_index)
    if result.failed:
        record = RunRecord(arm.name, run_index, 0, result.best_val_accuracy, {},
                           result.val_history, failed=True, error=result.error)
        return record, None
    classifier = ReferenceClassifier(cfg.classifier)
    accs = {name: evaluate(classifier, result.params, samples)
            for name, samples in eval_sets.items()}
    record = RunRecord(arm.name, run_index, result.best_epoch,
                       result.best_val_accuracy, accs, result.val_history)
    return record, result.params


def run_ablation(cfg: ExperimentSpec, subsets, jobs: int = 1, checkpoint_sink=None) -> RunSummary:
    """Run every (arm, run) pair and aggregate accuracies into a summary.

    ``subsets`` maps subset names to sample lists.  ``checkpoint_sink``, if
    given, is called as ``sink(arm_name, run_index, params)`` for each
    finished run.  Results are independent of ``jobs``.
    """
    missing = [s for s in (cfg.train_subset, *cfg.eval_subsets) if s not in subsets]
    if missing:
        raise SchemaError(f"unresolved subsets: {missing}")
    spec = SplitSpec(cfg.train_fraction, cfg.stratified,
                     split_seed=derive_key(cfg.seed, ROLE_SPLIT))
    train, val = split(list(subsets[cfg.train_subset]), spec)
    eval_sets = {name: list(subsets[name]) for name in cfg.eval_subsets}

    tasks = [(cfg, arm, run_index, train, val, eval_sets)
             for arm in cfg.arms for run_index in range(cfg.runs)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_run_task, tasks))
    else:
        outcomes = [_run_task(t) for t in tasks]

    records = []
    for (cfg_, arm, run_index, *_), (record, params) in zip(tasks, outcomes):
        records.append(record)
        if checkpoint_sink is not None and params is not None:
            checkpoint_sink(arm.name, run_index, params)

    stats = aggregate(cfg, records)
    return RunSummary(tuple(a.name for a in cfg.arms), cfg.eval_subsets,
                      tuple(records), tuple(stats))


def _mean_std(values) -> tuple[float, float]:
    n = len(values)
    mean = sum(values) / n
    if n < 2:
        return mean, 0.0
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var)


def aggregate(cfg: ExperimentSpec, records) -> list[ArmStats]:
    """Per-(arm, subset) mean and sample std over completed runs, plus deltas."""
    stats: list[ArmStats] = []
    means: dict = {}
    for arm in cfg.arms:
        for subset in cfg.eval_subsets:
            accs = [r.eval_accuracy[subset] for r in records
                    if r.arm == arm.name and not r.failed]
            if not accs:
                means[(arm.name, subset)] = float("nan")
                stats.append(ArmStats(arm.name, subset, 0, float("nan"), float("nan"), None))
                continue
            mean, std = _mean_std(accs)
            means[(arm.name, subset)] = mean
            stats.append(ArmStats(arm.name, subset, len(accs), mean, std, None))
    for s in stats:
        if s.arm != BASELINE_ARM and s.n_runs > 0:
            base = means[(BASELINE_ARM, s.subset)]
            s.delta = s.mean - base
    return stats


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Report:
    markdown: str
    csv: str


def _fmt_acc(mean: float, std: float) -> str:
    if math.isnan(mean):
        return "failed"
    return f"{mean * 100.0:.1f}±{std * 100.0:.1f}"


def _fmt_delta(delta: float | None) -> str:
    if delta is None:
        return ""
    pp = round(delta * 100.0, 1)
    if pp == 0.0:
        return "~ 0.0"
    if pp > 0:
        return f"↑ {pp:.1f}"
    return f"↓ {-pp:.1f}"


def format_report(summary: RunSummary) -> Report:
    """Render the ablation table: one row per arm, mean±std and delta per subset.

    The baseline row carries no delta marker; other rows mark the signed
    change versus the baseline with an up/down arrow.  Output depends only
    on the summary contents, so reruns are byte-identical.
    """
    header = ["Augmentation"]
    for subset in summary.eval_subsets:
        header.extend([subset, "Δ"])
    md = ["| " + " | ".join(header) + " |",
          "|" + "|".join(["---"] * len(header)) + "|"]
    for arm in summary.arms:
        row = [arm]
        for subset in summary.eval_subsets:
            s = summary.stat(arm, subset)
            row.extend([_fmt_acc(s.mean, s.std), _fmt_delta(s.delta)])
        md.append("| " + " | ".join(row) + " |")

    buf = stdio.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["arm", "subset", "n_runs", "mean", "std", "delta"])
    for arm in summary.arms:
        for subset in summary.eval_subsets:
            s = summary.stat(arm, subset)
            writer.writerow([s.arm, s.subset, s.n_runs, repr(s.mean), repr(s.std),
                             "" if s.delta is None else repr(s.delta)])
    return Report("\n".join(md) + "\n", buf.getvalue())
