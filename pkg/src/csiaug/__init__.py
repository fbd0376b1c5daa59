"""csiaug: WiFi CSI amplitude spectrograms, seeded augmentation, ablations.

The pipeline: raw CSI packet logs are parsed into per-packet subcarrier
amplitudes (:mod:`csiaug.csi`), trimmed and cut into fixed-size
time-by-subcarrier spectrograms (:mod:`csiaug.spectro`), augmented through
a deterministic seeded pipeline (:mod:`csiaug.augment`), organized into
labeled subsets (:mod:`csiaug.data`), and fed to an ablation harness that
measures how each augmentation moves cross-domain accuracy
(:mod:`csiaug.harness`).
"""

from .augment import (AugmentationSpec, DrawLog, PipelineSpec, amplitude_scale,
                      apply_pipeline, circular_rotate, contrast_scale,
                      random_channel_factors, random_circular_rotation,
                      random_resized_crop, replay, resized_crop)
from .csi import (LLTF_64, ColumnMapping, CsiRecord, SubcarrierSelection,
                  amplitudes, parse_csi_line, read_csi_log, to_amplitude_series)
from .data import (Sample, SplitSpec, SubsetManifest, balanced_batches,
                   load_manifest, load_samples, save_manifest, split,
                   synthetic_wallhack_manifests, verify_manifest)
from .harness import (Arm, ExperimentSpec, RunSummary, evaluate, format_report,
                      run_ablation, standard_arms, train_one)
from .io import read_spectrogram, render_png, write_spectrogram
from .model import ClassifierConfig, ReferenceClassifier
from .rng import Stream, derive_key, mix64
from .spectro import AmplitudeSeries, Spectrogram, segment, trim

__version__ = "0.1.0"

__all__ = [
    "AmplitudeSeries", "Arm", "AugmentationSpec", "ClassifierConfig",
    "ColumnMapping", "CsiRecord", "DrawLog", "ExperimentSpec", "LLTF_64",
    "PipelineSpec", "ReferenceClassifier", "RunSummary", "Sample",
    "Spectrogram", "SplitSpec", "Stream", "SubcarrierSelection",
    "SubsetManifest", "amplitude_scale", "amplitudes", "apply_pipeline",
    "balanced_batches", "circular_rotate", "contrast_scale", "derive_key",
    "evaluate", "format_report", "load_manifest", "load_samples", "mix64",
    "parse_csi_line", "random_channel_factors", "random_circular_rotation",
    "random_resized_crop", "read_csi_log", "read_spectrogram", "render_png",
    "replay", "resized_crop", "run_ablation", "save_manifest", "segment",
    "split", "standard_arms", "synthetic_wallhack_manifests",
    "to_amplitude_series", "train_one", "trim", "verify_manifest",
    "write_spectrogram",
]
