"""Command-line front end.

One binary, five subcommands, one JSON config per invocation:

* ``ingest``  -- raw CSI logs -> spectrogram files + subset manifest
* ``augment`` -- spectrogram files -> augmented files (+ draw log, previews)
* ``preview`` -- spectrogram file -> grayscale PNG
* ``ablate``  -- experiment config -> results JSON + markdown/CSV reports
* ``verify``  -- manifest counts/digests check (bundled counts by default)

Every command is deterministic given (config, seed); nothing reads entropy
or the clock into its outputs.  Exit codes: 0 success, 2 parse failure,
3 spectrogram file format failure, 4 config/schema failure, 5 runtime
failure (failed runs, missing data, I/O), 1 unexpected error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import augment as aug
from . import config as cfgmod
from . import data as datamod
from . import harness, io as sio
from .csi import read_csi_log, to_amplitude_series
from .errors import (BoundsError, CsiAugError, FormatError, ParameterError,
                     ParseError, SamplerError, SchemaError, SplitError,
                     StructureError)
from .spectro import segment, trim

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_PARSE = 2
EXIT_FORMAT = 3
EXIT_SCHEMA = 4
EXIT_RUNTIME = 5


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


# ---------------------------------------------------------------------------
# ingest
# ---------------------------------------------------------------------------

def cmd_ingest(args) -> int:
    cfg = cfgmod.load_config(args.config, seed_override=args.seed, out_override=args.out)
    if cfg.ingest is None:
        raise SchemaError("config has no 'ingest' section")
    ing = cfg.ingest
    out_dir = Path(cfg.out or "ingested")
    out_dir.mkdir(parents=True, exist_ok=True)

    inputs = list(ing.inputs)
    for p in args.raw:
        if args.label is None:
            raise SchemaError(f"positional input {p} needs --label")
        inputs.append(cfgmod.IngestInput(Path(p), args.label))
    if not inputs:
        _note("warning: nothing to ingest")
        print("wrote 0 spectrograms")
        return EXIT_OK

    entries = []
    class_counts = [0, 0, 0]
    for item in inputs:
        with open(item.path, "r", encoding="utf-8", errors="replace") as fh:
            try:
                records, report = read_csi_log(fh, ing.mapping)
            except (ParseError, StructureError) as exc:
                raise type(exc)(f"{item.path}: {exc}") from None
        for warning in report.warnings():
            _note(f"warning: {item.path}: {warning}")
        if not records:
            _note(f"warning: {item.path}: empty log, no spectrograms written")
            continue
        series = to_amplitude_series(records, ing.selection, ing.rate_hz)
        if item.trim is not None:
            series = trim(series, item.trim[0], item.trim[1])
        specs = segment(series, ing.window, ing.hop)
        for si, spec in enumerate(specs):
            name = f"{item.path.stem}_{si:03d}.csis"
            sio.write_spectrogram(out_dir / name, spec, label=item.label)
            entries.append(datamod.FileEntry(name, item.label, item.scenario,
                                             item.system, item.zone))
            if item.label in datamod.LABELS:
                class_counts[item.label] += 1

    manifest = datamod.build_manifest(ing.subset, entries, root=out_dir)
    datamod.save_manifest(manifest, out_dir / "manifest.json")
    per_class = ", ".join(f"class {k}: {class_counts[k]}" for k in datamod.LABELS)
    print(f"wrote {len(entries)} spectrograms ({per_class}) to {out_dir}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# augment
# ---------------------------------------------------------------------------

def cmd_augment(args) -> int:
    cfg = cfgmod.load_config(args.config, seed_override=args.seed,
                             out_override=args.out, require_seed=True)
    if cfg.pipeline is None:
        raise SchemaError("config has no 'pipeline' section")
    out_dir = Path(cfg.out or "augmented")
    out_dir.mkdir(parents=True, exist_ok=True)

    log_lines = []
    for index, path in enumerate(args.files):
        spec, label = sio.read_spectrogram(path)
        augmented, draw_log = aug.apply_pipeline(spec, cfg.pipeline, (0, index))
        sio.write_spectrogram(out_dir / Path(path).name, augmented, label=label)
        if args.draw_log:
            log_lines.append(draw_log.to_json_line(sample_key=(0, index)))
        if args.preview:
            gap = np.zeros((2, spec.h))
            combined = np.concatenate([spec.values, gap, augmented.values], axis=0)
            from .spectro import Spectrogram
            sio.render_png(Spectrogram(combined),
                           out_dir / (Path(path).stem + "_preview.png"))
    if args.draw_log:
        Path(args.draw_log).write_text("\n".join(log_lines) + "\n" if log_lines else "")
    print(f"augmented {len(args.files)} spectrograms to {out_dir}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# preview
# ---------------------------------------------------------------------------

def cmd_preview(args) -> int:
    spec, _ = sio.read_spectrogram(args.file)
    out = Path(args.out or (Path(args.file).stem + ".png"))
    try:
        sio.render_png(spec, out)
    except OSError as exc:
        _note(f"error: cannot write {out}: {exc}")
        return EXIT_RUNTIME
    print(f"wrote {out} ({spec.w}x{spec.h})")
    return EXIT_OK


# ---------------------------------------------------------------------------
# ablate
# ---------------------------------------------------------------------------

def cmd_ablate(args) -> int:
    cfg = cfgmod.load_config(args.config, seed_override=args.seed,
                             out_override=args.out, require_seed=True)
    if cfg.experiment is None:
        raise SchemaError("config has no 'experiment' section")
    if cfg.dataset is None:
        raise SchemaError("config has no 'dataset' section")
    out_dir = Path(cfg.out or "ablation")
    out_dir.mkdir(parents=True, exist_ok=True)

    subsets = {}
    for name, manifest_path in cfg.dataset.manifests.items():
        manifest = datamod.load_manifest(manifest_path)
        root = cfg.dataset.root or Path(manifest_path).parent
        subsets[name] = datamod.load_samples(manifest, root=root)
        _note(f"loaded {name}: {len(subsets[name])} samples")

    def sink(arm_name: str, run_index: int, params) -> None:
        ck_dir = out_dir / "checkpoints" / arm_name
        ck_dir.mkdir(parents=True, exist_ok=True)
        np.savez(ck_dir / f"run{run_index:02d}.npz", **params)

    summary = harness.run_ablation(cfg.experiment, subsets, jobs=args.jobs,
                                   checkpoint_sink=sink)
    report = harness.format_report(summary)
    (out_dir / "results.json").write_text(
        json.dumps(summary.to_json_dict(), indent=1, sort_keys=True) + "\n")
    (out_dir / "report.md").write_text(report.markdown)
    (out_dir / "report.csv").write_text(report.csv)

    if args.format == "csv":
        print(report.csv, end="")
    elif args.format == "json":
        print(json.dumps(summary.to_json_dict(), indent=1, sort_keys=True))
    else:
        print(report.markdown, end="")

    failed = summary.failed_runs
    if failed:
        for r in failed:
            _note(f"failed run: arm={r.arm} run={r.run_index}: {r.error}")
        return EXIT_RUNTIME
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def cmd_verify(args) -> int:
    reports = []
    if args.manifest:
        for mpath in args.manifest:
            manifest = datamod.load_manifest(mpath)
            root = Path(args.root) if args.root else Path(mpath).parent
            reports.append(datamod.verify_manifest(manifest, root=root))
    else:
        # No dataset on disk: check the bundled counts for the published subsets.
        for subset, manifest in sorted(datamod.synthetic_wallhack_manifests().items()):
            reports.append(datamod.verify_manifest(manifest, root=None))

    all_passed = True
    grand_total = 0
    class_totals = [0, 0, 0]
    for rep in reports:
        for line in rep.lines():
            print(line)
        grand_total += rep.total
        for k in datamod.LABELS:
            class_totals[k] += rep.observed_counts[k]
        all_passed = all_passed and rep.passed
    if len(reports) > 1:
        print(f"total: {grand_total} samples, per-class {tuple(class_totals)}")
    return EXIT_OK if all_passed else EXIT_RUNTIME


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="csiaug",
        description="WiFi CSI spectrograms: ingestion, augmentation, ablation experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_config=True):
        p.add_argument("--config", required=needs_config, help="JSON run configuration")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out", default=None, help="override the output directory")

    p = sub.add_parser("ingest", help="parse raw CSI logs into spectrogram files")
    common(p)
    p.add_argument("--label", type=int, default=None,
                   help="activity label for positional inputs")
    p.add_argument("raw", nargs="*", help="raw log files (besides config inputs)")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("augment", help="apply the augmentation pipeline to spectrogram files")
    common(p)
    p.add_argument("--draw-log", default=None, help="write per-sample draws as JSON lines")
    p.add_argument("--preview", action="store_true", help="also write before/after PNGs")
    p.add_argument("files", nargs="+", help="spectrogram files")
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("preview", help="render a spectrogram file as a grayscale PNG")
    p.add_argument("file", help="spectrogram file")
    p.add_argument("--out", "-o", default=None, help="output PNG path")
    p.set_defaults(func=cmd_preview)

    p = sub.add_parser("ablate", help="run the ablation experiment from a config")
    common(p)
    p.add_argument("--jobs", type=int, default=1, help="parallel training runs")
    p.add_argument("--format", choices=("md", "csv", "json"), default="md",
                   help="what to print to stdout")
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("verify", help="verify dataset manifests (bundled counts by default)")
    p.add_argument("--manifest", action="append", default=None, help="manifest JSON path")
    p.add_argument("--root", default=None, help="directory the manifest paths are relative to")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, StructureError) as exc:
        _note(f"parse error: {exc}")
        return EXIT_PARSE
    except FormatError as exc:
        _note(f"format error: {exc}")
        return EXIT_FORMAT
    except (SchemaError, BoundsError, ParameterError, SplitError, SamplerError) as exc:
        _note(f"config error: {exc}")
        return EXIT_SCHEMA
    except CsiAugError as exc:
        _note(f"error: {exc}")
        return EXIT_RUNTIME
    except OSError as exc:
        _note(f"i/o error: {exc}")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
