import json
from pathlib import Path

import numpy as np
from PIL import Image

from csiaug.cli import (EXIT_FORMAT, EXIT_OK, EXIT_PARSE, EXIT_RUNTIME,
                        EXIT_SCHEMA, main)
from csiaug.data import FileEntry, build_manifest, load_manifest, save_manifest
from csiaug.io import read_spectrogram, write_spectrogram
from csiaug.spectro import Spectrogram
from csiaug.synthetic import level_dataset


def write_raw_log(path, n_packets, n_pairs=64, corrupt_line=None):
    lines = []
    for i in range(n_packets):
        iq = " ".join(str((i + j) % 9 - 4) for j in range(2 * n_pairs))
        lines.append(f"{i * 10},{i},-42,[{iq}]")
    if corrupt_line is not None:
        lines[corrupt_line] = "10,oops,-42,[1 1]"
    Path(path).write_text("\n".join(lines) + "\n")


def ingest_config(tmp_path, inputs, window=400, selection="lltf64"):
    doc = {
        "seed": 1,
        "ingest": {
            "mapping": {"delimiter": ",", "timestamp": 0, "seq": 1, "rssi": 2, "csi": 3},
            "selection": selection,
            "window": window,
            "subset": "W1.8k_LB",
            "inputs": inputs,
        },
    }
    path = tmp_path / "ingest.json"
    path.write_text(json.dumps(doc))
    return path


class TestIngest:
    def test_850_packets_give_two_files(self, tmp_path, capsys):
        raw = tmp_path / "walk.csv"
        write_raw_log(raw, 850)
        cfg = ingest_config(tmp_path, [{"path": "walk.csv", "label": 1}])
        out = tmp_path / "out"
        code = main(["ingest", "--config", str(cfg), "--out", str(out)])
        assert code == EXIT_OK
        files = sorted(out.glob("*.csis"))
        assert len(files) == 2
        spec, label = read_spectrogram(files[0])
        assert (spec.w, spec.h) == (400, 52)
        assert label == 1
        manifest = load_manifest(out / "manifest.json")
        assert manifest.subset == "W1.8k_LB"
        assert manifest.counts == (0, 2, 0)
        assert "wrote 2 spectrograms" in capsys.readouterr().out

    def test_trim_applied(self, tmp_path):
        raw = tmp_path / "walk.csv"
        write_raw_log(raw, 1000)
        cfg = ingest_config(tmp_path,
                            [{"path": "walk.csv", "label": 0, "trim": [100, 500]}])
        out = tmp_path / "out"
        assert main(["ingest", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
        assert len(list(out.glob("*.csis"))) == 1  # 400 rows -> one window

    def test_corrupt_line_reports_and_fails(self, tmp_path, capsys):
        raw = tmp_path / "bad.csv"
        write_raw_log(raw, 10, corrupt_line=4)
        cfg = ingest_config(tmp_path, [{"path": "bad.csv", "label": 0}])
        code = main(["ingest", "--config", str(cfg), "--out", str(tmp_path / "o")])
        assert code == EXIT_PARSE
        err = capsys.readouterr().err
        assert "line 5" in err

    def test_empty_log_warns_and_succeeds(self, tmp_path, capsys):
        raw = tmp_path / "empty.csv"
        raw.write_text("")
        cfg = ingest_config(tmp_path, [{"path": "empty.csv", "label": 0}])
        code = main(["ingest", "--config", str(cfg), "--out", str(tmp_path / "o")])
        assert code == EXIT_OK
        captured = capsys.readouterr()
        assert "wrote 0 spectrograms" in captured.out
        assert "empty log" in captured.err

    def test_missing_input_is_schema_error(self, tmp_path):
        cfg = ingest_config(tmp_path, [{"path": "nope.csv", "label": 0}])
        assert main(["ingest", "--config", str(cfg)]) == EXIT_SCHEMA


def augment_config(tmp_path, seed=9, gate_p=1.0):
    doc = {
        "seed": seed,
        "pipeline": {"operators": [
            {"kind": "circular_rotation", "gate_p": gate_p},
            {"kind": "resized_crop", "gate_p": gate_p},
            {"kind": "amplitude", "gate_p": gate_p},
            {"kind": "contrast", "gate_p": gate_p},
        ]},
    }
    path = tmp_path / "aug.json"
    path.write_text(json.dumps(doc))
    return path


def write_specs(tmp_path, n=3, w=20, h=6):
    rng = np.random.Generator(np.random.PCG64(33))
    paths = []
    for i in range(n):
        p = tmp_path / f"in_{i}.csis"
        write_spectrogram(p, Spectrogram(rng.random((w, h))), label=i % 3)
        paths.append(str(p))
    return paths


class TestAugment:
    def test_deterministic_rerun_byte_identical(self, tmp_path):
        files = write_specs(tmp_path)
        cfg = augment_config(tmp_path, gate_p=0.5)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        log1, log2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        for out, log in ((out1, log1), (out2, log2)):
            code = main(["augment", "--config", str(cfg), "--out", str(out),
                         "--draw-log", str(log), *files])
            assert code == EXIT_OK
        for f in files:
            name = Path(f).name
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
        assert log1.read_text() == log2.read_text()

    def test_empty_pipeline_payload_identical(self, tmp_path):
        files = write_specs(tmp_path, n=2)
        cfg = tmp_path / "aug.json"
        cfg.write_text(json.dumps({"seed": 3, "pipeline": {"operators": []}}))
        out = tmp_path / "o"
        assert main(["augment", "--config", str(cfg), "--out", str(out), *files]) == EXIT_OK
        for f in files:
            assert (out / Path(f).name).read_bytes() == Path(f).read_bytes()

    def test_different_seed_changes_output(self, tmp_path):
        files = write_specs(tmp_path, n=1)
        cfg = augment_config(tmp_path)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        main(["augment", "--config", str(cfg), "--seed", "1", "--out", str(out1), *files])
        main(["augment", "--config", str(cfg), "--seed", "2", "--out", str(out2), *files])
        name = Path(files[0]).name
        assert (out1 / name).read_bytes() != (out2 / name).read_bytes()

    def test_truncated_input_is_format_error(self, tmp_path):
        files = write_specs(tmp_path, n=1)
        Path(files[0]).write_bytes(Path(files[0]).read_bytes()[:30])
        cfg = augment_config(tmp_path)
        code = main(["augment", "--config", str(cfg), "--out", str(tmp_path / "o"), *files])
        assert code == EXIT_FORMAT

    def test_missing_seed_is_schema_error(self, tmp_path):
        files = write_specs(tmp_path, n=1)
        cfg = tmp_path / "aug.json"
        cfg.write_text(json.dumps({"pipeline": {"operators": []}}))
        code = main(["augment", "--config", str(cfg), "--out", str(tmp_path / "o"), *files])
        assert code == EXIT_SCHEMA

    def test_preview_written(self, tmp_path):
        files = write_specs(tmp_path, n=1, w=10, h=4)
        cfg = augment_config(tmp_path)
        out = tmp_path / "o"
        main(["augment", "--config", str(cfg), "--out", str(out), "--preview", *files])
        previews = list(out.glob("*_preview.png"))
        assert len(previews) == 1
        with Image.open(previews[0]) as img:
            assert img.size == (22, 4)  # 10 + 2 gap + 10 wide


class TestPreview:
    def test_png_dimensions(self, tmp_path):
        p = tmp_path / "s.csis"
        write_spectrogram(p, Spectrogram(np.random.default_rng(1).random((30, 7))))
        out = tmp_path / "s.png"
        assert main(["preview", str(p), "-o", str(out)]) == EXIT_OK
        with Image.open(out) as img:
            assert img.size == (30, 7)
            assert img.mode == "L"

    def test_bad_file_is_format_error(self, tmp_path):
        p = tmp_path / "s.csis"
        p.write_bytes(b"junk")
        assert main(["preview", str(p), "-o", str(tmp_path / "x.png")]) == EXIT_FORMAT


def build_dataset_dir(tmp_path, name, samples):
    root = tmp_path / name
    root.mkdir()
    entries = []
    for i, s in enumerate(samples):
        fname = f"{name}_{i:03d}.csis"
        write_spectrogram(root / fname, s.spectrogram, label=s.label)
        entries.append(FileEntry(fname, s.label, s.scenario, s.system))
    manifest = build_manifest(name, entries, root=root)
    save_manifest(manifest, root / "manifest.json")
    return root


def ablate_config(tmp_path, seed=11, runs=1, epochs=2):
    train_dir = build_dataset_dir(tmp_path, "trainset", level_dataset(21, 5, w=16, h=8))
    test_dir = build_dataset_dir(tmp_path, "testset", level_dataset(22, 3, w=16, h=8))
    doc = {
        "seed": seed,
        "dataset": {
            "manifests": {
                "trainset": str(train_dir / "manifest.json"),
                "testset": str(test_dir / "manifest.json"),
            },
        },
        "experiment": {
            "train_subset": "trainset",
            "eval_subsets": ["testset"],
            "arms": [{"name": "none"}, {"name": "randomCircularRotation"}],
            "runs": runs, "epochs": epochs, "lr": 1e-3, "batch": 4,
            "classifier": {"height": 8, "width": 16, "channels": [2, 2, 2]},
        },
    }
    path = tmp_path / "exp.json"
    path.write_text(json.dumps(doc))
    return path


class TestAblate:
    def test_artifacts_and_rerun_identical(self, tmp_path, capsys):
        cfg = ablate_config(tmp_path)
        out1, out2 = tmp_path / "r1", tmp_path / "r2"
        assert main(["ablate", "--config", str(cfg), "--out", str(out1)]) == EXIT_OK
        assert main(["ablate", "--config", str(cfg), "--out", str(out2)]) == EXIT_OK
        for name in ("results.json", "report.md", "report.csv"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
        assert (out1 / "checkpoints" / "none" / "run00.npz").is_file()
        md = (out1 / "report.md").read_text()
        assert md.splitlines()[0].startswith("| Augmentation | testset |")
        results = json.loads((out1 / "results.json").read_text())
        assert results["arms"] == ["none", "randomCircularRotation"]

    def test_stdout_format_flag(self, tmp_path, capsys):
        cfg = ablate_config(tmp_path)
        assert main(["ablate", "--config", str(cfg), "--out", str(tmp_path / "r"),
                     "--format", "csv"]) == EXIT_OK
        out = capsys.readouterr().out
        assert out.startswith("arm,subset,")

    def test_missing_manifest_is_schema_error(self, tmp_path, capsys):
        cfg = ablate_config(tmp_path)
        doc = json.loads(cfg.read_text())
        doc["dataset"]["manifests"]["testset"] = "does/not/exist.json"
        cfg.write_text(json.dumps(doc))
        code = main(["ablate", "--config", str(cfg), "--out", str(tmp_path / "r")])
        assert code == EXIT_SCHEMA
        assert "dataset.manifests.testset" in capsys.readouterr().err

    def test_invalid_experiment_lists_fields(self, tmp_path, capsys):
        cfg = ablate_config(tmp_path)
        doc = json.loads(cfg.read_text())
        del doc["experiment"]["train_subset"]
        doc["experiment"]["arms"] = [{"name": "none"}]
        doc["experiment"]["eval_subsets"] = "oops"
        cfg.write_text(json.dumps(doc))
        code = main(["ablate", "--config", str(cfg), "--out", str(tmp_path / "r")])
        assert code == EXIT_SCHEMA
        err = capsys.readouterr().err
        assert "experiment.train_subset" in err
        assert "experiment.eval_subsets" in err


class TestVerify:
    def test_bundled_counts_pass(self, capsys):
        assert main(["verify"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "W1.8k_LB: 458 files" in out
        assert "total: 1806 samples, per-class (589, 611, 606)" in out
        assert out.count("PASS") == 4

    def test_real_tree_passes_and_detects_corruption(self, tmp_path, capsys):
        root = build_dataset_dir(tmp_path, "W1.8k_LB", level_dataset(23, 2, w=8, h=8))
        mpath = root / "manifest.json"
        assert main(["verify", "--manifest", str(mpath)]) == EXIT_OK
        # corrupt one file
        victim = next(root.glob("*.csis"))
        victim.write_bytes(b"CSIS" + b"\x00" * 30)
        assert main(["verify", "--manifest", str(mpath)]) == EXIT_RUNTIME
        assert "digest mismatch" in capsys.readouterr().out
