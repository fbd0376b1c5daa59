"""Dataset bookkeeping: manifests, verification, splits, balanced batches.

First checks the bundled subset counts of the published Wallhack1.8k
collection (458/461/450/437 samples, class totals 589/611/606), then builds
a small on-disk subset with digests, verifies it, splits it, and shows how
the balanced sampler equalizes a skewed class distribution.

Run:  python3 demos/03_datasets_and_sampling.py
"""

import collections
from pathlib import Path

from csiaug import (SplitSpec, balanced_batches, split, load_samples,
                    save_manifest, synthetic_wallhack_manifests,
                    verify_manifest, write_spectrogram)
from csiaug.data import FileEntry, build_manifest
from csiaug.rng import Stream
from csiaug.synthetic import level_dataset

OUT = Path(__file__).parent / "output" / "03"


def main():
    OUT.mkdir(parents=True, exist_ok=True)

    print("published Wallhack1.8k inventory (bundled counts):")
    manifests = synthetic_wallhack_manifests()
    for subset, manifest in sorted(manifests.items()):
        report = verify_manifest(manifest)
        print("  " + report.lines()[0])
    total = sum(m.total() for m in manifests.values())
    print(f"  grand total: {total}")

    print("\na real on-disk subset with content digests:")
    samples = level_dataset(5, n_per_class=10, w=32, h=12)
    entries = []
    for i, s in enumerate(samples):
        name = f"sample_{i:03d}.csis"
        write_spectrogram(OUT / name, s.spectrogram, label=s.label)
        entries.append(FileEntry(name, s.label, s.scenario, s.system))
    manifest = build_manifest("W1.8k_LB", entries, root=OUT)
    save_manifest(manifest, OUT / "manifest.json")
    report = verify_manifest(manifest, root=OUT)
    for line in report.lines():
        print("  " + line)

    loaded = load_samples(manifest, root=OUT)
    print(f"  loaded {len(loaded)} samples back from disk")

    print("\nstratified 80/20 split (deterministic in the seed):")
    train, val = split(loaded, SplitSpec(0.8, stratified=True, split_seed=42))
    for name, part in (("train", train), ("val", val)):
        counts = collections.Counter(s.label for s in part)
        print(f"  {name}: {len(part)} samples, per-class {dict(sorted(counts.items()))}")

    print("\nbalanced batches over a skewed set (100/10/10):")
    skewed = ([samples[0]] * 100 + [samples[10]] * 10 + [samples[20]] * 10)
    drawn = collections.Counter()
    stream = Stream(7)
    for _ in range(200):
        for batch in balanced_batches(skewed, 60, stream):
            drawn.update(skewed[i].label for i in batch)
    n = sum(drawn.values())
    freq = {k: round(v / n, 4) for k, v in sorted(drawn.items())}
    print(f"  {n} draws, class frequencies {freq} (target 1/3 each)")


if __name__ == "__main__":
    main()
