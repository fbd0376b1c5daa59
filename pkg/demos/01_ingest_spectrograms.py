"""From a raw CSI packet log to amplitude spectrograms.

Synthesizes a plausible ESP32-style capture (one comma-separated line per
packet, I/Q values in a bracketed list), then runs the ingestion chain:
parse -> select the 52 L-LTF subcarriers -> amplitude series -> trim ->
segment into 400x52 spectrograms -> render PNG previews.

Run:  python3 demos/01_ingest_spectrograms.py
"""

import math
from pathlib import Path

import numpy as np

from csiaug import (LLTF_64, read_csi_log, render_png, segment,
                    to_amplitude_series, trim, write_spectrogram)

OUT = Path(__file__).parent / "output" / "01"


def synthesize_log(path, n_packets=1300, seed=7):
    """Fake a capture: background channel + a 'walking person' disturbance."""
    rng = np.random.Generator(np.random.PCG64(seed))
    base = rng.integers(8, 20, size=64)  # static per-subcarrier magnitude
    lines = []
    for i in range(n_packets):
        # moving reflector: a slow magnitude wave sweeping across subcarriers
        sweep = 6.0 * np.sin(2 * math.pi * (i / 180.0) + np.arange(64) / 9.0)
        mag = np.clip(base + sweep + rng.normal(0, 1.5, 64), 1.0, None)
        phase = rng.uniform(0, 2 * math.pi, 64)
        imag = np.rint(mag * np.sin(phase)).astype(int)
        real = np.rint(mag * np.cos(phase)).astype(int)
        iq = " ".join(f"{im} {re}" for im, re in zip(imag, real))
        lines.append(f"{i * 10},{i},{int(rng.integers(-60, -35))},[{iq}]")
    path.write_text("\n".join(lines) + "\n")
    print(f"synthesized {n_packets} packets -> {path}")


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    raw = OUT / "capture.csv"
    synthesize_log(raw)

    with open(raw) as fh:
        records, report = read_csi_log(fh)
    print(f"parsed {report.n_records} records "
          f"({report.non_monotonic} out-of-order timestamps)")
    print(f"first record: ts={records[0].timestamp_ms}ms seq={records[0].seq} "
          f"rssi={records[0].rssi_dbm}dBm pairs={records[0].n_pairs}")

    series = to_amplitude_series(records, LLTF_64, rate_hz=100.0)
    print(f"amplitude series: {len(series)} packets x {series.rows.shape[1]} subcarriers")

    # pretend an annotation pass told us the activity spans packets [200, 1200)
    trimmed = trim(series, 200, 1200)
    specs = segment(trimmed, window=400, hop=400)
    print(f"trimmed to {len(trimmed)} packets -> {len(specs)} spectrograms of 400x52")

    for i, spec in enumerate(specs):
        write_spectrogram(OUT / f"segment_{i}.csis", spec, label=1)
        render_png(spec, OUT / f"segment_{i}.png")
    print(f"wrote {len(specs)} .csis files and previews under {OUT}")


if __name__ == "__main__":
    main()
