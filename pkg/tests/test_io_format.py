import struct

import numpy as np
import pytest
from PIL import Image

from csiaug.errors import FormatError
from csiaug.io import HEADER_SIZE, read_spectrogram, render_png, write_spectrogram
from csiaug.spectro import Spectrogram


def make_spec(w=6, h=4, seed=0):
    rng = np.random.Generator(np.random.PCG64(seed))
    return Spectrogram(rng.random((w, h)).astype(np.float32).astype(np.float64))


class TestSpectrogramFile:
    def test_header_is_22_bytes(self):
        assert HEADER_SIZE == 22

    def test_file_size_formula(self, tmp_path):
        spec = make_spec(7, 3)
        path = tmp_path / "a.csis"
        write_spectrogram(path, spec, label=1)
        assert path.stat().st_size == 22 + 4 * 7 * 3

    def test_roundtrip_bit_exact(self, tmp_path):
        spec = make_spec(400, 52, seed=5)
        path = tmp_path / "a.csis"
        write_spectrogram(path, spec, label=2)
        loaded, label = read_spectrogram(path)
        assert label == 2
        assert (loaded.w, loaded.h) == (400, 52)
        assert np.array_equal(loaded.values, spec.values)
        # write-after-read reproduces the file byte for byte
        path2 = tmp_path / "b.csis"
        write_spectrogram(path2, loaded, label=label)
        assert path.read_bytes() == path2.read_bytes()

    def test_header_fields_little_endian(self, tmp_path):
        spec = make_spec(5, 2)
        path = tmp_path / "a.csis"
        write_spectrogram(path, spec, label=-1)
        raw = path.read_bytes()
        assert raw[:4] == b"CSIS"
        assert struct.unpack_from("<H", raw, 4)[0] == 1
        assert struct.unpack_from("<I", raw, 6)[0] == 5
        assert struct.unpack_from("<I", raw, 10)[0] == 2
        assert struct.unpack_from("<b", raw, 14)[0] == -1
        assert raw[15:22] == b"\x00" * 7

    def test_payload_time_major(self, tmp_path):
        values = np.arange(6, dtype=float).reshape(3, 2)  # w=3, h=2
        path = tmp_path / "a.csis"
        write_spectrogram(path, Spectrogram(values))
        payload = np.frombuffer(path.read_bytes()[22:], dtype="<f4")
        assert payload.tolist() == [0.0, 1.0, 2.0, 3.0, 4.0, 5.0]

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "a.csis"
        write_spectrogram(path, make_spec())
        raw = bytearray(path.read_bytes())
        raw[:4] = b"XXXX"
        path.write_bytes(bytes(raw))
        with pytest.raises(FormatError, match="magic"):
            read_spectrogram(path)

    def test_bad_version(self, tmp_path):
        path = tmp_path / "a.csis"
        write_spectrogram(path, make_spec())
        raw = bytearray(path.read_bytes())
        raw[4] = 9
        path.write_bytes(bytes(raw))
        with pytest.raises(FormatError, match="version"):
            read_spectrogram(path)

    def test_truncated_file(self, tmp_path):
        path = tmp_path / "a.csis"
        write_spectrogram(path, make_spec())
        path.write_bytes(path.read_bytes()[:-3])
        with pytest.raises(FormatError, match="size"):
            read_spectrogram(path)
        path.write_bytes(b"CSIS")
        with pytest.raises(FormatError, match="truncated"):
            read_spectrogram(path)

    def test_negative_payload_rejected(self, tmp_path):
        path = tmp_path / "a.csis"
        write_spectrogram(path, make_spec(2, 2))
        raw = bytearray(path.read_bytes())
        raw[22:26] = struct.pack("<f", -1.0)
        path.write_bytes(bytes(raw))
        with pytest.raises(FormatError, match="negative"):
            read_spectrogram(path)

    def test_label_range_checked(self, tmp_path):
        with pytest.raises(FormatError):
            write_spectrogram(tmp_path / "a.csis", make_spec(), label=-2)
        with pytest.raises(FormatError):
            write_spectrogram(tmp_path / "a.csis", make_spec(), label=200)


class TestPng:
    def test_dimensions_passthrough(self, tmp_path):
        spec = make_spec(400, 52, seed=1)
        out = tmp_path / "a.png"
        render_png(spec, out)
        with Image.open(out) as img:
            assert img.size == (400, 52)
            assert img.mode == "L"

    def test_constant_renders_mid_gray(self, tmp_path):
        spec = Spectrogram(np.full((10, 4), 3.3))
        out = tmp_path / "a.png"
        render_png(spec, out)
        with Image.open(out) as img:
            pixels = np.asarray(img)
        assert np.all(pixels == 128)

    def test_min_max_map_to_0_and_255(self, tmp_path):
        values = np.linspace(1.0, 9.0, 12).reshape(6, 2)
        out = tmp_path / "a.png"
        render_png(Spectrogram(values), out)
        with Image.open(out) as img:
            pixels = np.asarray(img)
        assert pixels.min() == 0
        assert pixels.max() == 255
        # orientation: value at (t, k) lands at pixel row k, column t
        assert pixels[0, 0] == 0
        assert pixels[1, 5] == 255
