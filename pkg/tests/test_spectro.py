import numpy as np
import pytest

from csiaug.errors import BoundsError
from csiaug.spectro import AmplitudeSeries, Spectrogram, segment, trim


def make_series(n, h=4, rate=100.0):
    rows = np.arange(n * h, dtype=float).reshape(n, h)
    return AmplitudeSeries(rows, rate)


class TestTypes:
    def test_spectrogram_dims(self):
        s = Spectrogram(np.ones((400, 52)))
        assert (s.w, s.h) == (400, 52)

    def test_rejects_negative_and_nonfinite(self):
        with pytest.raises(ValueError):
            Spectrogram(np.array([[1.0, -0.5]]))
        with pytest.raises(ValueError):
            Spectrogram(np.array([[np.nan, 1.0]]))
        with pytest.raises(ValueError):
            AmplitudeSeries(np.array([[np.inf]]))

    def test_values_are_frozen(self):
        s = Spectrogram(np.ones((2, 2)))
        with pytest.raises(ValueError):
            s.values[0, 0] = 5.0

    def test_series_rate_preserved_by_trim(self):
        out = trim(make_series(10, rate=250.0), 2, 8)
        assert out.rate_hz == 250.0


class TestTrim:
    def test_identity_trim(self):
        s = make_series(1000)
        out = trim(s, 0, 1000)
        assert np.array_equal(out.rows, s.rows)

    def test_middle_trim_length(self):
        assert len(trim(make_series(1000), 100, 500)) == 400

    def test_inverted_range_rejected(self):
        with pytest.raises(BoundsError):
            trim(make_series(1000), 500, 100)

    def test_out_of_range_rejected(self):
        with pytest.raises(BoundsError):
            trim(make_series(10), 0, 11)
        with pytest.raises(BoundsError):
            trim(make_series(10), -1, 5)


class TestSegment:
    def test_850_gives_two_windows(self):
        out = segment(make_series(850), window=400, hop=400)
        assert len(out) == 2

    def test_exact_fit_reproduces_series(self):
        s = make_series(400)
        out = segment(s, window=400)
        assert len(out) == 1
        assert np.array_equal(out[0].values, s.rows)

    def test_below_window_is_empty(self):
        assert segment(make_series(399), window=400) == []

    def test_columns_map_to_offsets(self):
        s = make_series(10)
        out = segment(s, window=4, hop=3)
        for wi, spec in enumerate(out):
            offset = wi * 3
            assert np.array_equal(spec.values, s.rows[offset:offset + 4])

    def test_nonoverlap_concat_reconstructs_prefix(self):
        s = make_series(1037, h=3)
        window = 50
        out = segment(s, window=window)
        stacked = np.concatenate([spec.values for spec in out], axis=0)
        kept = (1037 // window) * window
        assert np.array_equal(stacked, s.rows[:kept])

    def test_count_matches_closed_form_fuzz(self):
        rng = np.random.Generator(np.random.PCG64(123))
        for _ in range(200):
            n = int(rng.integers(1, 300))
            window = int(rng.integers(1, 60))
            hop = int(rng.integers(1, 60))
            got = len(segment(make_series(n, h=2), window=window, hop=hop))
            want = (n - window) // hop + 1 if n >= window else 0
            assert got == want, (n, window, hop)

    def test_bad_window_or_hop(self):
        with pytest.raises(BoundsError):
            segment(make_series(10), window=0)
        with pytest.raises(BoundsError):
            segment(make_series(10), window=4, hop=0)
