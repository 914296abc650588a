"""Frame model and .iq / .iq.meta round trips."""

import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from occuscan import (
    ComplexFrame,
    FrameConsistencyError,
    MetaFormatError,
    RecordingMeta,
    SampleDataError,
    TruncationError,
    read_meta,
    read_recording,
    write_meta,
    write_recording,
)
from conftest import make_frame


class TestComplexFrame:
    def test_valid_frame(self):
        f = make_frame([1 + 1j, 2 - 1j], rate=2e6, freq=837e6, t=12.5)
        assert len(f) == 2
        assert f.samples.dtype == np.complex128
        assert f.sample_rate_hz == 2e6
        assert f.capture_time == 12.5

    def test_samples_are_read_only(self):
        f = make_frame([1.0, 2.0])
        with pytest.raises((ValueError, RuntimeError)):
            f.samples[0] = 9.0

    def test_copies_input(self):
        src = np.array([1.0, 2.0], dtype=np.complex128)
        f = make_frame(src)
        src[0] = 99.0
        assert f.samples[0] == 1.0

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            make_frame([])

    def test_rejects_2d(self):
        with pytest.raises(ValueError):
            make_frame(np.zeros((2, 2)))

    def test_rejects_nonfinite_naming_index(self):
        with pytest.raises(SampleDataError, match="index 2"):
            make_frame([1.0, 2.0, np.nan, 4.0])
        with pytest.raises(SampleDataError, match="index 1"):
            make_frame([0.0, 1j * np.inf])

    def test_rejects_bad_rate_and_freq(self):
        with pytest.raises(ValueError):
            make_frame([1.0], rate=0.0)
        with pytest.raises(ValueError):
            make_frame([1.0], freq=-5.0)


class TestMeta:
    def test_round_trip(self, tmp_path):
        meta = RecordingMeta(2.4e6, 2412e6, 1700000000.25, 4096)
        p = tmp_path / "a.iq.meta"
        write_meta(meta, p)
        assert read_meta(p) == meta

    def test_unknown_keys_ignored_comments_skipped(self, tmp_path):
        p = tmp_path / "m"
        p.write_text(
            "# capture notes\n"
            "sample_rate_hz=1000.0\n"
            "gain_db=30\n"
            "center_freq_hz=5765000000.0\n"
            "start_time_unix=0.0\n"
            "num_samples=10\n"
        )
        m = read_meta(p)
        assert m.sample_rate_hz == 1000.0
        assert m.num_samples == 10

    def test_missing_key_is_error(self, tmp_path):
        p = tmp_path / "m"
        p.write_text("sample_rate_hz=1000.0\ncenter_freq_hz=1.0\nnum_samples=0\n")
        with pytest.raises(MetaFormatError, match="start_time_unix"):
            read_meta(p)

    def test_malformed_line_cites_lineno(self, tmp_path):
        p = tmp_path / "m"
        p.write_text("sample_rate_hz=1000.0\nwhat even is this\n")
        with pytest.raises(MetaFormatError, match=":2:"):
            read_meta(p)

    def test_bad_value(self, tmp_path):
        p = tmp_path / "m"
        p.write_text(
            "sample_rate_hz=fast\ncenter_freq_hz=1.0\n"
            "start_time_unix=0.0\nnum_samples=1\n"
        )
        with pytest.raises(MetaFormatError):
            read_meta(p)


def _write_pair(tmp_path, payload: bytes, num_samples: int, rate=1e6, freq=100e6, start=0.0):
    iq = tmp_path / "cap.iq"
    meta = tmp_path / "cap.iq.meta"
    iq.write_bytes(payload)
    write_meta(RecordingMeta(rate, freq, start, num_samples), meta)
    return iq, meta


class TestReadRecording:
    def test_byte_layout_oracle(self, tmp_path):
        # [1+1j, 2-1j] interleaves to little-endian f32: 1, 1, 2, -1
        payload = struct.pack("<4f", 1.0, 1.0, 2.0, -1.0)
        iq, meta = _write_pair(tmp_path, payload, 2)
        frames, discarded = read_recording(iq, meta, frame_len=2)
        assert discarded == 0
        assert len(frames) == 1
        np.testing.assert_array_equal(frames[0].samples, [1 + 1j, 2 - 1j])

    def test_framing_8192_samples(self, tmp_path):
        rng = np.random.default_rng(0)
        vals = rng.standard_normal(2 * 8192).astype(np.float32)
        iq, meta = _write_pair(tmp_path, vals.tobytes(), 8192, rate=1e6, start=5.0)
        frames, discarded = read_recording(iq, meta, frame_len=1024)
        assert len(frames) == 8
        assert discarded == 0
        # contiguous capture times: start + k * frame_len / rate
        for k, f in enumerate(frames):
            assert f.capture_time == pytest.approx(5.0 + k * 1024 / 1e6, abs=0)
        assert all(len(f) == 1024 for f in frames)

    def test_short_capture_all_discarded(self, tmp_path):
        vals = np.zeros(2 * 1000, dtype=np.float32)
        iq, meta = _write_pair(tmp_path, vals.tobytes(), 1000)
        frames, discarded = read_recording(iq, meta, frame_len=1024)
        assert frames == []
        assert discarded == 1000

    def test_partial_trailing_frame_discarded(self, tmp_path):
        vals = np.ones(2 * 10, dtype=np.float32)
        iq, meta = _write_pair(tmp_path, vals.tobytes(), 10)
        frames, discarded = read_recording(iq, meta, frame_len=4)
        assert len(frames) == 2
        assert discarded == 2

    def test_empty_payload(self, tmp_path):
        iq, meta = _write_pair(tmp_path, b"", 0)
        frames, discarded = read_recording(iq, meta, frame_len=16)
        assert frames == [] and discarded == 0

    def test_truncated_payload(self, tmp_path):
        iq, meta = _write_pair(tmp_path, b"\x00" * 13, 1)
        with pytest.raises(TruncationError, match="13 bytes"):
            read_recording(iq, meta, frame_len=1)

    def test_num_samples_mismatch(self, tmp_path):
        iq, meta = _write_pair(tmp_path, struct.pack("<4f", 0, 0, 0, 0), 7)
        with pytest.raises(MetaFormatError, match="num_samples=7"):
            read_recording(iq, meta, frame_len=1)

    def test_nonfinite_sample_names_index(self, tmp_path):
        payload = struct.pack("<6f", 0, 0, 1, float("nan"), 2, 2)
        iq, meta = _write_pair(tmp_path, payload, 3)
        with pytest.raises(SampleDataError, match="index 1"):
            read_recording(iq, meta, frame_len=1)

    def test_bad_frame_len(self, tmp_path):
        iq, meta = _write_pair(tmp_path, b"", 0)
        with pytest.raises(ValueError):
            read_recording(iq, meta, frame_len=0)


class TestWriteRecording:
    def test_round_trip_three_frames(self, tmp_path):
        rng = np.random.default_rng(1)
        blocks = rng.standard_normal((3, 2, 4)).astype(np.float32)
        frames = [
            make_frame(
                blocks[k, 0].astype(np.float64) + 1j * blocks[k, 1].astype(np.float64),
                rate=1e3,
                freq=1e6,
                t=7.0 + k * 4 / 1e3,
            )
            for k in range(3)
        ]
        iq = tmp_path / "w.iq"
        meta = tmp_path / "w.iq.meta"
        write_recording(frames, iq, meta)
        back, discarded = read_recording(iq, meta, frame_len=4)
        assert discarded == 0
        assert len(back) == 3
        for orig, rt in zip(frames, back):
            np.testing.assert_array_equal(orig.samples, rt.samples)
            assert rt.capture_time == orig.capture_time

    def test_payload_bytes_exact(self, tmp_path):
        frames = [make_frame([1 + 1j, 2 - 1j])]
        iq = tmp_path / "w.iq"
        write_recording(frames, iq, tmp_path / "w.iq.meta")
        assert iq.read_bytes() == struct.pack("<4f", 1.0, 1.0, 2.0, -1.0)

    def test_empty_sequence(self, tmp_path):
        iq = tmp_path / "e.iq"
        meta = tmp_path / "e.iq.meta"
        write_recording([], iq, meta)
        assert iq.read_bytes() == b""
        m = read_meta(meta)
        assert m.num_samples == 0

    def test_mixed_tuning_rejected(self, tmp_path):
        frames = [make_frame([1.0], freq=1e6), make_frame([1.0], freq=2e6)]
        with pytest.raises(FrameConsistencyError):
            write_recording(frames, tmp_path / "x.iq", tmp_path / "x.iq.meta")


@settings(max_examples=50, deadline=None)
@given(
    data=st.lists(
        st.tuples(
            st.floats(width=32, allow_nan=False, allow_infinity=False),
            st.floats(width=32, allow_nan=False, allow_infinity=False),
        ),
        min_size=1,
        max_size=32,
    )
)
def test_round_trip_property(tmp_path_factory, data):
    """Any float32-representable frame survives the payload bit-exactly."""
    tmp = tmp_path_factory.mktemp("rt")
    samples = np.array([re + 1j * im for re, im in data], dtype=np.complex128)
    frame = ComplexFrame(samples, 48e3, 900e6, 3.25)
    write_recording([frame], tmp / "f.iq", tmp / "f.iq.meta")
    back, discarded = read_recording(tmp / "f.iq", tmp / "f.iq.meta", frame_len=len(data))
    assert discarded == 0
    np.testing.assert_array_equal(back[0].samples, samples)
