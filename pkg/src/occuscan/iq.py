"""Complex baseband frame model and raw IQ recording file I/O.

A recording is a pair of files:

* ``<name>.iq`` — raw interleaved little-endian float32 pairs, I before Q.
* ``<name>.iq.meta`` — UTF-8 text sidecar, one ``key=value`` per line with
  keys ``sample_rate_hz``, ``center_freq_hz``, ``start_time_unix`` and
  ``num_samples``. Unknown keys are ignored; missing keys are errors.

Frames hold samples as a read-only complex128 array so detector math runs in
double precision; the payload precision is float32, so round trips are
bit-exact exactly when the sample values are float32-representable (which
includes everything read from an .iq file).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    FrameConsistencyError,
    MetaFormatError,
    SampleDataError,
    TruncationError,
)

_META_KEYS = ("sample_rate_hz", "center_freq_hz", "start_time_unix", "num_samples")


@dataclass(frozen=True)
class ComplexFrame:
    """One detection cycle of N complex baseband samples plus capture metadata.

    Immutable: the sample array is copied in and marked read-only, and every
    detector treats frames as values. ``capture_time`` is seconds since the
    UTC epoch.
    """

    samples: np.ndarray
    sample_rate_hz: float
    center_freq_hz: float
    capture_time: float = 0.0

    def __post_init__(self):
        arr = np.array(self.samples, dtype=np.complex128, copy=True)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("frame needs a 1-D sample array of length >= 1")
        if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
            bad = int(np.flatnonzero(~(np.isfinite(arr.real) & np.isfinite(arr.imag)))[0])
            raise SampleDataError(f"non-finite sample at index {bad}")
        if not self.sample_rate_hz > 0:
            raise ValueError("sample_rate_hz must be > 0")
        if not self.center_freq_hz > 0:
            raise ValueError("center_freq_hz must be > 0")
        if not math.isfinite(self.capture_time):
            raise ValueError("capture_time must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return self.samples.size


@dataclass(frozen=True)
class RecordingMeta:
    """Sidecar metadata for one .iq payload file."""

    sample_rate_hz: float
    center_freq_hz: float
    start_time: float
    num_samples: int

    def __post_init__(self):
        if not self.sample_rate_hz > 0:
            raise ValueError("sample_rate_hz must be > 0")
        if not self.center_freq_hz > 0:
            raise ValueError("center_freq_hz must be > 0")
        if self.num_samples < 0:
            raise ValueError("num_samples must be >= 0")


def read_meta(meta_path) -> RecordingMeta:
    """Parse a sidecar file. Raises MetaFormatError on malformed content."""
    values = {}
    with open(meta_path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise MetaFormatError(f"{meta_path}:{lineno}: expected key=value, got {line!r}")
            key, _, val = line.partition("=")
            values[key.strip()] = val.strip()
    missing = [k for k in _META_KEYS if k not in values]
    if missing:
        raise MetaFormatError(f"{meta_path}: missing keys: {', '.join(missing)}")
    try:
        return RecordingMeta(
            sample_rate_hz=float(values["sample_rate_hz"]),
            center_freq_hz=float(values["center_freq_hz"]),
            start_time=float(values["start_time_unix"]),
            num_samples=int(values["num_samples"]),
        )
    except ValueError as exc:
        raise MetaFormatError(f"{meta_path}: bad value: {exc}") from exc


def write_meta(meta: RecordingMeta, meta_path) -> None:
    with open(meta_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"sample_rate_hz={float(meta.sample_rate_hz)!r}\n")
        fh.write(f"center_freq_hz={float(meta.center_freq_hz)!r}\n")
        fh.write(f"start_time_unix={float(meta.start_time)!r}\n")
        fh.write(f"num_samples={int(meta.num_samples)}\n")


def read_recording(payload_path, meta_path, frame_len: int) -> tuple[list[ComplexFrame], int]:
    """Read an .iq payload into frames of ``frame_len`` samples.

    Frames are returned in capture order; successive frames are treated as
    contiguous in time, so frame k starts at
    ``start_time + k * frame_len / sample_rate``. A trailing partial block is
    discarded, not zero-padded (padding would bias the energy statistic
    downward); the discarded sample count is the second return value.

    Raises:
        MetaFormatError: malformed sidecar.
        TruncationError: payload byte length not a multiple of 8.
        SampleDataError: NaN/Inf sample, message names its index.
    """
    if frame_len < 1:
        raise ValueError("frame_len must be >= 1")
    meta = read_meta(meta_path)

    raw = np.fromfile(payload_path, dtype=np.uint8)
    if raw.size % 8 != 0:
        raise TruncationError(
            f"{payload_path}: {raw.size} bytes is not a whole number of float32 I/Q pairs"
        )
    flat = raw.view("<f4")
    n = flat.size // 2
    if n != meta.num_samples:
        raise MetaFormatError(
            f"{meta_path}: num_samples={meta.num_samples} but payload holds {n} samples"
        )
    nonfinite = np.flatnonzero(~np.isfinite(flat))
    if nonfinite.size:
        raise SampleDataError(f"{payload_path}: non-finite sample at index {int(nonfinite[0]) // 2}")

    samples = flat[0::2].astype(np.float64) + 1j * flat[1::2].astype(np.float64)
    n_frames = n // frame_len
    discarded = n - n_frames * frame_len
    frames = []
    for k in range(n_frames):
        block = samples[k * frame_len : (k + 1) * frame_len]
        frames.append(
            ComplexFrame(
                samples=block,
                sample_rate_hz=meta.sample_rate_hz,
                center_freq_hz=meta.center_freq_hz,
                capture_time=meta.start_time + k * frame_len / meta.sample_rate_hz,
            )
        )
    return frames, discarded


def write_recording(frames, payload_path, meta_path) -> None:
    """Write frames as one contiguous .iq payload plus its sidecar.

    All frames must share sample_rate_hz and center_freq_hz; the sidecar
    start time is the first frame's capture_time (0.0 for an empty sequence,
    with rate/frequency placeholders of 1.0).
    """
    frames = list(frames)
    if frames:
        rate = frames[0].sample_rate_hz
        freq = frames[0].center_freq_hz
        start = frames[0].capture_time
        for f in frames[1:]:
            if f.sample_rate_hz != rate or f.center_freq_hz != freq:
                raise FrameConsistencyError(
                    "frames disagree on sample_rate_hz/center_freq_hz; "
                    "a recording holds one tuning"
                )
        samples = np.concatenate([f.samples for f in frames])
    else:
        rate = freq = 1.0
        start = 0.0
        samples = np.zeros(0, dtype=np.complex128)

    interleaved = np.empty(2 * samples.size, dtype="<f4")
    interleaved[0::2] = samples.real
    interleaved[1::2] = samples.imag
    interleaved.tofile(payload_path)
    write_meta(
        RecordingMeta(
            sample_rate_hz=rate,
            center_freq_hz=freq,
            start_time=start,
            num_samples=int(samples.size),
        ),
        meta_path,
    )
