"""Seeded synthetic baseband generation with ground-truth presence labels.

Everything here is a pure function of its arguments: each frame's randomness
comes from ``SeedSequence((seed, stream, frame_index))``, so regenerating a
frame at any index, in any process, gives bit-identical samples.

SNR is defined against nominal spec powers (amplitude**2 for signals,
total_power for noise), not empirical per-frame powers, so threshold and ROC
results are reproducible across seeds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .iq import ComplexFrame

# SeedSequence stream tags; keep noise draws and BPSK symbol draws apart even
# if a scenario reuses one seed for both.
_NOISE_STREAM = 1
_BPSK_STREAM = 2

_U64_MAX = 2**64 - 1

SIGNAL_KINDS = ("tone", "bpsk", "none")


def _check_seed(seed: int) -> int:
    if not 0 <= int(seed) <= _U64_MAX:
        raise ValueError("seed must fit in an unsigned 64-bit integer")
    return int(seed)


@dataclass(frozen=True)
class NoiseSpec:
    """Circularly symmetric complex Gaussian noise: E[|y|^2] = total_power."""

    total_power: float
    seed: int = 0

    def __post_init__(self):
        if not self.total_power > 0:
            raise ValueError("total_power must be > 0")
        _check_seed(self.seed)


@dataclass(frozen=True)
class SignalSpec:
    """Deterministic synthetic waveform: a complex tone, BPSK, or nothing.

    ``normalized_freq`` is in cycles/sample; ``symbol_rate_divisor`` is the
    BPSK samples-per-symbol hold; ``phase`` applies to the tone kind. Both
    kinds have mean power exactly amplitude**2.
    """

    kind: str
    normalized_freq: float = 0.0
    symbol_rate_divisor: int = 1
    amplitude: float = 1.0
    phase: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in SIGNAL_KINDS:
            raise ValueError(f"kind must be one of {SIGNAL_KINDS}, got {self.kind!r}")
        if not -0.5 < self.normalized_freq < 0.5:
            raise ValueError("normalized_freq must lie in (-0.5, 0.5)")
        if self.symbol_rate_divisor < 1:
            raise ValueError("symbol_rate_divisor must be >= 1")
        if self.amplitude < 0:
            raise ValueError("amplitude must be >= 0")
        _check_seed(self.seed)

    @property
    def nominal_power(self) -> float:
        """Mean |x|^2 implied by the spec (0 for kind='none')."""
        return 0.0 if self.kind == "none" else self.amplitude**2


@dataclass(frozen=True)
class OccupancySchedule:
    """Periodic on/off transmitter schedule; ground truth for occupancy.

    ``on_intervals`` are half-open [start, end) seconds, disjoint, sorted,
    contained in [0, period_s). A frame is labeled present when its capture
    time modulo the period lands in an on interval.
    """

    period_s: float
    on_intervals: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if not self.period_s > 0:
            raise ValueError("period_s must be > 0")
        ivals = tuple((float(a), float(b)) for a, b in self.on_intervals)
        prev_end = 0.0
        for start, end in ivals:
            if not (0.0 <= start < end <= self.period_s):
                raise ValueError(
                    f"interval ({start}, {end}) must satisfy 0 <= start < end <= period"
                )
            if start < prev_end:
                raise ValueError("on_intervals must be sorted and disjoint")
            prev_end = end
        object.__setattr__(self, "on_intervals", ivals)

    @property
    def duty_cycle(self) -> float:
        return sum(b - a for a, b in self.on_intervals) / self.period_s

    def is_on(self, t: float) -> bool:
        phase = t % self.period_s
        return any(a <= phase < b for a, b in self.on_intervals)


def gen_noise_frame(
    n: int,
    spec: NoiseSpec,
    frame_index: int,
    *,
    sample_rate_hz: float = 1.0,
    center_freq_hz: float = 1.0,
    capture_time: float = 0.0,
) -> ComplexFrame:
    """Generate n complex Gaussian noise samples, deterministic per (seed, frame_index)."""
    if n < 1:
        raise ValueError("n must be >= 1 (empty frames are not representable)")
    rng = np.random.default_rng(
        np.random.SeedSequence((spec.seed, _NOISE_STREAM, int(frame_index)))
    )
    z = rng.standard_normal(2 * n)
    scale = math.sqrt(spec.total_power / 2.0)
    samples = scale * (z[0::2] + 1j * z[1::2])
    return ComplexFrame(samples, sample_rate_hz, center_freq_hz, capture_time)


def gen_signal_frame(
    n: int,
    spec: SignalSpec,
    frame_index: int,
    *,
    sample_rate_hz: float = 1.0,
    center_freq_hz: float = 1.0,
    capture_time: float = 0.0,
) -> ComplexFrame:
    """Generate n samples of the spec'd waveform.

    tone: amplitude * exp(j*(2*pi*normalized_freq*m + phase)).
    bpsk: amplitude * (+/-1) symbols, each held symbol_rate_divisor samples,
    symbol signs drawn from (seed, frame_index). none: zeros.
    """
    if n < 1:
        raise ValueError("n must be >= 1 (empty frames are not representable)")
    m = np.arange(n)
    if spec.kind == "tone":
        samples = spec.amplitude * np.exp(1j * (2 * np.pi * spec.normalized_freq * m + spec.phase))
    elif spec.kind == "bpsk":
        rng = np.random.default_rng(
            np.random.SeedSequence((spec.seed, _BPSK_STREAM, int(frame_index)))
        )
        n_sym = -(-n // spec.symbol_rate_divisor)
        symbols = rng.integers(0, 2, size=n_sym) * 2 - 1
        chips = np.repeat(symbols, spec.symbol_rate_divisor)[:n]
        samples = (spec.amplitude * chips).astype(np.complex128)
    else:  # none
        samples = np.zeros(n, dtype=np.complex128)
    return ComplexFrame(samples, sample_rate_hz, center_freq_hz, capture_time)


def snr_scale(signal_power: float, noise_power: float, snr_db: float) -> float:
    """Amplitude factor a with (a^2 * signal_power) / noise_power = 10**(snr_db/10).

    snr_db may be -inf (scale 0, i.e. absent signal). A zero-power signal is
    only meaningful with snr_db=-inf; any finite target raises ValueError.
    """
    if not noise_power > 0:
        raise ValueError("noise_power must be > 0")
    if snr_db == -math.inf:
        return 0.0
    if signal_power <= 0:
        raise ValueError("zero-power signal cannot be scaled to a finite SNR")
    return math.sqrt(10 ** (snr_db / 10.0) * noise_power / signal_power)


def mix_at_snr(
    signal: ComplexFrame,
    noise: ComplexFrame,
    snr_db: float,
    signal_power: float,
    noise_power: float,
) -> ComplexFrame:
    """Return scale*signal + noise at the requested nominal SNR.

    Powers are the nominal spec powers, not per-frame empirical ones. The
    output keeps the noise frame's metadata.
    """
    if len(signal) != len(noise):
        raise ValueError("signal and noise frames must have equal length")
    alpha = snr_scale(signal_power, noise_power, snr_db)
    if alpha == 0.0:
        return noise
    return ComplexFrame(
        alpha * signal.samples + noise.samples,
        noise.sample_rate_hz,
        noise.center_freq_hz,
        noise.capture_time,
    )


def gen_channel_timeline(
    schedule: OccupancySchedule,
    signal: SignalSpec,
    noise: NoiseSpec,
    snr_db: float,
    frame_len: int,
    frame_interval_s: float,
    total_s: float,
    *,
    sample_rate_hz: float = 1.0,
    center_freq_hz: float = 1.0,
    start_time: float = 0.0,
) -> list[tuple[ComplexFrame, bool]]:
    """Simulate one channel: one (frame, truth_label) pair per scan interval.

    Frame k is captured at start_time + k*frame_interval_s for
    k = 0 .. floor(total_s/frame_interval_s)-1. Present frames are
    signal+noise at snr_db; absent frames are the same noise draw alone, so a
    present frame differs from its absent counterpart by exactly the scaled
    signal.
    """
    if not frame_interval_s > 0:
        raise ValueError("frame_interval_s must be > 0")
    if total_s < 0:
        raise ValueError("total_s must be >= 0")
    # tolerance absorbs float division artifacts like 10/0.1 -> 99.999...
    n_frames = int(math.floor(total_s / frame_interval_s + 1e-9))
    alpha = snr_scale(signal.nominal_power, noise.total_power, snr_db) \
        if signal.kind != "none" else 0.0

    out = []
    for k in range(n_frames):
        t = start_time + k * frame_interval_s
        present = schedule.is_on(t - start_time)
        noise_frame = gen_noise_frame(
            frame_len, noise, k,
            sample_rate_hz=sample_rate_hz, center_freq_hz=center_freq_hz, capture_time=t,
        )
        if present and alpha != 0.0:
            sig_frame = gen_signal_frame(
                frame_len, signal, k,
                sample_rate_hz=sample_rate_hz, center_freq_hz=center_freq_hz, capture_time=t,
            )
            frame = ComplexFrame(
                alpha * sig_frame.samples + noise_frame.samples,
                sample_rate_hz, center_freq_hz, t,
            )
        else:
            frame = noise_frame
        out.append((frame, present))
    return out
