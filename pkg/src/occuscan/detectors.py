"""The three sensing statistics and their threshold decision rules.

Energy detection
    T = (1/N) * sum |y(n)|^2, present when T exceeds a fixed threshold.

Lag-1 autocorrelation
    Normalized coefficient |ACF(1)| / ACF(0); noise decorrelates at lag 1
    while modulated signals and tones do not.

Correlation distance
    Euclidean distance between a calibrated reference ACF-magnitude vector
    and the observed frame's vector, scaled by 1/sqrt(L) so it lies in [0,1];
    a SMALL distance means signal-like correlation structure, so the decision
    is present when distance < gamma.

All autocorrelations use the linear (non-circular) convention: terms whose
lagged index would fall before the frame start are omitted. Ties on every
threshold resolve to absent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CalibrationError, DegenerateFrameError
from .iq import ComplexFrame

DETECTOR_ED = "ed"
DETECTOR_ACF1 = "acf1"
DETECTOR_CDIST = "cdist"
# canonical order: energy, lag-1 ACF, correlation distance
DETECTORS = (DETECTOR_ED, DETECTOR_ACF1, DETECTOR_CDIST)


@dataclass(frozen=True)
class Decision:
    """Outcome of one detector on one frame."""

    statistic: float
    threshold: float
    present: bool


@dataclass(frozen=True)
class AcfVector:
    """Magnitude-normalized autocorrelation values at lags 0..L-1.

    values[0] is exactly 1 (the normalization anchor) and every entry lies
    in [0, 1].
    """

    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64, copy=True)
        if arr.ndim != 1 or arr.size < 2:
            raise ValueError("AcfVector needs at least 2 lags")
        if arr[0] != 1.0:
            raise ValueError("values[0] must be exactly 1.0")
        if np.any(arr < 0.0) or np.any(arr > 1.0):
            raise ValueError("AcfVector entries must lie in [0, 1]")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class DetectorConfig:
    """Thresholds and reference data for one sweep.

    lambda_ed is in power units; lambda_acf and gamma are dimensionless in
    (0, 1); reference must have exactly acf_lags entries.
    """

    lambda_ed: float
    lambda_acf: float
    gamma: float
    acf_lags: int
    reference: AcfVector

    def __post_init__(self):
        if not self.lambda_ed > 0:
            raise ValueError("lambda_ed must be > 0")
        if not 0.0 < self.lambda_acf < 1.0:
            raise ValueError("lambda_acf must lie in (0, 1)")
        if not 0.0 < self.gamma < 1.0:
            raise ValueError("gamma must lie in (0, 1)")
        if self.acf_lags < 2:
            raise ValueError("acf_lags must be >= 2")
        if len(self.reference) != self.acf_lags:
            raise ValueError(
                f"reference has {len(self.reference)} lags, config says {self.acf_lags}"
            )


def energy_statistic(frame: ComplexFrame) -> float:
    """Mean sample power (1/N) * sum |y(n)|^2."""
    # vdot accumulates re^2 + im^2 without the |.|^2 = sqrt()^2 round trip
    return float(np.vdot(frame.samples, frame.samples).real) / len(frame)


def energy_decide(statistic: float, lambda_ed: float) -> Decision:
    """Present iff statistic > lambda_ed; equality decides absent."""
    if not lambda_ed > 0:
        raise ValueError("lambda_ed must be > 0")
    return Decision(statistic, lambda_ed, statistic > lambda_ed)


def acf(frame: ComplexFrame, lag: int) -> complex:
    """Linear autocorrelation sum_{m=lag}^{N-1} x(m) * conj(x(m-lag)).

    Out-of-range terms are omitted rather than wrapped; circular wrapping
    would fabricate correlation between the frame's ends.
    """
    x = frame.samples
    n = x.size
    if lag < 0:
        raise ValueError("lag must be >= 0")
    if lag >= n:
        raise ValueError(f"lag {lag} out of range for frame of {n} samples")
    if lag == 0:
        return complex(np.vdot(x, x))
    return complex(np.dot(x[lag:], np.conj(x[:-lag])))


def _acf0(frame: ComplexFrame) -> float:
    e = float(np.vdot(frame.samples, frame.samples).real)
    if e == 0.0:
        raise DegenerateFrameError("zero-energy frame: normalized ACF undefined")
    return e


def acf1_statistic(frame: ComplexFrame) -> float:
    """Normalized lag-1 coefficient |ACF(1)| / ACF(0), in [0, 1].

    Invariant under global amplitude scaling and phase rotation of the frame.
    Raises DegenerateFrameError for a zero-energy frame.
    """
    a0 = _acf0(frame)
    if len(frame) == 1:
        return 0.0
    return min(abs(acf(frame, 1)) / a0, 1.0)


def acf1_decide(statistic: float, lambda_acf: float) -> Decision:
    """Present iff statistic > lambda_acf; equality decides absent."""
    if not 0.0 < lambda_acf < 1.0:
        raise ValueError("lambda_acf must lie in (0, 1)")
    return Decision(statistic, lambda_acf, statistic > lambda_acf)


def acf_vector(frame: ComplexFrame, lags: int) -> AcfVector:
    """Magnitude-normalized ACF at lags 0..lags-1 (values[0] forced to 1)."""
    if not 2 <= lags <= len(frame):
        raise ValueError(f"lags must lie in [2, {len(frame)}], got {lags}")
    a0 = _acf0(frame)
    values = np.empty(lags, dtype=np.float64)
    values[0] = 1.0
    for l in range(1, lags):
        # Cauchy-Schwarz bounds the ratio by 1; min() guards float roundoff
        values[l] = min(abs(acf(frame, l)) / a0, 1.0)
    return AcfVector(values)


def calibrate_reference(training, lags: int) -> AcfVector:
    """Entry-wise mean of the training frames' ACF vectors.

    Training frames should be known-present captures (high-SNR or clean
    synthetic signal); values[0] is forced back to exactly 1 after averaging.
    """
    frames = list(training)
    if not frames:
        raise CalibrationError("reference calibration needs at least 1 training frame")
    stack = np.stack([acf_vector(f, lags).values for f in frames])
    mean = stack.mean(axis=0)
    mean[0] = 1.0
    np.clip(mean, 0.0, 1.0, out=mean)
    return AcfVector(mean)


def correlation_distance(reference: AcfVector, observed: AcfVector) -> float:
    """Euclidean distance between ACF vectors, scaled by 1/sqrt(L) into [0,1]."""
    if len(reference) != len(observed):
        raise ValueError(
            f"vector lengths differ: {len(reference)} vs {len(observed)}"
        )
    diff = reference.values - observed.values
    return float(np.sqrt(np.mean(diff * diff)))


def raw_correlation_distance(reference: AcfVector, observed: AcfVector) -> float:
    """Unnormalized Euclidean distance (the 1/sqrt(L)-free value), for verbose output."""
    if len(reference) != len(observed):
        raise ValueError(
            f"vector lengths differ: {len(reference)} vs {len(observed)}"
        )
    diff = reference.values - observed.values
    return float(np.sqrt(np.sum(diff * diff)))


def distance_decide(d: float, gamma: float) -> Decision:
    """Present iff d < gamma (small distance = signal-like); equality decides absent."""
    if not 0.0 < gamma < 1.0:
        raise ValueError("gamma must lie in (0, 1)")
    return Decision(d, gamma, d < gamma)


def calibrate_ed_threshold(noise_frames, target_pfa: float) -> float:
    """Empirical (1 - target_pfa) quantile of the energy statistic over noise.

    Linear interpolation between order statistics (numpy's default quantile
    method). Needs at least 100 noise-only frames.
    """
    if not 0.0 < target_pfa < 1.0:
        raise ValueError("target_pfa must lie in (0, 1)")
    stats = np.array([energy_statistic(f) for f in noise_frames])
    if stats.size < 100:
        raise CalibrationError(
            f"threshold calibration needs >= 100 noise frames, got {stats.size}"
        )
    return float(np.quantile(stats, 1.0 - target_pfa))


# --- reference-vector file format -------------------------------------------
# line 1: "lags=<L>"; lines 2..L+1: one decimal value per line.

def save_reference(vector: AcfVector, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"lags={len(vector)}\n")
        for v in vector.values:
            fh.write(f"{float(v)!r}\n")


def load_reference(path) -> AcfVector:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or not lines[0].startswith("lags="):
        raise CalibrationError(f"{path}: first line must be lags=<L>")
    try:
        lags = int(lines[0][len("lags="):])
        values = [float(v) for v in lines[1:]]
    except ValueError as exc:
        raise CalibrationError(f"{path}: {exc}") from exc
    if len(values) != lags:
        raise CalibrationError(f"{path}: expected {lags} values, found {len(values)}")
    return AcfVector(np.array(values))
