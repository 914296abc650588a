"""Monte Carlo detector quality measurement: Pd, Pfa, ROC, recovery error.

Trials are paired: trial i's noise draw is shared between the signal-absent
and signal-present hypotheses, and statistic arrays are computed once per
trial set so every threshold (and every detector) sees the same randomness.
That makes ROC curves monotone by construction and detector comparisons
meaningful at matched false-alarm rates. Trial i derives all its randomness
from (spec seed, i), so results are independent of execution order.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .detectors import (
    DETECTOR_ACF1,
    DETECTOR_CDIST,
    DETECTOR_ED,
    DETECTORS,
    DetectorConfig,
    acf1_statistic,
    acf_vector,
    correlation_distance,
    energy_statistic,
)
from .errors import ConfigurationError
from .iq import ComplexFrame
from .scan import _fmt
from .synth import (
    NoiseSpec,
    OccupancySchedule,
    SignalSpec,
    gen_channel_timeline,
    gen_noise_frame,
    gen_signal_frame,
    snr_scale,
)

EVAL_CSV_HEADER = "detector,scenario,snr_db,threshold,trials,pd,pfa"


@dataclass(frozen=True)
class OperatingPoint:
    """Measured (pd, pfa) for one detector at one threshold and SNR."""

    detector: str
    snr_db: float
    threshold: float
    pd: float
    pfa: float
    trials: int

    def __post_init__(self):
        if self.detector not in DETECTORS:
            raise ValueError(f"unknown detector {self.detector!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not (0.0 <= self.pd <= 1.0 and 0.0 <= self.pfa <= 1.0):
            raise ValueError("pd and pfa must lie in [0, 1]")


def _statistic_fn(detector: str, config: DetectorConfig):
    if detector == DETECTOR_ED:
        return energy_statistic
    if detector == DETECTOR_ACF1:
        return acf1_statistic
    if detector == DETECTOR_CDIST:
        return lambda frame: correlation_distance(
            config.reference, acf_vector(frame, config.acf_lags)
        )
    raise ConfigurationError(f"unknown detector {detector!r}")


def decides_present(detector: str, statistic, threshold: float):
    """Vectorized decision rule: > threshold for ed/acf1, < threshold for cdist."""
    statistic = np.asarray(statistic)
    if detector == DETECTOR_CDIST:
        return statistic < threshold
    return statistic > threshold


def trial_statistics(
    detector: str,
    config: DetectorConfig,
    signal_spec: SignalSpec,
    noise_spec: NoiseSpec,
    snr_db: float,
    n: int,
    trials: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Statistic arrays (signal-absent, signal-present) over paired trials.

    Trial i uses noise frame i under both hypotheses; the present-hypothesis
    frame adds signal frame i scaled to snr_db.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    stat = _statistic_fn(detector, config)
    alpha = (
        snr_scale(signal_spec.nominal_power, noise_spec.total_power, snr_db)
        if signal_spec.kind != "none"
        else 0.0
    )
    h0 = np.empty(trials)
    h1 = np.empty(trials)
    for i in range(trials):
        noise = gen_noise_frame(n, noise_spec, i)
        h0[i] = stat(noise)
        if alpha == 0.0:
            h1[i] = h0[i]
        else:
            sig = gen_signal_frame(n, signal_spec, i)
            mixed = ComplexFrame(
                alpha * sig.samples + noise.samples,
                noise.sample_rate_hz,
                noise.center_freq_hz,
                noise.capture_time,
            )
            h1[i] = stat(mixed)
    return h0, h1


def measure_pd_pfa(
    detector: str,
    config: DetectorConfig,
    signal_spec: SignalSpec,
    noise_spec: NoiseSpec,
    snr_db: float,
    n: int,
    trials: int,
) -> OperatingPoint:
    """Monte Carlo (pd, pfa) at the detector's configured threshold."""
    threshold = {
        DETECTOR_ED: config.lambda_ed,
        DETECTOR_ACF1: config.lambda_acf,
        DETECTOR_CDIST: config.gamma,
    }[detector]
    h0, h1 = trial_statistics(detector, config, signal_spec, noise_spec, snr_db, n, trials)
    return OperatingPoint(
        detector=detector,
        snr_db=snr_db,
        threshold=threshold,
        pd=float(np.mean(decides_present(detector, h1, threshold))),
        pfa=float(np.mean(decides_present(detector, h0, threshold))),
        trials=trials,
    )


def roc_curve(
    detector: str,
    config: DetectorConfig,
    signal_spec: SignalSpec,
    noise_spec: NoiseSpec,
    snr_db: float,
    n: int,
    trials: int,
    thresholds,
) -> list[OperatingPoint]:
    """Operating points over a sorted threshold list on one shared trial set.

    Sharing trials makes pd/pfa exactly non-increasing in threshold for
    ed/acf1 and non-decreasing for cdist (present means distance below the
    threshold there).
    """
    thresholds = list(thresholds)
    if len(thresholds) < 2:
        raise ValueError("roc_curve needs at least 2 thresholds")
    if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
        raise ValueError("thresholds must be strictly increasing")
    h0, h1 = trial_statistics(detector, config, signal_spec, noise_spec, snr_db, n, trials)
    return [
        OperatingPoint(
            detector=detector,
            snr_db=snr_db,
            threshold=thr,
            pd=float(np.mean(decides_present(detector, h1, thr))),
            pfa=float(np.mean(decides_present(detector, h0, thr))),
            trials=trials,
        )
        for thr in thresholds
    ]


def tune_threshold_for_pfa(detector: str, h0_statistics, target_pfa: float) -> float:
    """Threshold achieving the target false-alarm rate on the given H0 sample.

    For ed/acf1 (present above threshold) this is the empirical
    (1 - target_pfa) quantile; for cdist (present below) the target_pfa
    quantile.
    """
    if not 0.0 < target_pfa < 1.0:
        raise ValueError("target_pfa must lie in (0, 1)")
    h0 = np.asarray(h0_statistics, dtype=np.float64)
    if h0.size < 1:
        raise ValueError("need at least one H0 statistic")
    if detector == DETECTOR_CDIST:
        return float(np.quantile(h0, target_pfa))
    return float(np.quantile(h0, 1.0 - target_pfa))


@dataclass(frozen=True)
class RecoveryResult:
    true_duty: float
    measured_occupancy: float
    abs_error: float


def occupancy_recovery(
    schedule: OccupancySchedule,
    detector: str,
    config: DetectorConfig,
    signal_spec: SignalSpec,
    noise_spec: NoiseSpec,
    snr_db: float,
    frame_len: int,
    frame_interval_s: float,
    total_s: float,
) -> RecoveryResult:
    """How well detected occupancy recovers a known duty cycle.

    Runs the detector over a synthetic timeline and compares the fraction of
    present decisions (occupancy over all scans) to the schedule's duty
    cycle.
    """
    stat = _statistic_fn(detector, config)
    threshold = {
        DETECTOR_ED: config.lambda_ed,
        DETECTOR_ACF1: config.lambda_acf,
        DETECTOR_CDIST: config.gamma,
    }[detector]
    timeline = gen_channel_timeline(
        schedule, signal_spec, noise_spec, snr_db, frame_len, frame_interval_s, total_s
    )
    if not timeline:
        raise ValueError("scenario produced no scans")
    decisions = [
        bool(decides_present(detector, stat(frame), threshold)) for frame, _ in timeline
    ]
    measured = sum(decisions) / len(decisions)
    true_duty = schedule.duty_cycle
    return RecoveryResult(true_duty, measured, abs(measured - true_duty))


def write_eval_csv(rows, path) -> None:
    """rows: iterable of (scenario_label, OperatingPoint)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(EVAL_CSV_HEADER.split(","))
        for label, op in rows:
            writer.writerow(
                [
                    op.detector,
                    label,
                    _fmt(op.snr_db),
                    _fmt(op.threshold),
                    op.trials,
                    _fmt(op.pd),
                    _fmt(op.pfa),
                ]
            )
