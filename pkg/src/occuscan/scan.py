"""Sequential three-detector scanning and the append-only record log.

Every scan of a frame produces exactly three ScanRecords (energy, lag-1 ACF,
correlation distance), all computed on the identical frame so the detectors
are directly comparable. Records sort canonically by (capture_time, band
position in the plan, channel index, detector position), which makes
concurrent per-channel scanning merge to the same log as a sequential run.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

from .channels import Channel, local_spacing_mhz
from .detectors import (
    DETECTOR_ACF1,
    DETECTOR_CDIST,
    DETECTOR_ED,
    DETECTORS,
    DetectorConfig,
    acf1_decide,
    acf1_statistic,
    acf_vector,
    correlation_distance,
    distance_decide,
    energy_decide,
    energy_statistic,
)
from .errors import ConfigurationError, CsvParseError, RoutingError
from .iq import ComplexFrame

RECORD_CSV_HEADER = (
    "time_unix,band,channel_index,center_freq_mhz,detector,statistic,threshold,present"
)
TRUTH_CSV_HEADER = "time_unix,band,channel_index,center_freq_mhz,truth_present"
PLAN_CSV_HEADER = "band,channel_index,center_freq_mhz"


@dataclass(frozen=True)
class ScanRecord:
    """One (time, channel, detector) observation.

    ``degenerate`` marks acf1/cdist records from a zero-energy frame: their
    statistics are the no-signal sentinels (0 correlation, maximal distance)
    rather than computed values. The flag is in-memory only; the record CSV
    schema does not carry it.
    """

    capture_time: float
    channel: Channel
    detector: str
    statistic: float
    threshold: float
    present: bool
    degenerate: bool = False


@dataclass(frozen=True)
class TruthRecord:
    """Ground-truth presence label for one scan of one channel."""

    capture_time: float
    channel: Channel
    present: bool


def scan_channel(
    frame: ComplexFrame,
    channel: Channel,
    config: DetectorConfig,
    freq_tol_mhz: float = 1.0,
) -> list[ScanRecord]:
    """Run all three detectors on one frame; returns [ed, acf1, cdist] records.

    The frame must be tuned to the channel within freq_tol_mhz. A zero-energy
    frame (dead channel) is not an error: the energy record is normal
    (statistic 0) and the ACF-based records decide absent with the degenerate
    marker set.
    """
    offset_mhz = abs(frame.center_freq_hz / 1e6 - channel.center_freq_mhz)
    if offset_mhz > freq_tol_mhz:
        raise RoutingError(
            f"frame at {frame.center_freq_hz / 1e6} MHz does not match channel "
            f"{channel.band}[{channel.index_in_band}] at {channel.center_freq_mhz} MHz "
            f"(tolerance {freq_tol_mhz} MHz)"
        )
    t = frame.capture_time

    e_stat = energy_statistic(frame)
    ed = energy_decide(e_stat, config.lambda_ed)
    records = [
        ScanRecord(t, channel, DETECTOR_ED, ed.statistic, ed.threshold, ed.present)
    ]

    if e_stat == 0.0:
        records.append(
            ScanRecord(t, channel, DETECTOR_ACF1, 0.0, config.lambda_acf, False, degenerate=True)
        )
        records.append(
            ScanRecord(t, channel, DETECTOR_CDIST, 1.0, config.gamma, False, degenerate=True)
        )
        return records

    a = acf1_decide(acf1_statistic(frame), config.lambda_acf)
    records.append(ScanRecord(t, channel, DETECTOR_ACF1, a.statistic, a.threshold, a.present))

    d = distance_decide(
        correlation_distance(config.reference, acf_vector(frame, config.acf_lags)),
        config.gamma,
    )
    records.append(ScanRecord(t, channel, DETECTOR_CDIST, d.statistic, d.threshold, d.present))
    return records


def record_sort_key(plan):
    """Canonical record ordering for a given plan."""
    band_pos = {}
    for c in plan:
        band_pos.setdefault(c.band, len(band_pos))
    det_pos = {d: i for i, d in enumerate(DETECTORS)}

    def key(rec: ScanRecord):
        return (
            rec.capture_time,
            band_pos.get(rec.channel.band, len(band_pos)),
            rec.channel.index_in_band,
            det_pos[rec.detector],
        )

    return key


def run_sweep(timelines, config: DetectorConfig, plan) -> tuple[list[ScanRecord], list[TruthRecord]]:
    """Scan every plan channel's timeline; returns (record log, truth log).

    ``timelines`` maps each Channel to its sequence of (frame, truth_label)
    pairs. Records come back in canonical order; truth records mirror the
    scan order with one entry per frame.
    """
    plan = list(plan)
    for channel in plan:
        if channel not in timelines:
            raise ConfigurationError(
                f"no frame source for channel {channel.band}[{channel.index_in_band}]"
            )
    records: list[ScanRecord] = []
    truths: list[TruthRecord] = []
    for channel in plan:
        tol = local_spacing_mhz(plan, channel) / 2.0
        for frame, label in timelines[channel]:
            records.extend(scan_channel(frame, channel, config, freq_tol_mhz=tol))
            truths.append(TruthRecord(frame.capture_time, channel, bool(label)))
    records.sort(key=record_sort_key(plan))
    band_pos = {}
    for c in plan:
        band_pos.setdefault(c.band, len(band_pos))
    truths.sort(
        key=lambda tr: (tr.capture_time, band_pos[tr.channel.band], tr.channel.index_in_band)
    )
    return records, truths


# --- CSV surfaces -----------------------------------------------------------
# Floats are written with 9 significant digits ("%.9g"), times with
# microsecond resolution, presence as 1/0; fixed formatting keeps repeated
# runs byte-identical.

def _fmt(x: float) -> str:
    return f"{x:.9g}"


def _fmt_time(t: float) -> str:
    return f"{t:.6f}"


def write_records_csv(records, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RECORD_CSV_HEADER.split(","))
        for r in records:
            writer.writerow(
                [
                    _fmt_time(r.capture_time),
                    r.channel.band,
                    r.channel.index_in_band,
                    _fmt(r.channel.center_freq_mhz),
                    r.detector,
                    _fmt(r.statistic),
                    _fmt(r.threshold),
                    1 if r.present else 0,
                ]
            )


def read_records_csv(path) -> list[ScanRecord]:
    records = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if lineno == 1:
                if row != RECORD_CSV_HEADER.split(","):
                    raise CsvParseError(f"{path}:1: unexpected header {row}")
                continue
            if not row:
                continue
            try:
                t, band, idx, freq, det, stat, thr, present = row
                if det not in DETECTORS:
                    raise ValueError(f"unknown detector {det!r}")
                if present not in ("0", "1"):
                    raise ValueError(f"present must be 0 or 1, got {present!r}")
                records.append(
                    ScanRecord(
                        capture_time=float(t),
                        channel=Channel(band, int(idx), float(freq)),
                        detector=det,
                        statistic=float(stat),
                        threshold=float(thr),
                        present=present == "1",
                    )
                )
            except ValueError as exc:
                raise CsvParseError(f"{path}:{lineno}: {exc}") from exc
    return records


def write_truth_csv(truths, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRUTH_CSV_HEADER.split(","))
        for tr in truths:
            writer.writerow(
                [
                    _fmt_time(tr.capture_time),
                    tr.channel.band,
                    tr.channel.index_in_band,
                    _fmt(tr.channel.center_freq_mhz),
                    1 if tr.present else 0,
                ]
            )


def write_plan_csv(plan, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PLAN_CSV_HEADER.split(","))
        for c in plan:
            writer.writerow([c.band, c.index_in_band, _fmt(c.center_freq_mhz)])
