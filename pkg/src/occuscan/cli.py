"""Command-line surface: calibrate, simulate, analyze, report, eval.

Every command is deterministic given its inputs and the master seed; CSV
outputs are byte-identical across repeated runs and across --workers counts
(channels and eval tasks are pure functions of derived seeds, merged in a
fixed order).
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .channels import Channel
from .detectors import (
    DETECTORS,
    acf_vector,
    calibrate_ed_threshold,
    calibrate_reference,
    raw_correlation_distance,
    save_reference,
)
from .errors import OccuscanError
from .evaluate import measure_pd_pfa, roc_curve, write_eval_csv
from .iq import read_recording
from .report import aggregate, channel_slug, report_matrix, write_occupancy_csv, write_plot_data
from .scan import (
    TruthRecord,
    record_sort_key,
    scan_channel,
    write_plan_csv,
    write_records_csv,
    write_truth_csv,
)
from .scenario import Scenario
from .synth import gen_channel_timeline, gen_noise_frame, gen_signal_frame, mix_at_snr


def _load_scenario(args) -> Scenario:
    scenario = Scenario.load(args.scenario)
    if getattr(args, "seed", None) is not None:
        data = dict(scenario.data)
        data["master_seed"] = args.seed
        scenario = Scenario(data, args.scenario)
    return scenario


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# --- calibrate ---------------------------------------------------------------

def cmd_calibrate(args) -> int:
    scenario = _load_scenario(args)
    cal = scenario.calibration()
    out = _out_dir(args)
    n = scenario.frame_len()

    training = []
    for i in range(cal["reference_frames"]):
        sig = gen_signal_frame(n, cal["signal"], i)
        noise = gen_noise_frame(n, cal["noise"], i)
        training.append(
            mix_at_snr(sig, noise, cal["snr_db"], cal["signal"].nominal_power,
                       cal["noise"].total_power)
        )
    reference = calibrate_reference(training, cal["acf_lags"])
    ref_path = out / "reference.txt"
    save_reference(reference, ref_path)

    # threshold frames are drawn past the reference indices so the quantile
    # never sees the training noise
    offset = cal["reference_frames"]
    noise_frames = (
        gen_noise_frame(n, cal["noise"], offset + i) for i in range(cal["threshold_frames"])
    )
    lambda_ed = calibrate_ed_threshold(noise_frames, cal["target_pfa"])

    print(f"reference={ref_path}")
    print(f"lambda_ed={lambda_ed!r}")
    return 0


# --- simulate ----------------------------------------------------------------

def _simulate_channel(task):
    """Generate one channel's timeline and scan it. Runs in worker processes."""
    channel, params, config, n, interval, total, rate, start = task
    timeline = gen_channel_timeline(
        params.schedule, params.signal, params.noise, params.snr_db,
        n, interval, total,
        sample_rate_hz=rate, center_freq_hz=channel.center_freq_hz, start_time=start,
    )
    records = []
    truths = []
    for frame, label in timeline:
        records.extend(scan_channel(frame, channel, config))
        truths.append((frame.capture_time, channel, label))
    return records, truths


def cmd_simulate(args) -> int:
    scenario = _load_scenario(args)
    out = _out_dir(args)
    plan = scenario.plan()
    config = scenario.detector_config()
    n = scenario.frame_len()
    interval = scenario.frame_interval_s()
    total = scenario.total_s()

    band_pos = {}
    for c in plan:
        band_pos.setdefault(c.band, len(band_pos))
    tasks = [
        (
            c,
            scenario.channel_params(c, band_pos[c.band]),
            config,
            n,
            interval,
            total,
            scenario.sample_rate_hz,
            scenario.start_time_unix,
        )
        for c in plan
    ]

    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(_simulate_channel, tasks))
    else:
        results = [_simulate_channel(t) for t in tasks]

    records = [r for recs, _ in results for r in recs]
    records.sort(key=record_sort_key(plan))
    truths = [
        TruthRecord(t, c, bool(lab))
        for _, trs in results
        for t, c, lab in trs
    ]
    truths.sort(key=lambda tr: (tr.capture_time, band_pos[tr.channel.band],
                                tr.channel.index_in_band))

    write_plan_csv(plan, out / "plan.csv")
    write_records_csv(records, out / "records.csv")
    write_truth_csv(truths, out / "truth.csv")
    print(f"wrote {len(records)} records for {len(plan)} channels to {out}")
    return 0


# --- analyze -----------------------------------------------------------------

def cmd_analyze(args) -> int:
    scenario = _load_scenario(args)
    out = _out_dir(args)
    config = scenario.detector_config()
    n = scenario.frame_len()

    frames, discarded = read_recording(args.iq, args.meta, n)
    channel = Channel("recording", 0, args.center_mhz)
    records = []
    for frame in frames:
        recs = scan_channel(frame, channel, config, freq_tol_mhz=args.freq_tol_mhz)
        records.extend(recs)
        if args.verbose:
            by_det = {r.detector: r for r in recs}
            raw = ""
            if not by_det["cdist"].degenerate:
                raw_d = raw_correlation_distance(
                    config.reference, acf_vector(frame, config.acf_lags)
                )
                raw = f" raw_dist={raw_d:.9g}"
            print(
                f"t={frame.capture_time:.6f} ed={by_det['ed'].statistic:.9g} "
                f"acf1={by_det['acf1'].statistic:.9g} "
                f"cdist={by_det['cdist'].statistic:.9g}{raw}"
            )

    write_records_csv(records, out / "records.csv")
    print(f"analyzed {len(frames)} frames ({discarded} samples discarded), "
          f"wrote {len(records)} records")
    return 0


# --- report ------------------------------------------------------------------

def cmd_report(args) -> int:
    from .scan import read_records_csv

    out = _out_dir(args)
    records = read_records_csv(args.records)
    cells = aggregate(records, args.bins)
    write_occupancy_csv(cells, out / "occupancy.csv")

    plots = out / "plots"
    plots.mkdir(exist_ok=True)
    channels = sorted(
        {c.channel for c in cells},
        key=lambda ch: (ch.band, ch.index_in_band),
    )
    for channel in channels:
        matrix = report_matrix(cells, channel)
        write_plot_data(matrix, plots / f"{channel_slug(channel)}.dat")
    print(f"wrote {len(cells)} occupancy cells and {len(channels)} plot files to {out}")
    return 0


# --- eval --------------------------------------------------------------------

def _eval_task(task):
    kind, detector, config, signal, noise, snr_db, n, trials, thresholds = task
    if kind == "point":
        return [measure_pd_pfa(detector, config, signal, noise, snr_db, n, trials)]
    return roc_curve(detector, config, signal, noise, snr_db, n, trials, thresholds)


def cmd_eval(args) -> int:
    scenario = _load_scenario(args)
    out = _out_dir(args)
    config = scenario.detector_config()
    ev = scenario.eval_settings()

    tasks = []
    labels = []
    for det in DETECTORS:
        for snr_db in ev["snr_db_points"]:
            tasks.append(("point", det, config, ev["signal"], ev["noise"],
                          snr_db, ev["frame_len"], ev["trials"], None))
            labels.append("point")
    for det in DETECTORS:
        thrs = ev["roc_thresholds"].get(det)
        if thrs:
            tasks.append(("roc", det, config, ev["signal"], ev["noise"],
                          ev["roc_snr_db"], ev["frame_len"], ev["trials"], thrs))
            labels.append("roc")

    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(_eval_task, tasks))
    else:
        results = [_eval_task(t) for t in tasks]

    rows = [(label, op) for label, ops in zip(labels, results) for op in ops]
    write_eval_csv(rows, out / "eval.csv")
    print(f"wrote {len(rows)} operating points to {out / 'eval.csv'}")
    return 0


# --- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="occuscan",
        description="Spectrum occupancy scanning toolkit: simulate, analyze, "
        "calibrate and evaluate three sensing detectors over a channel plan.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=True):
        p.add_argument("--scenario", required=True, help="scenario YAML path")
        p.add_argument("--out", required=True, help="output directory")
        if seed:
            p.add_argument("--seed", type=int, default=None,
                           help="override the scenario master_seed (u64)")

    p_cal = sub.add_parser("calibrate", help="write the reference ACF vector and "
                           "print the calibrated energy threshold")
    common(p_cal)
    p_cal.set_defaults(func=cmd_calibrate)

    p_sim = sub.add_parser("simulate", help="run the synthetic sweep, write record "
                           "and truth CSVs")
    common(p_sim)
    p_sim.add_argument("--workers", type=int, default=1,
                       help="parallel channel workers (output is identical for any count)")
    p_sim.set_defaults(func=cmd_simulate)

    p_ana = sub.add_parser("analyze", help="scan an IQ recording offline")
    common(p_ana)
    p_ana.add_argument("--iq", required=True, help=".iq payload path")
    p_ana.add_argument("--meta", required=True, help=".iq.meta sidecar path")
    p_ana.add_argument("--center-mhz", type=float, required=True,
                       dest="center_mhz", help="channel center frequency in MHz")
    p_ana.add_argument("--freq-tol-mhz", type=float, default=1.0, dest="freq_tol_mhz")
    p_ana.add_argument("--verbose", action="store_true",
                       help="print per-frame statistics incl. the raw (unscaled) "
                       "correlation distance")
    p_ana.set_defaults(func=cmd_analyze)

    p_rep = sub.add_parser("report", help="aggregate a record CSV into occupancy "
                           "cells and plot data")
    p_rep.add_argument("--records", required=True, help="record CSV path")
    p_rep.add_argument("--out", required=True, help="output directory")
    p_rep.add_argument("--bins", type=float, default=3600.0,
                       help="time bin length in seconds")
    p_rep.set_defaults(func=cmd_report)

    p_ev = sub.add_parser("eval", help="Monte Carlo Pd/Pfa measurement and ROC curves")
    common(p_ev)
    p_ev.add_argument("--workers", type=int, default=1,
                      help="parallel eval workers (output is identical for any count)")
    p_ev.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OccuscanError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
