"""Monte Carlo Pd/Pfa measurement, ROC behavior, and duty recovery."""

import math

import numpy as np
import pytest

from occuscan import AcfVector, DetectorConfig, NoiseSpec, OccupancySchedule, SignalSpec
from occuscan.detectors import acf_vector
from occuscan.evaluate import (
    EVAL_CSV_HEADER,
    OperatingPoint,
    decides_present,
    measure_pd_pfa,
    occupancy_recovery,
    roc_curve,
    trial_statistics,
    tune_threshold_for_pfa,
    write_eval_csv,
)
from occuscan.synth import gen_signal_frame

SIG = SignalSpec(kind="tone", normalized_freq=0.13, seed=5)
NOISE = NoiseSpec(total_power=1.0, seed=6)


def _config(lambda_ed=1.052, lambda_acf=0.25, gamma=0.6, lags=8):
    ref = acf_vector(gen_signal_frame(1024, SIG, 0), lags)
    return DetectorConfig(lambda_ed, lambda_acf, gamma, lags, ref)


class TestOperatingPoint:
    def test_validation(self):
        OperatingPoint("ed", 5.0, 1.05, 0.99, 0.05, 100)
        with pytest.raises(ValueError):
            OperatingPoint("other", 5.0, 1.05, 0.99, 0.05, 100)
        with pytest.raises(ValueError):
            OperatingPoint("ed", 5.0, 1.05, 1.2, 0.05, 100)
        with pytest.raises(ValueError):
            OperatingPoint("ed", 5.0, 1.05, 0.5, 0.05, 0)


class TestDecidesPresent:
    def test_direction_per_detector(self):
        assert decides_present("ed", 1.1, 1.0)
        assert not decides_present("ed", 1.0, 1.0)
        assert decides_present("acf1", 0.3, 0.25)
        assert decides_present("cdist", 0.1, 0.5)
        assert not decides_present("cdist", 0.5, 0.5)

    def test_vectorized(self):
        out = decides_present("ed", np.array([0.5, 1.5]), 1.0)
        np.testing.assert_array_equal(out, [False, True])


class TestTrialStatistics:
    def test_paired_and_deterministic(self):
        cfg = _config()
        h0a, h1a = trial_statistics("ed", cfg, SIG, NOISE, 10.0, 256, 50)
        h0b, h1b = trial_statistics("ed", cfg, SIG, NOISE, 10.0, 256, 50)
        np.testing.assert_array_equal(h0a, h0b)
        np.testing.assert_array_equal(h1a, h1b)
        # paired: adding signal power raises every trial's energy
        assert np.all(h1a > h0a)

    def test_h0_independent_of_snr(self):
        cfg = _config()
        h0_lo, _ = trial_statistics("ed", cfg, SIG, NOISE, 0.0, 128, 30)
        h0_hi, _ = trial_statistics("ed", cfg, SIG, NOISE, 30.0, 128, 30)
        np.testing.assert_array_equal(h0_lo, h0_hi)

    def test_none_signal_collapses_hypotheses(self):
        cfg = _config()
        h0, h1 = trial_statistics(
            "ed", cfg, SignalSpec(kind="none"), NOISE, -math.inf, 128, 20
        )
        np.testing.assert_array_equal(h0, h1)

    def test_bad_trials(self):
        with pytest.raises(ValueError):
            trial_statistics("ed", _config(), SIG, NOISE, 0.0, 128, 0)


class TestMeasurePdPfa:
    def test_calibrated_ed_pfa_in_band(self):
        """lambda_ed from the N=1024 5% quantile should measure pfa near 5%."""
        from occuscan.detectors import calibrate_ed_threshold
        from occuscan.synth import gen_noise_frame

        cal_noise = NoiseSpec(1.0, seed=77)
        lam = calibrate_ed_threshold(
            (gen_noise_frame(1024, cal_noise, k) for k in range(10000)), 0.05
        )
        cfg = _config(lambda_ed=lam)
        op = measure_pd_pfa("ed", cfg, SIG, NOISE, 10.0, 1024, 10000)
        assert 0.04 <= op.pfa <= 0.06
        assert op.pd == 1.0

    def test_high_snr_all_detectors_detect(self):
        cfg = _config()
        for det in ("ed", "acf1", "cdist"):
            op = measure_pd_pfa(det, cfg, SIG, NOISE, 20.0, 1024, 300)
            assert op.pd >= 0.999, det

    def test_near_zero_threshold_ed_fires_always(self):
        cfg = _config(lambda_ed=1e-12)
        op = measure_pd_pfa("ed", cfg, SIG, NOISE, 0.0, 256, 200)
        assert op.pd == 1.0 and op.pfa == 1.0

    def test_near_one_gamma_cdist_fires_always(self):
        # every normalized distance is < 1 - 1e-12 in practice
        cfg = _config(gamma=1.0 - 1e-12)
        op = measure_pd_pfa("cdist", cfg, SIG, NOISE, 10.0, 256, 200)
        assert op.pd == 1.0 and op.pfa == 1.0

    def test_deterministic(self):
        cfg = _config()
        a = measure_pd_pfa("acf1", cfg, SIG, NOISE, 5.0, 512, 100)
        b = measure_pd_pfa("acf1", cfg, SIG, NOISE, 5.0, 512, 100)
        assert a == b


class TestRocCurve:
    def test_endpoints_and_monotonicity(self):
        cfg = _config()
        thresholds = [0.85, 0.95, 1.0, 1.05, 1.15, 1.3]
        ops = roc_curve("ed", cfg, SIG, NOISE, 5.0, 1024, 400, thresholds)
        pds = [op.pd for op in ops]
        pfas = [op.pfa for op in ops]
        # shared trials: exactly non-increasing as the threshold rises
        assert all(a >= b for a, b in zip(pds, pds[1:]))
        assert all(a >= b for a, b in zip(pfas, pfas[1:]))
        assert pfas[0] == 1.0  # threshold far below the noise floor
        assert pfas[-1] == 0.0

    def test_cdist_direction_flips(self):
        cfg = _config()
        ops = roc_curve("cdist", cfg, SIG, NOISE, 5.0, 512, 200,
                        [0.05, 0.3, 0.6, 0.95])
        pds = [op.pd for op in ops]
        pfas = [op.pfa for op in ops]
        # present means distance BELOW threshold: rates rise with threshold
        assert all(a <= b for a, b in zip(pds, pds[1:]))
        assert all(a <= b for a, b in zip(pfas, pfas[1:]))

    def test_threshold_validation(self):
        cfg = _config()
        with pytest.raises(ValueError):
            roc_curve("ed", cfg, SIG, NOISE, 5.0, 64, 10, [1.0])
        with pytest.raises(ValueError):
            roc_curve("ed", cfg, SIG, NOISE, 5.0, 64, 10, [1.0, 0.9])

    def test_cdist_beats_acf1_at_matched_pfa(self):
        """At 5 dB and pfa 0.05 on shared trials, cdist detects at least as often."""
        cfg = _config()
        trials, n, snr = 2000, 1024, 5.0
        h0_a, h1_a = trial_statistics("acf1", cfg, SIG, NOISE, snr, n, trials)
        h0_c, h1_c = trial_statistics("cdist", cfg, SIG, NOISE, snr, n, trials)
        thr_a = tune_threshold_for_pfa("acf1", h0_a, 0.05)
        thr_c = tune_threshold_for_pfa("cdist", h0_c, 0.05)
        pd_a = float(np.mean(decides_present("acf1", h1_a, thr_a)))
        pd_c = float(np.mean(decides_present("cdist", h1_c, thr_c)))
        assert pd_c >= pd_a


class TestTuneThreshold:
    def test_ed_upper_quantile(self):
        h0 = np.arange(1, 101, dtype=float)  # 1..100
        thr = tune_threshold_for_pfa("ed", h0, 0.05)
        assert thr == pytest.approx(np.quantile(h0, 0.95))
        assert np.mean(h0 > thr) <= 0.05

    def test_cdist_lower_quantile(self):
        h0 = np.arange(1, 101, dtype=float)
        thr = tune_threshold_for_pfa("cdist", h0, 0.05)
        assert thr == pytest.approx(np.quantile(h0, 0.05))
        assert np.mean(h0 < thr) <= 0.05

    def test_achieved_pfa_close(self):
        cfg = _config()
        h0, _ = trial_statistics("cdist", cfg, SIG, NOISE, 5.0, 512, 2000)
        thr = tune_threshold_for_pfa("cdist", h0, 0.05)
        pfa = float(np.mean(decides_present("cdist", h0, thr)))
        assert abs(pfa - 0.05) < 0.01

    def test_validation(self):
        with pytest.raises(ValueError):
            tune_threshold_for_pfa("ed", [1.0], 0.0)
        with pytest.raises(ValueError):
            tune_threshold_for_pfa("ed", [], 0.05)


class TestOccupancyRecovery:
    def test_thirty_percent_duty(self):
        sched = OccupancySchedule(period_s=1.0, on_intervals=((0.0, 0.3),))
        cfg = _config(gamma=0.6)
        res = occupancy_recovery(sched, "cdist", cfg, SIG, NOISE, 10.0, 1024, 0.1, 100.0)
        assert res.true_duty == pytest.approx(0.3)
        assert res.abs_error <= 0.05

    def test_always_on(self):
        sched = OccupancySchedule(period_s=1.0, on_intervals=((0.0, 1.0),))
        res = occupancy_recovery(sched, "ed", _config(), SIG, NOISE, 20.0, 512, 0.1, 10.0)
        assert res.measured_occupancy == 1.0

    def test_always_off_low_threshold_pathology(self):
        # an energy threshold far below the noise floor reports full occupancy
        sched = OccupancySchedule(period_s=1.0)
        cfg = _config(lambda_ed=0.5)
        res = occupancy_recovery(sched, "ed", cfg, SIG, NOISE, 10.0, 1024, 0.1, 50.0)
        assert res.true_duty == 0.0
        assert res.measured_occupancy == 1.0

    def test_empty_scenario_rejected(self):
        sched = OccupancySchedule(period_s=1.0)
        with pytest.raises(ValueError):
            occupancy_recovery(sched, "ed", _config(), SIG, NOISE, 0.0, 64, 1.0, 0.0)


class TestEvalCsv:
    def test_format(self, tmp_path):
        rows = [
            ("point", OperatingPoint("ed", 5.0, 1.052, 0.875, 0.05, 1000)),
            ("roc", OperatingPoint("cdist", 5.0, 0.3, 0.9, 0.01, 1000)),
        ]
        p = tmp_path / "eval.csv"
        write_eval_csv(rows, p)
        lines = p.read_text().splitlines()
        assert lines[0] == EVAL_CSV_HEADER
        assert lines[1] == "ed,point,5,1.052,1000,0.875,0.05"
        assert lines[2] == "cdist,roc,5,0.3,1000,0.9,0.01"

    def test_byte_identical_rewrites(self, tmp_path):
        rows = [("point", OperatingPoint("acf1", 0.0, 0.25, 0.5, 0.04, 64))]
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        write_eval_csv(rows, p1)
        write_eval_csv(rows, p2)
        assert p1.read_bytes() == p2.read_bytes()
