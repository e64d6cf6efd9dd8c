"""Exit criteria of the build, one test per criterion.

Run with ``pytest tests/test_acceptance.py``; the terminal summary lists one
PASS/FAIL line per criterion.
"""

import math
import time

import numpy as np
import pytest

from softnc import cli
from softnc.bcjr import bcjr_decode
from softnc.channel import add_awgn, bpsk_modulate, channel_llr
from softnc.config import ExperimentConfig, format_config
from softnc.convcode import TURBO_RSC, encode
from softnc.core import L_MAX, LINK_ABSENT, boxplus
from softnc.exitchart import (DEFAULT_GRID, exit_curve_check_node, exit_curve_conv_decoder,
                              measure_mutual_information, staircase)
from softnc.harness import run_point, simulate_frame, simulate_frame_baseline
from softnc.oracles import boxplus_probability, bpsk_awgn_mutual_information, exhaustive_map


def test_1_bcjr_matches_exhaustive_map(trellis, report):
    rng = np.random.default_rng(1001)
    start = time.perf_counter()
    worst = 0.0
    for var in (0.25, 0.5, 1.0):
        for _ in range(100):
            c = encode(rng.integers(0, 2, 8), trellis).bits()
            llr = -2.0 * (bpsk_modulate(c) + math.sqrt(var) * rng.standard_normal(c.size)) / var
            got = bcjr_decode(trellis, llr[:12], llr[12:]).info_posterior
            want = np.clip(exhaustive_map(TURBO_RSC, 8, llr[:12], llr[12:]), -L_MAX, L_MAX)
            worst = max(worst, float(np.max(np.abs(got - want))))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and elapsed < 60
    report(1, "BCJR vs exhaustive MAP (K=8, 300 frames)", ok, f"max |diff| {worst:.2e}, {elapsed:.1f}s")
    assert ok


def test_2_boxplus_correctness(report):
    rng = np.random.default_rng(1002)
    a, b, c = rng.uniform(-20, 20, (3, 100_000))
    oracle_err = float(np.max(np.abs(boxplus(a, b) - boxplus_probability(a, b))))
    comm_err = float(np.max(np.abs(boxplus(a, b) - boxplus(b, a))))
    assoc_err = float(np.max(np.abs(boxplus(boxplus(a, b), c) - boxplus(a, boxplus(b, c)))))
    out = boxplus(a, b)
    magnitude_ok = bool(np.all(np.abs(out) <= np.minimum(np.abs(a), np.abs(b)) + math.log(2.0)))
    nz = (np.abs(a) > 1e-3) & (np.abs(b) > 1e-3)
    sign_ok = bool(np.all(np.sign(out[nz]) == -np.sign(a[nz]) * np.sign(b[nz])))
    ok = max(oracle_err, comm_err, assoc_err) <= 1e-9 and magnitude_ok and sign_ok
    report(2, "boxplus vs probability domain, algebra and bounds", ok,
           f"oracle {oracle_err:.1e}, comm {comm_err:.1e}, assoc {assoc_err:.1e}, "
           f"magnitude {magnitude_ok}, sign {sign_ok}")
    assert ok


def test_3_no_relay_reduction(report):
    cfg = ExperimentConfig()
    mismatched = 0
    for f in range(1000):
        d1, d2, _, _, _ = simulate_frame(cfg, -1.0, LINK_ABSENT, f)
        b1, b2, _, _ = simulate_frame_baseline(cfg, -1.0, f)
        mismatched += not (np.array_equal(d1, b1) and np.array_equal(d2, b2))
    report(3, "SNR_rd = -inf equals two independent decoders (1000 frames)", mismatched == 0,
           f"{mismatched} mismatched frames")
    assert mismatched == 0


def _relay_gain(snr_sr, grid):
    cfg = ExperimentConfig(snr_sr_db=snr_sr, max_iter=10, frame_length=1024, min_error_events=100,
                           max_frames=3000, seed=4)
    best = None
    lines = []
    for sd in grid:
        base = run_point(cfg, sd, LINK_ABSENT)
        relay = run_point(cfg, sd, 10.0)
        pooled = math.hypot(base.ber_stderr, relay.ber_stderr)
        z = (base.ber - relay.ber) / pooled if pooled > 0 else 0.0
        enough = base.bit_errors >= 100 and relay.bit_errors >= 100
        lines.append(f"{sd:g}dB: {base.ber:.2e} -> {relay.ber:.2e} ({z:.0f} SE{'' if enough else ', <100 errors'})")
        if enough and (best is None or z > best):
            best = z
    return best, "; ".join(lines)


@pytest.mark.slow
@pytest.mark.parametrize("snr_sr, grid", [(5.0, (-6.0, -5.5, -5.0, -4.5)), (0.0, (-5.0, -4.0, -3.0, -2.0))])
def test_4_relay_gain_in_waterfall(snr_sr, grid, report):
    start = time.perf_counter()
    best, detail = _relay_gain(snr_sr, grid)
    elapsed = time.perf_counter() - start
    ok = best is not None and best > 3.0 and elapsed <= 15 * 60
    report(4, f"relay gain at SNR_sr = {snr_sr:g} dB", ok, f"{detail}; {elapsed:.0f}s")
    assert ok


def test_5_check_node_exit_endpoints(report):
    curves = {snr: exit_curve_check_node(snr, DEFAULT_GRID, 200_000, seed=5) for snr in (LINK_ABSENT, -5.0, 1.0, 20.0)}
    at_zero = max(abs(c.i_e[0]) for c in curves.values())
    above = max(float(np.max(c.i_e - c.i_a)) for c in curves.values())
    identity_dev = float(np.max(np.abs(curves[20.0].i_e - curves[20.0].i_a)))
    absent_max = float(np.max(curves[LINK_ABSENT].i_e))
    ok = at_zero <= 0.01 and above <= 0.01 and identity_dev < 0.02 and absent_max < 0.01
    report(5, "check-node EXIT endpoints", ok,
           f"i_e(0) {at_zero:.3g}, max(i_e - i_a) {above:.3g}, 20 dB deviation {identity_dev:.3g}, "
           f"-inf max {absent_max:.3g}")
    assert ok


def test_6_trajectory_reaches_full_information(trellis, report):
    dec = exit_curve_conv_decoder(-5.0, DEFAULT_GRID, 200_000, 1024, seed=6, trellis=trellis)
    chk = exit_curve_check_node(1.0, DEFAULT_GRID, 200_000, seed=6)
    steps = staircase(dec, chk, max_steps=20)
    final = max(max(p) for p in steps)
    ok = final > 0.95
    report(6, "trajectory at SNR_sd = -5 dB, SNR_r = 1 dB", ok, f"reaches {final:.4f} bits in {len(steps) - 1} steps")
    assert ok


def test_7_mutual_information_estimator(report):
    rng = np.random.default_rng(1007)
    errs = []
    for snr in (-5.0, 0.0, 5.0):
        var = 1.0 / (2.0 * 10 ** (snr / 10))
        bits = rng.integers(0, 2, 1_000_000)
        llr = channel_llr(add_awgn(bpsk_modulate(bits), var, rng), var)
        errs.append(abs(measure_mutual_information(llr, bits) - bpsk_awgn_mutual_information(snr)))
    ok = max(errs) <= 0.01
    report(7, "MI estimator vs Gauss-Hermite (-5, 0, 5 dB)", ok, ", ".join(f"{e:.1e}" for e in errs))
    assert ok


def test_8_ber_determinism_across_workers(tmp_path, report):
    cfg = ExperimentConfig(frame_length=256, snr_sd_grid=(-4.0, -2.0), snr_rd_list=(LINK_ABSENT, 5.0),
                           max_frames=24, min_error_events=100, seed=8)
    conf = tmp_path / "exp.cfg"
    conf.write_text(format_config(cfg))
    outs = []
    for workers in (1, 8, 1):
        out = tmp_path / f"ber_{workers}_{len(outs)}.csv"
        assert cli.main(["ber", "--config", str(conf), "--seed", "8", "--workers", str(workers), "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    ok = outs[0] == outs[1] == outs[2] and len(outs[0].splitlines()) == 5
    report(8, "ber CSV byte-identical for workers 1 and 8", ok, f"{len(outs[0])} bytes")
    assert ok
