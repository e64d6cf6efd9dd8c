import math

import numpy as np
import pytest

from softnc import cli
from softnc.config import ConfigError, ExperimentConfig, format_config, load_config, parse_config_text, parse_db_list
from softnc.core import LINK_ABSENT
from softnc.harness import (BER_COLUMNS, BerRecord, InvariantViolation, ber_csv, run_ber_sweep, simulate_frame,
                            simulate_frame_baseline)

FAST = dict(frame_length=64, max_frames=6, min_error_events=50, max_iter=4)


def test_parse_db_lists():
    assert parse_db_list("-2,-1,0") == (-2.0, -1.0, 0.0)
    assert parse_db_list("-1:1:0.5") == (-1.0, -0.5, 0.0, 0.5, 1.0)
    assert parse_db_list("-inf, 10") == (LINK_ABSENT, 10.0)
    assert parse_db_list("") == ()
    with pytest.raises(ConfigError):
        parse_db_list("1:2")
    with pytest.raises(ConfigError):
        parse_db_list("0:1:-1")
    with pytest.raises(ConfigError):
        parse_db_list("abc")


def test_config_file_round_trip(tmp_path):
    cfg = ExperimentConfig(frame_length=32, snr_rd_list=(LINK_ABSENT, 3.0), seed=9, relay_obs_mode="scaled")
    path = tmp_path / "exp.cfg"
    path.write_text("# comment\n" + format_config(cfg))
    assert load_config(path) == cfg
    assert load_config(path, seed=11).seed == 11


@pytest.mark.parametrize("text", [
    "min_error_events = 10",
    "relay_obs_mode = hard",
    "frame_length = 0",
    "bogus_key = 1",
    "frame_length",
    "max_iter = two",
])
def test_invalid_config_rejected(text):
    with pytest.raises(ConfigError):
        ExperimentConfig(**parse_config_text(text))


def test_ber_record_statistics():
    r = BerRecord(5.0, 0.0, 10.0, "raw", 10, 3, 1000, 10, 2.5)
    assert r.ber == 0.01
    assert r.ber_stderr == pytest.approx(math.sqrt(0.01 * 0.99 / 1000))
    assert r.error_events == 10


def test_no_relay_row_matches_baseline_per_frame():
    cfg = ExperimentConfig(**FAST)
    for f in range(10):
        d1, d2, u1, u2, _ = simulate_frame(cfg, -1.0, LINK_ABSENT, f)
        b1, b2, v1, v2 = simulate_frame_baseline(cfg, -1.0, f)
        np.testing.assert_array_equal(u1, v1)
        np.testing.assert_array_equal(d1, b1)
        np.testing.assert_array_equal(d2, b2)


def test_noiseless_direct_links_give_zero_ber():
    cfg = ExperimentConfig(**FAST, snr_sd_grid=(100.0,), snr_rd_list=(LINK_ABSENT, 5.0))
    records = run_ber_sweep(cfg)
    assert [r.bit_errors for r in records] == [0, 0]
    assert all(r.frames == cfg.max_frames for r in records)


def test_stop_rule_counts_until_error_floor():
    cfg = ExperimentConfig(frame_length=64, max_frames=500, min_error_events=50, max_iter=2,
                           snr_sd_grid=(-6.0,), snr_rd_list=(LINK_ABSENT,))
    (r,) = run_ber_sweep(cfg)
    assert r.bit_errors >= 50 and r.frames < 500
    assert r.info_bits == r.frames * 128


def test_ber_csv_layout():
    cfg = ExperimentConfig(**FAST, snr_sd_grid=(0.0,), snr_rd_list=(LINK_ABSENT, 10.0))
    lines = ber_csv(run_ber_sweep(cfg)).splitlines()
    assert lines[0].split(",") == list(BER_COLUMNS)
    assert len(lines) == 3
    assert lines[1].split(",")[2] == "-inf"


def test_sweep_determinism_across_workers():
    cfg = ExperimentConfig(**FAST, snr_sd_grid=(-2.0, 0.0), snr_rd_list=(LINK_ABSENT, 5.0))
    a = ber_csv(run_ber_sweep(cfg, workers=1))
    assert a == ber_csv(run_ber_sweep(cfg, workers=1))
    assert a == ber_csv(run_ber_sweep(cfg, workers=3))


def test_cli_ber_writes_csv(tmp_path):
    out = tmp_path / "ber.csv"
    rc = cli.main(["ber", "--snr-sd", "0", "--snr-rd=-inf,10", "--frames", "2", "--iters", "3",
                   "--seed", "5", "--out", str(out)])
    assert rc == 0
    rows = out.read_text().splitlines()
    assert rows[0] == ",".join(BER_COLUMNS) and len(rows) == 3


def test_cli_config_errors_exit_2(tmp_path, capsys):
    assert cli.main(["ber", "--mode", "hard"]) == cli.EXIT_CONFIG
    bad = tmp_path / "bad.cfg"
    bad.write_text("min_error_events = 3\n")
    assert cli.main(["ber", "--config", str(bad)]) == cli.EXIT_CONFIG
    assert cli.main(["ber", "--snr-sd", "x,y"]) == cli.EXIT_CONFIG
    assert cli.main(["ber", "--workers", "0"]) == cli.EXIT_CONFIG
    assert "config error" in capsys.readouterr().err


def test_cli_invariant_violation_exit_3(monkeypatch):
    def boom(*a, **k):
        raise InvariantViolation("synthetic")

    monkeypatch.setattr(cli, "run_ber_sweep", boom)
    assert cli.main(["ber", "--frames", "1"]) == cli.EXIT_INVARIANT


def test_cli_empty_lists_give_empty_output(tmp_path):
    for cmd, extra in (("ber", ["--snr-sd", ""]), ("exit-curves", ["--snr-sd", "", "--snr-r", ""]),
                       ("trajectory", ["--snr-sd", ""])):
        out = tmp_path / f"{cmd}.csv"
        assert cli.main([cmd, *extra, "--out", str(out)]) == 0
        assert len(out.read_text().splitlines()) == 1


def test_cli_exit_curves_deterministic(tmp_path):
    args = ["exit-curves", "--snr-sd", "-5", "--snr-r=-inf,1", "--samples", "3000", "--seed", "2"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main([*args, "--out", str(a)]) == 0
    assert cli.main([*args, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    rows = a.read_text().splitlines()
    assert rows[0] == "component,snr_db,i_a,i_e"
    assert len(rows) == 1 + 3 * 21


def test_cli_trajectory_default_operating_point(tmp_path):
    cfg = load_config()
    assert (cfg.trajectory_snr_sd, cfg.trajectory_snr_r) == (-5.0, 1.0)
    out = tmp_path / "t.csv"
    assert cli.main(["trajectory", "--samples", "5000", "--iters", "3", "--out", str(out)]) == 0
    rows = out.read_text().splitlines()
    assert rows[0] == "kind,snr_sd_db,snr_r_db,step,i_e1,i_e2"
    assert rows[1].startswith("staircase,-5.0,1.0,0,")
    assert any(r.startswith("measured,") for r in rows)


def test_cli_selftest(capsys):
    assert cli.main(["selftest"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and out.count("PASS") == 4
