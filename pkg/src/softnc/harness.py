"""Seeded Monte Carlo BER sweeps and EXIT runs, with CSV output.

Randomness: frame ``f`` of a sweep draws everything from
``SeedSequence([seed, f])`` split into one child stream per use (two source
messages, five links). The same frame index therefore sees the same bits and
the same standard-normal noise at every SNR point, which pairs the
comparisons between relay settings. The permutation is
``make_permutation(seed, 2 (K + m))``.
"""

from __future__ import annotations

import csv
import functools
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import ChannelParams, add_awgn, bpsk_modulate
from .config import ExperimentConfig
from .convcode import TURBO_RSC, build_trellis, encode
from .core import LINK_ABSENT, db_to_noise_variance, is_absent, make_permutation
from .destination import decode_single, iterative_decode
from .exitchart import exit_curve_check_node, exit_curve_conv_decoder, trajectory
from .relay import relay_process, transmit_relay

BER_COLUMNS = ("snr_sr_db", "snr_sd_db", "snr_rd_db", "mode", "iters", "frames", "info_bits",
               "bit_errors", "ber", "ber_stderr", "mean_iterations")
CURVE_COLUMNS = ("component", "snr_db", "i_a", "i_e")
TRAJECTORY_COLUMNS = ("kind", "snr_sd_db", "snr_r_db", "step", "i_e1", "i_e2")

_STREAMS = ("u1", "u2", "sd1", "sd2", "sr1", "sr2", "rd")
_CHUNK = 4


class InvariantViolation(RuntimeError):
    pass


@dataclass(frozen=True)
class BerRecord:
    snr_sr_db: float
    snr_sd_db: float
    snr_rd_db: float
    mode: str
    iters: int
    frames: int
    info_bits: int
    bit_errors: int
    mean_iterations: float

    @property
    def ber(self) -> float:
        return self.bit_errors / self.info_bits if self.info_bits else 0.0

    @property
    def ber_stderr(self) -> float:
        b = self.ber
        return math.sqrt(b * (1.0 - b) / self.info_bits) if self.info_bits else 0.0

    @property
    def error_events(self) -> int:
        return self.bit_errors


@functools.lru_cache(maxsize=8)
def _setup(frame_length: int, seed: int):
    trellis = build_trellis(TURBO_RSC)
    perm = make_permutation(seed, 2 * (frame_length + trellis.memory))
    return trellis, perm


def frame_streams(seed: int, frame_index: int) -> dict:
    children = np.random.SeedSequence([seed, frame_index]).spawn(len(_STREAMS))
    return {name: np.random.default_rng(ss) for name, ss in zip(_STREAMS, children)}


def _sources(config: ExperimentConfig, rngs):
    trellis, _ = _setup(config.frame_length, config.seed)
    u1 = rngs["u1"].integers(0, 2, config.frame_length)
    u2 = rngs["u2"].integers(0, 2, config.frame_length)
    return u1, u2, bpsk_modulate(encode(u1, trellis).bits()), bpsk_modulate(encode(u2, trellis).bits())


def simulate_frame(config: ExperimentConfig, snr_sd: float, snr_rd: float, frame_index: int):
    """One frame through the full system; returns ``(decoded_u1, decoded_u2, u1, u2, iterations)``."""
    trellis, perm = _setup(config.frame_length, config.seed)
    rngs = frame_streams(config.seed, frame_index)
    u1, u2, s1, s2 = _sources(config, rngs)
    var_sd = db_to_noise_variance(snr_sd)
    y1 = add_awgn(s1, var_sd, rngs["sd1"], "sd1")
    y2 = add_awgn(s2, var_sd, rngs["sd2"], "sd2")
    params = ChannelParams(snr_sd, config.snr_sr_db, snr_rd)
    if is_absent(snr_rd):
        # relay output is never received; skip the relay's decoders
        y_r = add_awgn(np.zeros(s1.size), math.inf, rngs["rd"], "rd")
        scale = 1.0
    else:
        var_sr = db_to_noise_variance(config.snr_sr_db)
        frame = relay_process(add_awgn(s1, var_sr, rngs["sr1"], "sr1"), add_awgn(s2, var_sr, rngs["sr2"], "sr2"),
                              config.snr_sr_db, perm, trellis)
        y_r = transmit_relay(frame, snr_rd, rngs["rd"])
        scale = frame.power_scale
    state = iterative_decode(y1, y2, y_r, params, perm, trellis, max_iter=config.max_iter,
                             power_scale=scale, mode=config.relay_obs_mode)
    return state.decoded_u1, state.decoded_u2, u1, u2, state.iteration


def simulate_frame_baseline(config: ExperimentConfig, snr_sd: float, frame_index: int):
    """Both sources decoded independently without any relay, from the same streams."""
    trellis, _ = _setup(config.frame_length, config.seed)
    rngs = frame_streams(config.seed, frame_index)
    u1, u2, s1, s2 = _sources(config, rngs)
    var_sd = db_to_noise_variance(snr_sd)
    d1 = decode_single(add_awgn(s1, var_sd, rngs["sd1"], "sd1"), snr_sd, trellis)
    d2 = decode_single(add_awgn(s2, var_sd, rngs["sd2"], "sd2"), snr_sd, trellis)
    return d1, d2, u1, u2


def _run_chunk(config: ExperimentConfig, snr_sd: float, snr_rd: float, start: int, stop: int):
    out = []
    for f in range(start, stop):
        d1, d2, u1, u2, iters = simulate_frame(config, snr_sd, snr_rd, f)
        out.append((int(np.sum(d1 != u1) + np.sum(d2 != u2)), iters))
    return out


def _frame_results(config, snr_sd, snr_rd, pool, workers):
    """Yield per-frame ``(bit_errors, iterations)`` in frame order."""
    starts = range(0, config.max_frames, _CHUNK)
    if pool is None:
        for s in starts:
            yield from _run_chunk(config, snr_sd, snr_rd, s, min(s + _CHUNK, config.max_frames))
        return
    depth = 2 * workers
    pending = []
    it = iter(starts)
    try:
        for s in it:
            pending.append(pool.submit(_run_chunk, config, snr_sd, snr_rd, s, min(s + _CHUNK, config.max_frames)))
            if len(pending) >= depth:
                yield from pending.pop(0).result()
        while pending:
            yield from pending.pop(0).result()
    finally:
        for fut in pending:
            fut.cancel()


def run_point(config: ExperimentConfig, snr_sd: float, snr_rd: float, pool=None, workers: int = 1) -> BerRecord:
    """Simulate frames in order until ``min_error_events`` bit errors or ``max_frames`` frames."""
    bits_per_frame = 2 * config.frame_length
    frames = errors = iters = 0
    gen = _frame_results(config, snr_sd, snr_rd, pool, workers)
    try:
        for e, n_it in gen:
            frames += 1
            errors += e
            iters += n_it
            if errors >= config.min_error_events or frames >= config.max_frames:
                break
    finally:
        gen.close()
    rec = BerRecord(config.snr_sr_db, snr_sd, snr_rd, config.relay_obs_mode, config.max_iter, frames,
                    frames * bits_per_frame, errors, iters / frames)
    if not 0.0 <= rec.ber <= 0.5 + 0.05 or rec.mean_iterations > config.max_iter:
        raise InvariantViolation(f"BER record out of range: {rec}")
    return rec


def run_ber_sweep(config: ExperimentConfig, workers: int = 1) -> list[BerRecord]:
    """BER for every ``(snr_sd, snr_rd)`` pair; identical output for any worker count."""
    config.validate()
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        return [run_point(config, sd, rd, pool, workers) for sd in config.snr_sd_grid for rd in config.snr_rd_list]
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)


def _fmt(x) -> str:
    if isinstance(x, float):
        if x == LINK_ABSENT:
            return "-inf"
        return repr(x)
    return str(x)


def _to_csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def ber_csv(records) -> str:
    return _to_csv(BER_COLUMNS, ([getattr(r, c) for c in BER_COLUMNS] for r in records))


def curves_csv(curves) -> str:
    rows = []
    for c in curves:
        rows.extend((c.component, float(c.snr_db), float(a), float(e)) for a, e in zip(c.i_a, c.i_e))
    return _to_csv(CURVE_COLUMNS, rows)


def trajectory_csv(traj) -> str:
    if traj is None:
        return _to_csv(TRAJECTORY_COLUMNS, [])
    rows = [("staircase", float(traj.snr_sd), float(traj.snr_r), k, a, b) for k, (a, b) in enumerate(traj.steps)]
    rows += [("measured", float(traj.snr_sd), float(traj.snr_r), k + 1, a, b) for k, (a, b) in enumerate(traj.measured)]
    return _to_csv(TRAJECTORY_COLUMNS, rows)


def run_exit_curves(config: ExperimentConfig) -> list:
    grid = config.exit_grid
    curves = [exit_curve_check_node(r, grid, config.exit_samples, config.seed) for r in config.exit_snr_r_list]
    curves += [exit_curve_conv_decoder(sd, grid, config.exit_samples, config.frame_length, config.seed)
               for sd in config.exit_snr_sd_list]
    return curves


def run_trajectory(config: ExperimentConfig):
    return trajectory(config.trajectory_snr_sd, config.trajectory_snr_r, config.max_iter, config.exit_grid,
                      config.exit_samples, config.frame_length, config.seed, config.trajectory_frames)


def run_exit(config: ExperimentConfig) -> tuple[str, str]:
    """CSV text of all transfer curves and of the trajectory."""
    return curves_csv(run_exit_curves(config)), trajectory_csv(run_trajectory(config))
