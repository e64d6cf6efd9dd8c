"""Command-line driver: ``softnc {ber,exit-curves,trajectory,selftest}``."""

from __future__ import annotations

import argparse
import logging
import sys

from .config import ConfigError, load_config, parse_db, parse_db_list
from .harness import (InvariantViolation, ber_csv, curves_csv, run_ber_sweep, run_exit_curves,
                      run_trajectory, trajectory_csv)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INVARIANT = 3

log = logging.getLogger("softnc")


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value configuration file")
    common.add_argument("--seed", type=int)
    common.add_argument("--snr-sd", help="SNR_sd values in dB: a,b,c or start:stop:step")
    common.add_argument("--snr-rd", help="SNR_rd values in dB; -inf means no relay (write --snr-rd=-inf,10)")
    common.add_argument("--snr-sr", help="SNR_sr in dB")
    common.add_argument("--snr-r", help="effective relay SNRs in dB for check-node EXIT curves")
    common.add_argument("--frames", type=int, help="maximum frames per BER point")
    common.add_argument("--iters", type=int, help="maximum decoder iterations")
    common.add_argument("--mode", help="relay observation mode: raw or scaled")
    common.add_argument("--samples", type=int, help="samples per EXIT grid point")
    common.add_argument("--out", help="output CSV path (default: stdout)")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="softnc", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("ber", parents=[common], help="BER sweep over SNR_sd x SNR_rd")
    sub.add_parser("exit-curves", parents=[common], help="check-node and decoder EXIT curves")
    sub.add_parser("trajectory", parents=[common], help="EXIT staircase and measured trajectory")
    sub.add_parser("selftest", parents=[common], help="run the built-in oracle checks")
    return p


def _config(args):
    overrides = {
        "seed": args.seed,
        "max_frames": args.frames,
        "max_iter": args.iters,
        "relay_obs_mode": args.mode,
        "exit_samples": args.samples,
    }
    if args.snr_sd is not None:
        overrides["snr_sd_grid"] = parse_db_list(args.snr_sd)
        overrides["exit_snr_sd_list"] = overrides["snr_sd_grid"]
    if args.snr_rd is not None:
        overrides["snr_rd_list"] = parse_db_list(args.snr_rd)
    if args.snr_sr is not None:
        overrides["snr_sr_db"] = parse_db(args.snr_sr)
    if args.snr_r is not None:
        overrides["exit_snr_r_list"] = parse_db_list(args.snr_r)
    if args.command == "trajectory":
        if args.snr_sd is not None and overrides["snr_sd_grid"]:
            overrides["trajectory_snr_sd"] = overrides["snr_sd_grid"][0]
        if args.snr_r is not None and overrides["exit_snr_r_list"]:
            overrides["trajectory_snr_r"] = overrides["exit_snr_r_list"][0]
    return load_config(args.config, **overrides)


def _emit(text: str, path):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.workers < 1:
            raise ConfigError("--workers must be >= 1")
        config = _config(args)
        if args.command == "ber":
            records = run_ber_sweep(config, workers=args.workers)
            _emit(ber_csv(records), args.out)
        elif args.command == "exit-curves":
            _emit(curves_csv(run_exit_curves(config)), args.out)
        elif args.command == "trajectory":
            if args.snr_sd is not None and not config.snr_sd_grid:
                _emit(trajectory_csv(None), args.out)
            else:
                _emit(trajectory_csv(run_trajectory(config)), args.out)
        elif args.command == "selftest":
            from .oracles import run_selftest

            ok = run_selftest(sys.stdout)
            return EXIT_OK if ok else EXIT_INVARIANT
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
