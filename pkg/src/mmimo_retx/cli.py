"""Command-line entry point: ``mmimo-retx --n 16 --n-rt 2 --snr 2,3,4 --out ber.csv``."""

from __future__ import annotations

import argparse
import logging
import sys

from .errors import ConfigError
from .harness import SimConfig, format_csv, parse_snr_list, read_config, run_sweep


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="mmimo-retx",
        description="BER sweep of turbo-coded massive MIMO with matched filtering and re-transmissions.",
    )
    p.add_argument("--config", help="key = value file with SimConfig fields; flags override it")
    p.add_argument("--n", type=int, help="antennas at each end (default 16)")
    p.add_argument("--n-rt", dest="n_rt", type=int, help="re-transmissions per vector (default 2)")
    p.add_argument("--code", help="4-state or 16-state (default 4-state)")
    p.add_argument("--snr", dest="snr_db", type=parse_snr_list, help="comma list of SNR per bit in dB")
    p.add_argument("--frames", dest="max_frames", type=int, help="max frames per SNR point")
    p.add_argument("--min-errors", dest="min_bit_errors", type=int, help="stop a point after this many bit errors")
    p.add_argument("--iters", dest="iterations", type=int, help="turbo iterations (default 8)")
    p.add_argument("--frame-bits", dest="frame_bits", type=int, help="data bits per frame (default 1024)")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--workers", type=int, help="worker processes (results do not depend on it)")
    p.add_argument("--no-timing", dest="timing", action="store_const", const=False,
                   help="write 0 in the seconds column so output is byte-reproducible")
    p.add_argument("--out", dest="output", help="CSV path (default: stdout)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    overrides = {k: v for k, v in vars(args).items() if k not in ("config", "verbose") and v is not None}
    try:
        cfg = read_config(args.config, **overrides) if args.config else SimConfig(**overrides)
    except (ConfigError, TypeError, ValueError) as exc:
        print(f"mmimo-retx: invalid configuration: {exc}", file=sys.stderr)
        return 2
    try:
        records = run_sweep(cfg)
    except OSError as exc:
        print(f"mmimo-retx: {exc}", file=sys.stderr)
        return 1
    if not cfg.output:
        sys.stdout.write(format_csv(records))
    return 0


if __name__ == "__main__":
    sys.exit(main())
