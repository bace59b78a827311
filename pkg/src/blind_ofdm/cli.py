"""Command-line entry point: ``estimate``, ``sweep`` and ``selftest``.

SNR is the average per-subcarrier precoded transmit power over the noise
variance; with ``--normalize-channel`` (the default) the channel has unit
energy, so this is also the average receive SNR.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .errors import BlindOfdmError, ConfigError
from .simharness import emit, load_config_file, resolve, simulate_run, sweep

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME, EXIT_SELFTEST = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _add_sim_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("simulation")
    g.add_argument("--config", metavar="FILE", help="key=value config file; flags override it")
    g.add_argument("--subcarriers", type=int, help="subcarriers per frame M (default 64)")
    g.add_argument("--taps", type=int, help="channel order L, taps = L+1 (default 2)")
    g.add_argument("--pdp", choices=["exp", "exponential", "uniform"], help="power delay profile")
    g.add_argument("--channel-mode", choices=["fixed", "fixed_magnitude", "rayleigh"],
                   help="fixed tap magnitudes with random phase (default) or Rayleigh taps")
    g.add_argument("--normalize-channel", action=argparse.BooleanOptionalAction, default=None,
                   help="scale taps to unit total energy (default on)")
    g.add_argument("--p", type=float, help="precoding weight in (0,1) (default 0.5)")
    g.add_argument("--pam-order", type=int, help="PAM order Q (default 8)")
    g.add_argument("--blocks", type=int, action="append", help="OFDM blocks per estimate; repeatable")
    g.add_argument("--snr", type=float, action="append",
                   help="transmit SNR in dB per subcarrier over noise; repeatable (default 30)")
    g.add_argument("--runs", type=int, help="Monte-Carlo runs per point (default 100)")
    g.add_argument("--seed", type=int, help="master seed")
    g.add_argument("--mode", choices=["blind", "semiblind", "genie"], help="phase resolution")
    g.add_argument("--path", choices=["freq", "time"], help="per-subcarrier model or full time-domain chain")
    g.add_argument("--cp-len", type=int, help="cyclic prefix length (default L)")
    g.add_argument("--noise", choices=["known", "estimated"], help="noise variance handling")
    g.add_argument("--denoise-taps", type=int, help="project the estimate onto this many time taps")
    g.add_argument("--source-model", choices=["split", "white"],
                   help="source second moment assumed by the receiver (default split)")


def _config_from_args(args):
    file_values = load_config_file(args.config) if args.config else {}
    overrides = {
        "M": args.subcarriers, "L": args.taps, "pdp": args.pdp, "channel_mode": args.channel_mode,
        "normalize": args.normalize_channel, "p": args.p, "Q": args.pam_order,
        "n_blocks": args.blocks, "snr_db": args.snr, "runs": args.runs, "master_seed": args.seed,
        "mode": args.mode, "path": args.path, "cp_len": args.cp_len, "noise_mode": args.noise,
        "denoise_taps": args.denoise_taps, "source_model": args.source_model,
    }
    return resolve(file_values, overrides)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="blind-ofdm", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    est = sub.add_parser("estimate", help="single run; prints the channel estimate as JSON")
    _add_sim_flags(est)
    est.add_argument("--run", type=int, default=0, help="run index (selects the channel draw)")

    sw = sub.add_parser("sweep", help="Monte-Carlo sweep over SNR x blocks x runs")
    _add_sim_flags(sw)
    sw.add_argument("--out", help="output path (default stdout)")
    sw.add_argument("--format", choices=["csv", "json"], default="csv")
    sw.add_argument("--workers", type=int, default=1, help="worker processes")
    sw.add_argument("--no-timing", action="store_true", help="leave elapsed_s blank for reproducible files")

    sub.add_parser("selftest", help="run the built-in oracles; exit 4 on failure")
    return parser


def _cmd_estimate(args) -> int:
    cfg = _config_from_args(args)
    detail = simulate_run(cfg, args.run)
    r = detail.result
    doc = {
        "config": cfg.to_dict(),
        "run": args.run,
        "phi_est": detail.phi_est,
        "nmse": r.nmse,
        "phase_error": r.phase_error,
        "ser": r.ser,
        "sigma_n2": detail.sigma_n2,
        "H_estimate": [[float(z.real), float(z.imag)] for z in detail.H_estimate],
    }
    print(json.dumps(doc, indent=2))
    return EXIT_OK


def _cmd_sweep(args) -> int:
    cfg = _config_from_args(args)
    if args.workers < 1:
        raise ConfigError("--workers must be positive")
    results = sweep(cfg, workers=args.workers)
    emit(results, args.format, args.out, config=cfg, timing=not args.no_timing)
    return EXIT_OK


def _cmd_selftest(args) -> int:
    from .selftest import run_all

    ok = True
    for check in run_all():
        print(f"[{'PASS' if check.passed else 'FAIL'}] {check.name}: {check.detail}")
        ok &= check.passed
    return EXIT_OK if ok else EXIT_SELFTEST


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handlers = {"estimate": _cmd_estimate, "sweep": _cmd_sweep, "selftest": _cmd_selftest}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BlindOfdmError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
