"""Command line entry point ``cia-sim``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .harness import ExperimentConfig, emit_results, run_experiment
from .precoders import PrecoderKind
from .signal_model import OfdmConfig, PdpModel


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "1", "yes", "on"):
        return True
    if t in ("false", "0", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected true/false, got {text!r}")


def _snr(text: str):
    try:
        start, stop, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError("SNR sweep must be start:stop:step") from None
    return start, stop, step


def _precoders(text: str):
    try:
        return tuple(PrecoderKind(x.strip()) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cia-sim", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Monte Carlo spectral efficiency sweep")
    run.add_argument("--n", type=int, default=128, help="subcarriers N")
    run.add_argument("--cp", type=int, default=32, help="cyclic prefix L")
    run.add_argument("--taps", type=int, default=32, help="channel order l")
    run.add_argument("--pdp", default="uniform", choices=["uniform", "exp-fast", "exp-slow"])
    run.add_argument("--precoders", type=_precoders, default="cia,vfdm,nonunitary")
    run.add_argument("--snr", type=_snr, default="0:30:5", help="start:stop:step in dB")
    run.add_argument("--trials", type=int, default=500)
    run.add_argument("--seed", type=int, default=1)
    run.add_argument("--with-primary-interference", type=_bool, default=False)
    run.add_argument("--pp", type=float, default=1.0, help="primary power per symbol")
    run.add_argument("--ps", type=float, default=1.0, help="secondary power per symbol")
    run.add_argument("--format", choices=["csv", "json"], default="csv")
    run.add_argument("--out", default="results.csv")
    run.add_argument("--workers", type=int, default=None,
                     help="worker processes (default: $CIA_SIM_WORKERS or 1)")

    val = sub.add_parser("validate", help="invariant suite on N=16, L=4")
    val.add_argument("--realizations", type=int, default=25)
    val.add_argument("--seed", type=int, default=7)
    return ap


def _error(kind: str, message: str) -> int:
    json.dump({"ok": False, "error": kind, "message": message}, sys.stdout)
    sys.stdout.write("\n")
    return 2


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")

    if args.command == "validate":
        from .validate import run_validation
        report = run_validation(realizations=args.realizations, seed=args.seed)
        ok = all(c["passed"] for c in report)
        json.dump({"ok": ok, "checks": report}, sys.stdout, indent=2)
        sys.stdout.write("\n")
        return 0 if ok else 1

    try:
        cfg = OfdmConfig(n_subcarriers=args.n, cp_length=args.cp, channel_order=args.taps,
                         p_primary=args.pp, p_secondary=args.ps)
        ec = ExperimentConfig(cfg=cfg, pdp=PdpModel.from_name(args.pdp),
                              precoders=args.precoders, snr_db=args.snr,
                              trials=args.trials, master_seed=args.seed,
                              include_primary_interference=args.with_primary_interference,
                              output_path=args.out)
    except ValueError as exc:
        return _error("InvalidConfig", str(exc))
    try:
        result = run_experiment(ec, workers=args.workers)
        emit_results(result, args.format, args.out)
    except OSError as exc:
        return _error("IoError", str(exc))
    except Exception as exc:  # report, don't traceback
        return _error(type(exc).__name__, str(exc))
    return 0


if __name__ == "__main__":
    sys.exit(main())
