"""Command line entry point: ``bbfnn train|gradcheck|eval|bench``.

Exit codes: 0 success, 1 runtime or threshold failure, 2 usage or validation
failure.
"""

from __future__ import annotations

import argparse
import csv
import logging
import statistics
import sys
import time
from pathlib import Path

import numpy as np

from . import io
from .config import ConfigError, ExperimentConfig, default_config, load_config
from .core import BetaUnit, training_error
from .data import load_csv
from .gradient import gradient_check
from .hierarchy import run

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2

log = logging.getLogger("bbfnn")


class UsageError(Exception):
    pass


def _load_experiment(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else default_config()
    if getattr(args, "seed", None) is not None:
        cfg = cfg.with_seed(args.seed)
    return cfg


def cmd_train(args) -> int:
    cfg = _load_experiment(args)
    train, test = cfg.load_data()
    report = run(cfg.run, train, test)
    out = Path(args.out) if args.out else cfg.base_dir / cfg.output_dir
    io.write_run(report, out, test if test is not None and len(test) else train)
    gen = report.generalization_error
    print(f"training_error={report.training_error!r} generalization_error={gen!r} "
          f"n_units={report.n_units} seed={report.seed} -> {out}")
    return EXIT_OK


def random_check_case(rng: np.random.Generator, edge_margin: float = 1e-3):
    """A random unit with p, q in [0.5, 4] and an interior point away from its edges."""
    while True:
        unit = BetaUnit(rng.uniform(-1, 1), rng.uniform(0.05, 2.0), rng.uniform(0.5, 4.0),
                        rng.uniform(0.5, 4.0))
        lo, hi = unit.lower + edge_margin, unit.upper - edge_margin
        if lo < hi:
            return unit, float(rng.uniform(lo, hi))


def cmd_gradcheck(args) -> int:
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    for _ in range(args.samples):
        unit, x = random_check_case(rng)
        worst = max(worst, gradient_check(unit, 1.0, x, step=args.step))
    ok = worst < args.tolerance
    print(f"worst_relative_error={worst!r} tolerance={args.tolerance!r} {'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_FAILURE


def cmd_eval(args) -> int:
    try:
        net = io.load_model(args.model)
    except io.ModelFileError as exc:
        raise UsageError(str(exc)) from None
    if args.data:
        try:
            data = load_csv(args.data)
        except (OSError, ValueError) as exc:
            raise UsageError(str(exc)) from None
    else:
        train, test = _load_experiment(args).load_data()
        data = test if args.split == "test" else train
        if data is None:
            raise UsageError(f"the configured dataset has no {args.split} split")
    if len(data) == 0:
        raise UsageError("dataset is empty")
    err = training_error(net, data)
    out = Path(args.out) if args.out else Path(".")
    out.mkdir(parents=True, exist_ok=True)
    io.write_predictions(net, data, out / "predictions.csv")
    print(f"error={err!r} n_samples={len(data)} n_units={len(net)}")
    return EXIT_OK


def _parse_seeds(text: str) -> list[int]:
    try:
        seeds = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"--seeds expects comma-separated integers, got {text!r}") from None
    if not seeds or any(s < 0 for s in seeds):
        raise UsageError("--seeds needs at least one non-negative integer")
    return seeds


def _fmt(value) -> str:
    return "" if value is None else repr(value)


def cmd_bench(args) -> int:
    seeds = _parse_seeds(args.seeds)
    base = _load_experiment(args)
    train, test = base.load_data()
    rows = []
    failed = False
    for seed in seeds:
        t0 = time.perf_counter()
        try:
            report = run(base.with_seed(seed).run, train, test)
            rows.append([seed, report.training_error, report.generalization_error, report.n_units,
                         time.perf_counter() - t0, ""])
        except Exception as exc:  # a failed seed is reported in its row
            failed = True
            log.exception("seed %d failed", seed)
            rows.append([seed, None, None, None, time.perf_counter() - t0, f"{type(exc).__name__}: {exc}"])
        r = rows[-1]
        print(f"seed={seed} training_error={_fmt(r[1])} generalization_error={_fmt(r[2])} "
              f"n_units={_fmt(r[3])} wall_seconds={r[4]:.2f}", flush=True)

    out = Path(args.out) if args.out else base.base_dir / base.output_dir
    out.mkdir(parents=True, exist_ok=True)
    with (out / "bench.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["seed", "training_error", "generalization_error", "n_units", "wall_seconds", "error"])
        for r in rows:
            w.writerow([r[0], _fmt(r[1]), _fmt(r[2]), _fmt(r[3]), repr(round(r[4], 3)), r[5]])
        for label, fn in (("min", min), ("median", statistics.median), ("max", max)):
            summary = [label]
            for col in (1, 2, 3, 4):
                vals = [r[col] for r in rows if r[col] is not None]
                summary.append(_fmt(fn(vals)) if vals else "")
            w.writerow(summary + [""])
    print(f"wrote {out / 'bench.csv'}")
    return EXIT_FAILURE if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bbfnn", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="run the GA + gradient hierarchy and write artifacts")
    p.add_argument("--config", help="experiment JSON (default: built-in g2 experiment)")
    p.add_argument("--seed", type=int, help="override the configured seed")
    p.add_argument("--out", help="output directory (default: config output_dir)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("gradcheck", help="compare analytic and finite-difference partials")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--tolerance", type=float, default=1e-4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--step", type=float, default=1e-6)
    p.set_defaults(func=cmd_gradcheck)

    p = sub.add_parser("eval", help="evaluate a saved model on a dataset")
    p.add_argument("--model", required=True)
    p.add_argument("--data", help="CSV with x,y columns")
    p.add_argument("--config", help="take the dataset from this experiment config")
    p.add_argument("--split", choices=("train", "test"), default="train")
    p.add_argument("--out", help="directory for predictions.csv (default: cwd)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="run several seeds and summarise")
    p.add_argument("--config")
    p.add_argument("--seeds", default="0,1,2,3,4")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:
        log.debug("unhandled failure", exc_info=True)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
