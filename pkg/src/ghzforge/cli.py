"""Command-line entry point: ``ghzforge train|batch|histogram|iterate|sweep|fixtures``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .experiments import (
    AXES,
    TEST_SPEC,
    batch_summary_csv,
    histogram_csv,
    iterate_csv,
    parse_grid,
    run_batch,
    sweep,
    sweep_csv,
)
from .records import RecordError, RecordFile, list_fixtures, load_fixture, resolve_record, save_record
from .states import InputSpecError, parse_input_spec
from .trainer import TrainerConfig, evaluate, train

log = logging.getLogger("ghzforge")


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"{text} is not an unsigned 64-bit integer")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"{text} must be >= 1")
    return value


def _nonneg(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"{text} must be >= 0")
    return value


def _input_spec(text: str) -> str:
    try:
        parse_input_spec(text)
    except InputSpecError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return text


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8", newline="\n")
        log.info("wrote %s", path)


def cmd_train(args) -> int:
    config = TrainerConfig(mode_k=args.mode, cycles=args.cycles, seed=args.seed)
    rec = train(config)
    f = evaluate(rec.theta_final, TEST_SPEC, args.mode)
    save_record(RecordFile.from_train_record(rec, {TEST_SPEC: f}), args.out)
    log.info("mode %d seed %d: fidelity on %s after %d round(s) = %.6f",
             args.mode, args.seed, TEST_SPEC, args.mode, f)
    return 0


def cmd_batch(args) -> int:
    rows, _ = run_batch(args.runs, args.mode, args.cycles, args.seed, args.jobs, args.out)
    failed = [r for r in rows if r.status != "ok"]
    for r in failed:
        log.error("run %d (seed %d) failed: %s", r.run, r.seed, r.error)
    ok = [r.test_fidelity for r in rows if r.test_fidelity is not None]
    frac = sum(f > 0.9125 for f in ok) / len(rows)
    log.info("%d/%d runs exceed F0=0.9125 (fraction %.3f)", round(frac * len(rows)), len(rows), frac)
    if args.out is None:
        sys.stdout.write(batch_summary_csv(rows, args.mode, args.cycles, args.seed))
    return 1 if failed else 0


def cmd_histogram(args) -> int:
    _emit(histogram_csv(args.records, args.bins), args.out)
    return 0


def cmd_iterate(args) -> int:
    record = resolve_record(args.record)
    text, error = iterate_csv(record, args.input, args.steps)
    _emit(text, args.out)
    if error is not None:
        log.error("%s", error)
        return 3
    return 0


def cmd_sweep(args) -> int:
    record = resolve_record(args.record)
    result = sweep(record, args.axis, parse_grid(args.grid), args.steps, args.basis)
    _emit(sweep_csv(result, record, args.basis), args.out)
    for c in result.crossings:
        log.info("%s ~ %.4f (%s)", result.threshold_name, c.location, c.direction)
    return 0


def cmd_fixtures(args) -> int:
    lines = ["name,mode_k,ansatz_convention_tag,input,steps,fidelity"]
    for name in list_fixtures():
        rec = load_fixture(name)
        steps = rec.mode_k if args.steps is None else args.steps
        f = evaluate(rec.theta_array, args.input, steps)
        lines.append(f"{name},{rec.mode_k},{rec.ansatz_convention_tag},{args.input},{steps},{f!r}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ghzforge",
        description="Train and analyse iterated GHZ distillation protocols.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train one protocol and write a record file")
    p.add_argument("--mode", type=_positive, default=1, help="rounds inside the cost (1 or 2)")
    p.add_argument("--cycles", type=_nonneg, default=150)
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("batch", help="train many independently seeded protocols")
    p.add_argument("--mode", type=_positive, default=1)
    p.add_argument("--cycles", type=_nonneg, default=150)
    p.add_argument("--seed", type=_u64, default=0, help="master seed")
    p.add_argument("--runs", type=_positive, default=100)
    p.add_argument("--jobs", type=_positive, default=os.cpu_count() or 1)
    p.add_argument("--out", help="output directory for records and summary.csv")
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("histogram", help="histogram of test fidelities over a records directory")
    p.add_argument("--records", required=True)
    p.add_argument("--bins", type=_positive, default=40)
    p.add_argument("--out")
    p.set_defaults(func=cmd_histogram)

    p = sub.add_parser("iterate", help="fidelity trajectory of repeated rounds")
    p.add_argument("--record", required=True, help="record file, fixture name or 'swap'")
    p.add_argument("--input", type=_input_spec, default=TEST_SPEC)
    p.add_argument("--steps", type=_nonneg, default=8)
    p.add_argument("--out")
    p.set_defaults(func=cmd_iterate)

    p = sub.add_parser("sweep", help="fidelity across a noise grid, with threshold bisection")
    p.add_argument("--record", required=True, help="record file, fixture name or 'swap'")
    p.add_argument("--axis", choices=AXES, required=True)
    p.add_argument("--grid", required=True, help="start:stop:step")
    p.add_argument("--steps", type=_nonneg, default=2, help="iteration at which to read fidelity")
    p.add_argument("--basis", default="011", help="basis string for eps-basis sweeps")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fixtures", help="list shipped fixtures and evaluate them")
    p.add_argument("--input", type=_input_spec, default=TEST_SPEC)
    p.add_argument("--steps", type=_nonneg, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_fixtures)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except (RecordError, InputSpecError, ValueError, KeyError, OSError) as exc:
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
