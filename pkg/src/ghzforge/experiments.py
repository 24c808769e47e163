"""Batch training, histograms, iteration trajectories and parameter sweeps.

Plot data is written as CSV (LF line endings, ``.`` decimal point).  Each
CSV starts with ``#``-prefixed metadata lines carrying ``schema_version`` and
``ansatz_convention_tag``, followed by the header row.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .ansatz import CONVENTION_TAG, build_unitary
from .protocol import DegenerateOutcome, cost, iterate
from .records import SCHEMA_VERSION, RecordFile, load_record, save_record
from .states import BasisError, GhzLike, White, fidelity_to_ghz, parse_input_spec
from .trainer import TrainerConfig, evaluate, train

TEST_SPEC = "white:0.1"
REFERENCE_FIDELITY = 0.9125
BISECTION_TOL = 1e-3
# output must beat input by more than rounding noise to count as improvement
GAIN_TOL = 1e-12


def derive_seed(master_seed: int, run_index: int) -> int:
    """Per-run 64-bit seed depending only on (master seed, run index)."""
    state = np.random.SeedSequence([master_seed, run_index]).generate_state(2, np.uint32)
    return (int(state[0]) << 32) | int(state[1])


def _csv_text(meta: dict, header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    for key, value in meta.items():
        buf.write(f"# {key}={value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="\n")


def read_csv(path) -> tuple[dict, list[dict]]:
    """Parse a CSV written by this module into (metadata, rows)."""
    meta, lines = {}, []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            meta.setdefault(key, []).append(value)
        else:
            lines.append(line)
    meta = {k: v[0] if len(v) == 1 else v for k, v in meta.items()}
    return meta, list(csv.DictReader(lines))


# --------------------------------------------------------------------- batch


@dataclass
class BatchRow:
    run: int
    seed: int
    test_fidelity: float | None
    status: str
    error: str = ""


def _run_one(args) -> tuple[BatchRow, RecordFile | None]:
    run, seed, mode_k, cycles = args
    try:
        rec = train(TrainerConfig(mode_k=mode_k, cycles=cycles, seed=seed))
        f = evaluate(rec.theta_final, TEST_SPEC, mode_k)
        record = RecordFile.from_train_record(rec, {TEST_SPEC: f})
        return BatchRow(run, seed, f, "ok"), record
    except Exception as exc:  # a failing run must not stop the batch
        return BatchRow(run, seed, None, "failed", f"{type(exc).__name__}: {exc}"), None


def run_batch(runs: int, mode_k: int = 1, cycles: int = 150, master_seed: int = 0,
              jobs: int | None = None, out_dir=None) -> tuple[list[BatchRow], list[RecordFile | None]]:
    """Train ``runs`` independent protocols; results do not depend on ``jobs``."""
    if runs < 1:
        raise ValueError("runs must be >= 1")
    jobs = jobs or os.cpu_count() or 1
    tasks = [(i, derive_seed(master_seed, i), mode_k, cycles) for i in range(runs)]
    if jobs == 1:
        results = [_run_one(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_one, tasks))
    rows = [r for r, _ in results]
    records = [rec for _, rec in results]
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        for row, rec in zip(rows, records):
            if rec is not None:
                save_record(rec, out_dir / f"run_{row.run:05d}.json")
        _write(out_dir / "summary.csv", batch_summary_csv(rows, mode_k, cycles, master_seed))
    return rows, records


def batch_summary_csv(rows: list[BatchRow], mode_k: int, cycles: int, master_seed: int) -> str:
    ok = [r.test_fidelity for r in rows if r.test_fidelity is not None]
    success = sum(f > REFERENCE_FIDELITY for f in ok)
    meta = {
        "schema_version": SCHEMA_VERSION,
        "ansatz_convention_tag": CONVENTION_TAG,
        "mode_k": mode_k,
        "cycles": cycles,
        "master_seed": master_seed,
        "test_input": TEST_SPEC,
        "reference_fidelity": REFERENCE_FIDELITY,
        "success_fraction": repr(success / len(rows)),
    }
    body = [
        [r.run, r.seed, "" if r.test_fidelity is None else repr(r.test_fidelity), r.status, r.error]
        for r in rows
    ]
    return _csv_text(meta, ["run", "seed", "test_fidelity", "status", "error"], body)


# ----------------------------------------------------------------- histogram


def record_test_fidelity(record: RecordFile) -> float:
    if TEST_SPEC in record.test_results:
        return record.test_results[TEST_SPEC]
    return evaluate(record.theta_array, TEST_SPEC, record.mode_k)


def histogram(values, bins: int = 40) -> list[tuple[float, float, int]]:
    """Fixed-width bins ``[i/bins, (i+1)/bins)`` over [0, 1]; 1.0 falls in the last."""
    if bins < 1:
        raise ValueError("bins must be >= 1")
    counts = [0] * bins
    for v in values:
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"fidelity {v} outside [0, 1]")
        counts[min(int(math.floor(v * bins)), bins - 1)] += 1
    return [(i / bins, (i + 1) / bins, c) for i, c in enumerate(counts)]


def histogram_csv(records_dir, bins: int = 40) -> str:
    paths = sorted(Path(records_dir).glob("*.json"))
    if not paths:
        raise FileNotFoundError(f"no record files in {records_dir}")
    records = [load_record(p) for p in paths]
    values = [record_test_fidelity(r) for r in records]
    tags = sorted({r.ansatz_convention_tag for r in records})
    meta = {
        "schema_version": SCHEMA_VERSION,
        "ansatz_convention_tag": ",".join(tags),
        "test_input": TEST_SPEC,
        "reference_fidelity": REFERENCE_FIDELITY,
        "records": len(records),
        "fraction_above_reference": repr(sum(v > REFERENCE_FIDELITY for v in values) / len(values)),
    }
    rows = [[repr(lo), repr(hi), c] for lo, hi, c in histogram(values, bins)]
    return _csv_text(meta, ["bin_left", "bin_right", "count"], rows)


# ------------------------------------------------------------------- iterate


def iterate_csv(record: RecordFile, spec: str, steps: int) -> tuple[str, DegenerateOutcome | None]:
    """Trajectory CSV; on degeneracy the partial trajectory plus the error."""
    u = build_unitary(record.theta_array)
    rho = parse_input_spec(spec).realize()
    error = None
    try:
        traj = iterate(u, rho, steps)
    except DegenerateOutcome as exc:
        traj, error = exc.trajectory, exc
    meta = {
        "schema_version": SCHEMA_VERSION,
        "ansatz_convention_tag": record.ansatz_convention_tag,
        "input": spec,
        "steps": steps,
    }
    if error is not None:
        meta["degenerate_at_iteration"] = error.iteration
    rows = [[p.iteration, repr(p.fidelity), repr(p.success_prob), p.copies_consumed] for p in traj]
    return _csv_text(meta, ["iteration", "fidelity", "success_prob", "copies_consumed"], rows), error


# --------------------------------------------------------------------- sweep

AXES = ("lambda", "eps-basis", "eps-ghzlike")


def parse_grid(text: str) -> list[float]:
    """``start:stop:step`` with ``stop`` included when it lies on the grid."""
    try:
        start, stop, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise ValueError(f"grid {text!r} must look like start:stop:step") from None
    if not step > 0:
        raise ValueError("grid step must be positive")
    if stop < start:
        raise ValueError("grid stop must not be below start")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(n)]


def spec_for(axis: str, x: float, bits: str = "011"):
    if axis == "lambda":
        return White(x)
    if axis == "eps-basis":
        return BasisError(bits, x)
    if axis == "eps-ghzlike":
        return GhzLike(x)
    raise ValueError(f"unknown sweep axis {axis!r}; expected one of {', '.join(AXES)}")


@dataclass
class SweepPoint:
    x: float
    input_fidelity: float
    fidelity: float | None
    success_prob: float | None
    status: str


@dataclass
class Crossing:
    location: float
    bracket: tuple[float, float]
    direction: str  # "improves_below" or "improves_above"


@dataclass
class SweepResult:
    axis: str
    iteration: int
    points: list[SweepPoint]
    crossings: list[Crossing] = field(default_factory=list)

    @property
    def threshold_name(self) -> str:
        return "lambda_crit" if self.axis == "lambda" else "eps_thresh"


def _gain(u, axis, x, bits, k) -> float:
    rho = spec_for(axis, x, bits).realize()
    return cost(u, rho, k) - fidelity_to_ghz(rho, check=False)


def sweep(record: RecordFile, axis: str, grid, iteration: int, bits: str = "011") -> SweepResult:
    """Output fidelity at ``iteration`` across ``grid`` plus bisected crossings.

    A crossing is a sign change of (output - input) fidelity between adjacent
    non-degenerate grid points, refined by bisection to ``BISECTION_TOL``.
    """
    grid = [float(x) for x in grid]
    if not grid:
        raise ValueError("sweep grid is empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("sweep grid must be strictly increasing")
    u = build_unitary(record.theta_array)
    points = []
    for x in grid:
        rho = spec_for(axis, x, bits).realize()
        f0 = fidelity_to_ghz(rho)
        try:
            traj = iterate(u, rho, iteration)
            last = traj[-1]
            points.append(SweepPoint(x, f0, last.fidelity, last.success_prob, "ok"))
        except DegenerateOutcome:
            points.append(SweepPoint(x, f0, None, None, "degenerate"))

    crossings = []
    good = [p for p in points if p.status == "ok"]
    for a, b in zip(good, good[1:]):
        up_a = a.fidelity - a.input_fidelity > GAIN_TOL
        up_b = b.fidelity - b.input_fidelity > GAIN_TOL
        if up_a == up_b:
            continue
        lo, hi = a.x, b.x
        while hi - lo > BISECTION_TOL:
            mid = 0.5 * (lo + hi)
            if (_gain(u, axis, mid, bits, iteration) > GAIN_TOL) == up_a:
                lo = mid
            else:
                hi = mid
        direction = "improves_below" if up_a else "improves_above"
        crossings.append(Crossing(0.5 * (lo + hi), (lo, hi), direction))
    return SweepResult(axis, iteration, points, crossings)


def sweep_csv(result: SweepResult, record: RecordFile, bits: str = "011") -> str:
    meta = {
        "schema_version": SCHEMA_VERSION,
        "ansatz_convention_tag": record.ansatz_convention_tag,
        "axis": result.axis,
        "iteration": result.iteration,
    }
    if result.axis == "eps-basis":
        meta["basis"] = bits
    name = result.threshold_name
    if result.crossings:
        meta[name] = [
            f"{c.location!r} bracket=[{c.bracket[0]!r},{c.bracket[1]!r}] direction={c.direction}"
            for c in result.crossings
        ]
    else:
        meta[name] = "none"
    lines = []
    for key, value in meta.items():
        for v in value if isinstance(value, list) else [value]:
            lines.append(f"# {key}={v}\n")
    rows = [
        [
            repr(p.x),
            repr(p.input_fidelity),
            "" if p.fidelity is None else repr(p.fidelity),
            "" if p.success_prob is None else repr(p.success_prob),
            p.status,
        ]
        for p in result.points
    ]
    body = _csv_text({}, [result.axis, "input_fidelity", "fidelity", "success_prob", "status"], rows)
    return "".join(lines) + body
