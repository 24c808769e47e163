"""JSON persistence of trained angle vectors, plus the shipped fixtures."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .ansatz import CONVENTION_TAG, N_PARAMS

SCHEMA_VERSION = 1
FIXTURE_TAG = "paper-tables-unverified-layout"
SWAP_RECORD_NAME = "swap"

_KEYS = (
    "schema_version",
    "mode_k",
    "seed",
    "ansatz_convention_tag",
    "theta",
    "fidelity_history",
    "test_results",
)


class RecordError(ValueError):
    """Malformed record file or schema mismatch."""


@dataclass
class RecordFile:
    mode_k: int
    seed: int | None
    theta: list[float]
    fidelity_history: list[list] = field(default_factory=list)
    test_results: dict[str, float] = field(default_factory=dict)
    ansatz_convention_tag: str = CONVENTION_TAG
    schema_version: int = SCHEMA_VERSION

    @property
    def theta_array(self) -> np.ndarray:
        return np.asarray(self.theta, dtype=float)

    @classmethod
    def from_train_record(cls, rec, test_results=None) -> "RecordFile":
        return cls(
            mode_k=rec.config.mode_k,
            seed=rec.config.seed,
            theta=[float(t) for t in rec.theta_final],
            fidelity_history=[[int(c), float(lam), float(f)] for c, lam, f in rec.fidelity_history],
            test_results=dict(test_results or {}),
            ansatz_convention_tag=rec.ansatz_convention_tag,
        )

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in _KEYS}

    @classmethod
    def from_dict(cls, data) -> "RecordFile":
        if not isinstance(data, dict):
            raise RecordError("record must be a JSON object")
        version = data.get("schema_version")
        if version != SCHEMA_VERSION:
            raise RecordError(f"unsupported schema_version {version!r}; expected {SCHEMA_VERSION}")
        missing = [k for k in _KEYS if k not in data]
        if missing:
            raise RecordError(f"record is missing keys: {', '.join(missing)}")
        theta = data["theta"]
        if (
            not isinstance(theta, list)
            or len(theta) != N_PARAMS
            or not all(isinstance(t, (int, float)) and math.isfinite(t) for t in theta)
        ):
            raise RecordError(f"theta must be a list of {N_PARAMS} finite numbers")
        if not isinstance(data["mode_k"], int) or data["mode_k"] < 1:
            raise RecordError("mode_k must be a positive integer")
        return cls(
            mode_k=data["mode_k"],
            seed=data["seed"],
            theta=[float(t) for t in theta],
            fidelity_history=[list(row) for row in data["fidelity_history"]],
            test_results={str(k): float(v) for k, v in data["test_results"].items()},
            ansatz_convention_tag=str(data["ansatz_convention_tag"]),
        )


def dumps_record(record: RecordFile) -> str:
    # repr-based float output is the shortest string that round-trips exactly
    return json.dumps(record.to_dict(), indent=2, ensure_ascii=False) + "\n"


def save_record(record: RecordFile, path) -> Path:
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_record(record), encoding="utf-8", newline="\n")
    return path


def load_record(path) -> RecordFile:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise RecordError(f"{path}: not valid JSON ({exc})") from exc
    return RecordFile.from_dict(data)


def _fixture_table() -> dict:
    text = resources.files("ghzforge").joinpath("data/fixtures.json").read_text("utf-8")
    return json.loads(text)


def list_fixtures() -> list[str]:
    return list(_fixture_table())


def load_fixture(name: str) -> RecordFile:
    table = _fixture_table()
    if name not in table:
        raise KeyError(f"unknown fixture {name!r}; available: {', '.join(table)}")
    return RecordFile.from_dict(table[name])


def swap_record(mode_k: int = 1) -> RecordFile:
    """All-zero angles; under this ansatz the protocol leaves every input unchanged."""
    return RecordFile(mode_k=mode_k, seed=None, theta=[0.0] * N_PARAMS)


def resolve_record(ref: str) -> RecordFile:
    """Load a record from a file path, a fixture name or ``swap``."""
    if ref == SWAP_RECORD_NAME:
        return swap_record()
    if ref in _fixture_table():
        return load_fixture(ref)
    path = Path(ref)
    if not path.is_file():
        raise RecordError(
            f"{ref!r} is neither a record file, a fixture ({', '.join(list_fixtures())}) nor 'swap'"
        )
    return load_record(path)
