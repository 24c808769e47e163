"""Variational training of iterated GHZ-state distillation protocols."""

from .ansatz import build_unitary
from .estimator import GHZDistiller, check_states
from .protocol import DegenerateOutcome, ProtocolOutcome, cost, distill_step, iterate
from .records import RecordFile, list_fixtures, load_fixture, load_record, save_record
from .states import (
    fidelity_to_ghz,
    ghz_state,
    parse_input_spec,
    white_noise_input,
)
from .trainer import TrainerConfig, TrainRecord, evaluate, gradient, train

__all__ = [
    "DegenerateOutcome",
    "GHZDistiller",
    "ProtocolOutcome",
    "RecordFile",
    "TrainRecord",
    "TrainerConfig",
    "build_unitary",
    "check_states",
    "cost",
    "distill_step",
    "evaluate",
    "fidelity_to_ghz",
    "ghz_state",
    "gradient",
    "iterate",
    "list_fixtures",
    "load_fixture",
    "load_record",
    "parse_input_spec",
    "save_record",
    "train",
    "white_noise_input",
]
__version__ = "0.1.0"
