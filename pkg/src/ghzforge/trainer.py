"""Stochastic gradient-ascent training of the ansatz angles.

Each cycle draws a noise strength, estimates the gradient of the output
fidelity by forward differences on the white-noise input of that strength,
and takes one ascent step.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .ansatz import CONVENTION_TAG, N_PARAMS, build_unitary
from .protocol import cost
from .states import realize, white_noise_input

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class TrainerConfig:
    mode_k: int = 1
    cycles: int = 150
    delta: float = 0.01
    alpha: float = 0.1
    lambda_range: tuple[float, float] = (0.05, 0.3)
    theta_init_range: tuple[float, float] = (0.0, TWO_PI)
    seed: int = 0
    keep_theta_history: bool = False

    def __post_init__(self):
        lo, hi = self.lambda_range
        if self.mode_k < 1:
            raise ValueError("mode_k must be >= 1")
        if self.cycles < 0:
            raise ValueError("cycles must be >= 0")
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if self.alpha < 0:
            raise ValueError("alpha must be non-negative")
        if not 0.0 <= lo <= hi <= 1.0:
            raise ValueError(f"lambda_range {self.lambda_range} must satisfy 0 <= lo <= hi <= 1")
        a, b = self.theta_init_range
        if not a <= b:
            raise ValueError("theta_init_range must be increasing")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


@dataclass
class TrainRecord:
    config: TrainerConfig
    theta_initial: np.ndarray
    theta_final: np.ndarray
    # rows of (cycle, sampled lambda, cost after the update)
    fidelity_history: list[tuple[int, float, float]] = field(default_factory=list)
    theta_history: list[np.ndarray] | None = None
    ansatz_convention_tag: str = CONVENTION_TAG

    def config_dict(self) -> dict:
        return asdict(self.config)


def init_params(rng: np.random.Generator, low: float = 0.0, high: float = TWO_PI) -> np.ndarray:
    return rng.uniform(low, high, size=N_PARAMS)


def gradient(theta, lam: float, k: int, delta: float = 0.01) -> np.ndarray:
    """Forward-difference gradient of the k-round fidelity on white noise ``lam``.

    All 17 cost evaluations share the same input state.
    """
    theta = np.asarray(theta, dtype=float)
    rho = white_noise_input(lam)
    base = cost(build_unitary(theta), rho, k)
    grad = np.empty(N_PARAMS)
    for i in range(N_PARAMS):
        shifted = theta.copy()
        shifted[i] += delta
        grad[i] = (cost(build_unitary(shifted), rho, k) - base) / delta
    return grad


def update(theta, grad, alpha: float) -> np.ndarray:
    return np.asarray(theta, dtype=float) + alpha * np.asarray(grad, dtype=float)


def train(config: TrainerConfig) -> TrainRecord:
    rng = np.random.default_rng(config.seed)
    theta = init_params(rng, *config.theta_init_range)
    record = TrainRecord(
        config=config,
        theta_initial=theta.copy(),
        theta_final=theta,
        theta_history=[theta.copy()] if config.keep_theta_history else None,
    )
    lo, hi = config.lambda_range
    for cycle in range(config.cycles):
        lam = float(rng.uniform(lo, hi))
        grad = gradient(theta, lam, config.mode_k, config.delta)
        theta = update(theta, grad, config.alpha)
        f = cost(build_unitary(theta), white_noise_input(lam), config.mode_k)
        record.fidelity_history.append((cycle, lam, f))
        if record.theta_history is not None:
            record.theta_history.append(theta.copy())
    record.theta_final = theta
    return record


def evaluate(theta, spec, k: int) -> float:
    """Fidelity to GHZ after ``k`` rounds of the trained protocol on ``spec``."""
    return cost(build_unitary(theta), realize(spec), k)
