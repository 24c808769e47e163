"""scikit-learn style wrapper around training and applying a distillation protocol."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .ansatz import N_PARAMS, build_unitary
from .linalg import is_density
from .protocol import cost, iterate
from .states import InputSpec, realize
from .trainer import TrainerConfig, train


def check_states(X, tol: float = 1e-9) -> np.ndarray:
    """Coerce ``X`` to an ``(n, 8, 8)`` stack of validated density matrices.

    Accepts a single 8x8 matrix, a stack of them, or a sequence whose items
    are input-spec strings/objects or matrices.
    """
    if isinstance(X, (str, *InputSpec.__args__)):
        X = [X]
    if isinstance(X, np.ndarray) and X.ndim == 2:
        X = X[None]
    items = []
    for x in X:
        if isinstance(x, (str, *InputSpec.__args__)):
            items.append(realize(x))
        else:
            items.append(np.asarray(x, dtype=np.complex128))
    if not items:
        raise ValueError("expected at least one state")
    out = np.stack(items)
    if out.shape[1:] != (8, 8):
        raise ValueError(f"states must be 8x8 density matrices, got shape {out.shape[1:]}")
    for i, rho in enumerate(out):
        if not is_density(rho, tol):
            raise ValueError(f"state {i} is not a valid density matrix")
    return out


class GHZDistiller(TransformerMixin, BaseEstimator):
    """Trains the per-party unitary and applies the resulting protocol.

    Parameters
    ----------
    mode_k : int
        Number of protocol rounds inside the training cost.
    cycles, delta, alpha, lambda_range :
        Gradient-ascent settings, see :class:`~ghzforge.trainer.TrainerConfig`.
    random_state : int
        Seed of the training run.
    n_rounds : int or None
        Rounds applied by ``transform``/``predict``; defaults to ``mode_k``.

    ``fit`` ignores ``X``: training draws its own white-noise inputs.
    """

    def __init__(self, mode_k=1, cycles=150, delta=0.01, alpha=0.1,
                 lambda_range=(0.05, 0.3), random_state=0, n_rounds=None):
        self.mode_k = mode_k
        self.cycles = cycles
        self.delta = delta
        self.alpha = alpha
        self.lambda_range = lambda_range
        self.random_state = random_state
        self.n_rounds = n_rounds

    def fit(self, X=None, y=None):
        config = TrainerConfig(
            mode_k=self.mode_k,
            cycles=self.cycles,
            delta=self.delta,
            alpha=self.alpha,
            lambda_range=tuple(self.lambda_range),
            seed=int(self.random_state),
        )
        self.record_ = train(config)
        self._set_theta(self.record_.theta_final)
        self.history_ = np.array(self.record_.fidelity_history, dtype=float).reshape(-1, 3)
        return self

    @classmethod
    def from_theta(cls, theta, **params) -> "GHZDistiller":
        """Fitted instance for given angles, bypassing training."""
        est = cls(**params)
        est._set_theta(theta)
        return est

    def _set_theta(self, theta):
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (N_PARAMS,):
            raise ValueError(f"expected {N_PARAMS} angles, got shape {theta.shape}")
        self.theta_ = theta.copy()
        self.unitary_ = build_unitary(theta)

    def _rounds(self) -> int:
        return self.mode_k if self.n_rounds is None else self.n_rounds

    def transform(self, X):
        """Output states after the protocol rounds; raises on degenerate post-selection."""
        check_is_fitted(self, "unitary_")
        states = check_states(X)
        return np.stack([iterate(self.unitary_, rho, self._rounds())[-1].state for rho in states])

    def predict(self, X):
        """Output fidelity to GHZ per input state (0 where post-selection fails)."""
        check_is_fitted(self, "unitary_")
        states = check_states(X)
        return np.array([cost(self.unitary_, rho, self._rounds()) for rho in states])

    def score(self, X, y=None):
        return float(np.mean(self.predict(X)))

    def trajectory(self, X, steps: int):
        check_is_fitted(self, "unitary_")
        return [iterate(self.unitary_, rho, steps) for rho in check_states(X)]
