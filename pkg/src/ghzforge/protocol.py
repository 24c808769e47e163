"""The post-selected two-copy distillation map and its iteration.

One round: the parties hold two copies of a 3-qubit state, each applies the
same two-qubit unitary ``U`` to its (data, flag) pair, the flag copy is
measured in the computational basis and the data copy is kept only when every
flag reads 0.  Iterating feeds two copies of each round's output into the
next round, which makes the map nonlinear in the input state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    FLAG_ZERO_INDICES,
    extract_flag_zero_block,
    is_unitary,
    tensor_interleaved,
)
from .states import fidelity_to_ghz

P_MIN = 1e-12
MAX_ITERATIONS = 64


class DegenerateOutcome(ArithmeticError):
    """Post-selection on all-zero flags has (numerically) zero probability."""

    def __init__(self, success_prob: float, iteration: int | None = None):
        self.success_prob = success_prob
        self.iteration = iteration
        where = "" if iteration is None else f" at iteration {iteration}"
        super().__init__(
            f"post-selection probability {success_prob:.3e} <= {P_MIN:g}{where}"
        )


@dataclass(frozen=True)
class ProtocolOutcome:
    state: np.ndarray
    success_prob: float


@dataclass(frozen=True)
class TrajectoryPoint:
    iteration: int
    fidelity: float
    success_prob: float
    state: np.ndarray = field(repr=False)

    @property
    def copies_consumed(self) -> int:
        return 2**self.iteration


class Trajectory(list):
    """List of :class:`TrajectoryPoint`, entry 0 being the input state."""

    @property
    def fidelities(self) -> list[float]:
        return [p.fidelity for p in self]

    @property
    def success_probs(self) -> list[float]:
        return [p.success_prob for p in self]


def party_unitary(u) -> np.ndarray:
    """``U (x) U (x) U`` on the interleaved register (a1, b1, a2, b2, a3, b3)."""
    u = np.asarray(u, dtype=np.complex128)
    return np.kron(np.kron(u, u), u)


def _flag_zero_rows(u: np.ndarray) -> np.ndarray:
    # Rows of U(x)U(x)U whose output flags are all 0; factorizes per party
    # because each party's flag bit is the low bit of its 2-qubit block.
    u0 = u[[0, 2], :]
    return np.kron(np.kron(u0, u0), u0)


def distill_numerator(rho_data, rho_flag, u, check: bool = True):
    """Unnormalized post-selected data state and its trace.

    Returns ``(block, weight)`` where ``block`` is the 8x8 flag-zero block of
    ``G (rho_data (x) rho_flag) G^dagger`` with ``G = U (x) U (x) U``.
    """
    u = np.asarray(u, dtype=np.complex128)
    if check and (u.shape != (4, 4) or not is_unitary(u, 1e-9)):
        raise ValueError("party unitary must be a 4x4 unitary matrix")
    joint = tensor_interleaved(rho_data, rho_flag)
    rows = _flag_zero_rows(u)
    block = rows @ joint @ rows.conj().T
    return block, float(np.trace(block).real)


def distill_numerator_dense(rho_data, rho_flag, u):
    """Reference path: full 64x64 conjugation followed by block extraction."""
    g = party_unitary(u)
    joint = tensor_interleaved(rho_data, rho_flag)
    block = extract_flag_zero_block(g @ joint @ g.conj().T)
    return block, float(np.trace(block).real)


def distill_step(u, rho, check: bool = True) -> ProtocolOutcome:
    """One round of the protocol on two copies of ``rho``.

    Raises
    ------
    DegenerateOutcome
        If the all-zeros flag outcome has probability at most ``P_MIN``.
    """
    block, p = distill_numerator(rho, rho, u, check=check)
    if not p > P_MIN:
        raise DegenerateOutcome(p)
    state = block / p
    state = 0.5 * (state + state.conj().T)
    return ProtocolOutcome(state, p)


def iterate(u, rho0, k: int) -> Trajectory:
    """Apply ``k`` rounds, recording fidelity and success probability."""
    k = int(k)
    if not 0 <= k <= MAX_ITERATIONS:
        raise ValueError(f"iteration count must lie in [0, {MAX_ITERATIONS}], got {k}")
    rho = np.asarray(rho0, dtype=np.complex128)
    traj = Trajectory([TrajectoryPoint(0, fidelity_to_ghz(rho), 1.0, rho)])
    for i in range(1, k + 1):
        try:
            out = distill_step(u, rho, check=(i == 1))
        except DegenerateOutcome as exc:
            exc.iteration = i
            exc.trajectory = traj
            exc.args = (f"{exc.args[0]} at iteration {i}",)
            raise
        rho = out.state
        traj.append(
            TrajectoryPoint(i, fidelity_to_ghz(rho, check=False), out.success_prob, rho)
        )
    return traj


def cost(u, rho0, k: int, check: bool = False) -> float:
    """Fidelity to GHZ after ``k`` rounds; 0 when post-selection degenerates."""
    rho = rho0
    try:
        for _ in range(k):
            rho = distill_step(u, rho, check=check).state
    except DegenerateOutcome:
        return 0.0
    return fidelity_to_ghz(rho, check=False)
