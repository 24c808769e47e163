"""Two-qubit ansatz: four Rx/Rz rotation layers around three CNOTs.

Layer ``L`` (0..3) applies ``Rx(theta[4L])`` then ``Rz(theta[4L+1])`` on qubit
0 and ``Rx(theta[4L+2])`` then ``Rz(theta[4L+3])`` on qubit 1.  Between
consecutive layers sit CNOTs with orientations listed in ``CNOT_LAYOUT``.
With all angles zero the circuit reduces to the three-CNOT SWAP.
"""

from __future__ import annotations

import numpy as np

N_PARAMS = 16

# (control, target) of the CNOT following layers 0, 1 and 2.
CNOT_LAYOUT = ((0, 1), (1, 0), (0, 1))

# Written into every record so outputs state which circuit produced them.
CONVENTION_TAG = "rx-rz-4layer/cnot-01-10-01/half-angle"

_I2 = np.eye(2, dtype=np.complex128)


def rx(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)


def rz(theta: float) -> np.ndarray:
    return np.array(
        [[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]], dtype=np.complex128
    )


def cnot(control: int, target: int) -> np.ndarray:
    """CNOT on two qubits in the MSB-left basis (qubit 0 = high bit)."""
    if {control, target} != {0, 1}:
        raise ValueError("control and target must be distinct qubits in {0, 1}")
    m = np.zeros((4, 4), dtype=np.complex128)
    for i in range(4):
        bits = [(i >> 1) & 1, i & 1]
        if bits[control]:
            bits[target] ^= 1
        m[(bits[0] << 1) | bits[1], i] = 1
    return m


SWAP = cnot(0, 1) @ cnot(1, 0) @ cnot(0, 1)
_CNOTS = [cnot(c, t) for c, t in CNOT_LAYOUT]


def _rotation_layer(t: np.ndarray) -> np.ndarray:
    q0 = rz(t[1]) @ rx(t[0])
    q1 = rz(t[3]) @ rx(t[2])
    return np.kron(q0, q1)


def build_unitary(theta) -> np.ndarray:
    """4x4 unitary of the ansatz for 16 rotation angles (radians)."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (N_PARAMS,):
        raise ValueError(f"expected {N_PARAMS} angles, got shape {theta.shape}")
    if not np.all(np.isfinite(theta)):
        raise ValueError("rotation angles must be finite")
    u = _rotation_layer(theta[0:4])
    for layer, gate in enumerate(_CNOTS, start=1):
        u = _rotation_layer(theta[4 * layer : 4 * layer + 4]) @ gate @ u
    return u
