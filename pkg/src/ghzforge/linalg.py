"""Dense complex linear algebra over registers of at most six qubits.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``.  Qubit 0
is the most significant bit of a basis index (MSB-left), so ``kron(a, b)``
places ``a`` on the leading qubits.

The two-copy register used by the distillation protocol is ordered
``(a1, b1, a2, b2, a3, b3)``: party ``i`` holds the data qubit ``ai`` and the
flag qubit ``bi`` next to each other.  Data bits therefore sit at index bit
positions 5, 3, 1 and flag bits at 4, 2, 0.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

MAX_DIM = 64

DATA_BITS = (5, 3, 1)
FLAG_BITS = (4, 2, 0)


def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a square, finite complex128 array."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains NaN or Inf entries")
    return a


def _num_qubits(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim < 1 or (1 << n) != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


def kron(a, b) -> np.ndarray:
    """Kronecker product; the left factor owns the most significant bits."""
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[0] * b.shape[0] > MAX_DIM:
        raise ValueError(
            f"kron result of dimension {a.shape[0] * b.shape[0]} exceeds {MAX_DIM}"
        )
    return np.kron(a, b)


def matmul(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a @ b


def adjoint(a) -> np.ndarray:
    return as_matrix(a).conj().T


def trace(a) -> complex:
    return complex(np.trace(as_matrix(a)))


def _interleave_index(d: int, f: int) -> int:
    idx = 0
    for k, (db, fb) in enumerate(zip(DATA_BITS, FLAG_BITS)):
        shift = 2 - k
        idx |= ((d >> shift) & 1) << db
        idx |= ((f >> shift) & 1) << fb
    return idx


def interleaved_index(d: int, f: int) -> int:
    """Index in the two-copy register of data bits ``d`` and flag bits ``f``."""
    if not (0 <= d < 8 and 0 <= f < 8):
        raise ValueError("data and flag values must be 3-bit integers")
    return _interleave_index(d, f)


# Row/column indices of the 64-dim register whose three flag bits are all 0.
FLAG_ZERO_INDICES = np.array([_interleave_index(d, 0) for d in range(8)])


def tensor_interleaved(rho_a, rho_b) -> np.ndarray:
    """Joint state of two 3-qubit copies in the order (a1, b1, a2, b2, a3, b3).

    ``out[idx(d, f), idx(d', f')] == rho_a[d, d'] * rho_b[f, f']``.
    """
    rho_a, rho_b = as_matrix(rho_a), as_matrix(rho_b)
    if rho_a.shape != (8, 8) or rho_b.shape != (8, 8):
        raise ValueError("tensor_interleaved expects two 8x8 matrices")
    # axes: row a1 a2 a3, col a1' a2' a3', row b1 b2 b3, col b1' b2' b3'
    t = np.multiply.outer(rho_a.reshape((2,) * 6), rho_b.reshape((2,) * 6))
    t = t.transpose(0, 6, 1, 7, 2, 8, 3, 9, 4, 10, 5, 11)
    return t.reshape(64, 64)


def permute_qubits(m, perm: Sequence[int]) -> np.ndarray:
    """Conjugate ``m`` by the unitary sending qubit ``j`` to position ``perm[j]``."""
    m = as_matrix(m)
    n = _num_qubits(m.shape[0])
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(n)):
        raise ValueError(f"{perm} is not a permutation of {n} qubits")
    inverse = [0] * n
    for j, p in enumerate(perm):
        inverse[p] = j
    axes = inverse + [n + j for j in inverse]
    return m.reshape((2,) * (2 * n)).transpose(axes).reshape(m.shape)


def extract_flag_zero_block(m) -> np.ndarray:
    """Unnormalized data-qubit state conditioned on all flags reading 0."""
    m = as_matrix(m)
    if m.shape != (64, 64):
        raise ValueError("extract_flag_zero_block expects a 64x64 matrix")
    return m[np.ix_(FLAG_ZERO_INDICES, FLAG_ZERO_INDICES)]


def is_unitary(m, tol: float = 1e-9) -> bool:
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    err = np.abs(m.conj().T @ m - np.eye(m.shape[0]))
    return bool(err.max() <= tol)


def is_density(m, tol: float = 1e-9) -> bool:
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or not np.all(np.isfinite(m)):
        return False
    if np.abs(m - m.conj().T).max() > tol:
        return False
    if abs(np.trace(m) - 1.0) > tol:
        return False
    eigs = np.linalg.eigvalsh((m + m.conj().T) / 2)
    return bool(eigs.min() >= -tol)
