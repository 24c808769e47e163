import numpy as np
import pytest

from ghzforge.ansatz import N_PARAMS, SWAP, build_unitary, cnot, rx, rz
from ghzforge.linalg import is_unitary

SWAP_DENSE = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])


def test_rotations_at_zero():
    np.testing.assert_allclose(rx(0), np.eye(2))
    np.testing.assert_allclose(rz(0), np.eye(2))


def test_half_angle_convention():
    np.testing.assert_allclose(rx(2 * np.pi), -np.eye(2), atol=1e-15)
    np.testing.assert_allclose(rz(2 * np.pi), -np.eye(2), atol=1e-15)


def test_cnot_msb_left():
    # control on qubit 0 (high bit): |10> -> |11>
    assert cnot(0, 1)[3, 2] == 1
    assert cnot(1, 0)[3, 1] == 1
    with pytest.raises(ValueError):
        cnot(0, 0)


def test_three_cnots_make_swap():
    product = cnot(0, 1) @ cnot(1, 0) @ cnot(0, 1)
    # explicit check on each basis vector |q0 q1> -> |q1 q0>
    np.testing.assert_array_equal(product, SWAP_DENSE)
    np.testing.assert_array_equal(SWAP, SWAP_DENSE)


def test_zero_angles_give_swap():
    np.testing.assert_allclose(build_unitary(np.zeros(N_PARAMS)), SWAP_DENSE, atol=1e-15)


def test_single_rotation_structure():
    theta = np.zeros(N_PARAMS)
    theta[0] = np.pi
    # first layer acts before the CNOT chain: SWAP (Rx(pi) (x) I) = (I (x) Rx(pi)) SWAP
    expected = SWAP_DENSE @ np.kron(rx(np.pi), np.eye(2))
    u = build_unitary(theta)
    np.testing.assert_allclose(u, expected, atol=1e-15)
    np.testing.assert_allclose(u, np.kron(np.eye(2), rx(np.pi)) @ SWAP_DENSE, atol=1e-15)


def test_random_unitary(rng):
    for _ in range(20):
        u = build_unitary(rng.uniform(0, 2 * np.pi, N_PARAMS))
        assert is_unitary(u, 1e-12)
        assert abs(abs(np.linalg.det(u)) - 1) <= 1e-12


def test_periodic_up_to_phase(rng):
    theta = rng.uniform(0, 2 * np.pi, N_PARAMS)
    u = build_unitary(theta)
    for i in range(N_PARAMS):
        shifted = theta.copy()
        shifted[i] += 2 * np.pi
        assert abs(abs(np.trace(u.conj().T @ build_unitary(shifted))) - 4) <= 1e-9


def test_lipschitz_in_each_angle(rng):
    theta = rng.uniform(0, 2 * np.pi, N_PARAMS)
    h = 1e-6
    u = build_unitary(theta)
    for i in range(N_PARAMS):
        shifted = theta.copy()
        shifted[i] += h
        assert np.linalg.norm(build_unitary(shifted) - u, 2) <= h


def test_bad_shapes():
    with pytest.raises(ValueError):
        build_unitary(np.zeros(15))
    with pytest.raises(ValueError):
        build_unitary(np.full(16, np.inf))
