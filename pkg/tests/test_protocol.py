import numpy as np
import pytest

from ghzforge.ansatz import N_PARAMS, build_unitary, cnot
from ghzforge.linalg import is_density, permute_qubits
from ghzforge.protocol import (
    DegenerateOutcome,
    cost,
    distill_numerator,
    distill_numerator_dense,
    distill_step,
    iterate,
)
from ghzforge.states import fidelity_to_ghz, ghz_density, white_noise_input

from conftest import random_density

I4 = np.eye(4)
I_X = np.kron(np.eye(2), np.array([[0, 1], [1, 0]]))
ZERO = np.zeros((8, 8))
ZERO[0, 0] = 1


def test_identity_numerator(rng):
    rd, rf = random_density(rng), random_density(rng)
    block, w = distill_numerator(rd, rf, I4)
    np.testing.assert_allclose(block, rf[0, 0] * rd, atol=1e-14)
    assert w == pytest.approx(rf[0, 0].real)


def test_bilateral_cnot_passes_ghz():
    # state-vector oracle: |GHZ>|GHZ> on 64 amplitudes, CNOT data->flag per party
    psi = np.zeros(64, dtype=complex)
    ghz = np.zeros(8)
    ghz[[0, 7]] = 1 / np.sqrt(2)
    for d in range(8):
        for f in range(8):
            bits = []
            for k in (2, 1, 0):
                bits += [(d >> k) & 1, (f >> k) & 1]
            psi[int("".join(map(str, bits)), 2)] = ghz[d] * ghz[f]
    g = np.kron(np.kron(cnot(0, 1), cnot(0, 1)), cnot(0, 1))
    out = g @ psi
    keep = [int("".join(f"{(d >> k) & 1}0" for k in (2, 1, 0)), 2) for d in range(8)]
    post = out[keep]
    weight = np.vdot(post, post).real
    assert weight == pytest.approx(0.5)

    block, w = distill_numerator(ghz_density(), ghz_density(), cnot(0, 1))
    assert w == pytest.approx(weight, abs=1e-14)
    np.testing.assert_allclose(block / w, ghz_density(), atol=1e-14)
    np.testing.assert_allclose(block, np.outer(post, post.conj()), atol=1e-14)


def test_fast_path_matches_dense(rng):
    for _ in range(20):
        u = build_unitary(rng.uniform(0, 2 * np.pi, N_PARAMS))
        rd, rf = random_density(rng), random_density(rng)
        fast, wf = distill_numerator(rd, rf, u)
        dense, wd = distill_numerator_dense(rd, rf, u)
        np.testing.assert_allclose(fast, dense, atol=1e-13)
        assert wf == pytest.approx(wd, abs=1e-13)
        assert wf >= -1e-12


def test_numerator_rejects_nonunitary():
    with pytest.raises(ValueError):
        distill_numerator(ZERO, ZERO, 2 * I4)


def test_identity_step_on_white():
    out = distill_step(I4, white_noise_input(0.1))
    np.testing.assert_allclose(out.state, white_noise_input(0.1), atol=1e-12)
    assert out.success_prob == pytest.approx(0.4625, abs=1e-12)


def test_identity_law_random(rng):
    for _ in range(10):
        rho = random_density(rng)
        out = distill_step(I4, rho)
        np.testing.assert_allclose(out.state, rho, atol=1e-12)
        assert out.success_prob == pytest.approx(rho[0, 0].real, abs=1e-12)


def test_degenerate_step():
    with pytest.raises(DegenerateOutcome):
        distill_step(I_X, ZERO)


def test_swap_fixed_point():
    out = distill_step(build_unitary(np.zeros(N_PARAMS)), ghz_density())
    np.testing.assert_allclose(out.state, ghz_density(), atol=1e-14)
    assert fidelity_to_ghz(out.state) == pytest.approx(1, abs=1e-12)


def test_step_validity(rng):
    for _ in range(50):
        u = build_unitary(rng.uniform(0, 2 * np.pi, N_PARAMS))
        out = distill_step(u, random_density(rng, rank=int(rng.integers(1, 9))))
        assert is_density(out.state, 1e-9)
        assert -1e-12 <= out.success_prob <= 1 + 1e-9


def test_party_permutation_covariance(rng):
    perms = [(1, 0, 2), (0, 2, 1), (1, 2, 0), (2, 0, 1), (2, 1, 0)]
    for _ in range(10):
        u = build_unitary(rng.uniform(0, 2 * np.pi, N_PARAMS))
        rho = random_density(rng)
        base = distill_step(u, rho)
        for perm in perms:
            moved = distill_step(u, permute_qubits(rho, perm))
            np.testing.assert_allclose(
                moved.state, permute_qubits(base.state, perm), atol=1e-10
            )
            assert moved.success_prob == pytest.approx(base.success_prob, abs=1e-10)


def test_bilinearity(rng):
    for _ in range(10):
        u = build_unitary(rng.uniform(0, 2 * np.pi, N_PARAMS))
        r1, r2 = random_density(rng), random_density(rng)
        a = rng.random()
        mixed, _ = distill_numerator(a * r1 + (1 - a) * r2, a * r1 + (1 - a) * r2, u)
        n = lambda x, y: distill_numerator(x, y, u)[0]
        expected = (
            a**2 * n(r1, r1)
            + a * (1 - a) * (n(r1, r2) + n(r2, r1))
            + (1 - a) ** 2 * n(r2, r2)
        )
        np.testing.assert_allclose(mixed, expected, atol=1e-10)


def test_iterate_zero_steps():
    rho = white_noise_input(0.1)
    traj = iterate(I4, rho, 0)
    assert len(traj) == 1
    assert traj[0].iteration == 0
    assert traj[0].success_prob == 1
    assert traj[0].fidelity == pytest.approx(0.9125)


def test_iterate_identity_constant():
    traj = iterate(I4, white_noise_input(0.1), 3)
    assert len(traj) == 4
    for p in traj:
        assert p.fidelity == pytest.approx(0.9125, abs=1e-12)
    assert [p.copies_consumed for p in traj] == [1, 2, 4, 8]


def test_iterate_degenerate_reports_index():
    with pytest.raises(DegenerateOutcome) as info:
        iterate(I_X, ZERO, 3)
    assert info.value.iteration == 1
    assert len(info.value.trajectory) == 1


def test_iterate_cap():
    with pytest.raises(ValueError):
        iterate(I4, ZERO, 65)


def test_cost_examples():
    assert cost(I4, white_noise_input(0.1), 1) == pytest.approx(0.9125, abs=1e-12)
    assert cost(I4, ghz_density(), 2) == pytest.approx(1, abs=1e-12)
    assert cost(I_X, ZERO, 1) == 0.0
