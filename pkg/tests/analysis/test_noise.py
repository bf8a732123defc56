import numpy as np
import pytest

from canoe_lab.analysis.noise import (
    NoiseKind,
    NoiseSpec,
    hamiltonian_cq_error,
    overlap_frobenius_error,
    synthetic_alpha_blocks,
)
from canoe_lab.analysis.perturbation import perturbative_energy_error
from canoe_lab.analysis.unresolved import resolution_threshold, unresolved_weight
from canoe_lab.exceptions import ContractViolationError
from canoe_lab.solvers.dense_oracle import dense_ground_state
from canoe_lab.subspace.exact import build_exact_blocks


@pytest.fixture
def exact_pair(heisenberg4, heisenberg4_basis):
    return build_exact_blocks(heisenberg4, heisenberg4_basis)


def test_zero_shots_is_noiseless(heisenberg4, heisenberg4_basis, exact_pair):
    noisy, frob = NoiseSpec.sampled(0).realize(heisenberg4, heisenberg4_basis, exact_pair)
    assert noisy is exact_pair
    assert frob == 0.0


def test_sampled_noise_is_hermitian(heisenberg4, heisenberg4_basis, exact_pair):
    noisy, frob = NoiseSpec.sampled(1000, seed=3).realize(heisenberg4, heisenberg4_basis, exact_pair)
    assert frob > 0
    assert noisy.hermiticity_error() < 1e-15
    assert frob == pytest.approx(overlap_frobenius_error(noisy, exact_pair))
    np.testing.assert_array_equal(noisy.H_qq, exact_pair.H_qq)


def test_synthetic_alpha_is_linear(heisenberg4, heisenberg4_basis, exact_pair):
    full, frob_full = NoiseSpec.synthetic(1.0, seed=8, reference_shots=500).realize(heisenberg4, heisenberg4_basis, exact_pair)
    half, frob_half = NoiseSpec.synthetic(0.5, seed=8, reference_shots=500).realize(heisenberg4, heisenberg4_basis, exact_pair)
    none, frob_none = NoiseSpec.synthetic(0.0, seed=8, reference_shots=500).realize(heisenberg4, heisenberg4_basis, exact_pair)
    np.testing.assert_allclose(half.S_cq, (full.S_cq + exact_pair.S_cq) / 2, atol=1e-14)
    np.testing.assert_allclose(half.H_cq, (full.H_cq + exact_pair.H_cq) / 2, atol=1e-13)
    np.testing.assert_allclose(none.S_cq, exact_pair.S_cq)
    assert frob_half == pytest.approx(frob_full / 2)
    assert frob_none == 0.0
    assert frob_full == pytest.approx(overlap_frobenius_error(full, exact_pair))


def test_synthetic_blocks_interpolate_both_matrices(exact_pair):
    shifted = exact_pair.with_cq(exact_pair.S_cq + 0.1, exact_pair.H_cq - 0.2)
    mixed = synthetic_alpha_blocks(exact_pair, shifted, 0.25)
    np.testing.assert_allclose(mixed.S_cq - exact_pair.S_cq, 0.025)
    np.testing.assert_allclose(mixed.H_cq - exact_pair.H_cq, -0.05)
    assert hamiltonian_cq_error(mixed.H_cq, exact_pair.H_cq) == pytest.approx(0.05 * 3)
    with pytest.raises(ContractViolationError):
        synthetic_alpha_blocks(exact_pair, shifted, -0.1)


def test_noise_labels():
    assert NoiseSpec.sampled(100).label == "shots=100"
    assert NoiseSpec.synthetic(0.5, reference_shots=1000).label == "alpha=0.5@N0=1000"
    assert NoiseSpec("sampled").kind is NoiseKind.SAMPLED


def test_resolution_threshold_by_hand():
    tau, rank = resolution_threshold(np.array([[3.0], [4.0]]), np.zeros((1, 1)))
    assert rank == 1
    assert tau == pytest.approx(5.0)
    tau, rank = resolution_threshold(np.zeros((2, 1)), np.array([[0.2]]))
    assert rank == 0
    assert tau == pytest.approx(0.2)


def test_noiseless_blocks_have_no_unresolved_weight(exact_pair):
    _, c0 = dense_ground_state(exact_pair)
    result = unresolved_weight(exact_pair, exact_pair.S_cq, exact_pair.S_qq, c0)
    assert result.weight == 0.0
    assert result.tau == 0.0


def test_unresolved_weight_grows_with_noise(heisenberg4, heisenberg4_basis, exact_pair):
    _, c0 = dense_ground_state(exact_pair)
    reference, _ = NoiseSpec.synthetic(1.0, seed=4, reference_shots=200).realize(heisenberg4, heisenberg4_basis, exact_pair)
    weights, taus = [], []
    for alpha in (0.0, 0.25, 1.0, 4.0, 16.0):
        noisy = synthetic_alpha_blocks(exact_pair, reference, alpha)
        result = unresolved_weight(exact_pair, noisy.S_cq, noisy.S_qq, c0)
        weights.append(result.weight)
        taus.append(result.tau)
    assert all(0.0 <= w <= 1.0 for w in weights)
    assert weights == sorted(weights)
    assert taus == sorted(taus)
    assert taus[2] == pytest.approx(4 * taus[1])


def test_unresolved_weight_shape_checks(exact_pair):
    with pytest.raises(ContractViolationError):
        unresolved_weight(exact_pair, exact_pair.S_cq[:, :1], exact_pair.S_qq, np.ones(exact_pair.dim))
    with pytest.raises(ContractViolationError):
        unresolved_weight(exact_pair, exact_pair.S_cq, exact_pair.S_qq, np.ones(2))


def test_first_order_shift_matches_perturbed_solve(exact_pair, rng):
    e0, v0 = dense_ground_state(exact_pair)
    eps = 1e-5
    d_cq = eps * (rng.normal(size=exact_pair.H_cq.shape) + 1j * rng.normal(size=exact_pair.H_cq.shape))
    perturbed = exact_pair.with_cq(exact_pair.S_cq, exact_pair.H_cq + d_cq)
    d_h = perturbed.hamiltonian_dense() - exact_pair.hamiltonian_dense()
    estimate = perturbative_energy_error(d_h, np.zeros_like(d_h), e0, v0, gap=1.0)
    actual = dense_ground_state(perturbed)[0] - e0
    assert estimate.shift == pytest.approx(actual, abs=1e-8)
    assert estimate.valid
    assert perturbative_energy_error(d_h, np.zeros_like(d_h), e0, v0).valid is None


def test_overlap_perturbation_scalar_case():
    estimate = perturbative_energy_error(np.array([[0.0]]), np.array([[0.1]]), 2.0, np.array([1.0]))
    assert estimate.shift == pytest.approx(-0.2)
    assert estimate.perturbation_size == pytest.approx(0.2)
