import numpy as np
import pytest

from canoe_lab.exceptions import ContractViolationError
from canoe_lab.operators.pauli import Determinant
from canoe_lab.simulation.krylov import KrylovConfig, krylov_states, project_hamiltonian
from canoe_lab.simulation.sparse_state import RestrictedSpace
from canoe_lab.solvers.dense_oracle import conditioning_metric, dense_ground_energy, dense_ground_state
from canoe_lab.solvers.hybrid_solver import SolverConfig, SolverMode, solve
from canoe_lab.subspace.blocks import HybridBasis, pair_from_dense
from canoe_lab.subspace.exact import build_exact_blocks, rank_determinants


@pytest.fixture
def neel_duplicate_basis(heisenberg4, heisenberg4_space) -> HybridBasis:
    """
    Classical sector containing the reference |1010>, which is also the first Krylov state.
    """
    ref = Determinant.from_string("1010")
    ranked = [det for det in rank_determinants(heisenberg4, heisenberg4_space) if det != ref]
    states = krylov_states(heisenberg4, heisenberg4_space, KrylovConfig(3, ref, tau=1.0))
    return HybridBasis((ref, *ranked[:2]), tuple(states), heisenberg4_space)


@pytest.mark.parametrize("mode", ["plain", "pseudo_inverse", "deflation"])
def test_modes_match_dense_oracle(heisenberg4, heisenberg4_basis, mode):
    blocks = build_exact_blocks(heisenberg4, heisenberg4_basis)
    outcome = solve(blocks, SolverConfig(mode=mode), seed=4)
    assert outcome.converged
    assert not outcome.failed
    assert outcome.mode is SolverMode(mode)
    assert outcome.energy == pytest.approx(dense_ground_energy(blocks), abs=1e-6)
    assert 0.0 <= outcome.classical_weight <= 1.0 + 1e-8
    assert 0.0 <= outcome.classical_span_weight <= 1.0 + 1e-6


def test_eigenvector_is_overlap_normalised(heisenberg4, heisenberg4_basis):
    blocks = build_exact_blocks(heisenberg4, heisenberg4_basis)
    outcome = solve(blocks, SolverConfig(), seed=0)
    v = outcome.vector
    assert np.vdot(v, blocks.overlap_dense() @ v).real == pytest.approx(1.0, abs=1e-8)


def test_deflation_drops_duplicated_direction(heisenberg4, neel_duplicate_basis):
    blocks = build_exact_blocks(heisenberg4, neel_duplicate_basis)
    outcome = solve(blocks, SolverConfig(mode="deflation", rank_tol=1e-10), seed=1)
    assert outcome.n_discarded == 1
    assert outcome.converged
    assert outcome.energy == pytest.approx(dense_ground_energy(blocks), abs=1e-6)
    assert np.isinf(conditioning_metric(blocks))


def test_all_truncated_falls_back_to_classical(heisenberg4, heisenberg4_space):
    ranked = rank_determinants(heisenberg4, heisenberg4_space)
    states = krylov_states(heisenberg4, heisenberg4_space, KrylovConfig(2, Determinant.from_string("1010"), tau=0.5))
    blocks = build_exact_blocks(heisenberg4, HybridBasis(tuple(ranked), tuple(states), heisenberg4_space))
    outcome = solve(blocks, SolverConfig(mode="deflation", rank_tol=1e-8), seed=2)
    assert outcome.all_truncated
    assert outcome.n_discarded == 2
    assert not outcome.quantum_vector.any()
    ground = np.linalg.eigvalsh(project_hamiltonian(heisenberg4, heisenberg4_space).toarray())[0]
    assert outcome.energy == pytest.approx(ground, abs=1e-8)


def test_classical_only_basis(heisenberg4, heisenberg4_space):
    ranked = rank_determinants(heisenberg4, heisenberg4_space)
    blocks = build_exact_blocks(heisenberg4, HybridBasis(tuple(ranked[:3]), (), heisenberg4_space))
    outcome = solve(blocks, SolverConfig(), seed=0)
    assert not outcome.all_truncated
    assert outcome.classical_weight == pytest.approx(1.0, abs=1e-8)
    assert outcome.energy == pytest.approx(np.linalg.eigvalsh(blocks.H_cc.toarray())[0], abs=1e-8)
    assert conditioning_metric(blocks) == pytest.approx(1.0)
    assert dense_ground_state(blocks)[0] == pytest.approx(outcome.energy, abs=1e-8)


def test_non_hermitian_blocks_rejected(heisenberg4, heisenberg4_basis):
    blocks = build_exact_blocks(heisenberg4, heisenberg4_basis)
    skewed = type(blocks)(blocks.S_cq, blocks.S_qq + np.triu(np.full((3, 3), 1e-6), 1), blocks.H_cc, blocks.H_cq, blocks.H_qq)
    with pytest.raises(ContractViolationError):
        solve(skewed)


def test_restarts_are_seed_reproducible(heisenberg4, heisenberg4_basis):
    blocks = build_exact_blocks(heisenberg4, heisenberg4_basis)
    a = solve(blocks, SolverConfig(mode="pseudo_inverse"), seed=5)
    b = solve(blocks, SolverConfig(mode="pseudo_inverse"), seed=5)
    assert a.energy == b.energy
    assert a.iterations == b.iterations


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(mode="newton")
    with pytest.raises(ContractViolationError):
        SolverConfig(rank_tol=-1.0)


RANDOM_SYSTEMS = [(2, n_q) for n_q in range(3)] + [(n, n_q) for n in range(3, 7) for n_q in range(5)]


@pytest.mark.parametrize("n_qubit, n_quantum", RANDOM_SYSTEMS)
def test_random_systems_match_dense_oracle(make_hamiltonian, n_qubit, n_quantum):
    rng = np.random.default_rng(100 * n_qubit + n_quantum)
    h = make_hamiltonian(n_qubit, 3 * n_qubit, rng)
    space = RestrictedSpace.full(n_qubit)
    ref = Determinant.from_string("0" * n_qubit)
    classical = tuple(det for det in rank_determinants(h, space) if det != ref)[: min(3, n_qubit - 1)]
    states = krylov_states(h, space, KrylovConfig(4, ref))
    full = build_exact_blocks(h, HybridBasis(classical, tuple(states), space))
    blocks = full.truncated(len(classical), n_quantum)
    expected = dense_ground_energy(blocks)
    for mode in SolverMode:
        outcome = solve(blocks, SolverConfig(mode=mode), seed=n_qubit)
        assert not outcome.failed
        assert outcome.energy == pytest.approx(expected, abs=1e-6), mode


@pytest.mark.parametrize("scale, finite", [(10.0, True), (-10.0, True), (0.1, False), (-0.1, False)])
def test_conditioning_floor_is_three_eps(scale, finite):
    # floor = n eps max|lambda| with n = 3 and max|lambda| = 1
    lam = scale * 3 * np.finfo(float).eps
    blocks = pair_from_dense(np.eye(3), np.diag([1.0, 1.0, lam]), 2)
    metric = conditioning_metric(blocks)
    if finite:
        assert metric == pytest.approx(1.0 / abs(lam))
    else:
        assert np.isinf(metric)
