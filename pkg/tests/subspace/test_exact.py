import numpy as np
import pytest

from canoe_lab.exceptions import ConfigurationError, ContractViolationError
from canoe_lab.operators.pauli import Determinant, parse_hamiltonian_text, to_dense
from canoe_lab.simulation.krylov import project_hamiltonian
from canoe_lab.simulation.sparse_state import RestrictedSpace, SparseState
from canoe_lab.subspace.blocks import HybridBasis
from canoe_lab.subspace.exact import (
    build_exact_blocks,
    hamiltonian_column_from_table,
    hamiltonian_element_from_overlaps,
    rank_determinants,
    reconstruct_qq_from_amplitudes,
)


def d(text: str) -> Determinant:
    return Determinant.from_string(text)


def test_blocks_match_dense_projection(heisenberg4, heisenberg4_space, heisenberg4_basis):
    blocks = build_exact_blocks(heisenberg4, heisenberg4_basis)
    h_d = project_hamiltonian(heisenberg4, heisenberg4_space).toarray()
    phi = np.column_stack([s.to_vector(heisenberg4_space) for s in heisenberg4_basis.quantum])
    rows = [heisenberg4_space.index[det] for det in heisenberg4_basis.classical]
    np.testing.assert_allclose(blocks.S_cq, phi[rows], atol=1e-13)
    np.testing.assert_allclose(blocks.H_cq, (h_d @ phi)[rows], atol=1e-13)
    np.testing.assert_allclose(blocks.S_qq, phi.conj().T @ phi, atol=1e-13)
    np.testing.assert_allclose(blocks.H_qq, phi.conj().T @ h_d @ phi, atol=1e-13)
    np.testing.assert_allclose(blocks.H_cc.toarray(), h_d[np.ix_(rows, rows)], atol=1e-14)


def test_reference_state_gives_unit_column(heisenberg4, heisenberg4_space):
    ranked = rank_determinants(heisenberg4, heisenberg4_space)
    ref = SparseState.from_determinant(ranked[1])
    blocks = build_exact_blocks(heisenberg4, HybridBasis(ranked[:3], (ref,), heisenberg4_space))
    np.testing.assert_allclose(blocks.S_cq[:, 0], [0, 1, 0])
    assert blocks.S_qq[0, 0] == pytest.approx(1.0)


def test_width_mismatch(heisenberg4_basis):
    with pytest.raises(ContractViolationError):
        build_exact_blocks(parse_hamiltonian_text("1 0 ZZ"), heisenberg4_basis)


def test_element_from_full_table_matches_dense(make_hamiltonian, make_state, rng):
    h = make_hamiltonian(3, 8, rng)
    phi = make_state(RestrictedSpace.full(3), rng)
    expected = to_dense(h) @ phi.to_dense()
    for bits in range(8):
        value = hamiltonian_element_from_overlaps(h, Determinant(bits, 3), phi)
        assert value == pytest.approx(expected[bits], abs=1e-13)


def test_missing_strings_contribute_zero():
    h = parse_hamiltonian_text("1 0 Z\n1 0 X\n")
    assert hamiltonian_element_from_overlaps(h, d("0"), {d("0"): 1.0}) == pytest.approx(1.0)
    assert hamiltonian_element_from_overlaps(h, d("0"), {}) == 0


def test_identity_term_scales_amplitude():
    h = parse_hamiltonian_text("2 0 II")
    assert hamiltonian_element_from_overlaps(h, d("01"), {d("01"): 0.5j}) == pytest.approx(1j)


def test_vectorised_column_matches_scalar(make_hamiltonian, make_state, rng):
    h = make_hamiltonian(3, 8, rng)
    space = RestrictedSpace.full(3)
    phi = make_state(space, rng)
    table = {det: amp for det, amp in phi.items() if det.bits % 3}
    rows = list(space.dets)
    column = hamiltonian_column_from_table(h, rows, table)
    expected = [hamiltonian_element_from_overlaps(h, det, table) for det in rows]
    np.testing.assert_allclose(column, expected, atol=1e-13)
    np.testing.assert_array_equal(hamiltonian_column_from_table(h, rows, {}), np.zeros(8))


def test_qq_reconstruction_on_full_set(ising4, ising4_basis):
    blocks = build_exact_blocks(ising4, ising4_basis)
    s_qq, h_qq = reconstruct_qq_from_amplitudes(ising4, ising4_basis.quantum, ising4_basis.space.dets)
    np.testing.assert_allclose(s_qq, blocks.S_qq, atol=1e-13)
    np.testing.assert_allclose(h_qq, blocks.H_qq, atol=1e-13)


def test_qq_reconstruction_on_partial_set(ising4, ising4_basis):
    space = ising4_basis.space
    kept = space.dets[::2]
    s_qq, h_qq = reconstruct_qq_from_amplitudes(ising4, ising4_basis.quantum, kept)
    sub = RestrictedSpace(kept)
    phi = np.column_stack([s.to_vector(sub) for s in ising4_basis.quantum])
    h_sub = project_hamiltonian(ising4, sub).toarray()
    np.testing.assert_allclose(h_qq, phi.conj().T @ h_sub @ phi, atol=1e-13)
    for j, state in enumerate(ising4_basis.quantum):
        weight = sum(abs(state.amplitude(det)) ** 2 for det in kept)
        assert s_qq[j, j].real == pytest.approx(weight, abs=1e-13)
        assert s_qq[j, j].real <= 1.0 + 1e-12


def test_qq_reconstruction_empty_set(ising4, ising4_basis):
    s_qq, h_qq = reconstruct_qq_from_amplitudes(ising4, ising4_basis.quantum, [])
    assert not s_qq.any() and not h_qq.any()


def test_ranking_by_ground_state_weight():
    h = parse_hamiltonian_text("1 0 Z")
    assert [det.to_string() for det in rank_determinants(h, RestrictedSpace.full(1))] == ["1", "0"]


def test_ranking_is_weight_ordered(heisenberg4, heisenberg4_space):
    ranked = rank_determinants(heisenberg4, heisenberg4_space)
    assert sorted(ranked) == sorted(heisenberg4_space.dets)
    _, vecs = np.linalg.eigh(project_hamiltonian(heisenberg4, heisenberg4_space).toarray())
    weights = [abs(vecs[heisenberg4_space.index[det], 0]) for det in ranked]
    assert all(a >= b - 1e-10 for a, b in zip(weights, weights[1:]))


def test_ranking_file_order_wins(heisenberg4, heisenberg4_space):
    ranking = [(d("0101"), 0.1), (d("1010"), 0.9)]
    assert rank_determinants(heisenberg4, heisenberg4_space, ranking) == [d("0101"), d("1010")]


def test_ranking_limits(heisenberg4, heisenberg4_space):
    with pytest.raises(ConfigurationError):
        rank_determinants(heisenberg4, heisenberg4_space, dense_limit=4)
    with pytest.raises(ContractViolationError):
        rank_determinants(heisenberg4, RestrictedSpace([]))
