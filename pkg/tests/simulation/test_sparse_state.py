import io

import numpy as np
import pytest

from canoe_lab.exceptions import ContractViolationError, DeterminantFileError
from canoe_lab.operators.pauli import Determinant, parse_hamiltonian_text, to_dense
from canoe_lab.simulation.sparse_state import (
    RestrictedSpace,
    SparseState,
    apply_hamiltonian,
    inner,
    load_determinants,
    read_determinant_file,
    superpose,
)


def d(text: str) -> Determinant:
    return Determinant.from_string(text)


def test_pruning():
    state = SparseState({d("00"): 1.0, d("11"): 1e-16}, 2)
    assert len(state) == 1
    assert state.amplitude(d("11")) == 0


def test_width_mismatch_rejected():
    with pytest.raises(ContractViolationError):
        SparseState({d("000"): 1.0}, 2)


def test_normalisation():
    state = SparseState({d("00"): 3.0, d("11"): 4.0j}, 2).normalized()
    assert state.norm() == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ContractViolationError):
        SparseState({}, 2).normalized()


def test_inner_self_and_disjoint(make_state, rng):
    x = make_state(RestrictedSpace.full(3), rng)
    assert inner(x, x) == pytest.approx(1.0, abs=1e-12)
    a = SparseState.from_determinant(d("001"))
    b = SparseState.from_determinant(d("100"))
    assert inner(a, b) == 0


def test_inner_matches_dense(make_state, rng):
    space = RestrictedSpace.full(3)
    a, b = make_state(space, rng), make_state(space, rng)
    assert inner(a, b) == pytest.approx(np.vdot(a.to_dense(), b.to_dense()), abs=1e-13)
    assert inner(b, a) == pytest.approx(np.conj(inner(a, b)), abs=1e-13)


def test_inner_width_mismatch():
    with pytest.raises(ContractViolationError):
        inner(SparseState.from_determinant(d("0")), SparseState.from_determinant(d("00")))


def test_superpose_identity_and_batch_state():
    x = SparseState({d("01"): 0.6, d("10"): 0.8j}, 2)
    assert dict(superpose([(1.0, x)]).amplitudes) == dict(x.amplitudes)
    m = 2
    chi = superpose([(1 / np.sqrt(m), SparseState.from_determinant(d("00"))),
                     (1 / np.sqrt(m), SparseState.from_determinant(d("11")))])
    assert chi.amplitude(d("00")) == pytest.approx(1 / np.sqrt(2))
    assert chi.amplitude(d("11")) == pytest.approx(1 / np.sqrt(2))


def test_superpose_not_renormalised(make_state, rng):
    space = RestrictedSpace.full(2)
    phi, chi = make_state(space, rng), make_state(space, rng)
    psi = superpose([(1 / np.sqrt(2), phi), (1 / np.sqrt(2), chi)])
    assert psi.norm() ** 2 == pytest.approx(1 + inner(phi, chi).real, abs=1e-12)
    with pytest.raises(ContractViolationError):
        superpose([])


def test_apply_hamiltonian_matches_dense(make_hamiltonian, make_state, rng):
    h = make_hamiltonian(3, 6, rng)
    state = make_state(RestrictedSpace.full(3), rng)
    np.testing.assert_allclose(apply_hamiltonian(h, state).to_dense(), to_dense(h) @ state.to_dense(), atol=1e-13)


def test_space_index_and_sector():
    space = RestrictedSpace.sector(4, 2)
    assert len(space) == 6
    assert all(det.n_electrons == 2 for det in space)
    assert [det.bits for det in space.dets] == sorted(det.bits for det in space.dets)
    for pos, det in enumerate(space.dets):
        assert space.index[det] == pos
    with pytest.raises(ContractViolationError):
        RestrictedSpace([d("01"), d("01")])
    with pytest.raises(ContractViolationError):
        RestrictedSpace.sector(2, 3)


def test_positions_lookup():
    space = RestrictedSpace([d("11"), d("00")])
    found = space.positions(np.array([d("00").bits, d("10").bits, d("11").bits], dtype=np.uint64))
    np.testing.assert_array_equal(found, [1, -1, 0])


def test_vector_round_trip():
    space = RestrictedSpace.full(2)
    vec = np.array([0.5, 0.5j, -0.5, 0.5])
    np.testing.assert_array_equal(SparseState.from_vector(space, vec).to_vector(space), vec)


def test_read_determinant_file():
    text = "# ranking\n0101 0.9\n1010 -0.3\n\n0110\n"
    entries = read_determinant_file(io.StringIO(text))
    assert [det.to_string() for det, _ in entries] == ["0101", "1010", "0110"]
    assert [w for _, w in entries] == [0.9, -0.3, None]


def test_ranking_file_needs_weights():
    with pytest.raises(DeterminantFileError) as err:
        read_determinant_file(io.StringIO("01 1.0\n10\n"), require_weight=True)
    assert err.value.line_number == 2


@pytest.mark.parametrize("text", ["01 x\n", "01 1 2\n", "0a\n", "01\n011\n"])
def test_malformed_determinant_files(text):
    with pytest.raises(DeterminantFileError):
        read_determinant_file(io.StringIO(text))


def test_load_determinants(tmp_path):
    path = tmp_path / "dets.txt"
    path.write_text("10\n01\n")
    assert [det.to_string() for det, _ in load_determinants(str(path))] == ["10", "01"]


def test_projected_hamiltonian_on_subspace():
    from canoe_lab.simulation.krylov import project_hamiltonian

    space = RestrictedSpace([d("01"), d("10")])
    np.testing.assert_allclose(project_hamiltonian(parse_hamiltonian_text("1 0 ZZ"), space).toarray(), -np.eye(2))
    np.testing.assert_allclose(project_hamiltonian(parse_hamiltonian_text("1 0 XX"), space).toarray(), [[0, 1], [1, 0]])
    single = RestrictedSpace([d("00")])
    np.testing.assert_allclose(project_hamiltonian(parse_hamiltonian_text("1 0 XI"), single).toarray(), [[0]])
