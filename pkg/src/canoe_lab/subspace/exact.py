"""
Infinite-shot assembly of the hybrid block matrices, the Pauli-shift
reconstruction of Hamiltonian elements from amplitude tables, and the
brute-force determinant ranking used at desk scale.
"""

from typing import Iterable, List, Mapping, Optional, Sequence, Tuple, Union
import logging

import numpy as np
import scipy.sparse

from canoe_lab.exceptions import ConfigurationError, ContractViolationError
from canoe_lab.operators.pauli import Determinant, PauliHamiltonian
from canoe_lab.simulation.krylov import DENSE_EVOLUTION_LIMIT, project_hamiltonian
from canoe_lab.simulation.sparse_state import RestrictedSpace, SparseState
from canoe_lab.subspace.blocks import BlockMatrices, HybridBasis, hermitize

AmplitudeTable = Union[Mapping[Determinant, complex], SparseState]

RANKING_DENSE_LIMIT = DENSE_EVOLUTION_LIMIT


def _as_mapping(table: AmplitudeTable) -> Mapping[Determinant, complex]:
    return table.amplitudes if isinstance(table, SparseState) else table


def _working_space(basis: HybridBasis) -> RestrictedSpace:
    """
    Union of the classical list and every quantum support, sorted by bitstring.
    ``<a|H|b>`` is exact on this space whenever a and b both live in it.
    """
    dets = set(basis.classical)
    for state in basis.quantum:
        dets.update(state.amplitudes)
    return RestrictedSpace(sorted(dets))


def build_exact_blocks(h: PauliHamiltonian, basis: HybridBasis) -> BlockMatrices:
    """
    Exact (H, S) blocks of the hybrid basis.
    :param h: The Hamiltonian.
    :param basis: Classical determinants and quantum states.
    :return: Hermitian block pair; H_cc is kept sparse.
    """
    if h.n_qubit != basis.n_qubit:
        raise ContractViolationError(f"Hamiltonian width {h.n_qubit} vs basis width {basis.n_qubit}")

    n_c, n_q = basis.n_classical, basis.n_quantum
    if n_c:
        h_cc = project_hamiltonian(h, RestrictedSpace(basis.classical))
        h_cc = hermitize(h_cc).tocsr()
    else:
        h_cc = scipy.sparse.csr_matrix((0, 0), dtype=complex)

    if n_q == 0:
        empty = np.zeros((n_c, 0), dtype=complex)
        return BlockMatrices(empty, np.zeros((0, 0), dtype=complex), h_cc, empty.copy(), np.zeros((0, 0), dtype=complex))

    work = _working_space(basis)
    h_work = project_hamiltonian(h, work)
    phi = np.column_stack([state.to_vector(work) for state in basis.quantum])
    h_phi = h_work @ phi

    rows = np.array([work.index[d] for d in basis.classical], dtype=np.int64)
    s_cq = phi[rows, :]
    h_cq = h_phi[rows, :]
    s_qq = hermitize(phi.conj().T @ phi)
    h_qq = hermitize(phi.conj().T @ h_phi)

    logging.debug(f"Exact blocks: N_c={n_c}, N_q={n_q}, working space {len(work)}")
    return BlockMatrices(
        S_cq=np.ascontiguousarray(s_cq),
        S_qq=s_qq,
        H_cc=h_cc,
        H_cq=np.ascontiguousarray(h_cq),
        H_qq=h_qq,
    )


def hamiltonian_element_from_overlaps(h: PauliHamiltonian, s_i: Determinant, alpha: AmplitudeTable) -> complex:
    """
    <s_i|H|phi> from an amplitude table of phi,

        sum_g h_g conj(theta_g(s_i)) alpha[s_i xor b_g]

    Strings missing from the table contribute zero.
    """
    table = _as_mapping(alpha)
    total = 0.0j
    for term in h.terms:
        amp = table.get(s_i.flip(term.x_mask))
        if amp is not None:
            total += term.coeff * term.phase(s_i.bits).conjugate() * amp
    return total


def hamiltonian_column_from_table(h: PauliHamiltonian, rows: Sequence[Determinant], alpha: AmplitudeTable) -> np.ndarray:
    """
    Vectorised ``hamiltonian_element_from_overlaps`` over a list of row determinants.
    :param h: The Hamiltonian.
    :param rows: Determinants s_i, one output entry each.
    :param alpha: Amplitude table of one quantum state.
    :return: Complex vector of length len(rows).
    """
    table = _as_mapping(alpha)
    out = np.zeros(len(rows), dtype=complex)
    if not table or not rows:
        return out
    table_space = RestrictedSpace(sorted(table))
    values = np.array([table[d] for d in table_space.dets], dtype=complex)
    row_bits = np.fromiter((d.bits for d in rows), dtype=np.uint64, count=len(rows))
    for term in h.terms:
        pos = table_space.positions(row_bits ^ np.uint64(term.x_mask))
        hit = pos >= 0
        if np.any(hit):
            out[hit] += term.coeff * term.phases(row_bits[hit]).conj() * values[pos[hit]]
    return out


def reconstruct_qq_from_amplitudes(
    h: PauliHamiltonian,
    tables: Sequence[AmplitudeTable],
    dset: Iterable[Determinant],
) -> Tuple[np.ndarray, np.ndarray]:
    """
    qq blocks rebuilt on a common determinant set D:

        S_jk = sum_{s in D} conj(a_s^j) a_s^k
        H_jk = sum_g h_g sum_{s in D_g} conj(a_s^j) <s|P_g|s xor b_g> a_{s xor b_g}^k

    with D_g = {s in D : s xor b_g in D} and <s|P_g|s xor b_g> = conj(theta_g(s)).
    Table entries outside D are ignored.
    :param h: The Hamiltonian.
    :param tables: One amplitude table per quantum state.
    :param dset: The common determinant set D.
    :return: (S_qq, H_qq) reconstructions.
    """
    space = RestrictedSpace(sorted(set(dset)))
    n_q = len(tables)
    if len(space) == 0:
        zeros = np.zeros((n_q, n_q), dtype=complex)
        return zeros, zeros.copy()

    amps = np.zeros((len(space), n_q), dtype=complex)
    for k, table in enumerate(tables):
        for det, amp in _as_mapping(table).items():
            pos = space.index.get(det)
            if pos is not None:
                amps[pos, k] = amp

    # projection onto D keeps exactly the shifts with both ends in D
    h_space = project_hamiltonian(h, space)
    s_qq = amps.conj().T @ amps
    h_qq = amps.conj().T @ (h_space @ amps)
    return s_qq, h_qq


def rank_determinants(
    h: PauliHamiltonian,
    space: RestrictedSpace,
    ranking: Optional[Sequence[Tuple[Determinant, Optional[float]]]] = None,
    dense_limit: int = RANKING_DENSE_LIMIT,
) -> List[Determinant]:
    """
    Order determinants for the classical sector.

    An external ranking (determinant-list entries) is returned in file order.
    Otherwise the ground state of H projected on the space is found densely and
    determinants are sorted by descending |coefficient|, ties by bitstring.
    :param h: The Hamiltonian.
    :param space: The simulation space.
    :param ranking: Optional externally supplied ranking.
    :param dense_limit: Largest space solved densely.
    :return: Ranked determinants.
    """
    if ranking is not None:
        return [det for det, _ in ranking]
    if len(space) == 0:
        raise ContractViolationError("cannot rank an empty space")
    if len(space) > dense_limit:
        raise ConfigurationError(
            f"space of {len(space)} determinants exceeds the dense ranking limit {dense_limit}; "
            "supply a ranking file",
            location="basis.ranking",
        )
    h_space = project_hamiltonian(h, space).toarray()
    _, evecs = np.linalg.eigh(hermitize(h_space))
    weights = np.round(np.abs(evecs[:, 0]), 12)
    order = sorted(range(len(space)), key=lambda i: (-weights[i], space.dets[i].bits))
    return [space.dets[i] for i in order]
