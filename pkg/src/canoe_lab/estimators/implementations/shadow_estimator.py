"""
Local-Pauli classical-shadow estimation of the classical-quantum block.

Each quantum state is paired with a reference string r of zero amplitude,
psi_R = (phi + |r>)/sqrt(2), so that <d|phi> = 2 <d|rho_R|r>. Snapshots of
rho_R are single-qubit factorised, which makes the estimate a product of
2x2 matrix elements per qubit.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np

from canoe_lab.estimators.estimated_block import EstimatedBlock
from canoe_lab.estimators.histograms import SeedLike, make_rng
from canoe_lab.exceptions import ContractViolationError, ShadowReferenceError, SizeLimitError
from canoe_lab.operators.pauli import DENSE_QUBIT_LIMIT, Determinant, PauliHamiltonian
from canoe_lab.simulation.sparse_state import SparseState
from canoe_lab.subspace.blocks import HybridBasis
from canoe_lab.subspace.exact import hamiltonian_column_from_table

BASES = "XYZ"
REFERENCE_TOL = 1e-10
_ROW_CHUNK = 4096

# rows map the measurement basis onto the computational basis
_ROTATIONS = np.array([
    [[1, 1], [1, -1]],
    [[1, -1j], [1, 1j]],
    [[np.sqrt(2), 0], [0, np.sqrt(2)]],
], dtype=complex) / np.sqrt(2)


def _snapshot_factors() -> np.ndarray:
    """
    F[b, o, d, r] = <d| 3 U_b^dagger |o><o| U_b - I |r>
    """
    u = _ROTATIONS
    factors = 3.0 * np.einsum("bod,bor->bodr", u.conj(), u)
    factors -= np.eye(2)[None, None, :, :]
    return factors


_FACTORS = _snapshot_factors()


# *****************************************************************************
@dataclass(frozen=True)
class ShadowRecord:
    # *****************************************************************************
    """
    One snapshot: measurement basis and outcome bit per qubit (qubit 0 first).
    """
    bases: str
    outcome: Tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.bases) != len(self.outcome):
            raise ContractViolationError("bases and outcome must have the same length")
        if any(b not in BASES for b in self.bases) or any(o not in (0, 1) for o in self.outcome):
            raise ContractViolationError(f"invalid shadow record {self.bases} / {self.outcome}")

    @property
    def n_qubit(self) -> int:
        return len(self.bases)


# *****************************************************************************
@dataclass(frozen=True)
class ShadowSnapshots:
    # *****************************************************************************
    """
    Snapshots grouped by identical (bases, outcome) with multiplicities.
    ``patterns`` holds basis indices into ``BASES``; ``outcomes`` are bitstrings.
    """
    patterns: np.ndarray
    outcomes: np.ndarray
    counts: np.ndarray
    n_qubit: int

    @property
    def n_snapshots(self) -> int:
        return int(self.counts.sum())

    def records(self) -> List[ShadowRecord]:
        out: List[ShadowRecord] = []
        for pattern, outcome, count in zip(self.patterns, self.outcomes, self.counts):
            bases = "".join(BASES[b] for b in pattern)
            bits = tuple(int((int(outcome) >> k) & 1) for k in range(self.n_qubit))
            out.extend([ShadowRecord(bases, bits)] * int(count))
        return out


def _rotate(psi: np.ndarray, pattern: np.ndarray, n_qubit: int) -> np.ndarray:
    tensor = psi.reshape((2,) * n_qubit)
    for k, b in enumerate(pattern):
        axis = n_qubit - 1 - k
        tensor = np.moveaxis(np.tensordot(_ROTATIONS[b], tensor, axes=([1], [axis])), 0, axis)
    return tensor.reshape(-1)


def sample_shadow_snapshots(psi: np.ndarray, n_qubit: int, n_snapshots: int, seed: SeedLike = None) -> ShadowSnapshots:
    """
    Draw snapshots of a dense state with uniformly random per-qubit bases.
    :param psi: Normalised state of length 2^n indexed by bitstring value.
    :param n_qubit: Number of qubits.
    :param n_snapshots: Number of snapshots.
    :param seed: Seed or generator.
    :return: Grouped snapshots.
    """
    if n_snapshots < 1:
        raise ContractViolationError(f"n_snapshots must be >= 1, got {n_snapshots}")
    rng = make_rng(seed)
    choices = rng.integers(0, 3, size=(n_snapshots, n_qubit))
    unique, multiplicity = np.unique(choices, axis=0, return_counts=True)

    patterns, outcomes, counts = [], [], []
    for pattern, count in zip(unique, multiplicity):
        probs = np.abs(_rotate(psi, pattern, n_qubit)) ** 2
        draws = rng.multinomial(int(count), probs / probs.sum())
        hit = np.flatnonzero(draws)
        patterns.append(np.repeat(pattern[None, :], len(hit), axis=0))
        outcomes.append(hit.astype(np.uint64))
        counts.append(draws[hit])
    return ShadowSnapshots(
        np.concatenate(patterns).astype(np.int64),
        np.concatenate(outcomes),
        np.concatenate(counts).astype(np.int64),
        n_qubit,
    )


def snapshot_overlaps(snapshots: ShadowSnapshots, rows: Sequence[Determinant], reference: Determinant) -> np.ndarray:
    """
    Mean over snapshots of 2 <d|rho_hat|r> for every row determinant d.
    """
    n = snapshots.n_qubit
    row_bits = np.fromiter((d.bits for d in rows), dtype=np.uint64, count=len(rows))
    ref_bits = [(reference.bits >> k) & 1 for k in range(n)]
    total = np.zeros(len(rows), dtype=complex)
    for start in range(0, len(snapshots.counts), _ROW_CHUNK):
        stop = start + _ROW_CHUNK
        pat = snapshots.patterns[start:stop]
        out = snapshots.outcomes[start:stop]
        values = np.ones((len(pat), len(rows)), dtype=complex)
        for k in range(n):
            o_k = ((out >> np.uint64(k)) & np.uint64(1)).astype(np.int64)
            d_k = ((row_bits >> np.uint64(k)) & np.uint64(1)).astype(np.int64)
            values *= _FACTORS[pat[:, k][:, None], o_k[:, None], d_k[None, :], ref_bits[k]]
        total += snapshots.counts[start:stop] @ values
    estimate = 2.0 * total / snapshots.n_snapshots
    estimate[row_bits == np.uint64(reference.bits)] = 0.0
    return estimate


def select_shadow_reference(
    states: Sequence[SparseState],
    n_qubit: int,
    configured: Optional[Determinant] = None,
) -> Determinant:
    """
    Reference string with zero amplitude in every quantum state. A configured
    reference is validated; otherwise |0^n> is tried first and then the
    smallest bitstring that qualifies.
    """
    def overlaps(det: Determinant) -> bool:
        return any(abs(s.amplitude(det)) > REFERENCE_TOL for s in states)

    if configured is not None:
        if configured.n_qubit != n_qubit:
            raise ContractViolationError("shadow reference width does not match the basis")
        if overlaps(configured):
            raise ShadowReferenceError(f"shadow reference {configured} overlaps a quantum basis state")
        return configured

    for bits in range(1 << n_qubit):
        candidate = Determinant(bits, n_qubit)
        if not overlaps(candidate):
            if bits:
                logging.info(f"|0^n> overlaps a quantum state; shadow reference set to {candidate}")
            return candidate
    raise ShadowReferenceError("every bitstring overlaps some quantum state; no shadow reference exists")


def _median_of_means(group_estimates: List[np.ndarray]) -> np.ndarray:
    stacked = np.stack(group_estimates)
    if len(group_estimates) == 1:
        return stacked[0]
    return np.median(stacked.real, axis=0) + 1j * np.median(stacked.imag, axis=0)


# *****************************************************************************
class ShadowEstimator:
    # *****************************************************************************
    """
    Classical-shadow estimator of S_cq and H_cq.
    :param snapshots_per_state: Snapshots drawn for every quantum state.
    :param reference: Optional reference string; chosen automatically when None.
    :param n_groups: Median-of-means groups; 1 is the plain mean.
    """
    method = "shadow"

    def __init__(self, snapshots_per_state: int, reference: Optional[Determinant] = None, n_groups: int = 1) -> None:
        if snapshots_per_state < 1:
            raise ContractViolationError(f"snapshots_per_state must be >= 1, got {snapshots_per_state}")
        if not 1 <= n_groups <= snapshots_per_state:
            raise ContractViolationError(f"n_groups must lie in [1, {snapshots_per_state}], got {n_groups}")
        self.snapshots_per_state = snapshots_per_state
        self.reference = reference
        self.n_groups = n_groups

    def total_shots(self, n_classical: int, n_quantum: int) -> int:
        return n_quantum * self.snapshots_per_state

    def estimate(self, h: PauliHamiltonian, basis: HybridBasis, seed: Optional[int] = None) -> EstimatedBlock:
        n = basis.n_qubit
        if n > DENSE_QUBIT_LIMIT:
            raise SizeLimitError(f"shadow simulation is limited to {DENSE_QUBIT_LIMIT} qubits")
        reference = select_shadow_reference(basis.quantum, n, self.reference)
        ref_vec = np.zeros(1 << n, dtype=complex)
        ref_vec[reference.bits] = 1.0

        rows = list(basis.classical)
        s_cq = np.zeros((basis.n_classical, basis.n_quantum), dtype=complex)
        h_cq = np.zeros_like(s_cq)
        group_sizes = [len(g) for g in np.array_split(np.arange(self.snapshots_per_state), self.n_groups)]
        streams = np.random.SeedSequence(seed).spawn(basis.n_quantum)

        for j, state in enumerate(basis.quantum):
            psi = (state.to_dense() + ref_vec) / np.sqrt(2.0)
            rng = np.random.default_rng(streams[j])
            groups = [
                snapshot_overlaps(sample_shadow_snapshots(psi, n, size, rng), rows, reference)
                for size in group_sizes
            ]
            column = _median_of_means(groups)
            s_cq[:, j] = column
            table: Dict[Determinant, complex] = dict(zip(rows, column))
            h_cq[:, j] = hamiltonian_column_from_table(h, rows, table)

        logging.debug(f"Shadow estimate: {self.snapshots_per_state} snapshots x {basis.n_quantum} states")
        return EstimatedBlock(
            S_cq_hat=s_cq,
            H_cq_hat=h_cq,
            shots_per_histogram=self.snapshots_per_state,
            total_shots=self.total_shots(basis.n_classical, basis.n_quantum),
            seed=seed,
            method=self.method,
            metadata={"reference": reference.to_string(), "n_groups": self.n_groups},
        )


def shadow_estimate_cq_block(
    h: PauliHamiltonian,
    basis: HybridBasis,
    snapshots_per_state: int,
    seed: Optional[int] = None,
    reference: Optional[Determinant] = None,
    n_groups: int = 1,
) -> EstimatedBlock:
    return ShadowEstimator(snapshots_per_state, reference, n_groups).estimate(h, basis, seed)
