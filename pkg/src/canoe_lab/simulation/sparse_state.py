"""
Sparse statevectors over computational-basis determinants and the restricted
determinant spaces they live in.
"""

from functools import cached_property
from itertools import combinations
from types import MappingProxyType
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, TextIO, Tuple
import logging

import numpy as np

from canoe_lab.exceptions import ContractViolationError, DeterminantFileError
from canoe_lab.operators.pauli import Determinant, PauliHamiltonian

PRUNE_THRESHOLD = 1e-14


# *****************************************************************************
class SparseState:
    # *****************************************************************************
    """
    Immutable map determinant -> complex amplitude. Amplitudes with magnitude
    below ``prune`` are never stored.
    """

    def __init__(
        self,
        amplitudes: Mapping[Determinant, complex],
        n_qubit: int,
        prune: float = PRUNE_THRESHOLD,
    ) -> None:
        kept: Dict[Determinant, complex] = {}
        for det, amp in amplitudes.items():
            if det.n_qubit != n_qubit:
                raise ContractViolationError(
                    f"determinant {det} has width {det.n_qubit}, state has {n_qubit}"
                )
            amp = complex(amp)
            if abs(amp) >= prune:
                kept[det] = amp
        self._amplitudes = MappingProxyType(kept)
        self._n_qubit = n_qubit

    @classmethod
    def from_determinant(cls, det: Determinant, amplitude: complex = 1.0) -> "SparseState":
        return cls({det: amplitude}, det.n_qubit)

    @classmethod
    def from_vector(cls, space: "RestrictedSpace", vector: np.ndarray, prune: float = PRUNE_THRESHOLD) -> "SparseState":
        """
        Build a state from coefficients ordered like ``space.dets``.
        """
        if len(vector) != len(space):
            raise ContractViolationError(f"vector of length {len(vector)} for space of size {len(space)}")
        return cls(dict(zip(space.dets, vector)), space.n_qubit, prune=prune)

    @property
    def amplitudes(self) -> Mapping[Determinant, complex]:
        return self._amplitudes

    @property
    def n_qubit(self) -> int:
        return self._n_qubit

    @property
    def support(self) -> List[Determinant]:
        return sorted(self._amplitudes)

    def amplitude(self, det: Determinant) -> complex:
        return self._amplitudes.get(det, 0.0j)

    def items(self):
        return self._amplitudes.items()

    def __len__(self) -> int:
        return len(self._amplitudes)

    def norm(self) -> float:
        return float(np.sqrt(sum(abs(a) ** 2 for a in self._amplitudes.values())))

    def normalized(self) -> "SparseState":
        n = self.norm()
        if n == 0.0:
            raise ContractViolationError("cannot normalise the zero state")
        return self.scaled(1.0 / n)

    def scaled(self, factor: complex) -> "SparseState":
        return SparseState({d: factor * a for d, a in self._amplitudes.items()}, self._n_qubit)

    def to_vector(self, space: "RestrictedSpace") -> np.ndarray:
        """
        Coefficients in the order of ``space.dets``; amplitudes outside the space are dropped.
        """
        vec = np.zeros(len(space), dtype=complex)
        for det, amp in self._amplitudes.items():
            pos = space.index.get(det)
            if pos is not None:
                vec[pos] = amp
        return vec

    def to_dense(self) -> np.ndarray:
        """
        Full 2^n vector indexed by bitstring value.
        """
        vec = np.zeros(1 << self._n_qubit, dtype=complex)
        for det, amp in self._amplitudes.items():
            vec[det.bits] = amp
        return vec

    def __repr__(self) -> str:
        return f"SparseState(n_qubit={self._n_qubit}, support={len(self)}, norm={self.norm():.6g})"


def inner(a: SparseState, b: SparseState) -> complex:
    """
    <a|b> summed over the intersection of supports.
    """
    if a.n_qubit != b.n_qubit:
        raise ContractViolationError(f"inner product of widths {a.n_qubit} and {b.n_qubit}")
    small, large = (a, b) if len(a) <= len(b) else (b, a)
    total = 0.0j
    for det, amp in small.items():
        other = large.amplitudes.get(det)
        if other is not None:
            total += amp.conjugate() * other if small is a else other.conjugate() * amp
    return total


def superpose(states: Sequence[Tuple[complex, SparseState]]) -> SparseState:
    """
    Linear combination sum_k c_k |state_k>, pruned but not renormalised.
    """
    if not states:
        raise ContractViolationError("superpose needs at least one state")
    n_qubit = states[0][1].n_qubit
    combined: Dict[Determinant, complex] = {}
    for coeff, state in states:
        if state.n_qubit != n_qubit:
            raise ContractViolationError("superpose over states of different widths")
        for det, amp in state.items():
            combined[det] = combined.get(det, 0.0j) + coeff * amp
    return SparseState(combined, n_qubit)


def apply_hamiltonian(h: PauliHamiltonian, state: SparseState) -> SparseState:
    """
    H|state> without any projection onto a restricted space.
    """
    if h.n_qubit != state.n_qubit:
        raise ContractViolationError(f"Hamiltonian width {h.n_qubit} vs state width {state.n_qubit}")
    out: Dict[Determinant, complex] = {}
    for det, amp in state.items():
        for term in h.terms:
            target = det.flip(term.x_mask)
            out[target] = out.get(target, 0.0j) + term.coeff * term.phase(det.bits) * amp
    return SparseState(out, state.n_qubit)


# *****************************************************************************
class RestrictedSpace:
    # *****************************************************************************
    """
    Ordered list of unique determinants spanning the simulation subspace.
    """

    def __init__(self, dets: Iterable[Determinant]) -> None:
        ordered = tuple(dets)
        index: Dict[Determinant, int] = {}
        widths = set()
        for pos, det in enumerate(ordered):
            if det in index:
                raise ContractViolationError(f"duplicate determinant {det} in restricted space")
            index[det] = pos
            widths.add(det.n_qubit)
        if len(widths) > 1:
            raise ContractViolationError(f"restricted space mixes widths {sorted(widths)}")
        self._dets = ordered
        self._index = MappingProxyType(index)
        self._n_qubit = widths.pop() if widths else 0

    @classmethod
    def full(cls, n_qubit: int) -> "RestrictedSpace":
        return cls(Determinant(bits, n_qubit) for bits in range(1 << n_qubit))

    @classmethod
    def sector(cls, n_qubit: int, n_electrons: int) -> "RestrictedSpace":
        """
        All determinants with ``n_electrons`` set bits, in ascending bitstring order.
        """
        if not 0 <= n_electrons <= n_qubit:
            raise ContractViolationError(f"cannot place {n_electrons} electrons in {n_qubit} orbitals")
        bits = sorted(sum(1 << k for k in occ) for occ in combinations(range(n_qubit), n_electrons))
        return cls(Determinant(b, n_qubit) for b in bits)

    @property
    def dets(self) -> Tuple[Determinant, ...]:
        return self._dets

    @property
    def index(self) -> Mapping[Determinant, int]:
        return self._index

    @property
    def n_qubit(self) -> int:
        return self._n_qubit

    def __len__(self) -> int:
        return len(self._dets)

    def __contains__(self, det: object) -> bool:
        return det in self._index

    def __iter__(self):
        return iter(self._dets)

    @cached_property
    def bits_array(self) -> np.ndarray:
        return np.fromiter((d.bits for d in self._dets), dtype=np.uint64, count=len(self._dets))

    @cached_property
    def _sorted_lookup(self) -> Tuple[np.ndarray, np.ndarray]:
        order = np.argsort(self.bits_array, kind="stable")
        return self.bits_array[order], order

    def positions(self, bits: np.ndarray) -> np.ndarray:
        """
        Vectorised index lookup; -1 for bitstrings outside the space.
        """
        sorted_bits, order = self._sorted_lookup
        if len(sorted_bits) == 0:
            return np.full(len(bits), -1, dtype=np.int64)
        where = np.searchsorted(sorted_bits, bits)
        where = np.clip(where, 0, len(sorted_bits) - 1)
        found = sorted_bits[where] == bits
        return np.where(found, order[where], -1).astype(np.int64)


def read_determinant_file(stream: TextIO, require_weight: bool = False) -> List[Tuple[Determinant, Optional[float]]]:
    """
    Parse a determinant list: one 0/1 string per line with an optional real weight.
    :param stream: Open text stream.
    :param require_weight: Ranking files must carry the weight column.
    :return: (determinant, weight-or-None) pairs in file order.
    """
    entries: List[Tuple[Determinant, Optional[float]]] = []
    width: Optional[int] = None
    for line_number, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) > 2:
            raise DeterminantFileError(f"expected '<bits> [weight]', got '{line}'", line_number)
        try:
            det = Determinant.from_string(fields[0])
        except ContractViolationError as err:
            raise DeterminantFileError(err.message, line_number)
        if width is None:
            width = det.n_qubit
        elif det.n_qubit != width:
            raise DeterminantFileError(f"width {det.n_qubit} differs from {width}", line_number)
        weight: Optional[float] = None
        if len(fields) == 2:
            try:
                weight = float(fields[1])
            except ValueError:
                raise DeterminantFileError(f"weight '{fields[1]}' is not a number", line_number)
        elif require_weight:
            raise DeterminantFileError("ranking files need a weight column", line_number)
        entries.append((det, weight))
    return entries


def load_determinants(path: str, require_weight: bool = False) -> List[Tuple[Determinant, Optional[float]]]:
    logging.info(f"Loading determinant list: {path}")
    with open(path, "r", encoding="utf-8") as stream:
        return read_determinant_file(stream, require_weight=require_weight)
