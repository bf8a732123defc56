"""
Pauli-string algebra on computational-basis determinants.

Bit convention: bit k of a bitstring is the k-th character (from the left) of the
string written in files, so "01" has bit 0 clear and bit 1 set.
"""

from dataclasses import dataclass
from functools import cached_property, reduce
from typing import Dict, Iterable, List, Optional, TextIO, Tuple
import io
import logging

import numpy as np

from canoe_lab.exceptions import (
    ContractViolationError,
    HamiltonianFormatError,
    HamiltonianParseError,
    SizeLimitError,
)

MAX_QUBITS = 64
DENSE_QUBIT_LIMIT = 12
HERMITICITY_TOL = 1e-12

_PHASES = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)

_SINGLE_QUBIT = {
    "I": np.array([[1, 0], [0, 1]], dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


# *****************************************************************************
@dataclass(frozen=True, order=True)
class Determinant:
    # *****************************************************************************
    """
    Occupation bitstring over ``n_qubit`` spin orbitals.
    Ordering compares ``bits`` first, so sorting is by bitstring value.
    """
    bits: int
    n_qubit: int

    def __post_init__(self) -> None:
        if not 0 < self.n_qubit <= MAX_QUBITS:
            raise ContractViolationError(f"n_qubit must be in [1, {MAX_QUBITS}], got {self.n_qubit}")
        if self.bits < 0 or self.bits >> self.n_qubit:
            raise ContractViolationError(
                f"bits {self.bits:#x} has set bits at or above position {self.n_qubit}"
            )

    @classmethod
    def from_string(cls, text: str) -> "Determinant":
        """
        Build a determinant from a 0/1 string, leftmost character is bit 0.
        :param text: Occupation string, e.g. "0110".
        :return: The determinant.
        """
        text = text.strip()
        if not text or any(c not in "01" for c in text):
            raise ContractViolationError(f"'{text}' is not a 0/1 occupation string")
        bits = sum(1 << k for k, c in enumerate(text) if c == "1")
        return cls(bits, len(text))

    def to_string(self) -> str:
        return "".join("1" if (self.bits >> k) & 1 else "0" for k in range(self.n_qubit))

    @property
    def n_electrons(self) -> int:
        return self.bits.bit_count()

    def flip(self, mask: int) -> "Determinant":
        return Determinant(self.bits ^ mask, self.n_qubit)

    def __str__(self) -> str:
        return f"|{self.to_string()}>"


# *****************************************************************************
@dataclass(frozen=True)
class PauliTerm:
    # *****************************************************************************
    """
    A weighted Pauli string stored as (x_mask, z_mask).
    Bit k of x_mask is set iff qubit k carries X or Y; bit k of z_mask iff it carries Z or Y.
    """
    coeff: complex
    x_mask: int
    z_mask: int
    n_qubit: int

    def __post_init__(self) -> None:
        if not 0 < self.n_qubit <= MAX_QUBITS:
            raise ContractViolationError(f"n_qubit must be in [1, {MAX_QUBITS}], got {self.n_qubit}")
        if (self.x_mask | self.z_mask) >> self.n_qubit:
            raise ContractViolationError("Pauli masks exceed the declared width")

    @classmethod
    def from_label(cls, label: str, coeff: complex = 1.0) -> "PauliTerm":
        """
        Build a term from a string over IXYZ (leftmost character acts on qubit 0).
        """
        x_mask = 0
        z_mask = 0
        for k, c in enumerate(label):
            if c not in _SINGLE_QUBIT:
                raise ContractViolationError(f"invalid Pauli character '{c}' in '{label}'")
            if c in "XY":
                x_mask |= 1 << k
            if c in "ZY":
                z_mask |= 1 << k
        return cls(complex(coeff), x_mask, z_mask, len(label))

    @property
    def y_count(self) -> int:
        return (self.x_mask & self.z_mask).bit_count()

    @property
    def is_identity(self) -> bool:
        return self.x_mask == 0 and self.z_mask == 0

    @property
    def label(self) -> str:
        chars = []
        for k in range(self.n_qubit):
            x = (self.x_mask >> k) & 1
            z = (self.z_mask >> k) & 1
            chars.append("IXZY"[x + 2 * z])
        return "".join(chars)

    def phase(self, bits: int) -> complex:
        """
        theta(s) = i^{m} (-1)^{z.s}; only the parity of z.s matters.
        """
        sign = 2 if (self.z_mask & bits).bit_count() & 1 else 0
        return _PHASES[(self.y_count + sign) % 4]

    def phases(self, bits: np.ndarray) -> np.ndarray:
        """
        Vectorised ``phase`` over an array of uint64 bitstrings.
        """
        parity = np.bitwise_count(bits & np.uint64(self.z_mask)).astype(np.int64) & 1
        return np.asarray(_PHASES, dtype=complex)[(self.y_count + 2 * parity) % 4]

    def matrix(self) -> np.ndarray:
        """
        Dense 2^n x 2^n matrix of the bare Pauli string (no coefficient).
        Qubit 0 is the least significant index bit, so it is the last Kronecker factor.
        """
        if self.n_qubit > DENSE_QUBIT_LIMIT:
            raise SizeLimitError(f"dense Pauli matrix limited to {DENSE_QUBIT_LIMIT} qubits")
        factors = [_SINGLE_QUBIT[c] for c in reversed(self.label)]
        return reduce(np.kron, factors)


def apply_pauli_to_det(term: PauliTerm, s: Determinant) -> Tuple[Determinant, complex]:
    """
    Action of a bare Pauli string on a determinant, P|s> = theta(s)|s xor b>.
    :param term: The Pauli term (its coefficient is not applied).
    :param s: The determinant acted on.
    :return: The shifted determinant and its phase in {1, i, -1, -i}.
    """
    if term.n_qubit != s.n_qubit:
        raise ContractViolationError(
            f"Pauli width {term.n_qubit} does not match determinant width {s.n_qubit}"
        )
    return s.flip(term.x_mask), term.phase(s.bits)


# *****************************************************************************
class PauliHamiltonian:
    # *****************************************************************************
    """
    Canonical weighted sum of Pauli strings H = sum_g h_g P_g.
    Duplicate strings are merged, coefficients must be real to HERMITICITY_TOL
    and terms are kept in lexicographic order of their labels.
    """

    def __init__(self, terms: Iterable[PauliTerm], n_qubit: Optional[int] = None) -> None:
        merged: Dict[Tuple[int, int], complex] = {}
        widths = set()
        for term in terms:
            widths.add(term.n_qubit)
            key = (term.x_mask, term.z_mask)
            merged[key] = merged.get(key, 0.0) + term.coeff

        if n_qubit is None:
            if len(widths) != 1:
                raise HamiltonianFormatError(f"terms have inconsistent widths {sorted(widths)}")
            n_qubit = widths.pop()
        elif widths and widths != {n_qubit}:
            raise HamiltonianFormatError(f"terms have widths {sorted(widths)}, expected {n_qubit}")

        canonical: List[PauliTerm] = []
        for (x_mask, z_mask), coeff in merged.items():
            if abs(coeff.imag) > HERMITICITY_TOL:
                label = PauliTerm(1.0, x_mask, z_mask, n_qubit).label
                raise HamiltonianFormatError(
                    f"coefficient of {label} has imaginary part {coeff.imag:.3e}; H must be Hermitian"
                )
            if coeff.real == 0.0:
                continue
            canonical.append(PauliTerm(complex(coeff.real, 0.0), x_mask, z_mask, n_qubit))

        canonical.sort(key=lambda t: t.label)
        self._terms: Tuple[PauliTerm, ...] = tuple(canonical)
        self._n_qubit = n_qubit

    @property
    def terms(self) -> Tuple[PauliTerm, ...]:
        return self._terms

    @property
    def n_qubit(self) -> int:
        return self._n_qubit

    @property
    def n_terms(self) -> int:
        return len(self._terms)

    @cached_property
    def norm_1(self) -> float:
        return float(sum(abs(t.coeff) for t in self._terms))

    @cached_property
    def norm_2(self) -> float:
        return float(np.sqrt(sum(abs(t.coeff) ** 2 for t in self._terms)))

    @cached_property
    def coefficients(self) -> np.ndarray:
        return np.array([t.coeff.real for t in self._terms])

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms)

    def __repr__(self) -> str:
        return f"PauliHamiltonian(n_qubit={self._n_qubit}, n_terms={self.n_terms}, norm_1={self.norm_1:.6g})"

    def to_text(self) -> str:
        """
        Serialise in the Pauli-term file format, one ``<re> <im> <label>`` per line.
        """
        return "".join(f"{t.coeff.real!r} {t.coeff.imag!r} {t.label}\n" for t in self._terms)


def parse_hamiltonian(stream: TextIO) -> PauliHamiltonian:
    """
    Parse a Pauli-term file: each non-empty, non-comment line is ``<re> <im> <IXYZ string>``.
    :param stream: Open text stream.
    :return: The canonicalised Hamiltonian.
    """
    terms: List[PauliTerm] = []
    width: Optional[int] = None
    for line_number, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) != 3:
            raise HamiltonianParseError(f"expected '<re> <im> <pauli>', got '{line}'", line_number)
        try:
            re_part = float(fields[0])
            im_part = float(fields[1])
        except ValueError:
            raise HamiltonianParseError(f"coefficient is not a number in '{line}'", line_number)
        label = fields[2].upper()
        if any(c not in "IXYZ" for c in label):
            raise HamiltonianParseError(f"Pauli string '{fields[2]}' is not over IXYZ", line_number)
        if width is None:
            width = len(label)
        elif len(label) != width:
            raise HamiltonianFormatError(
                f"line {line_number}: Pauli string has width {len(label)}, expected {width}"
            )
        terms.append(PauliTerm.from_label(label, complex(re_part, im_part)))

    if width is None:
        raise HamiltonianFormatError("Hamiltonian file contains no terms")
    return PauliHamiltonian(terms, n_qubit=width)


def parse_hamiltonian_text(text: str) -> PauliHamiltonian:
    return parse_hamiltonian(io.StringIO(text))


def load_hamiltonian(path: str) -> PauliHamiltonian:
    """
    Load a Pauli-term file from disk.
    """
    logging.info(f"Loading Hamiltonian: {path}")
    with open(path, "r", encoding="utf-8") as stream:
        hamiltonian = parse_hamiltonian(stream)
    logging.debug(f"Loaded {hamiltonian!r}")
    return hamiltonian


def to_dense(h: PauliHamiltonian) -> np.ndarray:
    """
    Dense matrix sum_g h_g P_g built from Kronecker products. Used as a test oracle.
    :param h: The Hamiltonian, at most DENSE_QUBIT_LIMIT qubits.
    :return: Complex Hermitian matrix of shape (2^n, 2^n).
    """
    if h.n_qubit > DENSE_QUBIT_LIMIT:
        raise SizeLimitError(
            f"to_dense is limited to {DENSE_QUBIT_LIMIT} qubits, Hamiltonian has {h.n_qubit}"
        )
    dim = 1 << h.n_qubit
    matrix = np.zeros((dim, dim), dtype=complex)
    for term in h.terms:
        matrix += term.coeff * term.matrix()
    return matrix
