"""
Built-in toy systems: small Pauli Hamiltonians used by the self-test and as
stand-ins for molecular inputs in example configurations.
"""

from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

from canoe_lab.exceptions import ConfigurationError
from canoe_lab.operators.pauli import PauliHamiltonian, PauliTerm


def _single(n_qubit: int, site: int, op: str) -> str:
    chars = ["I"] * n_qubit
    chars[site] = op
    return "".join(chars)


def _pair(n_qubit: int, i: int, j: int, op: str) -> str:
    chars = ["I"] * n_qubit
    chars[i] = op
    chars[j] = op
    return "".join(chars)


def transverse_ising(n_qubit: int, coupling: float = 1.0, field: float = 0.7) -> PauliHamiltonian:
    """
    Open chain H = -J sum Z_i Z_{i+1} - g sum X_i.
    """
    terms: List[PauliTerm] = []
    for i in range(n_qubit - 1):
        terms.append(PauliTerm.from_label(_pair(n_qubit, i, i + 1, "Z"), -coupling))
    for i in range(n_qubit):
        terms.append(PauliTerm.from_label(_single(n_qubit, i, "X"), -field))
    return PauliHamiltonian(terms)


def heisenberg_chain(n_qubit: int, pin_field: float = 0.1) -> PauliHamiltonian:
    """
    Open chain H = sum (X_i X_{i+1} + Y_i Y_{i+1} + Z_i Z_{i+1}) + h Z_0.
    Conserves the number of set bits, so it can be restricted to a sector.
    """
    terms: List[PauliTerm] = []
    for i in range(n_qubit - 1):
        for op in "XYZ":
            terms.append(PauliTerm.from_label(_pair(n_qubit, i, i + 1, op), 1.0))
    if pin_field:
        terms.append(PauliTerm.from_label(_single(n_qubit, 0, "Z"), pin_field))
    return PauliHamiltonian(terms)


# *****************************************************************************
@dataclass(frozen=True)
class ToySystem:
    # *****************************************************************************
    """
    A named toy Hamiltonian with its preferred reference determinant.
    :param ground_energy: Analytic ground energy when one is known.
    """
    name: str
    description: str
    n_qubit: int
    build: Callable[[], PauliHamiltonian]
    reference: str
    n_electrons: Optional[int] = None
    ground_energy: Optional[float] = None

    def hamiltonian(self) -> PauliHamiltonian:
        return self.build()


TOY_SYSTEMS: Dict[str, ToySystem] = {
    toy.name: toy
    for toy in (
        ToySystem("z1", "single qubit, H = Z", 1,
                  lambda: PauliHamiltonian([PauliTerm.from_label("Z", 1.0)]), "0", ground_energy=-1.0),
        ToySystem("xx2", "two qubits, H = X X", 2,
                  lambda: PauliHamiltonian([PauliTerm.from_label("XX", 1.0)]), "00", ground_energy=-1.0),
        ToySystem("ising4", "4-site transverse-field Ising chain, J = 1, g = 0.7", 4,
                  lambda: transverse_ising(4), "0000"),
        ToySystem("heisenberg4", "4-site Heisenberg chain with a pinning field, half filling", 4,
                  lambda: heisenberg_chain(4), "1010", n_electrons=2),
        ToySystem("heisenberg6", "6-site Heisenberg chain with a pinning field, half filling", 6,
                  lambda: heisenberg_chain(6), "101010", n_electrons=3),
    )
}


def get_toy(name: str) -> ToySystem:
    try:
        return TOY_SYSTEMS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown toy system '{name}' (available: {', '.join(sorted(TOY_SYSTEMS))})", "system.toy"
        )
