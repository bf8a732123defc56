from typing import List

import numpy as np
import pytest

from canoe_lab.experiments.toys import heisenberg_chain, transverse_ising
from canoe_lab.operators.pauli import Determinant, PauliHamiltonian, PauliTerm
from canoe_lab.simulation.krylov import KrylovConfig, krylov_states
from canoe_lab.simulation.sparse_state import RestrictedSpace, SparseState
from canoe_lab.subspace.blocks import HybridBasis
from canoe_lab.subspace.exact import rank_determinants


def random_hamiltonian(n_qubit: int, n_terms: int, rng: np.random.Generator) -> PauliHamiltonian:
    """
    Random real combination of Pauli strings, always containing at least one
    non-identity term.
    """
    terms: List[PauliTerm] = []
    while len(terms) < n_terms:
        label = "".join(rng.choice(list("IXYZ"), size=n_qubit))
        terms.append(PauliTerm.from_label(label, float(rng.normal())))
    terms.append(PauliTerm.from_label("Z" + "I" * (n_qubit - 1), 0.5))
    return PauliHamiltonian(terms)


def random_state(space: RestrictedSpace, rng: np.random.Generator) -> SparseState:
    vec = rng.normal(size=len(space)) + 1j * rng.normal(size=len(space))
    return SparseState.from_vector(space, vec / np.linalg.norm(vec))


def hybrid_basis(h: PauliHamiltonian, space: RestrictedSpace, reference: str, n_classical: int, n_quantum: int, tau: float = 1.0) -> HybridBasis:
    ranked = rank_determinants(h, space)
    states = krylov_states(h, space, KrylovConfig(n_quantum, Determinant.from_string(reference), tau=tau))
    return HybridBasis(tuple(ranked[:n_classical]), tuple(states), space)


@pytest.fixture
def make_hamiltonian():
    return random_hamiltonian


@pytest.fixture
def make_state():
    return random_state


@pytest.fixture
def make_basis():
    return hybrid_basis


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def ising4() -> PauliHamiltonian:
    return transverse_ising(4)


@pytest.fixture
def heisenberg4() -> PauliHamiltonian:
    return heisenberg_chain(4)


@pytest.fixture
def heisenberg4_space() -> RestrictedSpace:
    return RestrictedSpace.sector(4, 2)


@pytest.fixture
def ising4_basis(ising4) -> HybridBasis:
    """
    Full classical space of the 4-qubit Ising chain plus three Krylov states.
    """
    return hybrid_basis(ising4, RestrictedSpace.full(4), "0000", 16, 3)


@pytest.fixture
def heisenberg4_basis(heisenberg4, heisenberg4_space) -> HybridBasis:
    """
    Three leading sector determinants plus three Krylov states from |1010>.
    """
    return hybrid_basis(heisenberg4, heisenberg4_space, "1010", 3, 3)


def mean_within_standard_errors(samples: np.ndarray, target: np.ndarray, n_se: float = 4.0) -> None:
    """
    Seed mean of complex estimates against ``target``, entry by entry, in units of
    the standard error of the mean. Deterministic entries only get rounding slack.
    """
    samples = np.asarray(samples)
    mean = samples.mean(axis=0)
    se = np.sqrt(samples.real.var(axis=0, ddof=1) + samples.imag.var(axis=0, ddof=1)) / np.sqrt(len(samples))
    assert np.all(np.abs(mean - target) <= n_se * se + 1e-10)


@pytest.fixture
def assert_unbiased():
    return mean_within_standard_errors
