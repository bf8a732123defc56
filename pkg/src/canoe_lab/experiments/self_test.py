"""
Oracle checks on the built-in toy systems.
"""

from dataclasses import dataclass
from typing import Callable, List, Tuple
import logging

import numpy as np
import scipy.linalg

from canoe_lab.exceptions import CanoeLabError
from canoe_lab.experiments.system import lowest_diagonal_determinant, space_ground_energy
from canoe_lab.experiments.toys import TOY_SYSTEMS, ToySystem
from canoe_lab.operators.pauli import Determinant, apply_pauli_to_det, to_dense
from canoe_lab.simulation.krylov import KrylovConfig, krylov_states
from canoe_lab.simulation.sparse_state import RestrictedSpace
from canoe_lab.solvers.dense_oracle import dense_ground_energy
from canoe_lab.solvers.hybrid_solver import SolverConfig, solve
from canoe_lab.subspace.blocks import HybridBasis
from canoe_lab.subspace.exact import build_exact_blocks, rank_determinants

PAULI_TOL = 1e-14
KRYLOV_TOL = 1e-10
ENERGY_TOL = 1e-8
SELF_TEST_TAU = 0.3


@dataclass(frozen=True)
class CheckResult:
    name: str
    system: str
    passed: bool
    error: float
    tolerance: float
    detail: str = ""


def _space(toy: ToySystem) -> RestrictedSpace:
    if toy.n_electrons is not None:
        return RestrictedSpace.sector(toy.n_qubit, toy.n_electrons)
    return RestrictedSpace.full(toy.n_qubit)


def check_pauli_action(toy: ToySystem) -> Tuple[float, float]:
    """
    Matrix assembled column by column from the bitmask action against the
    Kronecker-product oracle.
    """
    h = toy.hamiltonian()
    dim = 1 << h.n_qubit
    assembled = np.zeros((dim, dim), dtype=complex)
    for bits in range(dim):
        det = Determinant(bits, h.n_qubit)
        for term in h.terms:
            shifted, phase = apply_pauli_to_det(term, det)
            assembled[shifted.bits, bits] += term.coeff * phase
    return float(np.abs(assembled - to_dense(h)).max()), PAULI_TOL


def check_krylov(toy: ToySystem) -> Tuple[float, float]:
    """
    Krylov states on the full space against scipy.linalg.expm.
    """
    h = toy.hamiltonian()
    space = RestrictedSpace.full(h.n_qubit)
    reference = Determinant.from_string(toy.reference)
    n_states = 4
    states = krylov_states(h, space, KrylovConfig(n_states, reference, tau=SELF_TEST_TAU))
    dense = to_dense(h)
    start = np.zeros(1 << h.n_qubit, dtype=complex)
    start[reference.bits] = 1.0
    error = 0.0
    for j, state in enumerate(states):
        expected = scipy.linalg.expm(-1j * SELF_TEST_TAU * j * dense) @ start
        error = max(error, float(np.abs(state.to_vector(space) - expected).max()))
    return error, KRYLOV_TOL


def check_pipeline(toy: ToySystem) -> Tuple[float, float]:
    """
    Exact blocks on half of the ranked space plus two Krylov states, solved
    with deflation, against the dense generalized-eigenvalue oracle.
    """
    h = toy.hamiltonian()
    space = _space(toy)
    ranked = rank_determinants(h, space)
    reference = Determinant.from_string(toy.reference)
    if reference not in space:
        reference = lowest_diagonal_determinant(h, space)
    states = krylov_states(h, space, KrylovConfig(2, reference, tau=SELF_TEST_TAU))
    basis = HybridBasis(tuple(ranked[: max(1, len(space) // 2)]), tuple(states), space)
    blocks = build_exact_blocks(h, basis)
    outcome = solve(blocks, SolverConfig(mode="deflation", rank_tol=1e-10), seed=0)
    return abs(outcome.energy - dense_ground_energy(blocks)), ENERGY_TOL


def check_analytic(toy: ToySystem) -> Tuple[float, float]:
    return abs(space_ground_energy(toy.hamiltonian(), _space(toy)) - toy.ground_energy), ENERGY_TOL


def run_self_test() -> List[CheckResult]:
    """
    Run every oracle check on every toy that admits it.
    :return: One result per (check, system).
    """
    plan: List[Tuple[str, Callable[[ToySystem], Tuple[float, float]], Callable[[ToySystem], bool]]] = [
        ("pauli action vs dense", check_pauli_action, lambda t: t.n_qubit <= 4),
        ("krylov vs expm", check_krylov, lambda t: t.n_qubit <= 4),
        ("pipeline vs dense oracle", check_pipeline, lambda t: True),
        ("analytic ground energy", check_analytic, lambda t: t.ground_energy is not None),
    ]
    results: List[CheckResult] = []
    for name, check, applies in plan:
        for toy in TOY_SYSTEMS.values():
            if not applies(toy):
                continue
            try:
                error, tol = check(toy)
                results.append(CheckResult(name, toy.name, bool(error <= tol), error, tol))
            except CanoeLabError as err:
                results.append(CheckResult(name, toy.name, False, float("nan"), 0.0, err.message))
            logging.debug(f"self-test {name} on {toy.name}: {results[-1]}")
    failed = [r for r in results if not r.passed]
    if failed:
        logging.error(f"{len(failed)} of {len(results)} self-test checks failed")
    else:
        logging.info(f"All {len(results)} self-test checks passed")
    return results
