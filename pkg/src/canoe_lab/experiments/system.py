"""
Turns an ExperimentConfig into the objects every command shares: the
Hamiltonian, the simulation space, the ranked classical determinants, the
Krylov quantum states and the exact block pair of the largest basis.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple
import logging

import numpy as np
import scipy.sparse.linalg

from canoe_lab.estimators.estimated_block import EstimatedBlock
from canoe_lab.estimators.implementations.histogram_estimator import HistogramEstimator
from canoe_lab.exceptions import ConfigurationError, SizeLimitError
from canoe_lab.experiments.config import ExperimentConfig
from canoe_lab.experiments.toys import get_toy
from canoe_lab.operators.pauli import Determinant, PauliHamiltonian, load_hamiltonian
from canoe_lab.simulation.krylov import DENSE_EVOLUTION_LIMIT, KrylovConfig, krylov_states, project_hamiltonian
from canoe_lab.simulation.sparse_state import RestrictedSpace, load_determinants
from canoe_lab.subspace.blocks import BlockMatrices, HybridBasis
from canoe_lab.subspace.exact import build_exact_blocks, rank_determinants

DEFAULT_LIMIT_QUBITS = 16


# *****************************************************************************
@dataclass(frozen=True)
class PreparedSystem:
    # *****************************************************************************
    """
    Shared inputs of one configured system. ``basis`` and ``exact`` hold the
    largest (N_c, N_q) of the configuration; smaller grid points are leading
    sub-blocks.
    """
    name: str
    hamiltonian: PauliHamiltonian
    space: RestrictedSpace
    ranked: Tuple[Determinant, ...]
    reference: Determinant
    tau: float
    basis: HybridBasis
    exact: BlockMatrices
    space_energy: float

    @property
    def n_qubit(self) -> int:
        return self.hamiltonian.n_qubit

    def basis_for(self, n_classical: int, n_quantum: int) -> HybridBasis:
        return self.basis.truncated(n_classical, n_quantum)

    def blocks_for(self, n_classical: int, n_quantum: int) -> BlockMatrices:
        return self.exact.truncated(n_classical, n_quantum)


def _hamiltonian(cfg: ExperimentConfig) -> PauliHamiltonian:
    if cfg.toy is not None:
        return get_toy(cfg.toy).hamiltonian()
    return load_hamiltonian(cfg.hamiltonian_path)


def _space(cfg: ExperimentConfig, n_qubit: int) -> RestrictedSpace:
    if cfg.determinants_path is not None:
        dets = [det for det, _ in load_determinants(cfg.determinants_path)]
        if dets and dets[0].n_qubit != n_qubit:
            raise ConfigurationError(
                f"determinants have width {dets[0].n_qubit}, Hamiltonian has {n_qubit}", "system.determinants"
            )
        return RestrictedSpace(dets)
    n_electrons = cfg.n_electrons
    if n_electrons is None and cfg.toy is not None:
        n_electrons = get_toy(cfg.toy).n_electrons
    if n_electrons is not None:
        return RestrictedSpace.sector(n_qubit, n_electrons)
    return RestrictedSpace.full(n_qubit)


def lowest_diagonal_determinant(h: PauliHamiltonian, space: RestrictedSpace) -> Determinant:
    """
    Determinant with the lowest diagonal energy <d|H|d>, ties broken by the
    smallest bitstring value.
    """
    diagonal = project_hamiltonian(h, space).diagonal().real
    order = sorted(range(len(space)), key=lambda i: (round(float(diagonal[i]), 12), space.dets[i].bits))
    return space.dets[order[0]]


def _reference(cfg: ExperimentConfig, h: PauliHamiltonian, space: RestrictedSpace) -> Determinant:
    text = cfg.reference
    if text is None and cfg.toy is not None:
        text = get_toy(cfg.toy).reference
    if text is None:
        reference = lowest_diagonal_determinant(h, space)
        logging.info(f"Reference determinant chosen by lowest diagonal energy: {reference}")
        return reference
    reference = Determinant.from_string(text)
    if reference not in space:
        raise ConfigurationError(f"reference {text} is not in the simulation space", "system.reference")
    return reference


def space_ground_energy(h: PauliHamiltonian, space: RestrictedSpace) -> float:
    """
    Lowest eigenvalue of H projected on the whole simulation space.
    """
    h_space = project_hamiltonian(h, space)
    if len(space) <= DENSE_EVOLUTION_LIMIT:
        return float(np.linalg.eigvalsh(h_space.toarray())[0])
    evals = scipy.sparse.linalg.eigsh(h_space, k=1, which="SA", return_eigenvectors=False)
    return float(evals[0])


@lru_cache(maxsize=8)
def prepare_system(cfg: ExperimentConfig, limit_qubits: int = DEFAULT_LIMIT_QUBITS) -> PreparedSystem:
    """
    Build the shared inputs for a configuration. Cached per process so pool
    workers prepare each system once.
    :param cfg: The experiment configuration.
    :param limit_qubits: Refuse systems wider than this.
    :return: The prepared system.
    """
    h = _hamiltonian(cfg)
    if h.n_qubit > limit_qubits:
        raise SizeLimitError(
            f"{cfg.system_name} has {h.n_qubit} qubits, above the limit of {limit_qubits} (see --limit-qubits)"
        )
    space = _space(cfg, h.n_qubit)

    ranking = None
    if cfg.ranking_path is not None:
        ranking = load_determinants(cfg.ranking_path, require_weight=True)
        outside = [det for det, _ in ranking if det not in space]
        if outside:
            raise ConfigurationError(f"ranked determinant {outside[0]} is not in the simulation space", "system.ranking")
    ranked = tuple(rank_determinants(h, space, ranking))

    max_nc = max(cfg.n_classical)
    max_nq = max(cfg.n_quantum)
    if max_nc > len(ranked):
        raise ConfigurationError(f"N_c = {max_nc} exceeds the {len(ranked)} available determinants", "basis.n_classical")

    reference = _reference(cfg, h, space)
    krylov = KrylovConfig(n_states=max(max_nq, 1), reference=reference, tau=cfg.tau)
    tau = krylov.resolved_tau(h)
    states = krylov_states(h, space, krylov)[:max_nq]
    basis = HybridBasis(ranked[:max_nc], tuple(states), space)
    logging.info(
        f"Prepared {cfg.system_name}: {h.n_qubit} qubits, {h.n_terms} terms, |D|={len(space)}, "
        f"N_c<={max_nc}, N_q<={max_nq}, tau={tau:.6g}"
    )
    return PreparedSystem(
        name=cfg.system_name,
        hamiltonian=h,
        space=space,
        ranked=ranked,
        reference=reference,
        tau=tau,
        basis=basis,
        exact=build_exact_blocks(h, basis),
        space_energy=space_ground_energy(h, space),
    )


@lru_cache(maxsize=32)
def infinite_shot_block(
    cfg: ExperimentConfig, n_classical: int, n_quantum: int, limit_qubits: int = DEFAULT_LIMIT_QUBITS
) -> EstimatedBlock:
    """
    The histogram estimator evaluated on exact distributions: the reference
    against which sampled cq blocks are compared.
    """
    system = prepare_system(cfg, limit_qubits)
    estimator = HistogramEstimator(0, cfg.batch_size)
    return estimator.estimate(system.hamiltonian, system.basis_for(n_classical, n_quantum))

