"""
Histogram-based estimation of the classical-quantum block.
"""

from typing import Dict, Optional
import logging

import numpy as np

from canoe_lab.estimators.estimated_block import EstimatedBlock
from canoe_lab.estimators.histograms import (
    DEFAULT_BATCH_SIZE,
    BatchPlan,
    estimate_alpha,
    exact_joint_distributions,
    exact_reference_histogram,
    sample_histogram,
    sample_joint_histograms,
)
from canoe_lab.exceptions import ContractViolationError
from canoe_lab.operators.pauli import Determinant, PauliHamiltonian
from canoe_lab.simulation.sparse_state import SparseState
from canoe_lab.subspace.blocks import HybridBasis
from canoe_lab.subspace.exact import hamiltonian_column_from_table


# *****************************************************************************
class HistogramEstimator:
    # *****************************************************************************
    """
    One reference histogram and 2B interference histograms per quantum state;
    amplitudes of the classical determinants are merged across batches and
    H_cq follows from the Pauli-shift relation on that table.
    :param shots_per_histogram: Shots per histogram; 0 selects the infinite-shot limit.
    :param batch_size: Batch size m, clamped to N_c.
    """
    method = "histogram"

    def __init__(self, shots_per_histogram: int, batch_size: int = DEFAULT_BATCH_SIZE) -> None:
        if shots_per_histogram < 0:
            raise ContractViolationError(f"shots_per_histogram must be >= 0, got {shots_per_histogram}")
        if batch_size < 1:
            raise ContractViolationError(f"batch_size must be >= 1, got {batch_size}")
        self.shots_per_histogram = shots_per_histogram
        self.batch_size = batch_size

    @property
    def exact(self) -> bool:
        return self.shots_per_histogram == 0

    def plan_for(self, basis: HybridBasis) -> BatchPlan:
        return BatchPlan.from_classical(basis.classical, self.batch_size)

    def total_shots(self, n_classical: int, n_quantum: int) -> int:
        m = max(1, min(self.batch_size, n_classical))
        n_batches = -(-n_classical // m)
        return n_quantum * (1 + 2 * n_batches) * self.shots_per_histogram

    def amplitude_table(self, phi: SparseState, plan: BatchPlan, rng: Optional[np.random.Generator]) -> Dict[Determinant, complex]:
        """
        Estimated amplitudes of ``phi`` on every batched determinant.
        """
        if self.exact:
            p_q = exact_reference_histogram(phi)
        else:
            p_q = sample_histogram(phi, self.shots_per_histogram, rng)
        table: Dict[Determinant, complex] = {}
        for k in range(plan.n_batches):
            chi = plan.batch_state(k)
            if self.exact:
                j_r, j_i = exact_joint_distributions(phi, chi)
            else:
                j_r, j_i = sample_joint_histograms(phi, chi, self.shots_per_histogram, rng)
            table.update(estimate_alpha(p_q, j_r, j_i, plan, k))
        return table

    def estimate(
        self,
        h: PauliHamiltonian,
        basis: HybridBasis,
        seed: Optional[int] = None,
        plan: Optional[BatchPlan] = None,
    ) -> EstimatedBlock:
        plan = plan or self.plan_for(basis)
        if not plan.covers(basis.classical):
            raise ContractViolationError("batch plan does not cover the classical determinants")

        rows = list(basis.classical)
        s_cq = np.zeros((basis.n_classical, basis.n_quantum), dtype=complex)
        h_cq = np.zeros_like(s_cq)
        streams = np.random.SeedSequence(seed).spawn(basis.n_quantum)

        for j, phi in enumerate(basis.quantum):
            rng = None if self.exact else np.random.default_rng(streams[j])
            table = self.amplitude_table(phi, plan, rng)
            s_cq[:, j] = [table[d] for d in rows]
            h_cq[:, j] = hamiltonian_column_from_table(h, rows, table)

        total = basis.n_quantum * (1 + 2 * plan.n_batches) * self.shots_per_histogram
        logging.debug(
            f"Histogram estimate: m={plan.batch_size}, B={plan.n_batches}, "
            f"shots/histogram={self.shots_per_histogram}, total={total}"
        )
        return EstimatedBlock(
            S_cq_hat=s_cq,
            H_cq_hat=h_cq,
            shots_per_histogram=self.shots_per_histogram,
            total_shots=total,
            seed=seed,
            method=self.method,
            batch_size=plan.batch_size,
            n_batches=plan.n_batches,
        )


def estimate_cq_block(
    h: PauliHamiltonian,
    basis: HybridBasis,
    plan: BatchPlan,
    shots_per_histogram: int,
    seed: Optional[int] = None,
) -> EstimatedBlock:
    """
    Histogram-method estimate of S_cq and H_cq.
    :param h: The Hamiltonian.
    :param basis: The hybrid basis.
    :param plan: Batch plan covering ``basis.classical``.
    :param shots_per_histogram: Shots per histogram; 0 for the infinite-shot limit.
    :param seed: Root seed; each quantum state draws from its own spawned stream.
    :return: The estimated block.
    """
    return HistogramEstimator(shots_per_histogram, plan.batch_size).estimate(h, basis, seed, plan)
