"""
Interface for classical-quantum block estimators.
"""

from typing import Optional, Protocol, runtime_checkable

from canoe_lab.estimators.estimated_block import EstimatedBlock
from canoe_lab.operators.pauli import PauliHamiltonian
from canoe_lab.subspace.blocks import HybridBasis


@runtime_checkable
# *****************************************************************************
class IOverlapEstimator(Protocol):
    # *****************************************************************************
    """
    Estimates S_cq and H_cq of a hybrid basis from simulated measurements.
    """
    method: str

    def estimate(self, h: PauliHamiltonian, basis: HybridBasis, seed: Optional[int] = None) -> EstimatedBlock:
        """
        Estimate the classical-quantum block.
        :param h: The Hamiltonian.
        :param basis: The hybrid basis.
        :param seed: Root seed of the sampling streams.
        :return: The estimated block with its shot bookkeeping.
        """
        ...

    def total_shots(self, n_classical: int, n_quantum: int) -> int:
        """
        Shots spent on a basis of the given size.
        """
        ...
