"""
Noise families applied to the classical-quantum block: sampled runs at a
given shot count and the synthetic interpolation

    S(alpha) = S + alpha (S^(N0) - S)

towards a sampled reference run with N0 shots, applied to H with the same alpha.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from canoe_lab.estimators.estimated_block import EstimatedBlock, inject_qq
from canoe_lab.estimators.histograms import DEFAULT_BATCH_SIZE
from canoe_lab.estimators.implementations.histogram_estimator import HistogramEstimator
from canoe_lab.exceptions import ContractViolationError
from canoe_lab.operators.pauli import PauliHamiltonian
from canoe_lab.subspace.blocks import BlockMatrices, HybridBasis

REFERENCE_SHOTS = 100000


# *****************************************************************************
class NoiseKind(Enum):
    SAMPLED = "sampled"
    SYNTHETIC_ALPHA = "synthetic_alpha"
# *****************************************************************************


def overlap_frobenius_error(noisy: BlockMatrices, exact: BlockMatrices) -> float:
    """
    ||S_noisy - S_exact||_F of the full assembled overlap matrices.
    """
    return float(np.linalg.norm(noisy.overlap_dense() - exact.overlap_dense()))


def hamiltonian_cq_error(H_cq_hat: np.ndarray, H_cq_ref: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(H_cq_hat) - np.asarray(H_cq_ref)))


def synthetic_alpha_blocks(exact: BlockMatrices, reference: BlockMatrices, alpha: float) -> BlockMatrices:
    """
    Interpolate the cq blocks of both H and S between the exact pair and a
    sampled reference pair; cc and qq stay exact.
    """
    if alpha < 0:
        raise ContractViolationError(f"alpha must be >= 0, got {alpha}")
    s_cq = exact.S_cq + alpha * (reference.S_cq - exact.S_cq)
    h_cq = exact.H_cq + alpha * (reference.H_cq - exact.H_cq)
    return exact.with_cq(s_cq, h_cq)


@dataclass(frozen=True)
class NoiseSpec:
    """
    A noise point. ``shots`` is used by the sampled family (0 means no noise),
    ``alpha`` and ``reference_shots`` by the synthetic family.
    """
    kind: NoiseKind
    seed: Optional[int] = None
    shots: int = 0
    alpha: float = 0.0
    reference_shots: int = REFERENCE_SHOTS

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", NoiseKind(self.kind))
        if self.shots < 0 or self.reference_shots < 1:
            raise ContractViolationError("shot counts must be nonnegative (reference_shots >= 1)")
        if self.alpha < 0:
            raise ContractViolationError(f"alpha must be >= 0, got {self.alpha}")

    @classmethod
    def sampled(cls, shots: int, seed: Optional[int] = None) -> "NoiseSpec":
        return cls(NoiseKind.SAMPLED, seed=seed, shots=shots)

    @classmethod
    def synthetic(cls, alpha: float, seed: Optional[int] = None, reference_shots: int = REFERENCE_SHOTS) -> "NoiseSpec":
        return cls(NoiseKind.SYNTHETIC_ALPHA, seed=seed, alpha=alpha, reference_shots=reference_shots)

    @property
    def label(self) -> str:
        if self.kind is NoiseKind.SAMPLED:
            return f"shots={self.shots}"
        return f"alpha={self.alpha:g}@N0={self.reference_shots}"

    def realize(
        self,
        h: PauliHamiltonian,
        basis: HybridBasis,
        exact: BlockMatrices,
        batch_size: int = DEFAULT_BATCH_SIZE,
    ) -> Tuple[BlockMatrices, float]:
        """
        Noisy Hermitian pair and its full-overlap Frobenius deviation.
        """
        if self.kind is NoiseKind.SAMPLED:
            if self.shots == 0:
                return exact, 0.0
            block: EstimatedBlock = HistogramEstimator(self.shots, batch_size).estimate(h, basis, self.seed)
            noisy = inject_qq(block, exact)
            return noisy, overlap_frobenius_error(noisy, exact)

        reference_block = HistogramEstimator(self.reference_shots, batch_size).estimate(h, basis, self.seed)
        reference = inject_qq(reference_block, exact)
        noisy = synthetic_alpha_blocks(exact, reference, self.alpha).hermitized()
        return noisy, self.alpha * overlap_frobenius_error(reference, exact)
