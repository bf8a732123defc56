"""
Dense reference solutions of the hybrid pencil and overlap conditioning.
"""

from typing import Tuple

import numpy as np

from canoe_lab.subspace.blocks import BlockMatrices, hermitize

ORACLE_CUTOFF = 1e-9


def dense_ground_state(blocks: BlockMatrices, cutoff: float = ORACLE_CUTOFF) -> Tuple[float, np.ndarray]:
    """
    Lowest generalized eigenpair by canonical orthogonalisation: overlap
    eigenvectors with eigenvalue below cutoff * max are dropped.
    :param blocks: The block pair.
    :param cutoff: Relative overlap eigenvalue cutoff.
    :return: Energy and the S-normalised eigenvector in hybrid coordinates.
    """
    s = hermitize(blocks.overlap_dense())
    h = hermitize(blocks.hamiltonian_dense())
    sig, vecs = np.linalg.eigh(s)
    keep = sig > cutoff * max(sig.max(), 0.0)
    x = vecs[:, keep] / np.sqrt(sig[keep])
    evals, y = np.linalg.eigh(hermitize(x.conj().T @ h @ x))
    return float(evals[0]), x @ y[:, 0]


def dense_ground_energy(blocks: BlockMatrices, cutoff: float = ORACLE_CUTOFF) -> float:
    return dense_ground_state(blocks, cutoff)[0]


def conditioning_metric(blocks: BlockMatrices) -> float:
    """
    1/|lambda_min| of the Hermitised full overlap, lambda_min the algebraically
    smallest eigenvalue; inf when lambda_min is zero to working precision.
    """
    s = hermitize(blocks.overlap_dense())
    if s.size == 0:
        return float("inf")
    evals = np.linalg.eigvalsh(s)
    floor = max(1e-300, len(evals) * np.finfo(float).eps * np.abs(evals).max())
    lam_min = evals[0]
    if abs(lam_min) < floor:
        return float("inf")
    return float(1.0 / abs(lam_min))
