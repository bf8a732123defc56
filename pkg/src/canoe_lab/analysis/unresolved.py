"""
Unresolved-overlap weight: the share of the exact ground state lying in
overlap eigendirections that sampling noise cannot resolve.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np
import scipy.linalg

from canoe_lab.exceptions import ContractViolationError
from canoe_lab.subspace.blocks import BlockMatrices, hermitize

RANK_CUTOFF = 1e-12


@dataclass(frozen=True)
class UnresolvedWeight:
    weight: float
    tau: float
    rank: int


def resolution_threshold(delta_cq: np.ndarray, delta_qq: np.ndarray) -> Tuple[float, int]:
    """
    tau = ||D||_2 with D = [[0, R], [R^dagger, (dS_qq + dS_qq^dagger)/2]] and
    dS_cq = Q R a rank factorisation with orthonormal Q.
    :return: (tau, rank of dS_cq)
    """
    delta_cq = np.asarray(delta_cq, dtype=complex)
    n_q = delta_cq.shape[1]
    rank = 0
    r = np.zeros((0, n_q), dtype=complex)
    if delta_cq.size:
        q, r_piv, _ = scipy.linalg.qr(delta_cq, mode="economic", pivoting=True)
        diag = np.abs(np.diag(r_piv))
        if diag.size and diag[0] > 0.0:
            rank = int(np.sum(diag > RANK_CUTOFF * diag[0]))
        r = q[:, :rank].conj().T @ delta_cq
    d = np.block([
        [np.zeros((rank, rank), dtype=complex), r],
        [r.conj().T, hermitize(np.asarray(delta_qq, dtype=complex))],
    ])
    tau = float(np.max(np.abs(np.linalg.eigvalsh(d)))) if d.size else 0.0
    return tau, rank


def unresolved_weight(
    S_exact: BlockMatrices,
    S_sampled_cq: np.ndarray,
    S_sampled_qq: np.ndarray,
    ground_vec: np.ndarray,
) -> UnresolvedWeight:
    """
    W_unres = sum of normalised weights of c0 on exact-overlap eigenvectors
    with eigenvalue sigma <= tau.
    :param S_exact: Exact block pair (overlap blocks are read).
    :param S_sampled_cq: Sampled U block.
    :param S_sampled_qq: Sampled M block.
    :param ground_vec: Exact ground-state vector c0 in hybrid coordinates.
    :return: Weight, threshold and rank of dS_cq.
    """
    if np.shape(S_sampled_cq) != np.shape(S_exact.S_cq) or np.shape(S_sampled_qq) != np.shape(S_exact.S_qq):
        raise ContractViolationError("sampled blocks do not match the exact block shapes")
    if len(ground_vec) != S_exact.dim:
        raise ContractViolationError(f"ground vector of length {len(ground_vec)} for dimension {S_exact.dim}")

    tau, rank = resolution_threshold(
        np.asarray(S_sampled_cq) - S_exact.S_cq,
        np.asarray(S_sampled_qq) - S_exact.S_qq,
    )
    if tau == 0.0:
        return UnresolvedWeight(0.0, 0.0, rank)

    sigma, vecs = np.linalg.eigh(hermitize(S_exact.overlap_dense()))
    coeffs = np.abs(vecs.conj().T @ np.asarray(ground_vec, dtype=complex)) ** 2
    total = coeffs.sum()
    if total == 0.0:
        raise ContractViolationError("ground vector is zero")
    weight = float(coeffs[sigma <= tau].sum() / total)
    return UnresolvedWeight(weight, tau, rank)
