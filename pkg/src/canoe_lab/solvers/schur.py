"""
Schur complement of the quantum sector, S_schur = M - U^dagger U, and the
operators built from its spectrum.
"""

from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import LinearOperator

from canoe_lab.exceptions import ContractViolationError, DataError
from canoe_lab.subspace.blocks import BlockMatrices, hermitize


# *****************************************************************************
@dataclass(frozen=True)
class SchurSpectrum:
    # *****************************************************************************
    """
    Eigenpairs of the Hermitised Schur complement, eigenvalues descending.
    """
    eigvals: np.ndarray
    eigvecs: np.ndarray

    @property
    def size(self) -> int:
        return len(self.eigvals)

    def retained(self, rank_tol: float) -> np.ndarray:
        """
        Indices of directions with lambda > rank_tol (strict).
        """
        return np.flatnonzero(self.eigvals > rank_tol)

    def pseudo_inverse(self, rank_tol: float) -> np.ndarray:
        """
        V diag(mu) V^dagger with mu = 1/lambda on retained directions, 0 elsewhere.
        """
        keep = self.retained(rank_tol)
        v = self.eigvecs[:, keep]
        return (v / self.eigvals[keep]) @ v.conj().T


def schur_complement(blocks: BlockMatrices) -> SchurSpectrum:
    """
    Diagonalise M - U^dagger U of the overlap blocks (S_cc = I).
    :param blocks: Block pair; only the overlap blocks are read.
    :return: Descending spectrum with orthonormal eigenvectors.
    """
    u, m = blocks.S_cq, blocks.S_qq
    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(m))):
        raise DataError("overlap blocks contain non-finite entries")
    schur = hermitize(m - u.conj().T @ u)
    evals, evecs = np.linalg.eigh(schur)
    order = np.argsort(evals)[::-1]
    return SchurSpectrum(evals[order], evecs[:, order])


def schur_inverse_operator(u: np.ndarray, schur_pinv: np.ndarray) -> LinearOperator:
    """
    The block operator

        [[I + U S+ U^dagger, -U S+], [-S+ U^dagger, S+]]

    applied as x -> (x_c + U y, -y) with y = S+ (U^dagger x_c - x_q), without
    forming the N_c x N_c block.
    """
    n_c, n_q = u.shape
    if schur_pinv.shape != (n_q, n_q):
        raise ContractViolationError(f"pseudo-inverse of shape {schur_pinv.shape} for N_q={n_q}")
    u_h = u.conj().T

    def matmat(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x)
        x_c, x_q = x[:n_c], x[n_c:]
        y = schur_pinv @ (u_h @ x_c - x_q)
        return np.concatenate([x_c + u @ y, -y], axis=0)

    def matvec(x: np.ndarray) -> np.ndarray:
        return matmat(np.asarray(x).reshape(-1, 1)).ravel()

    dim = n_c + n_q
    return LinearOperator((dim, dim), matvec=matvec, matmat=matmat, dtype=complex)
