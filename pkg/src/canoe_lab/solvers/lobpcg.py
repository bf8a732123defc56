"""
Single-vector LOBPCG for the lowest eigenpair of a Hermitian pencil (A, B).
"""

from dataclasses import dataclass
from typing import Any, Optional
import logging

import numpy as np
from scipy.sparse.linalg import LinearOperator, aslinearoperator

from canoe_lab.exceptions import ContractViolationError, IndefiniteOverlapError, SolverBreakdownError

GRAM_DROP_TOL = 1e-12


@dataclass(frozen=True)
class LobpcgResult:
    value: float
    vector: np.ndarray
    iterations: int
    residual: float
    converged: bool


def _b_orthonormal_transform(gram_b: np.ndarray) -> np.ndarray:
    """
    Columns T with T^dagger G_B T = I over the numerically positive part of G_B.
    """
    mu, q = np.linalg.eigh(gram_b)
    top = mu.max() if mu.size else 0.0
    keep = (mu > GRAM_DROP_TOL * top) & (mu > 0.0)
    if not np.any(keep):
        raise SolverBreakdownError("Rayleigh-Ritz basis collapsed to rank 0")
    return q[:, keep] / np.sqrt(mu[keep])


def lobpcg(
    A: Any,
    B: Any,
    preconditioner: Optional[Any],
    x0: np.ndarray,
    tol: float = 1e-8,
    maxiter: int = 300,
) -> LobpcgResult:
    """
    Locally optimal preconditioned CG with block size 1. Every iteration runs a
    Rayleigh-Ritz step on span{x, T r, p} after B-orthonormalising that span.
    :param A: Hermitian operator (matrix, sparse matrix or LinearOperator).
    :param B: Hermitian overlap operator, positive on the iterate subspace.
    :param preconditioner: Operator T applied to the residual, or None.
    :param x0: Initial vector.
    :param tol: Bound on ||A x - theta B x|| / ||x||.
    :param maxiter: Iteration cap.
    :return: Lowest Ritz value and vector; the vector is B-normalised.
    """
    A = aslinearoperator(A)
    B = aslinearoperator(B)
    T: Optional[LinearOperator] = aslinearoperator(preconditioner) if preconditioner is not None else None
    x = np.asarray(x0, dtype=complex).ravel()
    if x.shape[0] != A.shape[0] or A.shape != B.shape:
        raise ContractViolationError(f"x0 of length {x.shape[0]} for operators of shape {A.shape}, {B.shape}")
    if not tol > 0:
        raise ContractViolationError(f"tol must be positive, got {tol}")

    def normalise(v: np.ndarray) -> np.ndarray:
        bv = B.matvec(v)
        vbv = float(np.real(np.vdot(v, bv)))
        if not vbv > 0.0:
            raise IndefiniteOverlapError(f"iterate has non-positive overlap norm x^dagger B x = {vbv:.3e}")
        return v / np.sqrt(vbv)

    x = normalise(x / np.linalg.norm(x))
    ax, bx = A.matvec(x), B.matvec(x)
    theta = float(np.real(np.vdot(x, ax)))
    p: Optional[np.ndarray] = None
    residual = np.inf

    for iteration in range(maxiter + 1):
        r = ax - theta * bx
        residual = float(np.linalg.norm(r) / np.linalg.norm(x))
        if residual <= tol:
            return LobpcgResult(theta, x, iteration, residual, True)
        if iteration == maxiter:
            break

        w = T.matvec(r) if T is not None else r
        columns = [x / np.linalg.norm(x)]
        for v in (w, p):
            norm = np.linalg.norm(v) if v is not None else 0.0
            if norm > 0.0 and np.isfinite(norm):
                columns.append(v / norm)
        V = np.column_stack(columns)

        AV = A.matmat(V)
        BV = B.matmat(V)
        gram_a = V.conj().T @ AV
        gram_b = V.conj().T @ BV
        gram_a = (gram_a + gram_a.conj().T) / 2
        gram_b = (gram_b + gram_b.conj().T) / 2

        transform = _b_orthonormal_transform(gram_b)
        reduced = transform.conj().T @ gram_a @ transform
        reduced = (reduced + reduced.conj().T) / 2
        _, vecs = np.linalg.eigh(reduced)
        y = transform @ vecs[:, 0]

        x_new = V @ y
        p = V[:, 1:] @ y[1:] if V.shape[1] > 1 else None
        x = normalise(x_new)
        ax, bx = A.matvec(x), B.matvec(x)
        theta = float(np.real(np.vdot(x, ax)))

    logging.debug(f"LOBPCG stopped at maxiter={maxiter} with residual {residual:.3e}")
    return LobpcgResult(theta, x, maxiter, residual, False)
