"""
Restricted-subspace Krylov time evolution, |phi_j> = exp(-i H_D j tau)|HF>.
"""

from dataclasses import dataclass
from typing import List, Optional
import logging

import numpy as np
import scipy.linalg
import scipy.sparse

from canoe_lab.exceptions import ContractViolationError, SolverBreakdownError
from canoe_lab.operators.pauli import Determinant, PauliHamiltonian
from canoe_lab.simulation.sparse_state import RestrictedSpace, SparseState

DENSE_EVOLUTION_LIMIT = 1 << 12
NORM_TOL = 1e-10
MAX_SPLIT_DEPTH = 40
ROUNDING_FACTOR = 10.0


@dataclass(frozen=True)
class KrylovConfig:
    """
    Parameters of the Krylov basis.
    :param n_states: Number of quantum basis states N_q.
    :param reference: Reference determinant |HF>.
    :param tau: Time step; None means 1/||H||_2.
    :param evolution_tol: Target 2-norm error of each propagation step.
    :param max_lanczos_dim: Largest Lanczos subspace before the step is split.
    """
    n_states: int
    reference: Determinant
    tau: Optional[float] = None
    evolution_tol: float = 1e-12
    max_lanczos_dim: int = 40

    def __post_init__(self) -> None:
        if self.n_states < 1:
            raise ContractViolationError(f"n_states must be >= 1, got {self.n_states}")
        if self.tau is not None and not self.tau > 0:
            raise ContractViolationError(f"tau must be positive, got {self.tau}")
        if not self.evolution_tol > 0:
            raise ContractViolationError("evolution_tol must be positive")

    def resolved_tau(self, h: PauliHamiltonian) -> float:
        if self.tau is not None:
            return float(self.tau)
        if h.norm_2 == 0.0:
            raise ContractViolationError("default tau needs a nonzero Hamiltonian")
        return 1.0 / h.norm_2


def project_hamiltonian(h: PauliHamiltonian, space: RestrictedSpace) -> scipy.sparse.csr_matrix:
    """
    H restricted to span(space): element (i, k) = <d_i|H|d_k>; Pauli shifts that
    leave the space are dropped.
    :param h: The Hamiltonian.
    :param space: Restricted determinant space.
    :return: Sparse Hermitian matrix of size |space|.
    """
    if len(space) == 0:
        raise ContractViolationError("cannot project onto an empty space")
    if space.n_qubit != h.n_qubit:
        raise ContractViolationError(f"space width {space.n_qubit} vs Hamiltonian width {h.n_qubit}")

    bits = space.bits_array
    cols = np.arange(len(space), dtype=np.int64)
    rows_all, cols_all, vals_all = [], [], []
    for term in h.terms:
        targets = space.positions(bits ^ np.uint64(term.x_mask))
        keep = targets >= 0
        rows_all.append(targets[keep])
        cols_all.append(cols[keep])
        vals_all.append(term.coeff * term.phases(bits[keep]))

    dim = len(space)
    if not rows_all:
        return scipy.sparse.csr_matrix((dim, dim), dtype=complex)
    matrix = scipy.sparse.coo_matrix(
        (np.concatenate(vals_all), (np.concatenate(rows_all), np.concatenate(cols_all))),
        shape=(dim, dim),
        dtype=complex,
    )
    return matrix.tocsr()


def _lanczos_step(
    matrix: scipy.sparse.spmatrix,
    vector: np.ndarray,
    beta0: float,
    t: float,
    tol: float,
    max_dim: int,
) -> Optional[np.ndarray]:
    """
    One Lanczos approximation of exp(-i t A) v, or None when ``max_dim`` vectors
    do not reach the tolerance. The tolerance is clamped to the rounding floor
    of the error estimate, 10 eps beta0 ||T||.
    """
    basis = [vector / beta0]
    alphas: List[float] = []
    betas: List[float] = []
    for m in range(1, max_dim + 1):
        w = matrix @ basis[-1]
        alpha = float(np.real(np.vdot(basis[-1], w)))
        w = w - alpha * basis[-1]
        if m > 1:
            w = w - betas[-1] * basis[-2]
        for q in basis:
            w = w - np.vdot(q, w) * q
        alphas.append(alpha)
        beta = float(np.linalg.norm(w))

        evals, evecs = scipy.linalg.eigh_tridiagonal(np.array(alphas), np.array(betas)) if m > 1 else (
            np.array(alphas), np.ones((1, 1))
        )
        coeffs = evecs @ (np.exp(-1j * t * evals) * evecs[0, :].conj())
        # a-posteriori error of the truncated Lanczos exponential
        error = beta0 * beta * abs(coeffs[-1])
        floor = ROUNDING_FACTOR * np.finfo(float).eps * beta0 * np.linalg.norm(alphas + betas + [beta])
        if beta < 1e-14 or error < max(tol, floor):
            return beta0 * (np.column_stack(basis) @ coeffs)
        betas.append(beta)
        basis.append(w / beta)
    return None


def lanczos_expm_multiply(
    matrix: scipy.sparse.spmatrix,
    vector: np.ndarray,
    t: float,
    tol: float,
    max_dim: int = 40,
) -> np.ndarray:
    """
    exp(-i t A) v for Hermitian A via an adaptive Lanczos subspace with full
    reorthogonalisation. When the subspace limit is hit the remaining time is
    covered by substeps of half the length, each held to its share of ``tol``.
    :raises SolverBreakdownError: if the step had to be halved MAX_SPLIT_DEPTH times.
    """
    if max_dim < 1:
        raise ContractViolationError(f"max_dim must be >= 1, got {max_dim}")
    if t < 0:
        raise ContractViolationError(f"t must be >= 0, got {t}")
    current = np.asarray(vector, dtype=complex)
    if t == 0.0 or np.linalg.norm(current) == 0.0:
        return current.copy()

    dt, depth, elapsed = t, 0, 0.0
    while elapsed < t:
        dt = min(dt, t - elapsed)
        beta0 = float(np.linalg.norm(current))
        advanced = _lanczos_step(matrix, current, beta0, dt, tol * abs(dt / t), max_dim)
        if advanced is None:
            depth += 1
            if depth > MAX_SPLIT_DEPTH:
                raise SolverBreakdownError(
                    f"Lanczos propagation needs steps below t/2^{MAX_SPLIT_DEPTH} with max_dim={max_dim}"
                )
            dt /= 2
            logging.debug(f"Lanczos subspace of {max_dim} insufficient, substep now {dt:.3e}")
            continue
        current = advanced
        elapsed += dt
    return current


def krylov_states(h: PauliHamiltonian, space: RestrictedSpace, cfg: KrylovConfig) -> List[SparseState]:
    """
    Time-evolved reference states exp(-i H_D j tau)|HF>, j = 0..N_q-1, evolved
    strictly inside span(space).
    :param h: The Hamiltonian.
    :param space: Restricted determinant space containing the reference.
    :param cfg: Krylov parameters.
    :return: N_q normalised sparse states; state 0 is the reference determinant.
    """
    if cfg.reference not in space:
        raise ContractViolationError(f"reference {cfg.reference} is outside the restricted space")
    tau = cfg.resolved_tau(h)
    h_space = project_hamiltonian(h, space)

    states = [SparseState.from_determinant(cfg.reference)]
    if cfg.n_states == 1:
        return states

    current = np.zeros(len(space), dtype=complex)
    current[space.index[cfg.reference]] = 1.0

    if len(space) <= DENSE_EVOLUTION_LIMIT:
        logging.debug(f"Dense propagator for |D|={len(space)}, tau={tau:.6g}")
        evals, evecs = np.linalg.eigh(h_space.toarray())
        weights = evecs.conj().T @ current
        propagate = lambda j: evecs @ (np.exp(-1j * tau * j * evals) * weights)
    else:
        logging.debug(f"Lanczos propagator for |D|={len(space)}, tau={tau:.6g}")
        propagate = lambda j: lanczos_expm_multiply(
            h_space, current, tau, cfg.evolution_tol, cfg.max_lanczos_dim
        )

    for j in range(1, cfg.n_states):
        current = propagate(j)
        norm = np.linalg.norm(current)
        if abs(norm - 1.0) > NORM_TOL:
            logging.debug(f"Renormalising Krylov state drifted to norm {norm:.3e}")
        current = current / norm
        states.append(SparseState.from_vector(space, current))
    return states
