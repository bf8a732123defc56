"""
Schur-complement stabilised generalized eigensolver for the hybrid basis.

Modes:
    plain           LOBPCG on (H, S) with no preconditioner
    pseudo_inverse  LOBPCG on (H, S) preconditioned by the Schur pseudo-inverse block operator
    deflation       LOBPCG on the pair reduced to Schur directions with lambda > rank_tol
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple, Union
import logging
import warnings

import numpy as np
import scipy.sparse
from scipy.sparse.linalg import LinearOperator, aslinearoperator

from canoe_lab.exceptions import (
    ContractViolationError,
    IndefiniteOverlapError,
    NonConvergenceWarning,
    SolverBreakdownError,
)
from canoe_lab.solvers.lobpcg import LobpcgResult, lobpcg
from canoe_lab.solvers.schur import schur_complement, schur_inverse_operator
from canoe_lab.subspace.blocks import BlockMatrices, hermitize


# *****************************************************************************
class SolverMode(Enum):
    PLAIN = "plain"
    PSEUDO_INVERSE = "pseudo_inverse"
    DEFLATION = "deflation"
# *****************************************************************************


@dataclass(frozen=True)
class SolverConfig:
    """
    :param mode: Stabilisation mode.
    :param rank_tol: Schur eigenvalue threshold; directions with lambda > rank_tol are kept.
    :param tol: LOBPCG residual tolerance.
    :param maxiter: LOBPCG iteration cap.
    :param n_restarts: Random initial vectors tried; the lowest converged energy wins.
    :param hermiticity_tol: Largest tolerated anti-Hermitian part of the input blocks.
    """
    mode: Union[SolverMode, str] = SolverMode.DEFLATION
    rank_tol: float = 1e-10
    tol: float = 1e-8
    maxiter: int = 300
    n_restarts: int = 3
    hermiticity_tol: float = 1e-10

    def __post_init__(self) -> None:
        object.__setattr__(self, "mode", SolverMode(self.mode))
        if self.rank_tol < 0:
            raise ContractViolationError(f"rank_tol must be >= 0, got {self.rank_tol}")
        if not self.tol > 0:
            raise ContractViolationError(f"tol must be positive, got {self.tol}")
        if self.maxiter < 1 or self.n_restarts < 1:
            raise ContractViolationError("maxiter and n_restarts must be >= 1")


# *****************************************************************************
@dataclass(frozen=True)
class SolverOutcome:
    # *****************************************************************************
    """
    Lowest generalized eigenpair in the original hybrid coordinates.

    ``classical_weight`` is sum |c_c|^2 of the S-normalised eigenvector.
    ``classical_span_weight`` is ||c_c + U c_q||^2, the weight of the normalised
    wavefunction inside the classical determinant span.
    """
    energy: float
    classical_vector: np.ndarray
    quantum_vector: np.ndarray
    classical_weight: float
    classical_span_weight: float
    retained: Tuple[int, ...]
    iterations: int
    residual: float
    converged: bool
    all_truncated: bool = False
    failed: bool = False
    mode: SolverMode = SolverMode.DEFLATION
    rank_tol: float = 0.0
    schur_eigvals: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def n_discarded(self) -> int:
        return len(self.quantum_vector) - len(self.retained)

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.classical_vector, self.quantum_vector])


def _random_start(rng: np.random.Generator, dim: int) -> np.ndarray:
    return rng.standard_normal(dim) + 1j * rng.standard_normal(dim)


def _best_of_restarts(
    A: LinearOperator,
    B: LinearOperator,
    T: Optional[LinearOperator],
    cfg: SolverConfig,
    seed: Optional[int],
) -> Optional[LobpcgResult]:
    """
    Lowest converged result over the restarts, else the lowest unconverged one.
    """
    dim = A.shape[0]
    best: Optional[LobpcgResult] = None
    for k, stream in enumerate(np.random.SeedSequence(seed).spawn(cfg.n_restarts)):
        x0 = _random_start(np.random.default_rng(stream), dim)
        try:
            result = lobpcg(A, B, T, x0, cfg.tol, cfg.maxiter)
        except IndefiniteOverlapError as err:
            logging.warning(f"Restart {k}: {err.message}; drawing a new initial vector")
            continue
        except SolverBreakdownError as err:
            logging.warning(f"Restart {k}: {err.message}")
            continue
        if best is None or (result.converged, -result.value) > (best.converged, -best.value):
            best = result
    return best


def _failed_outcome(n_c: int, n_q: int, cfg: SolverConfig, retained: Tuple[int, ...], eigvals: np.ndarray) -> SolverOutcome:
    logging.error(f"All {cfg.n_restarts} restarts failed in mode {cfg.mode.value}")
    return SolverOutcome(
        energy=float("nan"),
        classical_vector=np.full(n_c, np.nan, dtype=complex),
        quantum_vector=np.full(n_q, np.nan, dtype=complex),
        classical_weight=float("nan"),
        classical_span_weight=float("nan"),
        retained=retained,
        iterations=0,
        residual=float("nan"),
        converged=False,
        failed=True,
        mode=cfg.mode,
        rank_tol=cfg.rank_tol,
        schur_eigvals=eigvals,
    )


def _outcome(
    blocks: BlockMatrices,
    result: LobpcgResult,
    c_q: np.ndarray,
    cfg: SolverConfig,
    retained: Tuple[int, ...],
    eigvals: np.ndarray,
    all_truncated: bool = False,
) -> SolverOutcome:
    c_c = result.vector[:blocks.n_classical]
    span = c_c + blocks.S_cq @ c_q
    if not result.converged:
        message = f"LOBPCG did not converge in {cfg.maxiter} iterations (residual {result.residual:.3e})"
        logging.warning(message)
        warnings.warn(NonConvergenceWarning(message))
    return SolverOutcome(
        energy=result.value,
        classical_vector=c_c,
        quantum_vector=c_q,
        classical_weight=float(np.sum(np.abs(c_c) ** 2)),
        classical_span_weight=float(np.sum(np.abs(span) ** 2)),
        retained=retained,
        iterations=result.iterations,
        residual=result.residual,
        converged=result.converged,
        all_truncated=all_truncated,
        mode=cfg.mode,
        rank_tol=cfg.rank_tol,
        schur_eigvals=eigvals,
    )


def _classical_only(blocks: BlockMatrices, cfg: SolverConfig, seed: Optional[int], eigvals: np.ndarray) -> SolverOutcome:
    n_c, n_q = blocks.n_classical, blocks.n_quantum
    if n_c == 0:
        logging.error("No classical determinants left after truncating every quantum direction")
        return _failed_outcome(n_c, n_q, cfg, (), eigvals)
    identity = scipy.sparse.identity(n_c, dtype=complex, format="csr")
    result = _best_of_restarts(aslinearoperator(blocks.H_cc), aslinearoperator(identity), None, cfg, seed)
    if result is None:
        return _failed_outcome(n_c, n_q, cfg, (), eigvals)
    return _outcome(blocks, result, np.zeros(n_q, dtype=complex), cfg, (), eigvals, all_truncated=n_q > 0)


def solve(blocks: BlockMatrices, cfg: SolverConfig = SolverConfig(), seed: Optional[int] = None) -> SolverOutcome:
    """
    Lowest generalized eigenvalue of the block pair.
    :param blocks: Hermitian (H, S) block pair.
    :param cfg: Solver settings.
    :param seed: Seed of the restart vectors.
    :return: The outcome; non-convergence and failures are flagged rather than raised.
    """
    blocks.check_finite()
    asymmetry = blocks.hermiticity_error()
    if asymmetry > cfg.hermiticity_tol:
        raise ContractViolationError(
            f"blocks are not Hermitian (max deviation {asymmetry:.3e}); Hermitise before solving"
        )
    n_c, n_q = blocks.n_classical, blocks.n_quantum
    if n_c + n_q == 0:
        raise ContractViolationError("cannot solve an empty basis")

    if n_q == 0:
        return _classical_only(blocks, cfg, seed, np.zeros(0))

    if cfg.mode is SolverMode.PLAIN:
        all_q = tuple(range(n_q))
        result = _best_of_restarts(blocks.hamiltonian_operator(), blocks.overlap_operator(), None, cfg, seed)
        if result is None:
            return _failed_outcome(n_c, n_q, cfg, all_q, np.zeros(0))
        return _outcome(blocks, result, result.vector[n_c:], cfg, all_q, np.zeros(0))

    spectrum = schur_complement(blocks)
    keep = spectrum.retained(cfg.rank_tol)
    retained = tuple(int(i) for i in keep)
    if len(keep) == 0:
        logging.info(f"All {n_q} quantum directions truncated at rank_tol={cfg.rank_tol:g}; classical-only solve")
        return _classical_only(blocks, cfg, seed, spectrum.eigvals)

    if cfg.mode is SolverMode.PSEUDO_INVERSE:
        precond = schur_inverse_operator(blocks.S_cq, spectrum.pseudo_inverse(cfg.rank_tol))
        result = _best_of_restarts(blocks.hamiltonian_operator(), blocks.overlap_operator(), precond, cfg, seed)
        if result is None:
            return _failed_outcome(n_c, n_q, cfg, retained, spectrum.eigvals)
        return _outcome(blocks, result, result.vector[n_c:], cfg, retained, spectrum.eigvals)

    v_plus = spectrum.eigvecs[:, keep]
    reduced = BlockMatrices(
        S_cq=blocks.S_cq @ v_plus,
        S_qq=hermitize(v_plus.conj().T @ blocks.S_qq @ v_plus),
        H_cc=blocks.H_cc,
        H_cq=blocks.H_cq @ v_plus,
        H_qq=hermitize(v_plus.conj().T @ blocks.H_qq @ v_plus),
    )
    # the reduced Schur complement is diag(lambda_+)
    precond = schur_inverse_operator(reduced.S_cq, np.diag(1.0 / spectrum.eigvals[keep]))
    logging.debug(f"Deflation keeps {len(keep)} of {n_q} quantum directions")
    result = _best_of_restarts(reduced.hamiltonian_operator(), reduced.overlap_operator(), precond, cfg, seed)
    if result is None:
        return _failed_outcome(n_c, n_q, cfg, retained, spectrum.eigvals)
    c_q = v_plus @ result.vector[n_c:]
    return _outcome(blocks, result, c_q, cfg, retained, spectrum.eigvals)
