"""
Hybrid basis and the cc/cq/qq block layout of the projected pair (H, S).
Classical sector first, quantum sector second.
"""

from dataclasses import dataclass, replace
from typing import Sequence, Tuple, Union

import numpy as np
import scipy.sparse
from scipy.sparse.linalg import LinearOperator

from canoe_lab.exceptions import ContractViolationError, DataError
from canoe_lab.operators.pauli import Determinant
from canoe_lab.simulation.sparse_state import RestrictedSpace, SparseState

MatrixLike = Union[np.ndarray, scipy.sparse.spmatrix]


def _dense(a: MatrixLike) -> np.ndarray:
    return a.toarray() if scipy.sparse.issparse(a) else np.asarray(a)


def hermitize(a: MatrixLike) -> MatrixLike:
    """
    (A + A^dagger) / 2
    """
    return (a + a.conj().T) / 2


# *****************************************************************************
@dataclass(frozen=True)
class HybridBasis:
    # *****************************************************************************
    """
    Ordered classical determinants plus ordered quantum states spanning the
    Rayleigh-Ritz subspace.
    """
    classical: Tuple[Determinant, ...]
    quantum: Tuple[SparseState, ...]
    space: RestrictedSpace

    def __post_init__(self) -> None:
        object.__setattr__(self, "classical", tuple(self.classical))
        object.__setattr__(self, "quantum", tuple(self.quantum))
        if len(set(self.classical)) != len(self.classical):
            raise ContractViolationError("classical determinants must be unique")
        for det in self.classical:
            if det not in self.space:
                raise ContractViolationError(f"classical determinant {det} is outside the space")
        for state in self.quantum:
            if state.n_qubit != self.space.n_qubit:
                raise ContractViolationError("quantum state width does not match the space")

    @property
    def n_classical(self) -> int:
        return len(self.classical)

    @property
    def n_quantum(self) -> int:
        return len(self.quantum)

    @property
    def n_qubit(self) -> int:
        return self.space.n_qubit

    def truncated(self, n_classical: int, n_quantum: int) -> "HybridBasis":
        return HybridBasis(self.classical[:n_classical], self.quantum[:n_quantum], self.space)


def block_operator(cc: MatrixLike, cq: np.ndarray, qq: np.ndarray) -> LinearOperator:
    """
    Linear map of [[cc, cq], [cq^dagger, qq]] without assembling it.
    """
    n_c, n_q = cq.shape
    cq_h = cq.conj().T

    def matmat(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x)
        top_in, bottom_in = x[:n_c], x[n_c:]
        top = cc @ top_in + cq @ bottom_in
        bottom = cq_h @ top_in + qq @ bottom_in
        return np.concatenate([np.asarray(top), np.asarray(bottom)], axis=0)

    def matvec(x: np.ndarray) -> np.ndarray:
        return matmat(np.asarray(x).reshape(-1, 1)).ravel()

    dim = n_c + n_q
    return LinearOperator((dim, dim), matvec=matvec, matmat=matmat, dtype=complex)


# *****************************************************************************
@dataclass(frozen=True)
class BlockMatrices:
    # *****************************************************************************
    """
    Block form of the projected pair. The classical-classical overlap is the
    identity and is never stored.

        S = [[I,      S_cq], [S_cq^+, S_qq]]
        H = [[H_cc,   H_cq], [H_cq^+, H_qq]]
    """
    S_cq: np.ndarray
    S_qq: np.ndarray
    H_cc: MatrixLike
    H_cq: np.ndarray
    H_qq: np.ndarray

    def __post_init__(self) -> None:
        n_c, n_q = np.shape(self.S_cq)
        if np.shape(self.H_cq) != (n_c, n_q):
            raise ContractViolationError(f"H_cq shape {np.shape(self.H_cq)} vs S_cq shape {(n_c, n_q)}")
        if np.shape(self.S_qq) != (n_q, n_q) or np.shape(self.H_qq) != (n_q, n_q):
            raise ContractViolationError("qq blocks must be N_q x N_q")
        if self.H_cc.shape != (n_c, n_c):
            raise ContractViolationError("H_cc must be N_c x N_c")

    @property
    def n_classical(self) -> int:
        return self.S_cq.shape[0]

    @property
    def n_quantum(self) -> int:
        return self.S_cq.shape[1]

    @property
    def dim(self) -> int:
        return self.n_classical + self.n_quantum

    def overlap_dense(self) -> np.ndarray:
        return np.block([
            [np.eye(self.n_classical, dtype=complex), self.S_cq],
            [self.S_cq.conj().T, self.S_qq],
        ])

    def hamiltonian_dense(self) -> np.ndarray:
        return np.block([
            [_dense(self.H_cc).astype(complex), self.H_cq],
            [self.H_cq.conj().T, self.H_qq],
        ])

    def overlap_operator(self) -> LinearOperator:
        identity = scipy.sparse.identity(self.n_classical, dtype=complex, format="csr")
        return block_operator(identity, self.S_cq, self.S_qq)

    def hamiltonian_operator(self) -> LinearOperator:
        return block_operator(self.H_cc, self.H_cq, self.H_qq)

    def hermitized(self) -> "BlockMatrices":
        """
        Hermitised copy; the off-diagonal blocks are Hermitian by layout.
        """
        return replace(self, S_qq=hermitize(self.S_qq), H_cc=hermitize(self.H_cc), H_qq=hermitize(self.H_qq))

    def hermiticity_error(self) -> float:
        errors = [
            np.max(np.abs(self.S_qq - self.S_qq.conj().T), initial=0.0),
            np.max(np.abs(self.H_qq - self.H_qq.conj().T), initial=0.0),
            np.max(np.abs(_dense(self.H_cc - self.H_cc.conj().T)), initial=0.0),
        ]
        return float(max(errors))

    def check_finite(self) -> None:
        for name in ("S_cq", "S_qq", "H_cq", "H_qq"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise DataError(f"{name} contains non-finite entries")
        cc = self.H_cc.data if scipy.sparse.issparse(self.H_cc) else self.H_cc
        if not np.all(np.isfinite(cc)):
            raise DataError("H_cc contains non-finite entries")

    def truncated(self, n_classical: int, n_quantum: int) -> "BlockMatrices":
        """
        Leading N_c classical and N_q quantum sub-blocks.
        """
        if not (0 <= n_classical <= self.n_classical and 0 <= n_quantum <= self.n_quantum):
            raise ContractViolationError(
                f"cannot truncate ({self.n_classical}, {self.n_quantum}) blocks to ({n_classical}, {n_quantum})"
            )
        return BlockMatrices(
            S_cq=self.S_cq[:n_classical, :n_quantum],
            S_qq=self.S_qq[:n_quantum, :n_quantum],
            H_cc=self.H_cc[:n_classical, :n_classical],
            H_cq=self.H_cq[:n_classical, :n_quantum],
            H_qq=self.H_qq[:n_quantum, :n_quantum],
        )

    def with_cq(self, S_cq: np.ndarray, H_cq: np.ndarray) -> "BlockMatrices":
        return replace(self, S_cq=np.asarray(S_cq, dtype=complex), H_cq=np.asarray(H_cq, dtype=complex))


def pair_from_dense(H: np.ndarray, S: np.ndarray, n_classical: int) -> BlockMatrices:
    """
    Split a dense pair whose leading N_c x N_c overlap block is the identity.
    """
    H = np.asarray(H, dtype=complex)
    S = np.asarray(S, dtype=complex)
    if H.shape != S.shape or H.shape[0] != H.shape[1]:
        raise ContractViolationError("H and S must be square and of equal shape")
    n_c = n_classical
    if not np.allclose(S[:n_c, :n_c], np.eye(n_c), atol=1e-12):
        raise ContractViolationError("classical-classical overlap block must be the identity")
    return BlockMatrices(
        S_cq=S[:n_c, n_c:].copy(),
        S_qq=S[n_c:, n_c:].copy(),
        H_cc=H[:n_c, :n_c].copy(),
        H_cq=H[:n_c, n_c:].copy(),
        H_qq=H[n_c:, n_c:].copy(),
    )
