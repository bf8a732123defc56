"""
Sampled classical-quantum block, its JSON form, and injection into an exact pair.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional
import json
import logging

import numpy as np

from canoe_lab.exceptions import ContractViolationError, DataError
from canoe_lab.subspace.blocks import BlockMatrices


def _encode_complex(matrix: np.ndarray) -> List[List[List[float]]]:
    return [[[float(z.real), float(z.imag)] for z in row] for row in matrix]


def _decode_complex(rows: List[List[List[float]]], shape: tuple) -> np.ndarray:
    out = np.zeros(shape, dtype=complex)
    for i, row in enumerate(rows):
        for j, (re, im) in enumerate(row):
            out[i, j] = complex(re, im)
    return out


# *****************************************************************************
@dataclass(frozen=True)
class EstimatedBlock:
    # *****************************************************************************
    """
    Estimated S_cq and H_cq of one sampling run.

    ``shots_per_histogram`` is 0 for the infinite-shot limit. For the histogram
    method ``total_shots = N_q (1 + 2B) shots_per_histogram``; for shadows it is
    ``N_q * snapshots``.
    """
    S_cq_hat: np.ndarray
    H_cq_hat: np.ndarray
    shots_per_histogram: int
    total_shots: int
    seed: Optional[int]
    method: str = "histogram"
    batch_size: int = 0
    n_batches: int = 0
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if np.shape(self.S_cq_hat) != np.shape(self.H_cq_hat):
            raise ContractViolationError(
                f"S_cq_hat {np.shape(self.S_cq_hat)} and H_cq_hat {np.shape(self.H_cq_hat)} differ in shape"
            )

    @property
    def n_classical(self) -> int:
        return self.S_cq_hat.shape[0]

    @property
    def n_quantum(self) -> int:
        return self.S_cq_hat.shape[1]

    @property
    def is_exact(self) -> bool:
        return self.shots_per_histogram == 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "method": self.method,
            "seed": self.seed,
            "shots_per_histogram": self.shots_per_histogram,
            "total_shots": self.total_shots,
            "batch_size": self.batch_size,
            "n_batches": self.n_batches,
            "n_classical": self.n_classical,
            "n_quantum": self.n_quantum,
            "metadata": self.metadata,
            "S_cq_hat": _encode_complex(self.S_cq_hat),
            "H_cq_hat": _encode_complex(self.H_cq_hat),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "EstimatedBlock":
        try:
            shape = (int(data["n_classical"]), int(data["n_quantum"]))
            return cls(
                S_cq_hat=_decode_complex(data["S_cq_hat"], shape),
                H_cq_hat=_decode_complex(data["H_cq_hat"], shape),
                shots_per_histogram=int(data["shots_per_histogram"]),
                total_shots=int(data["total_shots"]),
                seed=data.get("seed"),
                method=data.get("method", "histogram"),
                batch_size=int(data.get("batch_size", 0)),
                n_batches=int(data.get("n_batches", 0)),
                metadata=dict(data.get("metadata", {})),
            )
        except (KeyError, TypeError, ValueError) as err:
            raise DataError(f"malformed estimated block: {err}")

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_json(cls, text: str) -> "EstimatedBlock":
        return cls.from_dict(json.loads(text))

    def save(self, path: str) -> None:
        logging.debug(f"Writing estimated block to {path}")
        with open(path, "w", encoding="utf-8") as stream:
            stream.write(self.to_json())

    @classmethod
    def load(cls, path: str) -> "EstimatedBlock":
        with open(path, "r", encoding="utf-8") as stream:
            return cls.from_json(stream.read())


def inject_qq(block: EstimatedBlock, exact: BlockMatrices) -> BlockMatrices:
    """
    Full pair with sampled cq and exact cc / qq blocks, Hermitised.
    :param block: Sampled classical-quantum block.
    :param exact: Exact blocks of the same basis.
    :return: Hermitian block pair.
    """
    if (block.n_classical, block.n_quantum) != (exact.n_classical, exact.n_quantum):
        raise ContractViolationError(
            f"estimated block {(block.n_classical, block.n_quantum)} vs exact "
            f"{(exact.n_classical, exact.n_quantum)}"
        )
    return exact.with_cq(block.S_cq_hat, block.H_cq_hat).hermitized()
