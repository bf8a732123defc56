"""
Shots-to-chemical-accuracy extrapolation across system sizes.

Each system contributes the shot count at which the lower envelope of its
energy-error curve crosses chemical accuracy. Counts are normalised to a
common number of quantum states and fitted linearly in log(2^n * N_q).
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple
import logging
import math

import numpy as np

from canoe_lab.exceptions import ContractViolationError, ExtrapolationError

CHEMICAL_ACCURACY = 1.5936e-3


@dataclass(frozen=True)
class ShotCurve:
    system: str
    n_qubit: int
    n_quantum: int
    shots: np.ndarray
    errors: np.ndarray

    def __post_init__(self) -> None:
        shots = np.asarray(self.shots, dtype=float)
        errors = np.abs(np.asarray(self.errors, dtype=float))
        if shots.ndim != 1 or shots.shape != errors.shape or len(shots) == 0:
            raise ContractViolationError(f"{self.system}: shots and errors must be equal-length 1-D series")
        if np.any(shots <= 0) or np.any(np.diff(shots) <= 0):
            raise ContractViolationError(f"{self.system}: shots must be positive and increasing")
        object.__setattr__(self, "shots", shots)
        object.__setattr__(self, "errors", errors)


@dataclass(frozen=True)
class CrossingPoint:
    system: str
    n_qubit: int
    n_quantum: int
    shots: float
    method: str
    normalized_shots: float


@dataclass(frozen=True)
class ExtrapolationFit:
    a: float
    b: float
    r_squared: float
    target_qubits: int
    target_nq: int
    predicted_shots: float
    points: List[CrossingPoint] = field(default_factory=list)

    def total_block_shots(self, n_batches: int) -> float:
        """
        Whole cq-block cost N_q (1 + 2B) times the predicted per-histogram shots.
        """
        return self.target_nq * (1 + 2 * n_batches) * self.predicted_shots


def lower_envelope(errors: Sequence[float]) -> np.ndarray:
    return np.minimum.accumulate(np.asarray(errors, dtype=float))


def _log_size(n_qubit: int, n: int) -> float:
    """
    log(2^n * N) without forming 2^n.
    """
    return n_qubit * math.log(2.0) + math.log(n)


def _safe_log(values: np.ndarray) -> np.ndarray:
    return np.log(np.maximum(values, np.finfo(float).tiny))


def chemical_accuracy_crossing(
    shots: Sequence[float],
    errors: Sequence[float],
    threshold: float = CHEMICAL_ACCURACY,
) -> Optional[Tuple[float, str]]:
    """
    First crossing of the threshold by the non-increasing envelope.
    :return: (shots, method) with method in {"initial", "interpolated",
             "extrapolated"}, or None when the tail never decreases.
    """
    shots = np.asarray(shots, dtype=float)
    env = lower_envelope(errors)
    if env[0] <= threshold:
        return float(shots[0]), "initial"

    log_s, log_e = np.log(shots), _safe_log(env)
    log_t = math.log(threshold)
    below = np.flatnonzero(env <= threshold)
    if below.size:
        i = int(below[0])
        slope = (log_s[i] - log_s[i - 1]) / (log_e[i] - log_e[i - 1])
        return float(math.exp(log_s[i - 1] + (log_t - log_e[i - 1]) * slope)), "interpolated"

    pairs = [(len(env) - 2, len(env) - 1)] if len(env) >= 2 else []
    pairs += [(i - 1, i) for i in range(len(env) - 1, 0, -1) if env[i] < env[i - 1]]
    for i, j in pairs:
        slope = (log_e[j] - log_e[i]) / (log_s[j] - log_s[i])
        if slope < 0:
            return float(math.exp(log_s[j] + (log_t - log_e[j]) / slope)), "extrapolated"
    return None


def extrapolate_shots(
    curves: Sequence[ShotCurve],
    target_nq: int = 64,
    target_qubits: int = 100,
    threshold: float = CHEMICAL_ACCURACY,
) -> ExtrapolationFit:
    """
    Fit shots_adj = a log(2^n * target_nq) + b over systems and predict at target_qubits,
    with shots_adj = shots * log(2^n * target_nq) / log(2^n * N_q).
    :param curves: One (shots, |dE|) series per system.
    :param target_nq: Common number of quantum states.
    :param target_qubits: Qubit count of the prediction.
    :param threshold: Energy-error threshold.
    :return: Fit coefficients, R^2, prediction and the per-system crossings.
    """
    points: List[CrossingPoint] = []
    for curve in curves:
        crossing = chemical_accuracy_crossing(curve.shots, curve.errors, threshold)
        if crossing is None:
            logging.warning(f"{curve.system}: error envelope never decreases, system skipped")
            continue
        shots, method = crossing
        scale = _log_size(curve.n_qubit, target_nq) / _log_size(curve.n_qubit, curve.n_quantum)
        points.append(CrossingPoint(curve.system, curve.n_qubit, curve.n_quantum, shots, method, shots * scale))

    x = np.array([_log_size(p.n_qubit, target_nq) for p in points])
    y = np.array([p.normalized_shots for p in points])
    if len(points) < 2 or np.unique(x).size < 2:
        raise ExtrapolationError(
            f"need at least 2 systems of different size with a crossing, got {len(points)}"
        )
    a, b = np.polyfit(x, y, 1)
    residual = y - (a * x + b)
    spread = np.sum((y - y.mean()) ** 2)
    r_squared = float(1.0 - np.sum(residual ** 2) / spread) if spread > 0 else 1.0
    predicted = float(a * _log_size(target_qubits, target_nq) + b)
    logging.info(f"Shot extrapolation: a={a:.6g}, b={b:.6g}, R^2={r_squared:.4f}, {target_qubits} qubits -> {predicted:.4g}")
    return ExtrapolationFit(float(a), float(b), r_squared, target_qubits, target_nq, predicted, points)
