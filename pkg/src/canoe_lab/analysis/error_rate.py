"""
Gate error rate needed for a circuit of depth D_gate = L r k to fail with
probability at most delta.
"""

from typing import Tuple
import math

from canoe_lab.exceptions import ContractViolationError


def error_rate_bound(L: float, r: float, k: float, delta: float) -> Tuple[float, float]:
    """
    :param L: Gates per Trotter step.
    :param r: Trotter steps per unit time step.
    :param k: Number of Krylov time steps.
    :param delta: Tolerated failure probability.
    :return: (D_gate, p_max) with p_max = 1 - (1 - delta)^(1/D_gate).
    """
    if not (L > 0 and r > 0 and k > 0):
        raise ContractViolationError("L, r and k must be positive")
    if not 0 < delta < 1:
        raise ContractViolationError(f"delta must lie in (0, 1), got {delta}")
    depth = float(L) * float(r) * float(k)
    # expm1/log1p keep precision when delta / depth is tiny
    p_max = -math.expm1(math.log1p(-delta) / depth)
    return depth, p_max
