"""
Sample-complexity bounds of the three classical-quantum block estimators.
"""

from dataclasses import dataclass
from enum import Enum
import math

from canoe_lab.estimators.bounds import hadamard_cost_model
from canoe_lab.exceptions import ContractViolationError


# *****************************************************************************
class ComplexityMethod(Enum):
    HADAMARD = "hadamard"
    SHADOW = "shadow"
    HISTOGRAM = "histogram"
# *****************************************************************************


@dataclass(frozen=True)
class ComplexityInputs:
    """
    Problem sizes entering the bounds. B = ceil(N_c / m).
    """
    N_c: int
    N_q: int
    m: int
    n_H: int
    n_qubit: int
    norm_1: float
    norm_2: float
    epsilon: float
    delta: float

    def __post_init__(self) -> None:
        for name in ("N_c", "N_q", "m", "n_H", "n_qubit", "norm_1", "norm_2", "epsilon"):
            if not getattr(self, name) > 0:
                raise ContractViolationError(f"{name} must be positive, got {getattr(self, name)}")
        if not 0 < self.delta < 1:
            raise ContractViolationError(f"delta must lie in (0, 1), got {self.delta}")

    @property
    def B(self) -> int:
        return -(-self.N_c // self.m)

    @property
    def n_histograms(self) -> int:
        return self.N_q * (1 + 2 * self.B)


def complexity(method: ComplexityMethod, inputs: ComplexityInputs) -> float:
    """
    Shots needed to reach accuracy epsilon on the cq block with confidence 1 - delta.
    :param method: Estimator family.
    :param inputs: Problem sizes.
    :return: Shot count (not rounded).
    """
    method = ComplexityMethod(method)
    p = inputs
    if method is ComplexityMethod.HADAMARD:
        return hadamard_cost_model(p.n_H, p.norm_2, p.N_c, p.N_q, p.epsilon)
    if method is ComplexityMethod.SHADOW:
        return 68.0 * p.N_q * 3.0 ** p.n_qubit * p.norm_1 ** 2 * math.log(4.0 * p.N_c / p.delta) / p.epsilon ** 2
    log_term = math.log(2.0) + p.n_qubit * math.log(2.0) + math.log(p.n_histograms) - math.log(p.delta)
    return p.n_histograms * 2.25 * p.m * p.norm_1 ** 2 / p.epsilon ** 2 * log_term
