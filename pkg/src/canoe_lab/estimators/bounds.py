"""
Closed-form shot bounds of the overlap estimators.
"""

import math

from canoe_lab.exceptions import ContractViolationError


def hadamard_cost_model(n_H: int, norm_2: float, N_c: int, N_q: int, epsilon: float) -> float:
    """
    Hadamard-test shots for every cq element of H to precision epsilon,
    2 N_c N_q n_H ||H||_2^2 / epsilon^2.
    """
    if not epsilon > 0:
        raise ContractViolationError(f"epsilon must be positive, got {epsilon}")
    return 2.0 * N_c * N_q * n_H * norm_2 ** 2 / epsilon ** 2


def hoeffding_epsilon(n_qubit: int, N_q: int, n_batches: int, shots: int, delta: float) -> float:
    """
    Uniform histogram deviation holding with probability 1 - delta over all
    2^n outcomes of the N_q (1 + 2B) histograms,

        sqrt(ln(2 2^n N_q (1 + 2B) / delta) / (2 shots))
    """
    if shots < 1:
        raise ContractViolationError(f"shots must be >= 1, got {shots}")
    if not 0 < delta < 1:
        raise ContractViolationError(f"delta must lie in (0, 1), got {delta}")
    log_count = math.log(2.0) + n_qubit * math.log(2.0) + math.log(N_q * (1 + 2 * n_batches))
    return math.sqrt((log_count - math.log(delta)) / (2.0 * shots))


def amplitude_error_bound(m: int, epsilon: float) -> float:
    """
    |a_hat - a| when p_q, p_R = 2 J_R and p_I = 2 J_I are all within epsilon:
    each of the real and imaginary parts is off by at most (3/2) sqrt(m) epsilon.
    """
    return 1.5 * math.sqrt(m) * epsilon * math.sqrt(2.0)
