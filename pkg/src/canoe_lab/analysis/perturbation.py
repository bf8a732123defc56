"""
First-order energy shift of the hybrid pencil under (dH, dS).
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class PerturbativeEstimate:
    shift: float
    perturbation_size: float
    gap: Optional[float] = None

    @property
    def valid(self) -> Optional[bool]:
        """
        ||dH||_2 + |E0| ||dS||_2 below the generalized gap; None when no gap was given.
        """
        if self.gap is None:
            return None
        return self.perturbation_size < self.gap


def perturbative_energy_error(
    dH: np.ndarray,
    dS: np.ndarray,
    E0: float,
    v0: np.ndarray,
    gap: Optional[float] = None,
) -> PerturbativeEstimate:
    """
    dE = v0^dagger (dH - E0 dS) v0 for an S-normalised ground vector v0.
    :param dH: Hamiltonian perturbation.
    :param dS: Overlap perturbation.
    :param E0: Unperturbed lowest eigenvalue.
    :param v0: Unperturbed eigenvector, v0^dagger S v0 = 1.
    :param gap: Optional generalized gap for the validity indicator.
    :return: The shift and validity bookkeeping.
    """
    dH = np.asarray(dH, dtype=complex)
    dS = np.asarray(dS, dtype=complex)
    shift = float(np.real(np.vdot(v0, (dH - E0 * dS) @ v0)))
    size = float(np.linalg.norm(dH, 2) + abs(E0) * np.linalg.norm(dS, 2))
    return PerturbativeEstimate(shift, size, gap)
