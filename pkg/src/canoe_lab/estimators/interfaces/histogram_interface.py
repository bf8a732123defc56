"""
Interface shared by sampled and exact computational-basis histograms.
"""

from enum import Enum
from typing import Mapping, Protocol, runtime_checkable

from canoe_lab.operators.pauli import Determinant


# *****************************************************************************
class HistogramKind(Enum):
    REFERENCE = "p_q"
    JOINT_REAL = "J_R"
    JOINT_IMAG = "J_I"
# *****************************************************************************


@runtime_checkable
# *****************************************************************************
class IHistogram(Protocol):
    # *****************************************************************************
    """
    A distribution over determinants that the amplitude estimator reads
    through ``frequency``. Joint histograms only expose the + ancilla branch.
    """
    kind: HistogramKind

    @property
    def shots(self) -> int:
        """
        Number of measurements; 0 for the infinite-shot limit.
        """
        ...

    @property
    def is_exact(self) -> bool:
        ...

    def frequency(self, det: Determinant) -> float:
        """
        Empirical (or exact) probability of observing ``det``.
        :param det: The determinant.
        :return: Value in [0, 1].
        """
        ...

    def frequencies(self) -> Mapping[Determinant, float]:
        ...
