"""
Computational-basis histograms of the histogram-based overlap protocol: the
reference histogram p_q of a quantum state and the joint real/imaginary
interference histograms J_R, J_I against a batch state chi_k.

Outcome distributions are computed exactly from sparse amplitudes and then
sampled multinomially.
"""

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from canoe_lab.estimators.interfaces.histogram_interface import HistogramKind, IHistogram
from canoe_lab.exceptions import ContractViolationError
from canoe_lab.operators.pauli import Determinant
from canoe_lab.simulation.sparse_state import SparseState

DEFAULT_BATCH_SIZE = 5000
NORMALIZATION_TOL = 1e-10

SeedLike = Union[None, int, np.random.SeedSequence, np.random.Generator]


def make_rng(seed: SeedLike) -> np.random.Generator:
    return np.random.default_rng(seed)


def _check_normalized(state: SparseState, name: str) -> None:
    if abs(state.norm() - 1.0) > NORMALIZATION_TOL:
        raise ContractViolationError(f"{name} must be normalised, has norm {state.norm():.12g}")


# *****************************************************************************
@dataclass(frozen=True)
class Histogram:
    # *****************************************************************************
    """
    Sampled histogram. For joint histograms only the + ancilla branch is kept
    per determinant; the - branch is tallied in ``minus_branch`` so that
    ``sum(counts) + minus_branch == shots``.
    """
    counts: Mapping[Determinant, int]
    shots: int
    kind: HistogramKind
    minus_branch: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "counts", MappingProxyType(dict(self.counts)))
        if any(c < 0 for c in self.counts.values()) or self.minus_branch < 0:
            raise ContractViolationError("histogram counts must be nonnegative")
        if sum(self.counts.values()) + self.minus_branch != self.shots:
            raise ContractViolationError("histogram counts do not add up to the shot count")
        if self.kind is HistogramKind.REFERENCE and self.minus_branch:
            raise ContractViolationError("reference histograms have no ancilla branch")

    @property
    def is_exact(self) -> bool:
        return False

    def frequency(self, det: Determinant) -> float:
        return self.counts.get(det, 0) / self.shots

    def frequencies(self) -> Mapping[Determinant, float]:
        return {det: c / self.shots for det, c in self.counts.items()}


# *****************************************************************************
@dataclass(frozen=True)
class ExactHistogram:
    # *****************************************************************************
    """
    Infinite-shot histogram carrying exact outcome probabilities.
    """
    probabilities: Mapping[Determinant, float]
    kind: HistogramKind
    minus_branch: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "probabilities", MappingProxyType(dict(self.probabilities)))

    @property
    def shots(self) -> int:
        return 0

    @property
    def is_exact(self) -> bool:
        return True

    def frequency(self, det: Determinant) -> float:
        return self.probabilities.get(det, 0.0)

    def frequencies(self) -> Mapping[Determinant, float]:
        return self.probabilities


# *****************************************************************************
@dataclass(frozen=True)
class BatchPlan:
    # *****************************************************************************
    """
    Partition of the classical determinants into batches S_k of size m; the last
    batch may be shorter and uses its own size in chi_k, so beta_s = 1/sqrt(|S_k|).
    """
    batch_size: int
    batches: Tuple[Tuple[Determinant, ...], ...]
    _batch_of: Dict[Determinant, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "batches", tuple(tuple(b) for b in self.batches))
        if self.batch_size < 1:
            raise ContractViolationError(f"batch size must be >= 1, got {self.batch_size}")
        lookup: Dict[Determinant, int] = {}
        for k, batch in enumerate(self.batches):
            if not batch or len(batch) > self.batch_size:
                raise ContractViolationError(f"batch {k} has size {len(batch)}, limit {self.batch_size}")
            for det in batch:
                if det in lookup:
                    raise ContractViolationError(f"{det} appears in more than one batch")
                lookup[det] = k
        object.__setattr__(self, "_batch_of", lookup)

    @classmethod
    def from_classical(cls, classical: Sequence[Determinant], batch_size: int = DEFAULT_BATCH_SIZE) -> "BatchPlan":
        """
        Consecutive batches of the ranked classical list; m is clamped to N_c.
        """
        if batch_size < 1:
            raise ContractViolationError(f"batch size must be >= 1, got {batch_size}")
        m = max(1, min(batch_size, len(classical)))
        batches = [tuple(classical[i:i + m]) for i in range(0, len(classical), m)]
        return cls(m, tuple(batches))

    @property
    def n_batches(self) -> int:
        return len(self.batches)

    def covers(self, classical: Sequence[Determinant]) -> bool:
        return set(classical) == set(self._batch_of)

    def batch_of(self, det: Determinant) -> Optional[int]:
        return self._batch_of.get(det)

    def beta(self, det: Determinant, k: int) -> float:
        if self._batch_of.get(det) != k:
            return 0.0
        return 1.0 / np.sqrt(len(self.batches[k]))

    def batch_state(self, k: int) -> SparseState:
        """
        chi_k = (1/sqrt(m_k)) sum_{s in S_k} |s>
        """
        batch = self.batches[k]
        amp = 1.0 / np.sqrt(len(batch))
        return SparseState({det: amp for det in batch}, batch[0].n_qubit)


def sample_histogram(state: SparseState, shots: int, seed: SeedLike = None) -> Histogram:
    """
    Computational-basis measurement histogram of a normalised state.
    :param state: The state, p(s) = |a_s|^2.
    :param shots: Number of measurements, >= 1.
    :param seed: Seed or generator.
    :return: Reference histogram.
    """
    if shots < 1:
        raise ContractViolationError(f"shots must be >= 1, got {shots}")
    _check_normalized(state, "state")
    rng = make_rng(seed)
    support = state.support
    probs = np.array([abs(state.amplitude(d)) ** 2 for d in support])
    counts = rng.multinomial(shots, probs / probs.sum())
    return Histogram({d: int(c) for d, c in zip(support, counts) if c}, shots, HistogramKind.REFERENCE)


def exact_reference_histogram(state: SparseState) -> ExactHistogram:
    _check_normalized(state, "state")
    return ExactHistogram({d: abs(a) ** 2 for d, a in state.items()}, HistogramKind.REFERENCE)


def _joint_distribution(phi: SparseState, chi: SparseState, phase: complex) -> Tuple[List[Determinant], np.ndarray, float]:
    """
    + branch probabilities 1/4 |a_s + phase b_s|^2 and the total - branch weight.
    """
    support = sorted(set(phi.amplitudes) | set(chi.amplitudes))
    a = np.array([phi.amplitude(d) for d in support])
    b = np.array([chi.amplitude(d) for d in support])
    plus = 0.25 * np.abs(a + phase * b) ** 2
    minus = float(np.sum(0.25 * np.abs(a - phase * b) ** 2))
    return support, plus, minus


def exact_joint_distributions(phi: SparseState, chi: SparseState) -> Tuple[ExactHistogram, ExactHistogram]:
    """
    Exact J_R(s) = 1/4 |a_s + b_s|^2 and J_I(s) = 1/4 |a_s + i b_s|^2.
    """
    _check_normalized(phi, "phi")
    _check_normalized(chi, "chi")
    out = []
    for phase, kind in ((1.0, HistogramKind.JOINT_REAL), (1.0j, HistogramKind.JOINT_IMAG)):
        support, plus, minus = _joint_distribution(phi, chi, phase)
        out.append(ExactHistogram(dict(zip(support, plus.tolist())), kind, minus))
    return out[0], out[1]


def sample_joint_histograms(
    phi: SparseState,
    chi: SparseState,
    shots: int,
    seed: SeedLike = None,
) -> Tuple[Histogram, Histogram]:
    """
    Sample the ancilla-assisted interference histograms over the joint
    {+, -} x {s} outcome space and keep the + branch per determinant.
    :param phi: Normalised quantum state.
    :param chi: Normalised batch state.
    :param shots: Measurements per histogram.
    :param seed: Seed or generator; J_R is drawn before J_I.
    :return: (J_R, J_I)
    """
    if shots < 1:
        raise ContractViolationError(f"shots must be >= 1, got {shots}")
    _check_normalized(phi, "phi")
    _check_normalized(chi, "chi")
    rng = make_rng(seed)
    out = []
    for phase, kind in ((1.0, HistogramKind.JOINT_REAL), (1.0j, HistogramKind.JOINT_IMAG)):
        support, plus, minus = _joint_distribution(phi, chi, phase)
        probs = np.append(plus, minus)
        draws = rng.multinomial(shots, probs / probs.sum())
        counts = {d: int(c) for d, c in zip(support, draws[:-1]) if c}
        out.append(Histogram(counts, shots, kind, minus_branch=int(draws[-1])))
    return out[0], out[1]


def estimate_alpha(
    p_q: IHistogram,
    J_R: IHistogram,
    J_I: IHistogram,
    plan: BatchPlan,
    k: int,
) -> Dict[Determinant, complex]:
    """
    Amplitude estimates for the determinants of batch k,

        a_s = sqrt(m) [p_R - (p_q + 1/m)/2] + i sqrt(m) [p_I - (p_q + 1/m)/2]

    with p_R = 2 J_R, p_I = 2 J_I and m the size of batch k.
    """
    if p_q.kind is not HistogramKind.REFERENCE or J_R.kind is not HistogramKind.JOINT_REAL \
            or J_I.kind is not HistogramKind.JOINT_IMAG:
        raise ContractViolationError("histograms passed in the wrong roles")
    if not 0 <= k < plan.n_batches:
        raise ContractViolationError(f"batch index {k} outside [0, {plan.n_batches})")
    m = len(plan.batches[k])
    root_m = np.sqrt(m)
    alpha: Dict[Determinant, complex] = {}
    for det in plan.batches[k]:
        baseline = 0.5 * (p_q.frequency(det) + 1.0 / m)
        p_r = 2.0 * J_R.frequency(det)
        p_i = 2.0 * J_I.frequency(det)
        alpha[det] = complex(root_m * (p_r - baseline), root_m * (p_i - baseline))
    return alpha
