import numpy as np
import pytest

from canoe_lab.estimators.histograms import (
    BatchPlan,
    ExactHistogram,
    Histogram,
    estimate_alpha,
    exact_joint_distributions,
    exact_reference_histogram,
    sample_histogram,
    sample_joint_histograms,
)
from canoe_lab.estimators.interfaces.histogram_interface import HistogramKind, IHistogram
from canoe_lab.exceptions import ContractViolationError
from canoe_lab.operators.pauli import Determinant
from canoe_lab.simulation.sparse_state import RestrictedSpace, SparseState


def d(text: str) -> Determinant:
    return Determinant.from_string(text)


def test_histogram_bookkeeping():
    hist = Histogram({d("0"): 3}, 5, HistogramKind.JOINT_REAL, minus_branch=2)
    assert hist.frequency(d("0")) == 0.6
    assert hist.frequency(d("1")) == 0.0
    assert isinstance(hist, IHistogram)
    with pytest.raises(ContractViolationError):
        Histogram({d("0"): 3}, 4, HistogramKind.REFERENCE)
    with pytest.raises(ContractViolationError):
        Histogram({d("0"): 3}, 4, HistogramKind.REFERENCE, minus_branch=1)


def test_batch_plan_partition():
    dets = [Determinant(b, 3) for b in range(5)]
    plan = BatchPlan.from_classical(dets, 2)
    assert [len(b) for b in plan.batches] == [2, 2, 1]
    assert plan.covers(dets)
    assert plan.batch_of(dets[4]) == 2
    assert plan.beta(dets[0], 0) == pytest.approx(1 / np.sqrt(2))
    assert plan.beta(dets[0], 1) == 0.0
    assert plan.beta(dets[4], 2) == 1.0
    assert plan.batch_state(1).norm() == pytest.approx(1.0)


def test_batch_size_clamped_to_classical_count():
    dets = [Determinant(b, 2) for b in range(3)]
    plan = BatchPlan.from_classical(dets, 5000)
    assert plan.batch_size == 3
    assert plan.n_batches == 1


def test_batch_plan_rejects_overlaps():
    with pytest.raises(ContractViolationError):
        BatchPlan(2, ((d("00"), d("01")), (d("01"),)))
    with pytest.raises(ContractViolationError):
        BatchPlan(1, ((d("00"), d("01")),))


def test_joint_distribution_examples():
    phi = SparseState.from_determinant(d("0"))
    j_r, j_i = exact_joint_distributions(phi, phi)
    assert j_r.frequency(d("0")) == pytest.approx(1.0)
    assert j_r.minus_branch == pytest.approx(0.0)
    assert j_i.frequency(d("0")) == pytest.approx(0.5)
    assert j_i.minus_branch == pytest.approx(0.5)


def test_joint_distributions_normalised(make_state, rng):
    space = RestrictedSpace.full(3)
    phi, chi = make_state(space, rng), make_state(space, rng)
    for hist in exact_joint_distributions(phi, chi):
        assert sum(hist.frequencies().values()) + hist.minus_branch == pytest.approx(1.0)


def test_sampled_histograms_add_up(make_state, rng):
    space = RestrictedSpace.full(3)
    phi = make_state(space, rng)
    chi = BatchPlan.from_classical(space.dets[:4], 4).batch_state(0)
    j_r, j_i = sample_joint_histograms(phi, chi, 1000, seed=7)
    for hist in (j_r, j_i):
        assert sum(hist.counts.values()) + hist.minus_branch == 1000
    p_q = sample_histogram(phi, 1000, seed=7)
    assert sum(p_q.counts.values()) == 1000
    with pytest.raises(ContractViolationError):
        sample_histogram(phi, 0)


def test_unnormalised_state_rejected():
    with pytest.raises(ContractViolationError):
        exact_reference_histogram(SparseState({d("0"): 2.0}, 1))


def test_exact_histograms_recover_amplitudes(make_state, rng):
    space = RestrictedSpace.full(3)
    phi = make_state(space, rng)
    plan = BatchPlan.from_classical(space.dets[:7], 3)
    p_q = exact_reference_histogram(phi)
    for k in range(plan.n_batches):
        j_r, j_i = exact_joint_distributions(phi, plan.batch_state(k))
        alpha = estimate_alpha(p_q, j_r, j_i, plan, k)
        for det, value in alpha.items():
            assert value == pytest.approx(phi.amplitude(det), abs=1e-12)


def test_amplitude_of_unsupported_determinant_is_zero():
    phi = SparseState.from_determinant(d("01"))
    plan = BatchPlan.from_classical([d("01"), d("10")], 2)
    j_r, j_i = exact_joint_distributions(phi, plan.batch_state(0))
    alpha = estimate_alpha(exact_reference_histogram(phi), j_r, j_i, plan, 0)
    assert alpha[d("10")] == pytest.approx(0.0, abs=1e-12)
    assert alpha[d("01")] == pytest.approx(1.0, abs=1e-12)


def test_histogram_roles_checked():
    phi = SparseState.from_determinant(d("0"))
    plan = BatchPlan.from_classical([d("0")], 1)
    j_r, j_i = exact_joint_distributions(phi, plan.batch_state(0))
    p_q = exact_reference_histogram(phi)
    with pytest.raises(ContractViolationError):
        estimate_alpha(p_q, j_i, j_r, plan, 0)
    with pytest.raises(ContractViolationError):
        estimate_alpha(p_q, j_r, j_i, plan, 1)


def test_exact_histogram_reports_zero_shots():
    hist = ExactHistogram({d("0"): 1.0}, HistogramKind.REFERENCE)
    assert hist.shots == 0
    assert hist.is_exact
