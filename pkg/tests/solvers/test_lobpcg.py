import numpy as np
import pytest
import scipy.linalg

from canoe_lab.exceptions import ContractViolationError, IndefiniteOverlapError
from canoe_lab.solvers.lobpcg import lobpcg
from canoe_lab.solvers.schur import schur_complement, schur_inverse_operator
from canoe_lab.subspace.blocks import pair_from_dense


def test_diagonal_pencil():
    result = lobpcg(np.diag([1.0, 2.0, 3.0]), np.eye(3), None, np.ones(3), tol=1e-10)
    assert result.converged
    assert result.value == pytest.approx(1.0, abs=1e-12)
    assert abs(result.vector[0]) == pytest.approx(1.0, abs=1e-8)


def test_random_generalized_pencil(rng):
    n = 20
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    a = (a + a.conj().T) / 2
    m = rng.normal(size=(n, n))
    b = m @ m.T / n + np.eye(n)
    expected = scipy.linalg.eigh(a, b, eigvals_only=True)[0]
    result = lobpcg(a, b, None, rng.normal(size=n), tol=1e-9, maxiter=500)
    assert result.converged
    assert result.value == pytest.approx(expected, abs=1e-8)
    assert np.vdot(result.vector, b @ result.vector).real == pytest.approx(1.0)


def test_exact_overlap_preconditioner_converges_fast(rng):
    # B^-1 A = I - B^-1 v v^dagger has one eigenvalue apart from 1, at the B^-1 v direction
    n = 10
    m = rng.normal(size=(n, n))
    b = m @ m.T / n + np.eye(n)
    v = rng.normal(size=n)
    a = b - np.outer(v, v)
    expected = scipy.linalg.eigh(a, b, eigvals_only=True)[0]
    x0 = rng.normal(size=n)
    preconditioned = lobpcg(a, b, np.linalg.inv(b), x0, tol=1e-9)
    plain = lobpcg(a, b, None, x0, tol=1e-9)
    assert preconditioned.converged and plain.converged
    assert preconditioned.iterations <= 3
    assert preconditioned.iterations <= plain.iterations
    assert preconditioned.value == pytest.approx(expected, abs=1e-9)


def test_unconverged_result_is_flagged():
    result = lobpcg(np.diag(np.arange(1.0, 41.0)), np.eye(40), None, np.ones(40), tol=1e-14, maxiter=2)
    assert not result.converged
    assert result.iterations == 2


def test_indefinite_start_rejected():
    with pytest.raises(IndefiniteOverlapError):
        lobpcg(np.eye(2), np.diag([-1.0, 1.0]), None, np.array([1.0, 0.0]))


def test_shape_mismatch():
    with pytest.raises(ContractViolationError):
        lobpcg(np.eye(3), np.eye(3), None, np.ones(2))


def test_schur_of_orthogonal_sectors():
    s = np.eye(4)
    s[2:, 2:] = np.diag([2.0, 1.0])
    spectrum = schur_complement(pair_from_dense(np.eye(4), s, 2))
    np.testing.assert_allclose(spectrum.eigvals, [2.0, 1.0])
    np.testing.assert_allclose(spectrum.pseudo_inverse(1e-10), np.diag([0.5, 1.0]), atol=1e-14)
    assert list(spectrum.retained(1.5)) == [0]


def test_duplicated_classical_state_has_zero_schur_direction():
    s = np.eye(3, dtype=complex)
    s[0, 2] = s[2, 0] = 1.0
    spectrum = schur_complement(pair_from_dense(np.eye(3), s, 2))
    assert spectrum.eigvals[0] == pytest.approx(0.0, abs=1e-15)
    assert len(spectrum.retained(1e-10)) == 0


def test_schur_inverse_operator_inverts_overlap(rng):
    n_c, n_q = 4, 3
    u = 0.3 * (rng.normal(size=(n_c, n_q)) + 1j * rng.normal(size=(n_c, n_q)))
    w = rng.normal(size=(n_q, n_q))
    m = u.conj().T @ u + w @ w.T + np.eye(n_q)
    s = np.block([[np.eye(n_c), u], [u.conj().T, m]])
    spectrum = schur_complement(pair_from_dense(np.zeros_like(s), s, n_c))
    op = schur_inverse_operator(u, spectrum.pseudo_inverse(0.0))
    np.testing.assert_allclose(op.matmat(np.eye(n_c + n_q)), np.linalg.inv(s), atol=1e-10)
    with pytest.raises(ContractViolationError):
        schur_inverse_operator(u, np.eye(2))
