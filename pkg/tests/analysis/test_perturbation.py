import numpy as np
import pytest
import scipy.linalg

from canoe_lab.analysis.perturbation import perturbative_energy_error


def random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (a + a.conj().T) / 2


@pytest.fixture
def pencil(rng):
    n = 10
    m = rng.normal(size=(n, n))
    H = random_hermitian(rng, n)
    S = m @ m.T / n + np.eye(n)
    evals, evecs = scipy.linalg.eigh(H, S)
    return H, S, evals, evecs[:, 0]


def test_no_perturbation_no_shift(pencil):
    H, S, evals, v0 = pencil
    estimate = perturbative_energy_error(np.zeros_like(H), np.zeros_like(S), evals[0], v0)
    assert estimate.shift == 0.0
    assert estimate.perturbation_size == 0.0


def test_overlap_shaped_shift_is_exact(pencil):
    H, S, evals, v0 = pencil
    assert perturbative_energy_error(0.3 * S, np.zeros_like(S), evals[0], v0).shift == pytest.approx(0.3)


@pytest.mark.parametrize("eps", [1e-4, 1e-6])
def test_random_perturbation_matches_dense_resolve(pencil, rng, eps):
    H, S, evals, v0 = pencil
    dH = eps * random_hermitian(rng, len(H))
    dS = eps * random_hermitian(rng, len(S)).real
    actual = scipy.linalg.eigh(H + dH, S + dS, eigvals_only=True)[0] - evals[0]
    estimate = perturbative_energy_error(dH, dS, evals[0], v0, gap=evals[1] - evals[0])
    assert abs(estimate.shift - actual) <= 1e4 * eps ** 2
    assert estimate.valid
