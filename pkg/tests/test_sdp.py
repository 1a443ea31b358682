import numpy as np
import pytest

from errors import InvalidInputError
from models.ensemble import QuantumEnsemble
from models.operators import ket, maximally_mixed, projector, random_density_matrix, random_pure_state
from solvers.sdp import SdpDiscriminationProblem, guessing_probability, hermitian_basis, solve_guessing_sdp


def _helstrom(rho, sigma, p=0.5):
    return 0.5 * (1.0 + np.abs(np.linalg.eigvalsh(p * rho - (1.0 - p) * sigma)).sum())


def test_basis_is_orthonormal():
    basis = hermitian_basis(3)
    gram = np.einsum("aij,bji->ab", basis, basis).real
    np.testing.assert_allclose(gram, np.eye(9), atol=1e-12)


def test_orthogonal_pair():
    ensemble = QuantumEnsemble.from_matrices([0.5, 0.5], [projector(ket(2, 0)), projector(ket(2, 1))])
    assert guessing_probability(ensemble) == pytest.approx(1.0, abs=1e-6)


def test_identical_states_give_largest_prior(rng):
    rho = random_density_matrix(3, rng)
    ensemble = QuantumEnsemble.from_matrices([0.5, 0.3, 0.2], [rho] * 3)
    assert guessing_probability(ensemble) == pytest.approx(0.5, abs=1e-6)


def test_pure_pair_with_known_overlap():
    c = 0.6
    psi = np.array([1.0, 0.0])
    phi = np.array([c, np.sqrt(1 - c**2)])
    ensemble = QuantumEnsemble.from_matrices([0.5, 0.5], [projector(psi), projector(phi)])
    assert guessing_probability(ensemble) == pytest.approx(0.5 + 0.5 * np.sqrt(1 - c**2), abs=1e-5)


def test_helstrom_oracle_on_random_pairs():
    rng = np.random.default_rng(7)
    for trial in range(200):
        if trial % 2:
            rho, sigma = random_pure_state(2, rng), random_pure_state(2, rng)
        else:
            rho, sigma = random_density_matrix(2, rng), random_density_matrix(2, rng)
        p = float(rng.uniform(0.2, 0.8))
        ensemble = QuantumEnsemble.from_matrices([p, 1.0 - p], [rho, sigma])
        assert guessing_probability(ensemble) == pytest.approx(_helstrom(rho, sigma, p), abs=1e-5)


def _real_state(rng, rank):
    factor = rng.normal(size=(2, rank))
    rho = factor @ factor.T
    return rho / np.trace(rho)


def _best_projective_on_grid(prior, states, step=1e-4):
    thetas = np.arange(0.0, np.pi, step)
    first = np.stack([np.cos(thetas), np.sin(thetas)], axis=1)
    second = np.stack([-np.sin(thetas), np.cos(thetas)], axis=1)
    weighted = np.asarray(prior)[:, None, None] * np.asarray(states)
    scores = [np.einsum("ti,xij,tj->xt", v, weighted, v).max(axis=0) for v in (first, second)]
    return float((scores[0] + scores[1]).max())


@pytest.mark.parametrize("seed", range(5))
def test_real_qubit_pairs_match_projective_grid(seed):
    rng = np.random.default_rng(seed)
    states = [_real_state(rng, rank=1 + (seed % 2)), _real_state(rng, rank=1)]
    p = float(rng.uniform(0.2, 0.8))
    ensemble = QuantumEnsemble.from_matrices([p, 1.0 - p], states)
    assert guessing_probability(ensemble) == pytest.approx(_best_projective_on_grid([p, 1.0 - p], states), abs=1e-6)


@pytest.mark.parametrize("n", [3, 4])
def test_real_qubit_ensembles_dominate_projective_grid(n):
    rng = np.random.default_rng(11 * n)
    states = [_real_state(rng, rank=int(rng.integers(1, 3))) for _ in range(n)]
    prior = rng.dirichlet(np.ones(n)).tolist()
    ensemble = QuantumEnsemble.from_matrices(prior, states)
    assert guessing_probability(ensemble) >= _best_projective_on_grid(prior, states) - 1e-6


def test_mixing_toward_a_common_state_never_helps():
    rng = np.random.default_rng(3)
    for trial in range(10):
        d = 2 + trial % 2
        states = [random_density_matrix(d, rng, rank=1 + trial % d) for _ in range(3)]
        prior = [0.5, 0.3, 0.2]
        sigma = random_density_matrix(d, rng)
        previous = guessing_probability(QuantumEnsemble.from_matrices(prior, states))
        for mu in (0.75, 0.5, 0.25, 0.0):
            mixed = [mu * rho + (1.0 - mu) * sigma for rho in states]
            value = guessing_probability(QuantumEnsemble.from_matrices(prior, mixed))
            assert value <= previous + 1e-6
            previous = value
        assert previous == pytest.approx(0.5, abs=1e-6)


def test_certificates_sandwich_the_value(rng):
    states = [random_density_matrix(3, rng, rank=2) for _ in range(4)]
    ensemble = QuantumEnsemble.from_matrices([0.1, 0.2, 0.3, 0.4], states)
    solution = solve_guessing_sdp(SdpDiscriminationProblem(ensemble))

    assert solution.lower <= solution.value <= solution.upper
    assert solution.gap <= 1e-6
    effects = solution.povm.matrices()
    np.testing.assert_allclose(sum(effects), np.eye(3), atol=1e-9)
    for effect in effects:
        assert np.linalg.eigvalsh(effect).min() >= -1e-9
    y = solution.certificate.entries
    for weighted in ensemble.weighted():
        assert np.linalg.eigvalsh(y - weighted).min() >= -1e-7


def test_maximally_mixed_ensemble():
    ensemble = QuantumEnsemble.from_matrices([0.25] * 4, [maximally_mixed(4)] * 4)
    assert guessing_probability(ensemble) == pytest.approx(0.25, abs=1e-6)


def test_dimension_limit():
    ensemble = QuantumEnsemble.from_matrices([1.0], [maximally_mixed(17)])
    with pytest.raises(InvalidInputError):
        SdpDiscriminationProblem(ensemble)
