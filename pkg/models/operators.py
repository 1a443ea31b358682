from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

import config
from errors import InvalidInputError

SIGMA_I = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Dense d x d complex matrix equal to its conjugate transpose."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        entries = np.array(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or entries.shape[0] < 1:
            raise InvalidInputError(f"operator must be a square matrix, got shape {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise InvalidInputError("operator contains non-finite entries")
        if np.abs(entries - entries.conj().T).max() > config.HERMITIAN_TOL:
            raise InvalidInputError("operator is not Hermitian")
        # symmetrise sub-tolerance noise
        entries = 0.5 * (entries + entries.conj().T)
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def eigvalsh(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def is_psd(self, tol: float = config.STATE_TOL) -> bool:
        return bool(self.eigvalsh().min() >= -tol)


def as_matrix(operator: HermitianOperator | np.ndarray) -> np.ndarray:
    if isinstance(operator, HermitianOperator):
        return operator.entries
    return np.asarray(operator, dtype=complex)


def expectation(state: HermitianOperator | np.ndarray, effect: HermitianOperator | np.ndarray) -> float:
    """Tr(rho M) for Hermitian arguments (real by construction)."""
    return float(np.real(np.vdot(as_matrix(state).conj().T, as_matrix(effect))))


@dataclass(frozen=True, eq=False)
class Povm:
    """Positive operator-valued measure: PSD effects summing to the identity."""

    effects: tuple[HermitianOperator, ...]

    def __post_init__(self) -> None:
        effects = tuple(
            e if isinstance(e, HermitianOperator) else HermitianOperator(e) for e in self.effects
        )
        if not effects:
            raise InvalidInputError("a POVM needs at least one effect")
        dim = effects[0].dim
        if any(e.dim != dim for e in effects):
            raise InvalidInputError("POVM effects have mismatched dimensions")
        for index, effect in enumerate(effects):
            if not effect.is_psd(config.STATE_TOL):
                raise InvalidInputError(f"POVM effect {index} is not positive semidefinite")
        total = sum(e.entries for e in effects)
        if np.abs(total - np.eye(dim)).max() > config.STATE_TOL:
            raise InvalidInputError("POVM effects do not sum to the identity")
        object.__setattr__(self, "effects", effects)

    @property
    def dim(self) -> int:
        return self.effects[0].dim

    @property
    def outcomes(self) -> int:
        return len(self.effects)

    def matrices(self) -> list[np.ndarray]:
        return [e.entries for e in self.effects]


def ket(dim: int, index: int) -> np.ndarray:
    vector = np.zeros(dim, dtype=complex)
    vector[index] = 1.0
    return vector


def projector(vector: Sequence[complex]) -> np.ndarray:
    vector = np.asarray(vector, dtype=complex)
    vector = vector / np.linalg.norm(vector)
    return np.outer(vector, vector.conj())


def density_matrix(entries: np.ndarray) -> HermitianOperator:
    """Validated density matrix (PSD, unit trace)."""
    rho = HermitianOperator(entries)
    check_density_matrix(rho)
    return rho


def check_density_matrix(rho: HermitianOperator) -> None:
    if rho.eigvalsh().min() < -config.STATE_TOL:
        raise InvalidInputError("state is not positive semidefinite")
    if abs(rho.trace() - 1.0) > config.STATE_TOL:
        raise InvalidInputError(f"state has trace {rho.trace()!r}, expected 1")


def maximally_mixed(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex) / dim


def observable_to_povm(observable: np.ndarray) -> Povm:
    """
    Two-outcome POVM from a +-1 valued observable.

    Outcome 0 is the projector onto the +1 eigenspace, outcome 1 onto the -1
    eigenspace; zero eigenvalues would be ambiguous and are rejected.
    """
    matrix = np.asarray(observable, dtype=complex)
    values, vectors = np.linalg.eigh(0.5 * (matrix + matrix.conj().T))
    if np.any(np.abs(np.abs(values) - 1.0) > 1e-9):
        raise InvalidInputError("observable must have eigenvalues +1 and -1 only")
    positive = vectors[:, values > 0]
    plus = positive @ positive.conj().T
    minus = np.eye(matrix.shape[0]) - plus
    return Povm((HermitianOperator(plus), HermitianOperator(minus)))


def constant_povm(dim: int, outcomes: int, output: int) -> Povm:
    """Measurement that ignores the state and always returns `output`."""
    effects = [np.zeros((dim, dim), dtype=complex) for _ in range(outcomes)]
    effects[output] = np.eye(dim, dtype=complex)
    return Povm(tuple(HermitianOperator(e) for e in effects))


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random density matrix from a complex Ginibre factor of the given rank."""
    rank = dim if rank is None else rank
    factor = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = factor @ factor.conj().T
    return rho / np.trace(rho).real


def random_pure_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    return random_density_matrix(dim, rng, rank=1)


def random_povm(dim: int, outcomes: int, rng: np.random.Generator) -> Povm:
    """Random POVM S^{-1/2} G_i S^{-1/2} built from random PSD seeds G_i."""
    seeds = [random_density_matrix(dim, rng) for _ in range(outcomes)]
    total = sum(seeds)
    root = scipy.linalg.inv(scipy.linalg.sqrtm(total))
    effects = [root @ g @ root.conj().T for g in seeds]
    effects = [0.5 * (e + e.conj().T) for e in effects]
    # Push the residual of the numerical inverse square root into the last effect.
    effects[-1] = effects[-1] + (np.eye(dim) - sum(effects))
    return Povm(tuple(HermitianOperator(e) for e in effects))


def partial_trace(matrix: np.ndarray, dims: tuple[int, int], keep: int) -> np.ndarray:
    """Partial trace of a bipartite operator; `keep` is 0 (first factor) or 1."""
    d_a, d_b = dims
    tensor = np.asarray(matrix).reshape(d_a, d_b, d_a, d_b)
    if keep == 0:
        return np.trace(tensor, axis1=1, axis2=3)
    return np.trace(tensor, axis1=0, axis2=2)
