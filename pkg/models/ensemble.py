from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

import config
from errors import InvalidInputError
from models.behavior import Behavior
from models.operators import HermitianOperator, Povm, check_density_matrix
from models.scenario import Scenario, _as_prior


@dataclass(frozen=True, eq=False)
class QuantumEnsemble:
    """Prior-weighted message states {p_X(x), rho_x}, all of one dimension."""

    prior: tuple[float, ...]
    states: tuple[HermitianOperator, ...]

    def __post_init__(self) -> None:
        prior = _as_prior(self.prior)
        states = tuple(
            s if isinstance(s, HermitianOperator) else HermitianOperator(s) for s in self.states
        )
        if len(states) != prior.size:
            raise InvalidInputError(
                f"ensemble has {len(states)} states for a prior of length {prior.size}"
            )
        dim = states[0].dim
        for index, state in enumerate(states):
            if state.dim != dim:
                raise InvalidInputError(f"state {index} has dimension {state.dim}, expected {dim}")
            try:
                check_density_matrix(state)
            except InvalidInputError as exc:
                raise InvalidInputError(f"state {index}: {exc}") from exc
        object.__setattr__(self, "prior", tuple(float(p) for p in prior))
        object.__setattr__(self, "states", states)

    @classmethod
    def from_matrices(cls, prior: Sequence[float], matrices: Sequence[np.ndarray]) -> QuantumEnsemble:
        return cls(tuple(prior), tuple(HermitianOperator(m) for m in matrices))

    @property
    def n(self) -> int:
        return len(self.states)

    @property
    def dim(self) -> int:
        return self.states[0].dim

    @property
    def prior_array(self) -> np.ndarray:
        return np.asarray(self.prior, dtype=float)

    def matrices(self) -> list[np.ndarray]:
        return [s.entries for s in self.states]

    def weighted(self) -> list[np.ndarray]:
        """The operators p_X(x) rho_x bounding the dual guessing SDP."""
        return [p * s.entries for p, s in zip(self.prior, self.states)]


@dataclass(frozen=True, eq=False)
class MixedEnsemble:
    """Shared-randomness mixture of ensembles {p(lambda), E_lambda} over one prior."""

    branches: tuple[tuple[float, QuantumEnsemble], ...]

    def __post_init__(self) -> None:
        branches = tuple((float(w), e) for w, e in self.branches)
        if not branches:
            raise InvalidInputError("a mixed ensemble needs at least one branch")
        weights = np.array([w for w, _ in branches])
        if np.any(weights < 0.0) or abs(weights.sum() - 1.0) > config.PROBABILITY_TOL:
            raise InvalidInputError("branch weights must form a probability vector")
        prior = np.asarray(branches[0][1].prior)
        for _, ensemble in branches[1:]:
            if ensemble.n != prior.size or np.abs(np.asarray(ensemble.prior) - prior).max() > config.PROBABILITY_TOL:
                raise InvalidInputError("all branches must share the same prior over x")
        object.__setattr__(self, "branches", branches)

    @property
    def prior(self) -> tuple[float, ...]:
        return self.branches[0][1].prior


def behavior_from_quantum(
    ensemble: QuantumEnsemble,
    measurements: Sequence[Povm],
    scenario: Scenario | None = None,
) -> Behavior:
    """
    Born-rule correlations p(b|x,y) = Tr(rho_x M_{b|y}).

    Args:
        ensemble (QuantumEnsemble): Alice's prepared states and prior.
        measurements (Sequence[Povm]): One POVM per Bob setting y.
        scenario (Scenario | None): Frame for the result; inferred when omitted.

    Returns:
        Behavior: Table indexed (x, y, b).
    """
    if not measurements:
        raise InvalidInputError("need at least one measurement")
    k = measurements[0].outcomes
    for y, povm in enumerate(measurements):
        if povm.dim != ensemble.dim:
            raise InvalidInputError(
                f"measurement {y} acts on dimension {povm.dim}, states have dimension {ensemble.dim}"
            )
        if povm.outcomes != k:
            raise InvalidInputError(f"measurement {y} has {povm.outcomes} outcomes, expected {k}")
    if scenario is None:
        scenario = Scenario(n=ensemble.n, l=len(measurements), k=k, prior=ensemble.prior)
    elif scenario.shape != (ensemble.n, len(measurements), k):
        raise InvalidInputError(f"scenario {scenario.shape} does not match the strategy")

    rhos = np.stack(ensemble.matrices())
    effects = np.stack([np.stack(m.matrices()) for m in measurements])
    # Tr(rho_x M_{b|y}) = sum_ij rho_x[i, j] M_{b|y}[j, i]
    table = np.einsum("xij,ybji->xyb", rhos, effects).real
    return Behavior(scenario, np.clip(table, 0.0, 1.0))
