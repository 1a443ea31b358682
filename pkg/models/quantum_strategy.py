from __future__ import annotations

from dataclasses import dataclass

import numpy as np

import config
from errors import InvalidInputError
from models.behavior import Behavior, mix_behaviors
from models.ensemble import MixedEnsemble, QuantumEnsemble, behavior_from_quantum
from models.operators import Povm
from models.scenario import Scenario


@dataclass(frozen=True, eq=False)
class QuantumStrategy:
    """
    Shared-randomness quantum strategy: one (p(lambda), states, measurements) per branch.

    Branches may use different Hilbert-space dimensions but must share the
    prior over Alice's input and the (l, k) measurement layout.
    """

    branches: tuple[tuple[float, QuantumEnsemble, tuple[Povm, ...]], ...]

    def __post_init__(self) -> None:
        branches = tuple((float(w), e, tuple(m)) for w, e, m in self.branches)
        MixedEnsemble(tuple((w, e) for w, e, _ in branches))
        layout = (len(branches[0][2]), branches[0][2][0].outcomes)
        for _, ensemble, measurements in branches:
            if (len(measurements), measurements[0].outcomes) != layout:
                raise InvalidInputError("all branches must use the same (l, k) measurement layout")
            if any(m.dim != ensemble.dim for m in measurements):
                raise InvalidInputError("branch measurements must match the branch state dimension")
        object.__setattr__(self, "branches", branches)

    @classmethod
    def single(cls, ensemble: QuantumEnsemble, measurements: tuple[Povm, ...]) -> QuantumStrategy:
        return cls(((1.0, ensemble, tuple(measurements)),))

    @property
    def scenario(self) -> Scenario:
        _, ensemble, measurements = self.branches[0]
        return Scenario(n=ensemble.n, l=len(measurements), k=measurements[0].outcomes, prior=ensemble.prior)

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for w, _, _ in self.branches])

    def mixed_ensemble(self) -> MixedEnsemble:
        return MixedEnsemble(tuple((w, e) for w, e, _ in self.branches))

    def behavior(self) -> Behavior:
        scenario = self.scenario
        parts = [behavior_from_quantum(e, m, scenario) for _, e, m in self.branches]
        weights = self.weights
        if abs(weights.sum() - 1.0) > config.PROBABILITY_TOL:
            raise InvalidInputError("branch weights must sum to 1")
        return mix_behaviors(list(weights), parts)
