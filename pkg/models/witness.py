from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

import config
from errors import InvalidInputError, UnsupportedScenarioError
from models.behavior import Behavior
from models.scenario import Scenario


@dataclass(frozen=True)
class LinearBound:
    """Witness bound beta = slope * P_g + intercept, P_g the guessing-probability cap."""

    slope: float
    intercept: float

    def __call__(self, cap: float) -> float:
        return self.slope * cap + self.intercept


@dataclass(frozen=True, eq=False)
class Witness:
    """Linear functional sum_{x,y,b} r_xyb p(b|x,y) with an optional cap-dependent bound."""

    scenario: Scenario
    coefficients: np.ndarray
    bound_fn: Callable[[float], float] | None = None
    name: str = "witness"

    def __post_init__(self) -> None:
        coefficients = np.array(self.coefficients, dtype=float)
        if coefficients.shape != self.scenario.shape:
            raise InvalidInputError(
                f"witness coefficients have shape {coefficients.shape}, scenario expects {self.scenario.shape}"
            )
        if not np.all(np.isfinite(coefficients)):
            raise InvalidInputError("witness coefficients must be finite")
        coefficients.setflags(write=False)
        object.__setattr__(self, "coefficients", coefficients)

    @classmethod
    def from_correlators(
        cls,
        scenario: Scenario,
        t: Sequence[Sequence[float]],
        bound_fn: Callable[[float], float] | None = None,
        name: str = "witness",
    ) -> Witness:
        """Witness sum_xy t_xy E_xy, i.e. r_xy0 = t_xy and r_xy1 = -t_xy."""
        if scenario.k != 2:
            raise UnsupportedScenarioError("correlator witnesses need k = 2")
        t = np.asarray(t, dtype=float)
        if t.shape != (scenario.n, scenario.l):
            raise InvalidInputError(f"correlator table has shape {t.shape}, expected {(scenario.n, scenario.l)}")
        return cls(scenario, np.stack([t, -t], axis=2), bound_fn=bound_fn, name=name)

    def bound(self, cap: float) -> float:
        if self.bound_fn is None:
            raise InvalidInputError(f"{self.name} carries no bound function")
        return float(self.bound_fn(cap))

    def values_of(self, tables: np.ndarray) -> np.ndarray:
        """Witness value of each (x, y, b) table stacked along the first axis."""
        return np.tensordot(tables, self.coefficients, axes=3)

    def no_signal_max(self) -> tuple[float, np.ndarray]:
        """Best value over x-independent deterministic outputs, with the output per y."""
        per_output = self.coefficients.sum(axis=0)
        outputs = per_output.argmax(axis=1)
        return float(per_output.max(axis=1).sum()), outputs


def witness_value(w: Witness, p: Behavior) -> float:
    """
    Evaluate sum_{x,y,b} r_xyb p(b|x,y).

    Raises:
        InvalidInputError: When witness and behavior shapes differ.
    """
    if w.coefficients.shape != p.table.shape:
        raise InvalidInputError(
            f"witness shape {w.coefficients.shape} does not match behavior shape {p.table.shape}"
        )
    return float(np.sum(w.coefficients * p.table))


def f1_witness(scenario: Scenario | None = None) -> Witness:
    """F1 = -E11 - E12 - E21 + E22 + E31 with classical bound 6 P_g - 1."""
    scenario = scenario or Scenario.uniform(3, 2, 2)
    return Witness.from_correlators(scenario, config.F1_CORRELATORS, LinearBound(6.0, -1.0), name="F1")


def f2_witness(scenario: Scenario | None = None) -> Witness:
    """F2 = -E11 - E12 - E21 + E22 + 2 E31 with classical bound 12 P_g - 4."""
    scenario = scenario or Scenario.uniform(3, 2, 2)
    return Witness.from_correlators(scenario, config.F2_CORRELATORS, LinearBound(12.0, -4.0), name="F2")
