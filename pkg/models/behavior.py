from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

import config
from errors import InvalidInputError, UnsupportedScenarioError
from models.scenario import Scenario


@dataclass(frozen=True, eq=False)
class Behavior:
    """
    Conditional distribution p(b|x,y) stored as a read-only (x, y, b) tensor.

    Entries must lie in [0, 1] and every (x, y) slice must sum to one within
    `config.STATE_TOL`; inputs outside tolerance are rejected, never
    renormalised.
    """

    scenario: Scenario
    table: np.ndarray

    def __post_init__(self) -> None:
        table = np.array(self.table, dtype=float)
        if table.shape != self.scenario.shape:
            raise InvalidInputError(
                f"behavior table has shape {table.shape}, scenario expects {self.scenario.shape}"
            )
        if not np.all(np.isfinite(table)):
            raise InvalidInputError("behavior table contains non-finite entries")
        tol = config.STATE_TOL
        if table.min() < -tol or table.max() > 1.0 + tol:
            raise InvalidInputError("behavior entries must lie in [0, 1]")
        sums = table.sum(axis=2)
        worst = float(np.abs(sums - 1.0).max())
        if worst > tol:
            raise InvalidInputError(f"behavior is not normalised (worst deviation {worst:.3e})")
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    def probability(self, b: int, x: int, y: int) -> float:
        return float(self.table[x, y, b])

    def flat(self) -> np.ndarray:
        return self.table.reshape(-1)

    def key(self, step: float = config.QUANTIZATION_STEP) -> tuple[int, ...]:
        """Quantized table used for exact deduplication and canonical ordering."""
        return tuple(np.rint(self.flat() / step).astype(np.int64).tolist())

    def allclose(self, other: Behavior, atol: float = 1e-9) -> bool:
        return self.scenario.shape == other.scenario.shape and bool(
            np.allclose(self.table, other.table, atol=atol, rtol=0.0)
        )


def correlator(p: Behavior, x: int, y: int) -> float:
    """
    Correlator E_xy = p(0|x,y) - p(1|x,y) of a binary-outcome behavior.

    Raises:
        UnsupportedScenarioError: When the scenario does not have k = 2.
    """
    if p.scenario.k != 2:
        raise UnsupportedScenarioError(f"correlators need k = 2, scenario has k = {p.scenario.k}")
    return float(p.table[x, y, 0] - p.table[x, y, 1])


def correlators(p: Behavior) -> np.ndarray:
    if p.scenario.k != 2:
        raise UnsupportedScenarioError(f"correlators need k = 2, scenario has k = {p.scenario.k}")
    return p.table[:, :, 0] - p.table[:, :, 1]


def deterministic_behavior(scenario: Scenario, outputs: np.ndarray) -> Behavior:
    """Behavior with p(b|x,y) = 1 iff b = outputs[x, y]."""
    outputs = np.asarray(outputs, dtype=int)
    table = np.zeros(scenario.shape)
    xs, ys = np.indices(outputs.shape)
    table[xs, ys, outputs] = 1.0
    return Behavior(scenario, table)


def uniform_behavior(scenario: Scenario) -> Behavior:
    return Behavior(scenario, np.full(scenario.shape, 1.0 / scenario.k))


def mix_behaviors(weights: Sequence[float], behaviors: Sequence[Behavior]) -> Behavior:
    if len(weights) != len(behaviors) or not behaviors:
        raise InvalidInputError("need one weight per behavior")
    scenario = behaviors[0].scenario
    if any(b.scenario.shape != scenario.shape for b in behaviors):
        raise InvalidInputError("cannot mix behaviors of different scenarios")
    w = np.asarray(weights, dtype=float)
    if np.any(w < -config.PROBABILITY_TOL) or abs(w.sum() - 1.0) > config.STATE_TOL:
        raise InvalidInputError("mixing weights must form a probability vector")
    table = np.tensordot(w, np.stack([b.table for b in behaviors]), axes=1)
    return Behavior(scenario, np.clip(table, 0.0, 1.0))
