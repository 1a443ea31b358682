from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

import config
from errors import InvalidInputError


def _as_prior(prior: Sequence[float]) -> np.ndarray:
    values = np.asarray(prior, dtype=float)
    if values.ndim != 1 or values.size == 0:
        raise InvalidInputError("prior must be a non-empty probability vector")
    if not np.all(np.isfinite(values)) or np.any(values < 0.0):
        raise InvalidInputError("prior entries must be finite and non-negative")
    if abs(values.sum() - 1.0) > config.PROBABILITY_TOL:
        raise InvalidInputError(f"prior sums to {values.sum()!r}, expected 1")
    return values


def hmin(prior: Sequence[float]) -> float:
    """
    Min-entropy of a random variable in bits.

    Args:
        prior (Sequence[float]): Probability vector p_X.

    Returns:
        float: -log2(max_x p_X(x)).
    """
    values = _as_prior(prior)
    return -math.log2(float(values.max()))


def hmin_conditional(guessing: float) -> float:
    """Conditional min-entropy -log2(P_g) for a guessing probability."""
    if not 0.0 < guessing <= 1.0 + config.VALUE_ACCURACY:
        raise InvalidInputError(f"guessing probability {guessing!r} outside (0, 1]")
    return -math.log2(min(1.0, guessing))


@dataclass(frozen=True)
class Scenario:
    """
    Prepare-and-measure frame: Alice's n inputs, Bob's l settings and k outcomes.

    The prior is stored as a tuple so instances stay hashable and immutable.
    """

    n: int
    l: int
    k: int
    prior: tuple[float, ...]

    def __post_init__(self) -> None:
        for name in ("n", "l", "k"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise InvalidInputError(f"{name} must be a positive integer, got {value!r}")
        values = _as_prior(self.prior)
        if values.size != self.n:
            raise InvalidInputError(f"prior has {values.size} entries, scenario has n={self.n}")
        object.__setattr__(self, "prior", tuple(float(v) for v in values))

    @classmethod
    def uniform(cls, n: int, l: int, k: int) -> Scenario:
        return cls(n=n, l=l, k=k, prior=tuple([1.0 / n] * n))

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.n, self.l, self.k

    @property
    def prior_array(self) -> np.ndarray:
        return np.asarray(self.prior, dtype=float)

    @property
    def max_prior(self) -> float:
        return max(self.prior)

    @property
    def hmin(self) -> float:
        return hmin(self.prior)


@dataclass(frozen=True)
class InfoBudget:
    """
    Information bound alpha together with its guessing-probability ceiling.

    `cap` is 2^(alpha - H_min(X)) = 2^alpha * max_x p_X(x), clamped to 1, so
    alpha = 0 maps to the no-communication value max_x p_X(x).
    """

    alpha: float
    cap: float
    max_prior: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.alpha) or self.alpha < 0.0:
            raise InvalidInputError(f"alpha must be >= 0 bits, got {self.alpha!r}")
        if not self.max_prior - config.PROBABILITY_TOL <= self.cap <= 1.0 + config.PROBABILITY_TOL:
            raise InvalidInputError(
                f"cap {self.cap!r} outside [{self.max_prior!r}, 1]"
            )

    @classmethod
    def from_alpha(cls, scenario: Scenario, alpha: float) -> InfoBudget:
        alpha = float(alpha)
        if not math.isfinite(alpha) or alpha < 0.0:
            raise InvalidInputError(f"alpha must be >= 0 bits, got {alpha!r}")
        cap = min(1.0, 2.0**alpha * scenario.max_prior)
        return cls(alpha=alpha, cap=cap, max_prior=scenario.max_prior)

    @classmethod
    def from_cap(cls, scenario: Scenario, cap: float) -> InfoBudget:
        cap = float(cap)
        if not scenario.max_prior - config.PROBABILITY_TOL <= cap <= 1.0 + config.PROBABILITY_TOL:
            raise InvalidInputError(
                f"cap {cap!r} outside [{scenario.max_prior!r}, 1]"
            )
        cap = min(1.0, max(cap, scenario.max_prior))
        alpha = max(0.0, scenario.hmin + math.log2(cap))
        return cls(alpha=alpha, cap=cap, max_prior=scenario.max_prior)


def info_budget(scenario: Scenario, alpha: float) -> InfoBudget:
    return InfoBudget.from_alpha(scenario, alpha)


def info_budget_from_cap(scenario: Scenario, cap: float) -> InfoBudget:
    return InfoBudget.from_cap(scenario, cap)
