from __future__ import annotations

import itertools
import logging
import math
from typing import Sequence

import numpy as np

import config
from errors import InvalidInputError
from models.behavior import Behavior
from models.post_processing import PostProcessing
from models.scenario import InfoBudget, Scenario
from models.witness import Witness
from solvers.lp import LpProblem, LpSolution, solve_lp

logger = logging.getLogger(__name__)


def setting_guessing(p: Behavior) -> np.ndarray:
    """sum_b max_x p_X(x) p(b|x,y) for every setting y."""
    weighted = p.scenario.prior_array[:, None, None] * p.table
    return weighted.max(axis=0).sum(axis=1)


def di_min_info(p: Behavior) -> float:
    """
    Theory-independent lower bound on the information behind a behavior.

    The best relabelling b' of Bob's output for each setting is deterministic
    (b' = argmax_x p_X(x) p(b|x,y)), so the bound has the closed form
    H_min(X) + log2(max_y sum_b max_x p_X(x) p(b|x,y)).
    """
    h = p.scenario.hmin
    value = h + math.log2(float(setting_guessing(p).max()))
    return min(max(value, 0.0), h)


def di_min_info_bruteforce(p: Behavior) -> float:
    """Same bound by exhausting every deterministic post-processing b' = g(y, b)."""
    n, l, k = p.scenario.shape
    prior = p.scenario.prior_array
    best = 0.0
    for y in range(l):
        for guesses in itertools.product(range(n), repeat=k):
            table = np.tile(np.asarray(guesses), (l, 1))
            processing = PostProcessing.deterministic(table, n)
            best = max(best, float(processing.guessing_per_setting(prior, p.table)[y]))
    h = p.scenario.hmin
    return min(max(h + math.log2(best), 0.0), h)


def _witness_lp(w: Witness, cap: float) -> LpSolution:
    n, l, k = w.scenario.shape
    prior = w.scenario.prior_array
    num_p = n * l * k
    num_t = l * k

    def p_index(x: int, y: int, b: int) -> int:
        return (x * l + y) * k + b

    def t_index(y: int, b: int) -> int:
        return num_p + y * k + b

    rows, senses, rhs = [], [], []
    for x in range(n):
        for y in range(l):
            row = np.zeros(num_p + num_t)
            row[[p_index(x, y, b) for b in range(k)]] = 1.0
            rows.append(row)
            senses.append("=")
            rhs.append(1.0)
    for x in range(n):
        for y in range(l):
            for b in range(k):
                row = np.zeros(num_p + num_t)
                row[p_index(x, y, b)] = prior[x]
                row[t_index(y, b)] = -1.0
                rows.append(row)
                senses.append("<=")
                rhs.append(0.0)
    for y in range(l):
        row = np.zeros(num_p + num_t)
        row[[t_index(y, b) for b in range(k)]] = 1.0
        rows.append(row)
        senses.append("<=")
        rhs.append(cap)

    objective = np.concatenate([w.coefficients.reshape(-1), np.zeros(num_t)])
    upper = np.concatenate([np.ones(num_p), np.full(num_t, np.inf)])
    problem = LpProblem(objective, np.array(rows), np.array(rhs), tuple(senses), upper=upper, maximize=True)
    return solve_lp(problem)


def di_max_witness(w: Witness, budget: InfoBudget) -> float:
    """
    Largest witness value any theory reaches with information at most alpha.

    Each setting y only has to keep sum_b max_x p_X(x) p(b|x,y) below cap;
    the auxiliary t_yb carry the inner maxima.
    """
    solution = _witness_lp(w, budget.cap)
    if not solution.optimal:
        raise InvalidInputError(f"theory-independent witness LP at cap {budget.cap!r} is {solution.status.value}")
    return float(solution.value)


def di_optimal_behavior(w: Witness, budget: InfoBudget) -> Behavior:
    solution = _witness_lp(w, budget.cap)
    if not solution.optimal:
        raise InvalidInputError(f"theory-independent witness LP at cap {budget.cap!r} is {solution.status.value}")
    n, l, k = w.scenario.shape
    table = np.clip(solution.primal[: n * l * k].reshape(n, l, k), 0.0, 1.0)
    table /= table.sum(axis=2, keepdims=True)
    return Behavior(w.scenario, table)


def di_curve(w: Witness, alphas: Sequence[float]) -> list[tuple[float, float]]:
    """(alpha, ceiling) pairs for plotting against the classical and quantum curves."""
    return [(float(a), di_max_witness(w, InfoBudget.from_alpha(w.scenario, a))) for a in alphas]


def di_info_curve(
    w: Witness,
    values: Sequence[float],
    tol: float = config.DI_BISECTION_TOL,
    max_iter: int = config.DI_BISECTION_MAX_ITER,
) -> list[tuple[float, float]]:
    """
    Least information needed for each target witness value.

    Args:
        w (Witness): Witness whose values are targeted.
        values (Sequence[float]): Target values, each at most the unrestricted maximum.
        tol (float): Bisection tolerance in bits.
        max_iter (int): Iteration cap of each bisection.

    Returns:
        list[tuple[float, float]]: (value, alpha_min) pairs in input order.

    Raises:
        InvalidInputError: When a value exceeds the unrestricted maximum.
    """
    scenario: Scenario = w.scenario

    def ceiling_at(alpha: float) -> float:
        return di_max_witness(w, InfoBudget.from_alpha(scenario, alpha))

    top = scenario.hmin
    unrestricted = ceiling_at(top)
    floor_value = ceiling_at(0.0)
    results = []
    for value in values:
        value = float(value)
        if value > unrestricted + config.FACET_TOL:
            raise InvalidInputError(f"value {value!r} exceeds the unrestricted maximum {unrestricted!r}")
        if value <= floor_value + config.FACET_TOL:
            results.append((value, 0.0))
            continue
        lo, hi = 0.0, top
        for _ in range(max_iter):
            if hi - lo <= tol:
                break
            mid = 0.5 * (lo + hi)
            if ceiling_at(mid) >= value - config.FACET_TOL:
                hi = mid
            else:
                lo = mid
        results.append((value, hi))
    logger.info("theory-independent information curve: %d points", len(results))
    return results
