from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

import config
from bounds.quantum import info_of_mixed, optimal_binary_measurements, optimal_states
from errors import ConvergenceError, InvalidInputError, UnsupportedScenarioError
from models.ensemble import QuantumEnsemble
from models.operators import Povm, constant_povm, maximally_mixed
from models.quantum_strategy import QuantumStrategy
from models.scenario import InfoBudget, Scenario
from models.witness import Witness, witness_value
from solvers.sdp import SdpDiscriminationProblem, solve_guessing_sdp

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SeesawResult:
    """Best feasible point found: witness value, strategy and its information in bits."""

    value: float
    strategy: QuantumStrategy
    info: float
    metadata: dict[str, Any] = field(default_factory=dict)


@dataclass
class _Candidate:
    factors: np.ndarray
    povms: tuple[Povm, ...]
    value: float
    guessing: float
    objective: float


class SeesawSearch:
    """
    Penalised alternating search for the quantum witness value at information alpha.

    Each iterate keeps unnormalised factors L_x with rho_x = L_x L_x^dag / Tr(.).
    The measurement half-step is exact; the state half-step tries the exact
    top-eigenvector update and a (1+1) evolution-strategy perturbation, and
    keeps whichever improves F - penalty * |I - alpha|.
    """

    def __init__(
        self,
        scenario: Scenario,
        witness: Witness,
        alpha: float,
        dim: int = 2,
        rank: int | None = None,
        penalty: float = config.SEESAW_PENALTY,
        max_iterations: int = config.SEESAW_MAX_ITERATIONS,
        patience: int = config.SEESAW_PATIENCE,
        seed: int = config.SEED,
    ):
        if witness.scenario.shape != scenario.shape:
            raise InvalidInputError(f"witness shape {witness.scenario.shape} does not match {scenario.shape}")
        if scenario.k != 2:
            raise UnsupportedScenarioError("the seesaw measurement step needs k = 2")
        if not 1 <= dim <= config.SEESAW_MAX_DIM:
            raise InvalidInputError(f"dimension must lie in [1, {config.SEESAW_MAX_DIM}], got {dim}")
        self.scenario = scenario
        self.witness = witness
        self.budget = InfoBudget.from_alpha(scenario, alpha)
        self.dim = dim
        self.rank = dim if rank is None else max(1, min(int(rank), dim))
        self.penalty = penalty
        self.max_iterations = max_iterations
        self.patience = patience
        self.seed = seed

    def _states(self, factors: np.ndarray) -> list[np.ndarray]:
        rhos = factors @ factors.conj().transpose(0, 2, 1)
        return [r / np.trace(r).real for r in rhos]

    def _evaluate(self, factors: np.ndarray) -> _Candidate | None:
        states = self._states(factors)
        povms, value = optimal_binary_measurements(states, self.witness)
        try:
            ensemble = QuantumEnsemble.from_matrices(self.scenario.prior, states)
            guessing = solve_guessing_sdp(SdpDiscriminationProblem(ensemble)).value
        except (ConvergenceError, InvalidInputError) as exc:
            logger.debug("seesaw candidate rejected: %s", exc)
            return None
        info = self.scenario.hmin + math.log2(guessing)
        objective = value - self.penalty * abs(info - self.budget.alpha)
        return _Candidate(factors, povms, value, guessing, objective)

    @staticmethod
    def _normalise(factors: np.ndarray) -> np.ndarray:
        norms = np.linalg.norm(factors, axis=(1, 2), keepdims=True)
        return factors / norms

    def _from_states(self, states: list[np.ndarray]) -> np.ndarray:
        factors = np.zeros((len(states), self.dim, self.rank), dtype=complex)
        for x, rho in enumerate(states):
            values, vectors = np.linalg.eigh(rho)
            factors[x, :, 0] = vectors[:, -1] * math.sqrt(max(values[-1], 0.0))
        return self._normalise(factors + 1e-9)

    def run_restart(self, index: int) -> tuple[_Candidate | None, int]:
        rng = np.random.default_rng([self.seed, index])
        shape = (self.scenario.n, self.dim, self.rank)
        factors = self._normalise(rng.normal(size=shape) + 1j * rng.normal(size=shape))
        best = self._evaluate(factors)
        if best is None:
            return None, 0
        step = config.SEESAW_INITIAL_STEP
        stale = 0
        iteration = 0
        for iteration in range(1, self.max_iterations + 1):
            improved = False
            if iteration % 10 == 1:
                states, _ = optimal_states(best.povms, self.witness)
                candidate = self._evaluate(self._from_states(states))
                if candidate is not None and candidate.objective > best.objective + 1e-12:
                    best, improved = candidate, True

            noise = rng.normal(size=shape) + 1j * rng.normal(size=shape)
            candidate = self._evaluate(self._normalise(best.factors + step * noise / math.sqrt(2 * self.dim * self.rank)))
            if candidate is not None and candidate.objective > best.objective + 1e-12:
                best, improved = candidate, True
                step *= config.SEESAW_STEP_UP
            else:
                step *= config.SEESAW_STEP_DOWN

            stale = 0 if improved else stale + 1
            if step < config.SEESAW_MIN_STEP or stale >= self.patience:
                break
        logger.debug(
            "restart %d: F=%.6f I=%.6f objective %.6f after %d iterations",
            index, best.value, self.scenario.hmin + math.log2(best.guessing), best.objective, iteration,
        )
        return best, iteration

    def feasible_strategy(self, best: _Candidate) -> tuple[QuantumStrategy, float]:
        """
        Mix the branch with a zero-information branch until the guessing probability equals cap.

        Returns:
            tuple[QuantumStrategy, float]: The strategy and the weight of the optimised branch.
        """
        states = self._states(best.factors)
        ensemble = QuantumEnsemble.from_matrices(self.scenario.prior, states)
        cap, floor = self.budget.cap, self.scenario.max_prior
        if best.guessing <= cap or best.guessing - floor <= config.PROBABILITY_TOL:
            return QuantumStrategy.single(ensemble, best.povms), 1.0
        q = (cap - floor) / (best.guessing - floor)
        _, outputs = self.witness.no_signal_max()
        silent = QuantumEnsemble.from_matrices(self.scenario.prior, [maximally_mixed(self.dim)] * self.scenario.n)
        silent_povms = tuple(constant_povm(self.dim, self.scenario.k, int(b)) for b in outputs)
        return QuantumStrategy(((q, ensemble, best.povms), (1.0 - q, silent, silent_povms))), q


def _run_restart(search: SeesawSearch, index: int) -> tuple[_Candidate | None, int]:
    return search.run_restart(index)


def seesaw_max_witness(
    scenario: Scenario,
    w: Witness,
    alpha: float,
    dim: int = 2,
    restarts: int = config.SEESAW_RESTARTS,
    penalty: float = config.SEESAW_PENALTY,
    seed: int = config.SEED,
    rank: int | None = None,
    max_iterations: int = config.SEESAW_MAX_ITERATIONS,
    workers: int = 1,
) -> SeesawResult:
    """
    Lower bound on the quantum witness value at information alpha by restarted seesaw.

    Args:
        scenario (Scenario): Frame of the witness; k must be 2.
        w (Witness): Witness to maximise.
        alpha (float): Information budget in bits.
        dim (int): Hilbert-space dimension of the messages (at most 8).
        restarts (int): Independent random starts; the best one is kept.
        penalty (float): Weight of |I - alpha| in the search objective.
        seed (int): Base seed; restart r draws from default_rng([seed, r]).
        rank (int | None): Rank of the state factors (dim when omitted).
        max_iterations (int): Iteration cap per restart.
        workers (int): Processes used to run restarts.

    Returns:
        SeesawResult: The value and information of a feasible strategy.
    """
    if restarts < 1:
        raise InvalidInputError("need at least one restart")
    search = SeesawSearch(scenario, w, alpha, dim, rank, penalty, max_iterations, seed=seed)
    if workers > 1 and restarts > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_restart, [search] * restarts, range(restarts)))
    else:
        outcomes = [search.run_restart(r) for r in range(restarts)]

    best_index, best = -1, None
    for index, (candidate, _) in enumerate(outcomes):
        if candidate is None:
            continue
        strategy, _ = search.feasible_strategy(candidate)
        value = witness_value(w, strategy.behavior())
        if best is None or value > best[0] + 1e-12:
            best_index, best = index, (value, candidate, strategy)
    if best is None:
        raise ConvergenceError("no seesaw restart produced a valid strategy")

    _, candidate, strategy = best
    strategy, weight = search.feasible_strategy(candidate)
    value = witness_value(w, strategy.behavior())
    info = info_of_mixed(strategy.mixed_ensemble())
    logger.info(
        "seesaw alpha=%.6f dim=%d: F=%.9f at I=%.9f (restart %d of %d)",
        alpha, dim, value, info, best_index, restarts,
    )
    metadata = {
        "restarts": restarts,
        "best_restart": best_index,
        "iterations": [iterations for _, iterations in outcomes],
        "branch_value": candidate.value,
        "branch_guessing": candidate.guessing,
        "penalized_objective": candidate.objective,
        "mixing_weight": weight,
        "dim": dim,
        "seed": seed,
    }
    return SeesawResult(value=value, strategy=strategy, info=info, metadata=metadata)
