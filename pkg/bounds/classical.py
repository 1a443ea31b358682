from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

import config
from errors import CapacityError, InvalidInputError
from models.behavior import Behavior, deterministic_behavior
from models.scenario import InfoBudget, Scenario
from models.strategy import DeterministicStrategy, Vertex
from models.witness import Witness
from solvers.lp import LpProblem, solve_lp

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Deterministic strategies
# ---------------------------------------------------------------------------


def strategy_count(scenario: Scenario) -> int:
    """n^n encodings times k^(n*l) decoders (message dimension d = n)."""
    n, l, k = scenario.shape
    return n**n * k ** (n * l)


def _check_budget(scenario: Scenario, budget: int) -> int:
    required = strategy_count(scenario)
    if required > budget:
        raise CapacityError(required, budget)
    return required


def _digits(indices: np.ndarray, base: int, width: int) -> np.ndarray:
    """Mixed-radix digits of `indices`, most significant first, shape (len, width)."""
    powers = base ** np.arange(width - 1, -1, -1, dtype=np.int64)
    return (np.asarray(indices, dtype=np.int64)[:, None] // powers[None, :]) % base


def strategy_from_index(scenario: Scenario, index: int) -> DeterministicStrategy:
    """
    Decode an enumeration index into its strategy.

    The index is `encoding_index * k^(d*l) + decoder_index`; the encoding
    digits run over x in base n and the decoder digits over (m, y) in base k,
    both most significant first, which is the order `enumerate_strategies`
    yields them in.
    """
    n, l, k = scenario.shape
    total = strategy_count(scenario)
    if not 0 <= index < total:
        raise InvalidInputError(f"strategy index {index} outside [0, {total})")
    decoders = k ** (n * l)
    encoding_index, decoder_index = divmod(int(index), decoders)
    encoding = _digits(np.array([encoding_index]), n, n)[0]
    decoding = _digits(np.array([decoder_index]), k, n * l)[0].reshape(n, l)
    return DeterministicStrategy(tuple(encoding), tuple(map(tuple, decoding)), k)


def enumerate_strategies(
    scenario: Scenario, budget: int = config.ENUMERATION_BUDGET
) -> Iterator[DeterministicStrategy]:
    """
    Yield every deterministic strategy with d = n exactly once.

    Raises:
        CapacityError: When n^n * k^(n*l) exceeds `budget`.
    """
    _check_budget(scenario, budget)
    n, l, k = scenario.shape
    rows = list(itertools.product(range(k), repeat=l))
    for encoding in itertools.product(range(n), repeat=n):
        for decoding in itertools.product(rows, repeat=n):
            yield DeterministicStrategy(encoding, decoding, k)


def strategy_outputs(s: DeterministicStrategy) -> np.ndarray:
    decoding = np.asarray(s.decoding, dtype=int)
    return decoding[np.asarray(s.encoding, dtype=int)]


def strategy_behavior(s: DeterministicStrategy, scenario: Scenario) -> Behavior:
    if (s.n, s.l, s.k) != scenario.shape:
        raise InvalidInputError(f"strategy shape {(s.n, s.l, s.k)} does not match scenario {scenario.shape}")
    return deterministic_behavior(scenario, strategy_outputs(s))


def _encoding_cost(encoding: Sequence[int], prior: np.ndarray, d: int) -> float:
    best = np.zeros(d)
    np.maximum.at(best, np.asarray(encoding, dtype=int), prior)
    return float(best.sum())


def strategy_guessing(s: DeterministicStrategy, prior: Sequence[float]) -> float:
    """
    Guessing probability sum_m max{p_X(x) : E(x) = m} of a deterministic strategy.

    Args:
        s (DeterministicStrategy): Strategy whose encoding is scored.
        prior (Sequence[float]): Alice's prior p_X.

    Returns:
        float: Optimal success probability of guessing x from the message.
    """
    prior = np.asarray(prior, dtype=float)
    if prior.size != s.n:
        raise InvalidInputError(f"prior has {prior.size} entries, strategy has n={s.n}")
    return _encoding_cost(s.encoding, prior, s.d)


def behavior_row_partition_cost(behavior: Behavior) -> float:
    """
    Minimal guessing cost of a deterministic behavior in closed form.

    Inputs with identical output rows may share a message, so the coarsest
    admissible encoding groups equal rows and costs sum over groups of the
    largest prior.
    """
    table = behavior.table
    if not np.all((np.abs(table) < config.STATE_TOL) | (np.abs(table - 1.0) < config.STATE_TOL)):
        raise InvalidInputError("behavior is not deterministic")
    outputs = table.argmax(axis=2)
    groups: dict[bytes, float] = {}
    for x, p in enumerate(behavior.scenario.prior):
        key = outputs[x].tobytes()
        groups[key] = max(groups.get(key, 0.0), p)
    return float(sum(groups.values()))


def remap_to_n_symbols(s: DeterministicStrategy) -> DeterministicStrategy:
    """
    Equivalent strategy whose messages use only the labels [n].

    Used messages below n keep their label, used messages at or above n move
    to free labels in [n] together with their decoder row. Behavior and
    guessing probability are unchanged.
    """
    n, d = s.n, s.d
    if d == n:
        return s
    decoding = [list(row) for row in s.decoding]
    if d < n:
        decoding.extend(list(decoding[0]) for _ in range(n - d))
        return DeterministicStrategy(s.encoding, tuple(map(tuple, decoding)), s.k)

    used = sorted(set(s.encoding))
    free = iter(sorted(set(range(n)) - {m for m in used if m < n}))
    relabel = {m: (m if m < n else next(free)) for m in used}
    new_rows = [list(decoding[j]) for j in range(n)]
    for old, new in relabel.items():
        new_rows[new] = list(decoding[old])
    encoding = tuple(relabel[m] for m in s.encoding)
    return DeterministicStrategy(encoding, tuple(map(tuple, new_rows)), s.k)


# ---------------------------------------------------------------------------
# Vertex enumeration
# ---------------------------------------------------------------------------


def _best_costs_chunk(shape: tuple[int, int, int], prior: tuple[float, ...], start: int, stop: int) -> np.ndarray:
    """Minimal cost per output table over the encodings with index in [start, stop)."""
    n, l, k = shape
    prior_arr = np.asarray(prior)
    decoders = _digits(np.arange(k ** (n * l)), k, n * l).reshape(-1, n, l)
    weights = k ** np.arange(n * l - 1, -1, -1, dtype=np.int64)
    best = np.full(k ** (n * l), np.inf)
    for encoding in _digits(np.arange(start, stop), n, n):
        outputs = decoders[:, encoding, :].reshape(len(decoders), -1)
        keys = outputs @ weights
        cost = _encoding_cost(encoding, prior_arr, n)
        best[keys] = np.minimum(best[keys], cost)
    return best


@dataclass(frozen=True, eq=False)
class InequalityReport:
    """Validity, tightness and facet status of a claimed witness bound at one cap."""

    cap: float
    value: float
    claimed_bound: float
    valid: bool
    tight: bool
    facet: bool
    saturating: int = 0
    dimension: int = 0

    def to_dict(self) -> dict:
        return {
            "cap": self.cap,
            "value": self.value,
            "bound": self.claimed_bound,
            "valid": self.valid,
            "tight": self.tight,
            "facet": self.facet,
        }


@dataclass(frozen=True, eq=False)
class WitnessBound:
    """Optimal classical witness value and the vertex mixture attaining it."""

    value: float
    cap: float
    mixture: tuple[tuple[float, Vertex], ...] = field(default_factory=tuple)


def affine_rank(points: np.ndarray, tol: float = config.RANK_TOL) -> int:
    """Dimension of the affine hull of the rows of `points` (-1 when empty)."""
    points = np.asarray(points, dtype=float)
    if points.shape[0] == 0:
        return -1
    diffs = points[1:] - points[0]
    if diffs.shape[0] == 0:
        return 0
    singular = np.linalg.svd(diffs, compute_uv=False)
    scale = max(1.0, float(singular.max(initial=0.0)))
    return int(np.sum(singular > tol * scale))


class ClassicalPolytope:
    """
    Deterministic vertices of one scenario plus the information-restricted LPs.

    Vertices are built lazily on first use and reused by every query; the
    restricted candidate points are cached per cap.
    """

    def __init__(self, scenario: Scenario, workers: int = 1, budget: int = config.ENUMERATION_BUDGET):
        self.scenario = scenario
        self.workers = max(1, int(workers))
        self.budget = budget
        self._vertices: list[Vertex] | None = None
        self._tables: np.ndarray | None = None
        self._costs: np.ndarray | None = None
        self._restricted: dict[float, tuple[np.ndarray, np.ndarray, int]] = {}

    # -- vertices ----------------------------------------------------------

    def _best_costs(self) -> np.ndarray:
        scenario = self.scenario
        encodings = scenario.n**scenario.n
        if self.workers == 1 or encodings < 2 * self.workers:
            return _best_costs_chunk(scenario.shape, scenario.prior, 0, encodings)
        bounds = np.linspace(0, encodings, self.workers + 1).astype(int)
        with ProcessPoolExecutor(max_workers=self.workers) as pool:
            futures = [
                pool.submit(_best_costs_chunk, scenario.shape, scenario.prior, int(a), int(b))
                for a, b in zip(bounds[:-1], bounds[1:])
                if b > a
            ]
            parts = [f.result() for f in futures]
        return np.minimum.reduce(parts)

    def _build(self) -> None:
        scenario = self.scenario
        required = _check_budget(scenario, self.budget)
        n, l, k = scenario.shape
        best = self._best_costs()
        keys = np.flatnonzero(np.isfinite(best))
        outputs = _digits(keys, k, n * l).reshape(-1, n, l)
        tables = np.zeros((len(keys), n, l, k))
        v, xs, ys = np.indices(outputs.shape)
        tables[v, xs, ys, outputs] = 1.0
        flat = tables.reshape(len(keys), -1)
        order = np.lexsort(flat.T[::-1])
        self._tables = tables[order]
        self._costs = best[keys][order]
        self._vertices = [Vertex(Behavior(scenario, t), float(c)) for t, c in zip(self._tables, self._costs)]
        logger.info(
            "scenario %s: %d deterministic strategies, %d vertices",
            scenario.shape, required, len(self._vertices),
        )

    @property
    def vertices(self) -> list[Vertex]:
        if self._vertices is None:
            self._build()
        return self._vertices

    @property
    def tables(self) -> np.ndarray:
        if self._tables is None:
            self._build()
        return self._tables

    @property
    def costs(self) -> np.ndarray:
        if self._costs is None:
            self._build()
        return self._costs

    # -- information-restricted polytope ------------------------------------

    def restricted_points(self, budget: InfoBudget) -> tuple[np.ndarray, np.ndarray, int]:
        """
        Candidate vertices of the restricted polytope as (tables, costs, survivors).

        The first `survivors` rows are the vertices with cost <= cap, the rest
        are the mixtures of a cheaper and a costlier vertex with cost exactly cap.
        """
        cap = round(budget.cap, 12)
        if cap in self._restricted:
            return self._restricted[cap]
        tables, costs = self.tables, self.costs
        tol = config.PROBABILITY_TOL
        low = np.flatnonzero(costs <= cap + tol)
        strictly_low = np.flatnonzero(costs < cap - tol)
        high = np.flatnonzero(costs > cap + tol)

        points = [tables[low]]
        point_costs = [costs[low]]
        if strictly_low.size and high.size:
            c1 = costs[strictly_low][:, None]
            c2 = costs[high][None, :]
            q = ((c2 - cap) / (c2 - c1))[:, :, None, None, None]
            mixed = q * tables[strictly_low][:, None] + (1.0 - q) * tables[high][None, :]
            points.append(mixed.reshape((-1,) + tables.shape[1:]))
            point_costs.append(np.full(mixed.shape[0] * mixed.shape[1], float(cap)))
        all_points = np.concatenate(points)
        all_costs = np.concatenate(point_costs)

        quantized = np.rint(all_points.reshape(len(all_points), -1) / config.QUANTIZATION_STEP).astype(np.int64)
        _, first = np.unique(quantized, axis=0, return_index=True)
        first = np.sort(first)
        survivors = int(np.sum(first < low.size))
        result = (all_points[first], all_costs[first], survivors)
        self._restricted[cap] = result
        logger.debug("cap %.6f: %d candidate points (%d surviving vertices)", cap, len(first), survivors)
        return result

    def restricted_vertices(self, budget: InfoBudget) -> list[Behavior]:
        tables, _, _ = self.restricted_points(budget)
        return [Behavior(self.scenario, t) for t in tables]

    def min_info_membership(self, p: Behavior) -> float:
        """
        Least information (bits) any classical strategy needs to produce `p`.

        Raises:
            InvalidInputError: When `p` lies outside the classical polytope.
        """
        if p.scenario.shape != self.scenario.shape:
            raise InvalidInputError(f"behavior shape {p.scenario.shape} does not match {self.scenario.shape}")
        tables, costs = self.tables, self.costs
        n, l, k = self.scenario.shape
        # The last outcome of each (x, y) is fixed by normalisation.
        reduced = tables[:, :, :, : k - 1].reshape(len(tables), -1)
        target = p.table[:, :, : k - 1].reshape(-1)
        matrix = np.vstack([reduced.T, np.ones(len(tables))])
        rhs = np.concatenate([target, [1.0]])
        solution = solve_lp(LpProblem(costs, matrix, rhs, ("=",) * len(rhs)))
        if not solution.optimal:
            raise InvalidInputError("behavior is not reproducible by any classical strategy")
        guessing = min(1.0, max(solution.value, self.scenario.max_prior))
        return self.scenario.hmin + math.log2(guessing)

    def witness_bound(self, witness: Witness, budget: InfoBudget) -> WitnessBound:
        """Maximum of the witness over vertex mixtures whose average cost is at most cap."""
        if witness.scenario.shape != self.scenario.shape:
            raise InvalidInputError(f"witness shape {witness.scenario.shape} does not match {self.scenario.shape}")
        values = witness.values_of(self.tables)
        matrix = np.vstack([self.costs, np.ones(len(values))])
        solution = solve_lp(
            LpProblem(values, matrix, np.array([budget.cap, 1.0]), ("<=", "="), maximize=True)
        )
        if not solution.optimal:
            raise InvalidInputError(f"witness LP at cap {budget.cap!r} is {solution.status.value}")
        weights = solution.primal
        support = np.flatnonzero(weights > 1e-12)
        mixture = tuple((float(weights[i]), self.vertices[i]) for i in support)
        return WitnessBound(float(solution.value), budget.cap, mixture)

    def check_inequality(self, witness: Witness, budget: InfoBudget, claimed_bound: float) -> InequalityReport:
        value = self.witness_bound(witness, budget).value
        valid = value <= claimed_bound + config.FACET_TOL
        tight = valid and abs(value - claimed_bound) <= config.FACET_TOL
        tables, _, _ = self.restricted_points(budget)
        flat = tables.reshape(len(tables), -1)
        dimension = affine_rank(flat)
        saturating = 0
        facet = False
        if tight:
            scores = witness.values_of(tables)
            hits = flat[scores >= claimed_bound - config.FACET_TOL]
            saturating = len(hits)
            facet = dimension > 0 and affine_rank(hits) == dimension - 1
        return InequalityReport(
            cap=budget.cap,
            value=value,
            claimed_bound=float(claimed_bound),
            valid=bool(valid),
            tight=bool(tight),
            facet=bool(facet),
            saturating=saturating,
            dimension=dimension,
        )

    def facet_report(self, witness: Witness, caps: Sequence[float] | None = None) -> list[InequalityReport]:
        """check_inequality of the witness's own bound function at each cap."""
        if caps is None:
            caps = np.linspace(self.scenario.max_prior, 1.0, config.CURVE_DEFAULT_POINTS)
        reports = []
        for cap in caps:
            budget = InfoBudget.from_cap(self.scenario, float(cap))
            reports.append(self.check_inequality(witness, budget, witness.bound(budget.cap)))
        return reports


@lru_cache(maxsize=8)
def polytope_for(scenario: Scenario, workers: int = 1) -> ClassicalPolytope:
    return ClassicalPolytope(scenario, workers=workers)


def vertices(scenario: Scenario, workers: int = 1) -> list[Vertex]:
    return polytope_for(scenario, workers).vertices


def restricted_vertices(scenario: Scenario, budget: InfoBudget) -> list[Behavior]:
    return polytope_for(scenario).restricted_vertices(budget)


def min_info_membership(p: Behavior) -> float:
    return polytope_for(p.scenario).min_info_membership(p)


def classical_witness_bound(w: Witness, budget: InfoBudget) -> float:
    return polytope_for(w.scenario).witness_bound(w, budget).value


def check_inequality(w: Witness, budget: InfoBudget, claimed_bound: float) -> InequalityReport:
    return polytope_for(w.scenario).check_inequality(w, budget, claimed_bound)


def facet_report(w: Witness, caps: Sequence[float] | None = None) -> list[InequalityReport]:
    return polytope_for(w.scenario).facet_report(w, caps)
