from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

import config
from errors import InvalidInputError, LpCyclingError

logger = logging.getLogger(__name__)

SENSES = ("<=", "=", ">=")


class LpStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True, eq=False)
class LpProblem:
    """
    Dense linear program  opt c.x  s.t.  A x (<=, =, >=) b,  lower <= x <= upper.

    `lower` defaults to 0 and `upper` to +inf; a lower bound of -inf makes the
    variable free (split internally into two non-negative parts).
    """

    objective: np.ndarray
    matrix: np.ndarray
    rhs: np.ndarray
    senses: tuple[str, ...]
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None
    maximize: bool = False

    def __post_init__(self) -> None:
        c = np.asarray(self.objective, dtype=float).reshape(-1)
        a = np.asarray(self.matrix, dtype=float)
        if a.size == 0:
            a = a.reshape(0, c.size)
        b = np.asarray(self.rhs, dtype=float).reshape(-1)
        senses = tuple(self.senses)
        if a.ndim != 2 or a.shape != (b.size, c.size):
            raise InvalidInputError(f"constraint matrix has shape {a.shape}, expected {(b.size, c.size)}")
        if len(senses) != b.size or any(s not in SENSES for s in senses):
            raise InvalidInputError("need one sense in {'<=', '=', '>='} per constraint row")
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise InvalidInputError("objective, matrix and rhs must be finite")
        lower = np.zeros(c.size) if self.lower is None else np.asarray(self.lower, dtype=float).reshape(-1)
        upper = np.full(c.size, np.inf) if self.upper is None else np.asarray(self.upper, dtype=float).reshape(-1)
        if lower.size != c.size or upper.size != c.size:
            raise InvalidInputError("variable bounds must have one entry per variable")
        if np.any(np.isnan(lower)) or np.any(np.isnan(upper)) or np.any(lower == np.inf) or np.any(upper == -np.inf):
            raise InvalidInputError("invalid variable bounds")
        if np.any(lower > upper):
            raise InvalidInputError("a variable has lower bound above its upper bound")
        for name, value in (("objective", c), ("matrix", a), ("rhs", b), ("lower", lower), ("upper", upper)):
            object.__setattr__(self, name, value)
        object.__setattr__(self, "senses", senses)

    @property
    def num_variables(self) -> int:
        return self.objective.size

    @property
    def num_constraints(self) -> int:
        return self.rhs.size


@dataclass(frozen=True, eq=False)
class LpSolution:
    status: LpStatus
    value: float = float("nan")
    primal: np.ndarray = field(default_factory=lambda: np.empty(0))
    dual: np.ndarray = field(default_factory=lambda: np.empty(0))
    dual_value: float = float("nan")
    pivots: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


@dataclass
class _StandardForm:
    """min cost.z s.t. A z = b, z >= 0, b >= 0, plus the map back to x."""

    a: np.ndarray
    b: np.ndarray
    cost: np.ndarray
    basis: list[int]
    artificial: np.ndarray
    row_sign: np.ndarray
    num_original_rows: int
    num_structural: int
    offset: np.ndarray
    transform: np.ndarray
    objective_offset: float


def _standard_form(problem: LpProblem) -> _StandardForm:
    n = problem.num_variables
    c = -problem.objective if problem.maximize else problem.objective.copy()

    # x = offset + transform @ z with z >= 0
    columns: list[np.ndarray] = []
    offset = np.zeros(n)
    bound_rows: list[tuple[int, float]] = []
    for j in range(n):
        lo, hi = problem.lower[j], problem.upper[j]
        unit = np.zeros(n)
        unit[j] = 1.0
        if np.isfinite(lo):
            offset[j] = lo
            columns.append(unit)
            if np.isfinite(hi):
                bound_rows.append((len(columns) - 1, hi - lo))
        elif np.isfinite(hi):
            offset[j] = hi
            columns.append(-unit)
        else:
            columns.append(unit)
            columns.append(-unit)
    transform = np.column_stack(columns) if columns else np.zeros((n, 0))
    nz = transform.shape[1]

    rows = [problem.matrix @ transform]
    rhs = [problem.rhs - problem.matrix @ offset]
    senses = list(problem.senses)
    if bound_rows:
        extra = np.zeros((len(bound_rows), nz))
        for i, (col, width) in enumerate(bound_rows):
            extra[i, col] = 1.0
        rows.append(extra)
        rhs.append(np.array([w for _, w in bound_rows]))
        senses.extend(["<="] * len(bound_rows))
    a = np.vstack(rows) if rows else np.zeros((0, nz))
    b = np.concatenate(rhs) if rhs else np.zeros(0)
    m = b.size

    row_sign = np.where(b < 0.0, -1.0, 1.0)
    a = a * row_sign[:, None]
    b = b * row_sign
    flipped = {"<=": ">=", ">=": "<=", "=": "="}
    senses = [flipped[s] if sign < 0 else s for s, sign in zip(senses, row_sign)]

    slack_cols = []
    basis: list[int] = [-1] * m
    art_cols = []
    for i, sense in enumerate(senses):
        if sense == "<=":
            col = np.zeros(m)
            col[i] = 1.0
            basis[i] = nz + len(slack_cols)
            slack_cols.append(col)
        elif sense == ">=":
            col = np.zeros(m)
            col[i] = -1.0
            slack_cols.append(col)
    num_slack = len(slack_cols)
    for i, sense in enumerate(senses):
        if sense != "<=":
            col = np.zeros(m)
            col[i] = 1.0
            basis[i] = nz + num_slack + len(art_cols)
            art_cols.append(col)
    blocks = [a]
    if slack_cols:
        blocks.append(np.column_stack(slack_cols))
    if art_cols:
        blocks.append(np.column_stack(art_cols))
    full = np.hstack(blocks) if m else np.zeros((0, nz + num_slack + len(art_cols)))
    total = full.shape[1]
    artificial = np.zeros(total, dtype=bool)
    artificial[nz + num_slack:] = True
    cost = np.zeros(total)
    cost[:nz] = transform.T @ c

    return _StandardForm(
        a=full,
        b=b,
        cost=cost,
        basis=basis,
        artificial=artificial,
        row_sign=row_sign,
        num_original_rows=problem.num_constraints,
        num_structural=nz,
        offset=offset,
        transform=transform,
        objective_offset=float(c @ offset),
    )


class RevisedSimplex:
    """
    Two-phase revised simplex with Dantzig pricing and a Bland's-rule fallback.

    An instance owns its counters and is not reentrant; create one per solve
    when running concurrently.
    """

    def __init__(
        self,
        feasibility_tol: float = config.LP_FEASIBILITY_TOL,
        optimality_tol: float = config.LP_OPTIMALITY_TOL,
        pivot_tol: float = config.LP_PIVOT_TOL,
        bland_after: int = config.LP_BLAND_AFTER,
        max_pivots: int = config.LP_MAX_PIVOTS,
    ):
        self.feasibility_tol = feasibility_tol
        self.optimality_tol = optimality_tol
        self.pivot_tol = pivot_tol
        self.bland_after = bland_after
        self.max_pivots = max_pivots
        self.pivots = 0
        self._warned_bland = False

    def _iterate(self, a: np.ndarray, b: np.ndarray, cost: np.ndarray, basis: list[int], allowed: np.ndarray) -> LpStatus:
        m = b.size
        while True:
            if m == 0:
                return LpStatus.UNBOUNDED if np.any((cost < -self.optimality_tol) & allowed) else LpStatus.OPTIMAL
            bmat = a[:, basis]
            x_b = np.linalg.solve(bmat, b)
            y = np.linalg.solve(bmat.T, cost[basis])
            reduced = cost - a.T @ y
            eligible = allowed.copy()
            eligible[basis] = False
            candidates = np.flatnonzero(eligible & (reduced < -self.optimality_tol))
            if candidates.size == 0:
                return LpStatus.OPTIMAL

            bland = self.pivots >= self.bland_after
            if bland and not self._warned_bland:
                logger.debug("simplex switched to Bland's rule after %d pivots", self.pivots)
                self._warned_bland = True
            entering = int(candidates[0]) if bland else int(candidates[np.argmin(reduced[candidates])])

            direction = np.linalg.solve(bmat, a[:, entering])
            rows = np.flatnonzero(direction > self.pivot_tol)
            if rows.size == 0:
                return LpStatus.UNBOUNDED
            ratios = np.maximum(x_b[rows], 0.0) / direction[rows]
            best = ratios.min()
            ties = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
            if bland:
                leaving = int(min(ties, key=lambda r: basis[r]))
            else:
                leaving = int(ties[np.argmax(direction[ties])])
            basis[leaving] = entering

            self.pivots += 1
            if self.pivots > self.max_pivots:
                raise LpCyclingError(
                    f"simplex exceeded {self.max_pivots} pivots; the basis is numerically degenerate"
                )

    def _drive_out_artificials(self, form: _StandardForm, keep_rows: list[int]) -> None:
        """Pivot zero-level artificials out of the basis; drop rows that are redundant."""
        row = 0
        while row < len(form.basis):
            var = form.basis[row]
            if not form.artificial[var]:
                row += 1
                continue
            bmat = form.a[:, form.basis]
            unit = np.zeros(len(form.basis))
            unit[row] = 1.0
            tableau_row = np.linalg.solve(bmat.T, unit) @ form.a
            nonbasic = np.ones(form.a.shape[1], dtype=bool)
            nonbasic[form.basis] = False
            nonbasic &= ~form.artificial
            options = np.flatnonzero(nonbasic & (np.abs(tableau_row) > 1e-9))
            if options.size:
                form.basis[row] = int(options[np.argmax(np.abs(tableau_row[options]))])
                row += 1
                continue
            logger.debug("dropping redundant constraint row %d", keep_rows[row])
            form.a = np.delete(form.a, row, axis=0)
            form.b = np.delete(form.b, row)
            del form.basis[row]
            del keep_rows[row]

    def solve(self, problem: LpProblem) -> LpSolution:
        form = _standard_form(problem)
        self.pivots = 0
        self._warned_bland = False
        keep_rows = list(range(form.b.size))

        if form.artificial.any():
            phase_one = form.artificial.astype(float)
            status = self._iterate(form.a, form.b, phase_one, form.basis, np.ones_like(form.artificial))
            x_b = np.linalg.solve(form.a[:, form.basis], form.b) if form.b.size else np.zeros(0)
            infeasibility = float(phase_one[form.basis] @ x_b) if form.b.size else 0.0
            if status is not LpStatus.OPTIMAL or infeasibility > self.feasibility_tol * (1.0 + np.abs(form.b).max(initial=0.0)):
                logger.info("LP infeasible (phase one residual %.3e)", infeasibility)
                return LpSolution(LpStatus.INFEASIBLE, pivots=self.pivots)
            self._drive_out_artificials(form, keep_rows)

        allowed = ~form.artificial
        status = self._iterate(form.a, form.b, form.cost, form.basis, allowed)
        if status is LpStatus.UNBOUNDED:
            logger.info("LP unbounded after %d pivots", self.pivots)
            return LpSolution(LpStatus.UNBOUNDED, pivots=self.pivots)

        z = np.zeros(form.a.shape[1])
        duals_std = np.zeros(form.row_sign.size)
        if form.b.size:
            bmat = form.a[:, form.basis]
            z[form.basis] = np.linalg.solve(bmat, form.b)
            y = np.linalg.solve(bmat.T, form.cost[form.basis])
            duals_std[keep_rows] = y
        z = np.maximum(z, 0.0)
        x = form.offset + form.transform @ z[: form.num_structural]

        sign = -1.0 if problem.maximize else 1.0
        value = float(problem.objective @ x)
        kept_b = np.zeros(form.row_sign.size)
        kept_b[keep_rows] = form.b
        dual_value = sign * (float(duals_std @ kept_b) + form.objective_offset)
        duals = sign * (duals_std * form.row_sign)[: form.num_original_rows]

        residual = _primal_residual(problem, x)
        if residual > 1e-8 * (1.0 + np.abs(problem.rhs).max(initial=0.0)):
            logger.warning("LP primal residual %.3e above tolerance", residual)
        logger.debug("LP optimal value %.12g after %d pivots", value, self.pivots)
        return LpSolution(LpStatus.OPTIMAL, value, x, duals, dual_value, self.pivots)


def _primal_residual(problem: LpProblem, x: np.ndarray) -> float:
    if problem.num_constraints == 0:
        row_residual = 0.0
    else:
        ax = problem.matrix @ x
        gaps = []
        for value, rhs, sense in zip(ax, problem.rhs, problem.senses):
            if sense == "<=":
                gaps.append(max(0.0, value - rhs))
            elif sense == ">=":
                gaps.append(max(0.0, rhs - value))
            else:
                gaps.append(abs(value - rhs))
        row_residual = max(gaps)
    bound_residual = max(
        float(np.max(np.maximum(problem.lower - x, 0.0), initial=0.0)),
        float(np.max(np.maximum(x - problem.upper, 0.0), initial=0.0)),
    )
    return max(row_residual, bound_residual)


def solve_lp(problem: LpProblem) -> LpSolution:
    """
    Solve a dense LP with the revised simplex method.

    Args:
        problem (LpProblem): Problem data.

    Returns:
        LpSolution: Status, optimal value, primal point and row duals.

    Raises:
        LpCyclingError: When the pivot budget is exhausted.
    """
    return RevisedSimplex().solve(problem)


def build_problem(
    objective: Sequence[float],
    rows: Sequence[tuple[Sequence[float], str, float]],
    lower: Sequence[float] | None = None,
    upper: Sequence[float] | None = None,
    maximize: bool = False,
) -> LpProblem:
    """Convenience constructor from (coefficients, sense, rhs) triples."""
    objective = np.asarray(objective, dtype=float)
    if rows:
        matrix = np.array([r[0] for r in rows], dtype=float)
        senses = tuple(r[1] for r in rows)
        rhs = np.array([r[2] for r in rows], dtype=float)
    else:
        matrix = np.zeros((0, objective.size))
        senses = ()
        rhs = np.zeros(0)
    return LpProblem(objective, matrix, rhs, senses, lower=lower, upper=upper, maximize=maximize)
