import numpy as np
import pytest
from scipy.optimize import linprog

from bounds.classical import ClassicalPolytope
from errors import InvalidInputError
from models.scenario import InfoBudget
from solvers.lp import LpProblem, LpStatus, build_problem, solve_lp


def test_single_variable():
    solution = solve_lp(build_problem([1.0], [([1.0], "<=", 3.0)], maximize=True))
    assert solution.optimal
    assert solution.value == pytest.approx(3.0)


def test_simplex_corner():
    solution = solve_lp(build_problem([1.0, 1.0], [([1.0, 1.0], "<=", 1.0)], maximize=True))
    assert solution.value == pytest.approx(1.0)
    assert solution.primal.sum() == pytest.approx(1.0)


def test_equality_and_bounds():
    # min x - y  s.t.  x + y = 2,  y <= 1.5,  x free
    problem = build_problem(
        [1.0, -1.0],
        [([1.0, 1.0], "=", 2.0)],
        lower=[-np.inf, 0.0],
        upper=[np.inf, 1.5],
    )
    solution = solve_lp(problem)
    assert solution.value == pytest.approx(-1.0)
    np.testing.assert_allclose(solution.primal, [0.5, 1.5], atol=1e-9)


def test_infeasible():
    problem = build_problem([1.0], [([1.0], "<=", 1.0), ([1.0], ">=", 2.0)])
    assert solve_lp(problem).status is LpStatus.INFEASIBLE


def test_unbounded():
    problem = build_problem([1.0, 0.0], [([1.0, -1.0], "<=", 1.0)], maximize=True)
    assert solve_lp(problem).status is LpStatus.UNBOUNDED


def test_rejects_bad_senses():
    with pytest.raises(InvalidInputError):
        LpProblem(np.ones(2), np.ones((1, 2)), np.ones(1), ("<",))


def test_f1_witness_lp_at_two_thirds(f1):
    polytope = ClassicalPolytope(f1.scenario)
    bound = polytope.witness_bound(f1, InfoBudget.from_cap(f1.scenario, 2 / 3))
    assert bound.value == pytest.approx(3.0, abs=1e-9)
    assert sum(w for w, _ in bound.mixture) == pytest.approx(1.0)


@pytest.mark.parametrize("seed", range(20))
def test_matches_scipy_linprog(seed):
    rng = np.random.default_rng(seed)
    a = rng.uniform(0.1, 1.0, size=(6, 5))
    b = rng.uniform(1.0, 3.0, size=6)
    c = rng.normal(size=5)
    eq = rng.uniform(0.0, 1.0, size=(1, 5))
    rows = [(row, "<=", rhs) for row, rhs in zip(a, b)] + [(eq[0], ">=", 0.2)]
    solution = solve_lp(build_problem(c, rows, maximize=True))

    reference = linprog(-c, A_ub=np.vstack([a, -eq]), b_ub=np.concatenate([b, [-0.2]]), bounds=[(0, None)] * 5)
    assert reference.status == 0
    assert solution.optimal
    assert solution.value == pytest.approx(-reference.fun, abs=1e-8)
    # strong duality
    assert solution.dual_value == pytest.approx(solution.value, abs=1e-8)
