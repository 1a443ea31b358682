import math

import numpy as np
import pytest

from bounds.classical import (
    ClassicalPolytope,
    affine_rank,
    behavior_row_partition_cost,
    check_inequality,
    classical_witness_bound,
    enumerate_strategies,
    facet_report,
    min_info_membership,
    remap_to_n_symbols,
    restricted_vertices,
    strategy_behavior,
    strategy_count,
    strategy_from_index,
    strategy_guessing,
    strategy_outputs,
    vertices,
)
from errors import CapacityError, InvalidInputError
from models.behavior import Behavior, deterministic_behavior, mix_behaviors, uniform_behavior
from models.scenario import InfoBudget, Scenario
from models.strategy import DeterministicStrategy
from models.witness import Witness, witness_value


# ---------------------------------------------------------------------------
# Deterministic strategies
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("shape, count", [((2, 1, 2), 16), ((3, 2, 2), 1728), ((2, 2, 2), 64)])
def test_strategy_count(shape, count):
    scenario = Scenario.uniform(*shape)
    assert strategy_count(scenario) == count
    assert sum(1 for _ in enumerate_strategies(scenario)) == count


def test_enumeration_order_matches_index():
    scenario = Scenario.uniform(2, 2, 2)
    for index, strategy in enumerate(enumerate_strategies(scenario)):
        assert strategy_from_index(scenario, index) == strategy


def test_enumeration_budget():
    with pytest.raises(CapacityError) as info:
        list(enumerate_strategies(Scenario.uniform(3, 2, 2), budget=100))
    assert info.value.required == 1728


def test_strategy_behavior_examples(scenario_322, f1):
    always_one = DeterministicStrategy((0, 1, 2), ((1, 1),) * 3, 2)
    p = strategy_behavior(always_one, scenario_322)
    np.testing.assert_array_equal(p.table[:, :, 1], np.ones((3, 2)))

    constant = DeterministicStrategy((0, 0, 0), ((0, 1), (1, 1), (1, 0)), 2)
    p = strategy_behavior(constant, scenario_322)
    np.testing.assert_array_equal(p.table[0], p.table[2])

    relay = DeterministicStrategy((0, 1, 2), ((1, 1), (1, 0), (0, 0)), 2)
    assert witness_value(f1, strategy_behavior(relay, scenario_322)) == pytest.approx(5.0)


@pytest.mark.parametrize(
    "encoding, expected",
    [((0, 1, 2), 1.0), ((0, 0, 0), 1 / 3), ((0, 0, 1), 2 / 3)],
)
def test_strategy_guessing(encoding, expected):
    s = DeterministicStrategy(encoding, ((0,), (0,), (0,)), 2)
    assert strategy_guessing(s, [1 / 3] * 3) == pytest.approx(expected)


def test_strategy_guessing_matches_brute_force():
    rng = np.random.default_rng(3)
    prior = rng.dirichlet(np.ones(4))
    for _ in range(50):
        encoding = tuple(int(m) for m in rng.integers(0, 4, size=4))
        s = DeterministicStrategy(encoding, ((0,),) * 4, 2)
        # best guess for each message over every decoder m -> x
        brute = max(
            sum(prior[x] for x in range(4) if guess[encoding[x]] == x)
            for guess in np.ndindex(4, 4, 4, 4)
        )
        assert strategy_guessing(s, prior) == pytest.approx(brute)


# ---------------------------------------------------------------------------
# Remapping to d = n messages
# ---------------------------------------------------------------------------


def test_remap_identity_when_d_equals_n():
    s = DeterministicStrategy((0, 1), ((0,), (1,)), 2)
    assert remap_to_n_symbols(s) is s


def test_remap_moves_high_label():
    s = DeterministicStrategy((0, 2), ((0,), (0,), (1,)), 2)
    remapped = remap_to_n_symbols(s)
    assert remapped.encoding == (0, 1)
    assert remapped.decoding[1] == (1,)


def test_remap_preserves_behavior_and_guessing():
    rng = np.random.default_rng(11)
    prior = [1 / 3] * 3
    for _ in range(500):
        encoding = tuple(int(m) for m in rng.integers(0, 5, size=3))
        decoding = tuple(tuple(int(b) for b in row) for row in rng.integers(0, 2, size=(5, 2)))
        s = DeterministicStrategy(encoding, decoding, 2)
        remapped = remap_to_n_symbols(s)
        assert remapped.d == 3
        np.testing.assert_array_equal(strategy_outputs(remapped), strategy_outputs(s))
        assert strategy_guessing(remapped, prior) == pytest.approx(strategy_guessing(s, prior), abs=1e-15)


# ---------------------------------------------------------------------------
# Vertices and the restricted polytope
# ---------------------------------------------------------------------------


def test_vertices_212():
    scenario = Scenario.uniform(2, 1, 2)
    found = vertices(scenario)
    assert len(found) == 4
    costs = sorted(v.cost for v in found)
    assert costs == pytest.approx([0.5, 0.5, 1.0, 1.0])


def test_vertices_322_costs(scenario_322):
    found = vertices(scenario_322)
    assert len(found) == 2**6
    for vertex in found:
        assert min(abs(vertex.cost - c) for c in (1 / 3, 2 / 3, 1.0)) < 1e-12
        assert vertex.cost == pytest.approx(behavior_row_partition_cost(vertex.behavior), abs=1e-12)


def test_vertices_are_canonically_ordered(scenario_322):
    flat = np.stack([v.behavior.flat() for v in vertices(scenario_322)])
    keys = [tuple(row) for row in flat]
    assert keys == sorted(keys)


def test_restricted_points_212():
    scenario = Scenario.uniform(2, 1, 2)
    polytope = ClassicalPolytope(scenario)
    tables, costs, survivors = polytope.restricted_points(InfoBudget.from_cap(scenario, 0.75))
    assert survivors == 2
    assert len(tables) == 6
    mixed = sorted(tuple(t[:, 0, 0]) for t in tables[survivors:])
    assert mixed == [(0.0, 0.5), (0.5, 0.0), (0.5, 1.0), (1.0, 0.5)]
    np.testing.assert_allclose(costs[survivors:], 0.75)


def test_restricted_vertices_limits(scenario_322):
    full = restricted_vertices(scenario_322, InfoBudget.from_cap(scenario_322, 1.0))
    assert len(full) == len(vertices(scenario_322))
    floor = restricted_vertices(scenario_322, InfoBudget.from_alpha(scenario_322, 0.0))
    # only the four x-independent vertices cost 1/3
    assert len(floor) == 4


@pytest.mark.parametrize("alpha", np.linspace(0.0, math.log2(3), 11))
def test_f1_classical_bound(f1, alpha):
    budget = InfoBudget.from_alpha(f1.scenario, alpha)
    assert classical_witness_bound(f1, budget) == pytest.approx(6 * budget.cap - 1, abs=1e-9)


def test_f2_classical_bound(f2):
    budget = InfoBudget.from_cap(f2.scenario, 2 / 3)
    assert classical_witness_bound(f2, budget) == pytest.approx(4.0, abs=1e-9)


def test_f2_bound_wherever_its_inequality_is_tight(f2):
    tight = [r for r in facet_report(f2) if r.valid and r.tight]
    assert any(r.cap == pytest.approx(2 / 3) for r in tight)
    for report in tight:
        budget = InfoBudget.from_cap(f2.scenario, report.cap)
        assert classical_witness_bound(f2, budget) == pytest.approx(12 * report.cap - 4, abs=1e-9)


@pytest.mark.parametrize("name", ["f1", "f2"])
def test_bound_is_nondecreasing_and_concave_in_cap(request, name):
    w = request.getfixturevalue(name)
    caps = np.linspace(w.scenario.max_prior, 1.0, 13)
    values = np.array([classical_witness_bound(w, InfoBudget.from_cap(w.scenario, c)) for c in caps])
    assert np.all(np.diff(values) >= -1e-8)
    assert np.all(np.diff(values, n=2) <= 1e-8)


def test_bound_at_full_cap_is_vertex_maximum(f2):
    best = max(witness_value(f2, v.behavior) for v in vertices(f2.scenario))
    assert classical_witness_bound(f2, InfoBudget.from_cap(f2.scenario, 1.0)) == pytest.approx(best)


# ---------------------------------------------------------------------------
# Inequality checks
# ---------------------------------------------------------------------------


def test_f1_is_tight_facet_at_two_thirds(f1):
    report = check_inequality(f1, InfoBudget.from_cap(f1.scenario, 2 / 3), 3.0)
    assert report.valid and report.tight and report.facet


def test_slack_bound_is_valid_but_not_tight(f1):
    report = check_inequality(f1, InfoBudget.from_cap(f1.scenario, 2 / 3), 4.0)
    assert report.valid
    assert not report.tight
    assert not report.facet


def test_violated_bound(f1):
    report = check_inequality(f1, InfoBudget.from_cap(f1.scenario, 2 / 3), 2.5)
    assert not report.valid


def test_positivity_is_facet_in_212():
    scenario = Scenario.uniform(2, 1, 2)
    coefficients = np.zeros(scenario.shape)
    coefficients[0, 0, 0] = -1.0  # -p(0|x=0,y=0) <= 0
    report = check_inequality(Witness(scenario, coefficients), InfoBudget.from_cap(scenario, 0.75), 0.0)
    assert report.valid and report.tight and report.facet
    assert report.dimension == 2
    assert report.saturating == 2


def test_facet_report_covers_default_caps(f1):
    reports = ClassicalPolytope(f1.scenario).facet_report(f1)
    assert len(reports) == 11
    assert all(r.valid and r.tight for r in reports)


def test_affine_rank():
    assert affine_rank(np.zeros((0, 3))) == -1
    assert affine_rank(np.ones((1, 3))) == 0
    assert affine_rank(np.array([[0, 0], [1, 1], [2, 2]])) == 1
    assert affine_rank(np.array([[0, 0], [1, 0], [0, 1]])) == 2


# ---------------------------------------------------------------------------
# Membership
# ---------------------------------------------------------------------------


def test_membership_of_input_independent_behavior(scenario_322):
    assert min_info_membership(uniform_behavior(scenario_322)) == pytest.approx(0.0, abs=1e-9)


def test_membership_of_relay_313():
    scenario = Scenario.uniform(3, 1, 3)
    p = deterministic_behavior(scenario, np.array([[0], [1], [2]]))
    assert min_info_membership(p) == pytest.approx(math.log2(3), abs=1e-9)


def test_membership_of_f1_optimum(scenario_322, f1):
    bound = ClassicalPolytope(scenario_322).witness_bound(f1, InfoBudget.from_cap(scenario_322, 2 / 3))
    p = mix_behaviors([w for w, _ in bound.mixture], [v.behavior for _, v in bound.mixture])
    assert witness_value(f1, p) == pytest.approx(3.0)
    assert min_info_membership(p) == pytest.approx(1.0, abs=1e-7)


def test_membership_rejects_non_classical(scenario_322):
    polytope = ClassicalPolytope(scenario_322)
    with pytest.raises(InvalidInputError):
        polytope.min_info_membership(uniform_behavior(Scenario.uniform(2, 1, 2)))


def test_membership_never_exceeds_any_generating_strategy(scenario_322):
    cheapest: dict[tuple[int, ...], float] = {}
    for s in enumerate_strategies(scenario_322):
        key = tuple(strategy_outputs(s).reshape(-1))
        guessing = strategy_guessing(s, scenario_322.prior)
        cheapest[key] = min(guessing, cheapest.get(key, 1.0))
    assert len(cheapest) == 2 ** (3 * 2)
    for key, guessing in cheapest.items():
        p = deterministic_behavior(scenario_322, np.array(key).reshape(3, 2))
        assert min_info_membership(p) <= scenario_322.hmin + math.log2(guessing) + 1e-9


def test_restricted_points_respect_the_information_budget(scenario_322):
    budget = InfoBudget.from_alpha(scenario_322, 0.6)
    points = restricted_vertices(scenario_322, budget)
    assert points
    worst = max(min_info_membership(p) for p in points)
    assert worst <= 0.6 + 1e-6


def test_row_partition_cost_needs_deterministic_behavior(scenario_322):
    with pytest.raises(InvalidInputError):
        behavior_row_partition_cost(Behavior(scenario_322, np.full(scenario_322.shape, 0.5)))


def test_f2_is_tight_at_two_thirds(f2):
    report = check_inequality(f2, InfoBudget.from_cap(f2.scenario, 2 / 3), f2.bound(2 / 3))
    assert report.valid and report.tight
