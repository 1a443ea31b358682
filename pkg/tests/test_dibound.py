import math

import numpy as np
import pytest

from bounds.classical import min_info_membership, vertices
from bounds.dibound import (
    di_curve,
    di_info_curve,
    di_max_witness,
    di_min_info,
    di_min_info_bruteforce,
    di_optimal_behavior,
    setting_guessing,
)
from bounds.quantum import F1_ONE_BIT, analytic_f1_curve
from errors import InvalidInputError
from models.behavior import Behavior, deterministic_behavior, mix_behaviors, uniform_behavior
from models.scenario import InfoBudget, Scenario
from models.witness import witness_value


def test_input_independent_behavior_needs_nothing(scenario_322):
    assert di_min_info(uniform_behavior(scenario_322)) == pytest.approx(0.0, abs=1e-12)


def test_relay_needs_log3(scenario_322):
    relay = deterministic_behavior(Scenario.uniform(3, 1, 3), np.array([[0], [1], [2]]))
    assert di_min_info(relay) == pytest.approx(math.log2(3))


def test_two_setting_relay_needs_one_bit(scenario_322):
    # every setting splits the inputs into two groups, so one bit suffices per setting
    relay = deterministic_behavior(scenario_322, np.array([[1, 1], [1, 0], [0, 0]]))
    assert setting_guessing(relay).tolist() == pytest.approx([2 / 3, 2 / 3])
    assert di_min_info(relay) == pytest.approx(1.0)


def test_closed_form_matches_post_processing_oracle():
    rng = np.random.default_rng(21)
    for shape in [(3, 2, 2), (2, 3, 2), (3, 2, 3)]:
        n, l, k = shape
        prior = tuple(rng.dirichlet(np.ones(n)))
        scenario = Scenario(n, l, k, prior)
        for _ in range(30):
            p = Behavior(scenario, rng.dirichlet(np.ones(k), size=(n, l)))
            assert di_min_info(p) == pytest.approx(di_min_info_bruteforce(p), abs=1e-12)


def test_never_exceeds_the_classical_requirement(scenario_322):
    corners = [v.behavior for v in vertices(scenario_322)]
    rng = np.random.default_rng(9)
    mixtures = []
    for _ in range(20):
        chosen = rng.choice(len(corners), size=3, replace=False)
        mixtures.append(mix_behaviors(rng.dirichlet(np.ones(3)).tolist(), [corners[i] for i in chosen]))
    for p in corners + mixtures:
        assert di_min_info(p) <= min_info_membership(p) + 1e-8


def test_ceiling_at_no_information(f1):
    assert di_max_witness(f1, InfoBudget.from_cap(f1.scenario, 1 / 3)) == pytest.approx(1.0, abs=1e-9)


def test_ceiling_at_full_information(f1):
    assert di_max_witness(f1, InfoBudget.from_cap(f1.scenario, 1.0)) == pytest.approx(5.0, abs=1e-9)


def test_ceiling_dominates_quantum_and_classical(f1):
    for alpha in np.linspace(0.0, math.log2(3), 7):
        budget = InfoBudget.from_alpha(f1.scenario, alpha)
        ceiling = di_max_witness(f1, budget)
        assert ceiling >= analytic_f1_curve(alpha) - 1e-9
        assert ceiling >= 6 * budget.cap - 1 - 1e-9
    assert di_max_witness(f1, InfoBudget.from_alpha(f1.scenario, 1.0)) >= F1_ONE_BIT - 1e-9


def test_optimal_behavior_respects_the_cap(f1):
    budget = InfoBudget.from_alpha(f1.scenario, 0.7)
    p = di_optimal_behavior(f1, budget)
    assert witness_value(f1, p) == pytest.approx(di_max_witness(f1, budget), abs=1e-7)
    assert di_min_info(p) <= 0.7 + 1e-7


def test_curve_is_monotone(f1):
    curve = di_curve(f1, np.linspace(0.0, math.log2(3), 6))
    values = [v for _, v in curve]
    assert all(b >= a - 1e-9 for a, b in zip(values, values[1:]))


def test_information_curve(f1):
    rows = dict(di_info_curve(f1, [1.0, 3.0, 5.0]))
    assert rows[1.0] == 0.0
    assert 0.0 < rows[3.0] < 1.0
    assert rows[5.0] == pytest.approx(1.0, abs=1e-5)


def test_information_curve_rejects_unreachable_values(f1):
    with pytest.raises(InvalidInputError):
        di_info_curve(f1, [5.5])
