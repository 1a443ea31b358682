import math

import numpy as np
import pytest

from bounds.quantum import info_of_mixed
from bounds.seesaw import SeesawSearch, seesaw_max_witness
from errors import InvalidInputError, UnsupportedScenarioError
from models.scenario import Scenario
from models.witness import Witness, witness_value

pytestmark = pytest.mark.slow


def test_qubit_reaches_one_bit_optimum(scenario_322, f1):
    result = seesaw_max_witness(scenario_322, f1, 1.0, dim=2, restarts=8, seed=5)
    assert result.value >= 1 + 2 * math.sqrt(2) - 1e-3
    assert result.info <= 1.0 + 1e-4


def test_result_is_reproducible_and_feasible(scenario_322, f1):
    first = seesaw_max_witness(scenario_322, f1, 0.5, dim=2, restarts=3, seed=11, max_iterations=60)
    second = seesaw_max_witness(scenario_322, f1, 0.5, dim=2, restarts=3, seed=11, max_iterations=60)
    assert first.value == pytest.approx(second.value, abs=1e-12)
    assert first.info <= 0.5 + 1e-4
    # reported numbers are recomputed from the returned strategy
    assert witness_value(f1, first.strategy.behavior()) == pytest.approx(first.value, abs=1e-9)
    assert info_of_mixed(first.strategy.mixed_ensemble()) == pytest.approx(first.info, abs=1e-6)


@pytest.mark.xfail(strict=False, reason="qutrit search may stall in a local optimum")
def test_qutrit_beats_analytic_curve_at_half_bit(scenario_322, f1):
    from bounds.quantum import analytic_f1_curve

    result = seesaw_max_witness(scenario_322, f1, 0.5, dim=3, restarts=10, seed=1)
    assert result.value > analytic_f1_curve(0.5) + 1e-3


def test_rejects_bad_arguments(scenario_322, f1):
    with pytest.raises(InvalidInputError):
        seesaw_max_witness(scenario_322, f1, 1.0, restarts=0)
    with pytest.raises(InvalidInputError):
        SeesawSearch(scenario_322, f1, 1.0, dim=9)
    ternary = Scenario.uniform(3, 2, 3)
    with pytest.raises(UnsupportedScenarioError):
        SeesawSearch(ternary, Witness(ternary, np.zeros(ternary.shape)), 1.0)
