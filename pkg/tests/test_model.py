"""Scenario, behavior, witness and JSON codec."""

import json
import math

import numpy as np
import pytest

from bounds.quantum import qubit_f1_ensemble
from bounds.rac import build_four_bit_ensemble, rac_scenario
from errors import InvalidInputError, ParseError, UnsupportedScenarioError
from models.behavior import Behavior, correlator, correlators, deterministic_behavior, uniform_behavior
from models.codec import (
    load_behavior,
    load_ensemble,
    load_scenario,
    load_witness,
    strategy_from_dict,
    strategy_to_dict,
)
from models.ensemble import QuantumEnsemble, behavior_from_quantum
from models.operators import SIGMA_X, SIGMA_Z, maximally_mixed, observable_to_povm, random_povm
from models.rac_spec import RacSpec
from models.scenario import InfoBudget, Scenario, hmin
from models.witness import Witness, witness_value

SQRT2 = math.sqrt(2.0)


# ---------------------------------------------------------------------------
# Scenario
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "prior, expected",
    [
        ([1 / 3] * 3, math.log2(3)),
        ([1.0, 0.0], 0.0),
        ([0.5, 0.25, 0.25], 1.0),
    ],
)
def test_hmin(prior, expected):
    assert hmin(prior) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("prior", [[], [0.5, 0.4], [1.2, -0.2]])
def test_hmin_rejects_bad_priors(prior):
    with pytest.raises(InvalidInputError):
        hmin(prior)


def test_scenario_validates_prior_length():
    with pytest.raises(InvalidInputError):
        Scenario(n=3, l=2, k=2, prior=(0.5, 0.5))


def test_info_budget_cap_and_back():
    scenario = Scenario.uniform(3, 2, 2)
    assert InfoBudget.from_alpha(scenario, 0.0).cap == pytest.approx(1 / 3)
    assert InfoBudget.from_alpha(scenario, 1.0).cap == pytest.approx(2 / 3)
    assert InfoBudget.from_alpha(scenario, 5.0).cap == 1.0
    assert InfoBudget.from_cap(scenario, 2 / 3).alpha == pytest.approx(1.0)
    with pytest.raises(InvalidInputError):
        InfoBudget.from_alpha(scenario, -0.1)
    with pytest.raises(InvalidInputError):
        InfoBudget.from_cap(scenario, 0.2)


# ---------------------------------------------------------------------------
# Behavior
# ---------------------------------------------------------------------------


def test_behavior_rejects_unnormalised_rows(scenario_322):
    table = np.full(scenario_322.shape, 0.5)
    table[0, 0] = [0.5, 0.6]
    with pytest.raises(InvalidInputError):
        Behavior(scenario_322, table)


def test_behavior_table_is_read_only(scenario_322):
    p = uniform_behavior(scenario_322)
    with pytest.raises(ValueError):
        p.table[0, 0, 0] = 1.0


def test_correlator_values(scenario_322):
    table = np.zeros(scenario_322.shape)
    table[:, :, 0] = 1.0
    assert correlator(Behavior(scenario_322, table), 0, 0) == 1.0
    assert correlator(uniform_behavior(scenario_322), 1, 1) == 0.0


def test_correlator_needs_binary_outcomes():
    p = uniform_behavior(Scenario.uniform(3, 1, 3))
    with pytest.raises(UnsupportedScenarioError):
        correlator(p, 0, 0)


def test_maximally_mixed_states_give_input_independent_behavior(rng):
    ensemble = QuantumEnsemble.from_matrices([1 / 3] * 3, [maximally_mixed(2)] * 3)
    p = behavior_from_quantum(ensemble, [random_povm(2, 2, rng), random_povm(2, 2, rng)])
    np.testing.assert_allclose(p.table[0], p.table[1], atol=1e-12)
    np.testing.assert_allclose(p.table[0], p.table[2], atol=1e-12)


def test_qubit_f1_correlators():
    ensemble, measurements = qubit_f1_ensemble()
    e = correlators(behavior_from_quantum(ensemble, measurements))
    np.testing.assert_allclose(e[0], [-1 / SQRT2, -1 / SQRT2], atol=1e-12)
    np.testing.assert_allclose(e[1], [-1 / SQRT2, 1 / SQRT2], atol=1e-12)
    assert e[2, 0] == pytest.approx(1.0, abs=1e-12)


def test_single_correlator_of_zero_state():
    ensemble = QuantumEnsemble.from_matrices([1.0], [np.diag([1.0, 0.0])])
    povm = observable_to_povm((SIGMA_Z - SIGMA_X) / SQRT2)
    p = behavior_from_quantum(ensemble, [povm])
    assert correlator(p, 0, 0) == pytest.approx(1 / SQRT2, abs=1e-12)


def test_dimension_mismatch_is_rejected(rng):
    ensemble = QuantumEnsemble.from_matrices([0.5, 0.5], [maximally_mixed(2)] * 2)
    with pytest.raises(InvalidInputError):
        behavior_from_quantum(ensemble, [random_povm(3, 2, rng)])


def test_sixteen_state_ensemble_scores_three_quarters():
    ensemble, measurements = build_four_bit_ensemble()
    spec = RacSpec(4)
    p = behavior_from_quantum(ensemble, measurements, rac_scenario(spec))
    for x in range(spec.inputs):
        for y in range(spec.n_bits):
            assert p.probability(spec.bit(x, y), x, y) == pytest.approx(0.75, abs=1e-12)


# ---------------------------------------------------------------------------
# Witness
# ---------------------------------------------------------------------------


def test_zero_witness(scenario_322):
    w = Witness(scenario_322, np.zeros(scenario_322.shape))
    assert witness_value(w, uniform_behavior(scenario_322)) == 0.0


def test_f1_on_constant_zero_output(scenario_322, f1):
    p = deterministic_behavior(scenario_322, np.zeros((3, 2), dtype=int))
    assert witness_value(f1, p) == pytest.approx(-1.0)


def test_f1_on_relay(scenario_322, f1):
    p = deterministic_behavior(scenario_322, np.array([[1, 1], [1, 0], [0, 0]]))
    assert witness_value(f1, p) == pytest.approx(5.0)


def test_witness_is_linear(scenario_322, f1, rng):
    tables = rng.dirichlet([1.0, 1.0], size=(2, 3, 2))
    p, q = Behavior(scenario_322, tables[0]), Behavior(scenario_322, tables[1])
    mixed = Behavior(scenario_322, 0.3 * p.table + 0.7 * q.table)
    assert witness_value(f1, mixed) == pytest.approx(0.3 * witness_value(f1, p) + 0.7 * witness_value(f1, q))


def test_witness_shape_mismatch(f1):
    with pytest.raises(InvalidInputError):
        witness_value(f1, uniform_behavior(Scenario.uniform(2, 1, 2)))


def test_no_signal_max_of_f1(f1):
    value, outputs = f1.no_signal_max()
    # y = 1 is a tie, y = 0 must answer 1.
    assert value == pytest.approx(1.0)
    assert outputs[0] == 1


# ---------------------------------------------------------------------------
# Codec
# ---------------------------------------------------------------------------


def test_fixtures_load(resources, scenario_322, f1):
    scenario = load_scenario(resources / "scenario_322.json")
    assert scenario == scenario_322
    witness = load_witness(resources / "f1.json", scenario)
    np.testing.assert_array_equal(witness.coefficients, f1.coefficients)
    assert witness.bound(2 / 3) == pytest.approx(3.0)
    relay = load_behavior(resources / "relay_behavior.json")
    assert witness_value(witness, relay) == pytest.approx(5.0)
    ensemble, measurements = load_ensemble(resources / "qubit_f1_ensemble.json")
    assert ensemble.n == 3 and len(measurements) == 2


def test_strategy_payload_survives_json():
    from bounds.quantum import mixed_f1_strategy

    strategy = mixed_f1_strategy(0.4, "relay")
    restored = strategy_from_dict(json.loads(json.dumps(strategy_to_dict(strategy))))
    assert restored.behavior().allclose(strategy.behavior(), atol=1e-12)
    np.testing.assert_allclose(restored.weights, [0.4, 0.6])


def test_broken_json_raises_parse_error(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{ not json", encoding="utf-8")
    with pytest.raises(ParseError):
        load_scenario(path)


def test_missing_key_raises_parse_error(tmp_path):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps({"n": 2, "l": 1}), encoding="utf-8")
    with pytest.raises(ParseError, match="'k'"):
        load_scenario(path)
