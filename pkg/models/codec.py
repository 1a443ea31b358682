from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from errors import InfocorrError, ParseError
from models.behavior import Behavior
from models.ensemble import QuantumEnsemble
from models.operators import HermitianOperator, Povm
from models.quantum_strategy import QuantumStrategy
from models.scenario import Scenario
from models.witness import LinearBound, Witness


def read_json(path: str | Path) -> dict[str, Any]:
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as handle:
            payload = json.load(handle)
    except FileNotFoundError as exc:
        raise ParseError(f"{path}: file not found") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    if not isinstance(payload, dict):
        raise ParseError(f"{path}: expected a JSON object at the top level")
    return payload


def write_json(path: str | Path, payload: dict[str, Any]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    # json writes floats with repr(), the shortest string that round-trips exactly.
    with path.open("w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2)
        handle.write("\n")


def _require(raw: dict[str, Any], key: str, what: str) -> Any:
    if key not in raw:
        raise ParseError(f"{what}: missing key '{key}'")
    return raw[key]


def _decode(what: str, build):
    try:
        return build()
    except InfocorrError:
        raise
    except (TypeError, ValueError, IndexError, KeyError) as exc:
        raise ParseError(f"{what}: {exc}") from exc


def scenario_from_dict(raw: dict[str, Any]) -> Scenario:
    def build() -> Scenario:
        return Scenario(
            n=int(_require(raw, "n", "scenario")),
            l=int(_require(raw, "l", "scenario")),
            k=int(_require(raw, "k", "scenario")),
            prior=tuple(float(p) for p in _require(raw, "prior", "scenario")),
        )

    return _decode("scenario", build)


def scenario_to_dict(scenario: Scenario) -> dict[str, Any]:
    return {"n": scenario.n, "l": scenario.l, "k": scenario.k, "prior": list(scenario.prior)}


def behavior_from_dict(raw: dict[str, Any]) -> Behavior:
    def build() -> Behavior:
        scenario = scenario_from_dict(_require(raw, "scenario", "behavior"))
        table = np.asarray(_require(raw, "table", "behavior"), dtype=float)
        return Behavior(scenario, table)

    return _decode("behavior", build)


def behavior_to_dict(behavior: Behavior) -> dict[str, Any]:
    return {"scenario": scenario_to_dict(behavior.scenario), "table": behavior.table.tolist()}


def _matrix_from_pairs(raw: Any) -> np.ndarray:
    pairs = np.asarray(raw, dtype=float)
    if pairs.ndim != 3 or pairs.shape[2] != 2:
        raise ParseError("matrices are encoded as rows of [re, im] pairs")
    return pairs[:, :, 0] + 1j * pairs[:, :, 1]


def _matrix_to_pairs(matrix: np.ndarray) -> list:
    matrix = np.asarray(matrix, dtype=complex)
    return np.stack([matrix.real, matrix.imag], axis=2).tolist()


def ensemble_from_dict(raw: dict[str, Any]) -> QuantumEnsemble:
    def build() -> QuantumEnsemble:
        prior = tuple(float(p) for p in _require(raw, "prior", "ensemble"))
        states = tuple(HermitianOperator(_matrix_from_pairs(s)) for s in _require(raw, "states", "ensemble"))
        return QuantumEnsemble(prior, states)

    return _decode("ensemble", build)


def ensemble_to_dict(ensemble: QuantumEnsemble) -> dict[str, Any]:
    return {"prior": list(ensemble.prior), "states": [_matrix_to_pairs(s.entries) for s in ensemble.states]}


def measurements_from_dict(raw: dict[str, Any]) -> tuple[Povm, ...]:
    """Optional `measurements` entry: one list of effects per setting y."""

    def build() -> tuple[Povm, ...]:
        return tuple(
            Povm(tuple(HermitianOperator(_matrix_from_pairs(e)) for e in povm))
            for povm in raw.get("measurements", [])
        )

    return _decode("measurements", build)


def measurements_to_list(measurements: tuple[Povm, ...]) -> list:
    return [[_matrix_to_pairs(e) for e in povm.matrices()] for povm in measurements]


def witness_from_dict(raw: dict[str, Any], scenario: Scenario) -> Witness:
    def build() -> Witness:
        coefficients = np.asarray(_require(raw, "coefficients", "witness"), dtype=float)
        bound = raw.get("bound")
        bound_fn = None
        if bound is not None:
            bound_fn = LinearBound(float(bound["slope"]), float(bound["intercept"]))
        return Witness(scenario, coefficients, bound_fn=bound_fn, name=str(raw.get("name", "witness")))

    return _decode("witness", build)


def witness_to_dict(witness: Witness) -> dict[str, Any]:
    payload: dict[str, Any] = {"name": witness.name, "coefficients": witness.coefficients.tolist()}
    if isinstance(witness.bound_fn, LinearBound):
        payload["bound"] = {"slope": witness.bound_fn.slope, "intercept": witness.bound_fn.intercept}
    return payload


def load_scenario(path: str | Path) -> Scenario:
    return scenario_from_dict(read_json(path))


def load_behavior(path: str | Path) -> Behavior:
    return behavior_from_dict(read_json(path))


def load_ensemble(path: str | Path) -> tuple[QuantumEnsemble, tuple[Povm, ...]]:
    raw = read_json(path)
    return ensemble_from_dict(raw), measurements_from_dict(raw)


def load_witness(path: str | Path, scenario: Scenario) -> Witness:
    return witness_from_dict(read_json(path), scenario)


def strategy_to_dict(strategy: QuantumStrategy) -> dict[str, Any]:
    """Shared-randomness strategy as a list of branches in the ensemble schema."""
    return {
        "branches": [
            {"weight": weight, **ensemble_to_dict(ensemble), "measurements": measurements_to_list(measurements)}
            for weight, ensemble, measurements in strategy.branches
        ]
    }


def strategy_from_dict(raw: dict[str, Any]) -> QuantumStrategy:
    def build() -> QuantumStrategy:
        branches = []
        for branch in _require(raw, "branches", "strategy"):
            branches.append(
                (float(_require(branch, "weight", "branch")), ensemble_from_dict(branch), measurements_from_dict(branch))
            )
        return QuantumStrategy(tuple(branches))

    return _decode("strategy", build)
