#!/usr/bin/env python3
"""
Write the JSON fixtures used by the command line examples.

Produces the (3,2,2) scenario, the F1/F2 witnesses, the example ensembles
and the F1 = 5 relay behavior into a target directory (default resources/).
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from bounds.quantum import qubit_f1_ensemble
from bounds.rac import build_four_bit_ensemble
from models.behavior import deterministic_behavior
from models.codec import (
    behavior_to_dict,
    ensemble_to_dict,
    measurements_to_list,
    scenario_to_dict,
    witness_to_dict,
    write_json,
)
from models.ensemble import QuantumEnsemble
from models.operators import ket, projector
from models.scenario import Scenario
from models.witness import f1_witness, f2_witness


def build_fixtures() -> dict[str, dict]:
    """
    Assemble every fixture payload keyed by file name.

    Returns:
        dict[str, dict]: JSON-ready payloads.
    """
    scenario = Scenario.uniform(3, 2, 2)
    qubit_f1, qubit_f1_povms = qubit_f1_ensemble()
    four_bit, four_bit_povms = build_four_bit_ensemble()
    pair = QuantumEnsemble.from_matrices((0.5, 0.5), [projector(ket(2, 0)), projector(ket(2, 1))])
    relay = deterministic_behavior(scenario, np.array([[1, 1], [1, 0], [0, 0]]))
    return {
        "scenario_322.json": scenario_to_dict(scenario),
        "f1.json": witness_to_dict(f1_witness(scenario)),
        "f2.json": witness_to_dict(f2_witness(scenario)),
        "orthogonal_pair.json": ensemble_to_dict(pair),
        "qubit_f1_ensemble.json": {**ensemble_to_dict(qubit_f1), "measurements": measurements_to_list(qubit_f1_povms)},
        "four_bit_ensemble.json": {**ensemble_to_dict(four_bit), "measurements": measurements_to_list(four_bit_povms)},
        "relay_behavior.json": behavior_to_dict(relay),
    }


def write_fixtures(out_dir: Path) -> list[Path]:
    written = []
    for name, payload in build_fixtures().items():
        path = out_dir / name
        write_json(path, payload)
        written.append(path)
    return written


def main(argv=None):
    parser = argparse.ArgumentParser(description="Write the JSON example fixtures.")
    parser.add_argument("out_dir", nargs="?", default="resources", help="target directory (default: resources)")
    args = parser.parse_args(argv)

    out_dir = Path(args.out_dir)
    for path in write_fixtures(out_dir):
        print(f"✓ wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
