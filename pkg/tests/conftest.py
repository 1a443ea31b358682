from pathlib import Path

import numpy as np
import pytest

from models.scenario import Scenario
from models.witness import f1_witness, f2_witness

RESOURCES = Path(__file__).resolve().parent.parent / "resources"


@pytest.fixture
def resources() -> Path:
    return RESOURCES


@pytest.fixture
def scenario_322() -> Scenario:
    return Scenario.uniform(3, 2, 2)


@pytest.fixture
def f1(scenario_322):
    return f1_witness(scenario_322)


@pytest.fixture
def f2(scenario_322):
    return f2_witness(scenario_322)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
