import json
import math
import pathlib

import pytest

from nhrm.lattice import Chain, ModelParams

FROZEN = json.loads((pathlib.Path(__file__).parent / "oracles" / "frozen.json").read_text())

R2 = 1.0 / math.sqrt(2.0)
R3 = math.sqrt(3.0)


@pytest.fixture
def frozen():
    return FROZEN


@pytest.fixture
def four_ep():
    return ModelParams(delta=R2, gamma=R3, g=1.0)


@pytest.fixture
def pair_ep():
    return ModelParams(delta=R2, gamma=2.0, g=1.0)


@pytest.fixture
def chain():
    return ModelParams(delta=0.0, gamma=1.0, n_chains=1, variant=Chain())
