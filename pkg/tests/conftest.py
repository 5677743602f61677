import numpy as np
import pytest

from hedra import TetraParams, build_hedra, gravity_loads

# printed two-module incidence blocks (cables, then bars), nodes 1..8
PRINTED_CS = np.array(
    [
        [0, 1, 0, 0, -1, 0, 0, 0],
        [0, 0, 1, 0, -1, 0, 0, 0],
        [0, 0, 0, 1, -1, 0, 0, 0],
        [0, 1, 0, 0, 0, -1, 0, 0],
        [0, 1, 0, 0, 0, 0, -1, 0],
        [0, 0, 1, 0, 0, 0, -1, 0],
        [0, 0, 1, 0, 0, 0, 0, -1],
        [0, 0, 0, 1, 0, 0, 0, -1],
        [0, 0, 0, 1, 0, -1, 0, 0],
    ]
)
PRINTED_CR = np.array(
    [
        [1, -1, 0, 0, 0, 0, 0, 0],
        [1, 0, -1, 0, 0, 0, 0, 0],
        [1, 0, 0, -1, 0, 0, 0, 0],
        [0, 1, -1, 0, 0, 0, 0, 0],
        [0, 1, 0, -1, 0, 0, 0, 0],
        [0, 0, 1, -1, 0, 0, 0, 0],
        [0, 0, 0, 0, 1, -1, 0, 0],
        [0, 0, 0, 0, 1, 0, -1, 0],
        [0, 0, 0, 0, 1, 0, 0, -1],
        [0, 0, 0, 0, 0, 1, -1, 0],
        [0, 0, 0, 0, 0, 1, 0, -1],
        [0, 0, 0, 0, 0, 0, 1, -1],
    ]
)


@pytest.fixture(scope="session")
def params():
    return TetraParams(radius=0.1, height=0.15)


@pytest.fixture(scope="session")
def model2(params):
    return build_hedra(2, params)


@pytest.fixture(scope="session")
def model5(params):
    return build_hedra(5, params)


def gravity_for(model):
    return lambda X: gravity_loads(model, X)
