import pathlib

import numpy as np
import pytest

from schurpick import ProblemData, build_pick_system, coefficient_matrix_rational

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


def fixture_path(name: str) -> str:
    return str(FIXTURES / name)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def single_node():
    return ProblemData.load(FIXTURES / "single_node_gamma1.json")


@pytest.fixture(scope="session")
def single_sys(single_node):
    return build_pick_system(single_node)


@pytest.fixture(scope="session")
def single_S(single_sys):
    return coefficient_matrix_rational(single_sys)


@pytest.fixture(scope="session")
def z2_data():
    return ProblemData.load(FIXTURES / "w_z2.json")


@pytest.fixture(scope="session")
def singular_data():
    return ProblemData.load(FIXTURES / "two_node_singular.json")


@pytest.fixture(scope="session")
def suite():
    from schurpick.testing import random_suite

    return random_suite(50)


def disk_points(rng, k, rmax=0.95):
    return rmax * np.sqrt(rng.random(k)) * np.exp(2j * np.pi * rng.random(k))
