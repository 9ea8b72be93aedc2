import math

import numpy as np
import pytest

from dirac_nodal import (
    AsymptoticNodalModel,
    DiracProblem,
    eigenvalues,
    example1_problem,
    nodal_data,
    synthesize_nodal_data,
)

PI = math.pi
SQRT3 = math.sqrt(3.0)


@pytest.fixture(scope="session")
def zero_problem():
    return DiracProblem()


@pytest.fixture(scope="session")
def shifted_problem():
    return DiracProblem(alpha=PI / 2)


@pytest.fixture(scope="session")
def ex1():
    return example1_problem()


@pytest.fixture(scope="session")
def ex1_model(ex1):
    return AsymptoticNodalModel.from_problem(ex1)


@pytest.fixture(scope="session")
def ex1_spectrum(ex1):
    """Forward eigenvalues of the worked example over n in [20, 200]."""
    return eigenvalues(ex1, (20, 200))


@pytest.fixture(scope="session")
def ex1_nodes(ex1, ex1_spectrum):
    """Forward nodal sets for n in [20, 200], sharing grids with the spectrum."""
    return nodal_data(ex1, 20, 200, spectrum=ex1_spectrum)


@pytest.fixture(scope="session")
def ex1_synthetic(ex1_model):
    """Asymptotic nodal data on the top half of n <= 1e4."""
    return synthesize_nodal_data(ex1_model, 5000, 10000)


@pytest.fixture(scope="session")
def zero_synthetic():
    return synthesize_nodal_data(AsymptoticNodalModel.from_problem(DiracProblem()), 20, 200)


def sup(a):
    return float(np.max(np.abs(a)))
