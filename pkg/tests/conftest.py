import numpy as np
import pytest

from stopover import StudyDesign, reference_scenario


@pytest.fixture(scope="session")
def tiny_design():
    # smallest design that exercises both chain levels and the state machinery
    return StudyDesign(T=2, K=(2, 2), G=2)


@pytest.fixture(scope="session")
def scenario100():
    return reference_scenario(100)


@pytest.fixture(scope="session")
def scenario_dataset():
    from stopover import simulate

    params, design = reference_scenario(100)
    dataset, truth = simulate(params, design, seed=7)
    return params, design, dataset, truth


@pytest.fixture()
def rng():
    return np.random.default_rng(20260810)
