import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import expit

from stopover import (
    ConstraintError,
    ParameterSet,
    StudyDesign,
    arrival_from_logistic,
    conditional_arrival,
    conditional_recruitment,
    params_from_dict,
    params_to_dict,
    random_parameters,
    retention_from_logistic,
    simplex_from_conditional,
)
from stopover.params import logits_from_simplex, simplex_from_logits


def test_conditional_recruitment_three_periods():
    npt.assert_allclose(conditional_recruitment([0.4, 0.2, 0.4]), [0.4, 1.0 / 3.0, 1.0], atol=1e-15)


def test_conditional_recruitment_all_mass_first():
    npt.assert_allclose(conditional_recruitment([1.0, 0.0]), [1.0, 0.0])


def test_conditional_recruitment_uniform_four():
    npt.assert_allclose(conditional_recruitment([0.25, 0.25, 0.25, 0.25]), [0.25, 1.0 / 3.0, 0.5, 1.0], atol=1e-15)


def test_conditional_arrival_examples():
    npt.assert_allclose(conditional_arrival([0.5, 0.5]), [0.5, 1.0])
    npt.assert_allclose(conditional_arrival([0.2, 0.3, 0.5]), [0.2, 0.375, 1.0], atol=1e-15)
    npt.assert_allclose(conditional_arrival([1.0, 0.0, 0.0]), [1.0, 0.0, 0.0])


def test_conditional_rejects_non_simplex():
    with pytest.raises(ConstraintError):
        conditional_recruitment([0.5, 0.6])
    with pytest.raises(ConstraintError):
        conditional_arrival([-0.1, 1.1])


@given(st.lists(st.floats(min_value=1e-6, max_value=1.0), min_size=1, max_size=12))
@settings(max_examples=200, deadline=None)
def test_stick_breaking_round_trip(weights):
    x = np.asarray(weights) / np.sum(weights)
    back = simplex_from_conditional(conditional_recruitment(x))
    npt.assert_allclose(back, x, atol=1e-12)


def test_stick_breaking_with_zero_tail():
    x = np.array([0.3, 0.7, 0.0])
    cond = conditional_recruitment(x)
    assert cond[2] == 0.0
    npt.assert_allclose(simplex_from_conditional(cond), x, atol=1e-12)


def test_arrival_from_logistic_uniform_cases():
    npt.assert_allclose(arrival_from_logistic(0.0, 0.0, 4), np.full(4, 0.25), atol=1e-15)
    npt.assert_allclose(arrival_from_logistic(0.0, 1.0, 5), np.full(5, 0.2), atol=1e-15)


def test_arrival_from_logistic_decreasing_slope():
    beta = arrival_from_logistic(-1.0, 1.0, 5)
    w = expit(1.0 - np.arange(1, 6))
    npt.assert_allclose(beta, w / w.sum(), atol=1e-15)
    assert np.all(np.diff(beta) < 0)


@given(
    st.floats(min_value=-4, max_value=4),
    st.floats(min_value=-4, max_value=4),
    st.integers(min_value=1, max_value=40),
)
@settings(max_examples=300, deadline=None)
def test_arrival_from_logistic_always_simplex(eta, delta, K):
    beta = arrival_from_logistic(eta, delta, K)
    assert beta.shape == (K,)
    assert abs(beta.sum() - 1.0) < 1e-12
    assert np.all(beta >= 0)


def test_retention_from_logistic_values():
    tau = np.array([2.5, 1.8, 2.1, 1.4])
    phi = retention_from_logistic(tau, -1.0, 5)
    assert phi.shape == (4, 4)
    npt.assert_allclose(phi[0, 0], expit(2.5), atol=1e-12)
    npt.assert_allclose(phi[0, 0], 0.924141819979, atol=1e-9)
    npt.assert_allclose(phi[3, 3], expit(1.4 - 3.0), atol=1e-12)
    npt.assert_allclose(phi[3, 3], 0.167981614866, atol=1e-9)


def test_retention_from_logistic_flat():
    phi = retention_from_logistic(np.zeros(3), 0.0, 4)
    npt.assert_allclose(phi, np.full((3, 3), 0.5))


@given(st.lists(st.floats(min_value=-8, max_value=8), min_size=0, max_size=8))
@settings(max_examples=200, deadline=None)
def test_simplex_logit_round_trip(logits):
    theta = np.asarray(logits)
    simplex = simplex_from_logits(theta, theta.size + 1)
    assert abs(simplex.sum() - 1.0) < 1e-12
    npt.assert_allclose(logits_from_simplex(simplex), theta, atol=1e-9)


def test_simplex_from_logits_symmetry():
    npt.assert_allclose(simplex_from_logits(np.zeros(2), 3), np.full(3, 1.0 / 3.0))


def test_parameter_set_validation_catches_bad_inputs(tiny_design, rng):
    params = random_parameters(tiny_design, rng)
    good = params_to_dict(params)

    bad = dict(good)
    bad["r"] = [0.9, 0.3]
    with pytest.raises(ConstraintError):
        params_from_dict(tiny_design, bad)

    bad = dict(good)
    bad["psi"] = [[[0.5, 0.4], [0.3, 0.7]], good["psi"][1]]
    with pytest.raises(ConstraintError):
        params_from_dict(tiny_design, bad)

    bad = dict(good)
    bad["N"] = -3.0
    with pytest.raises(ConstraintError):
        params_from_dict(tiny_design, bad)


def test_parameter_set_respects_availability():
    design = StudyDesign(T=2, K=(2, 2), G=2, availability=((1,), (1, 2)))
    rng = np.random.default_rng(3)
    params = random_parameters(design, rng)
    assert params.alpha[0][1] == 0.0
    assert params.Psi[0][0, 1] == 0.0
    # breaking the structural zero must fail validation
    data = params_to_dict(params)
    data["alpha"][0] = [0.8, 0.2]
    with pytest.raises(ConstraintError):
        params_from_dict(design, data)


def test_params_dict_round_trip(tiny_design, rng):
    params = random_parameters(tiny_design, rng)
    back = params_from_dict(tiny_design, params_to_dict(params))
    npt.assert_allclose(back.r, params.r)
    npt.assert_allclose(back.p[1], params.p[1])
    npt.assert_allclose(back.Psi[0], params.Psi[0])


def test_parameter_arrays_are_immutable(tiny_design, rng):
    params = random_parameters(tiny_design, rng)
    with pytest.raises(ValueError):
        params.r[0] = 0.9
    with pytest.raises(ValueError):
        params.Psi[0][0, 0] = 0.9
