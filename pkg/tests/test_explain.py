"""Exact Shapley attribution: coalition weights, game axioms, the linear
closed form, and the directional-impact summary."""

import math

import numpy as np
import pytest

from kilnopt.explain import (
    ExplainError,
    coalition_weights,
    directional_impact,
    exact_shapley,
)
from util import FixedModel, LinearStub


# -------------------------------------------------------------- weights


def test_coalition_weights_small_cases():
    np.testing.assert_allclose(coalition_weights(1), [1.0])
    np.testing.assert_allclose(coalition_weights(2), [0.5, 0.5])
    np.testing.assert_allclose(
        coalition_weights(3), [2.0 / 6.0, 1.0 / 6.0, 2.0 / 6.0]
    )
    with pytest.raises(ExplainError):
        coalition_weights(0)


@pytest.mark.parametrize("d", [1, 2, 3, 5, 8, 12])
def test_coalition_weights_sum_to_one_per_feature(d):
    # summed over all coalitions that exclude a given feature:
    # sum_s C(d-1, s) * w[s] = 1
    w = coalition_weights(d)
    total = sum(math.comb(d - 1, s) * w[s] for s in range(d))
    assert total == pytest.approx(1.0, abs=1e-12)


# -------------------------------------------------------------- axioms


def test_linear_model_closed_form():
    # for f(x) = w @ x + b under the marginal-expectation convention:
    # phi_k = w_k * (x_k - background column mean)
    rng = np.random.default_rng(0)
    d = 7
    w = rng.standard_normal(d) * 3.0
    model = LinearStub(w, b=40.0)
    background = rng.standard_normal((64, d)) * 2.0 + 1.0
    for _ in range(5):
        x = rng.standard_normal(d) * 4.0
        att = exact_shapley(model, x, background)
        np.testing.assert_allclose(
            att.phi, w * (x - background.mean(axis=0)), atol=1e-9
        )
        assert att.prediction == pytest.approx(float(w @ x + 40.0), rel=1e-12)
        assert att.baseline == pytest.approx(
            float(np.mean(model.predict(background))), rel=1e-12
        )


def test_efficiency_on_nonlinear_model():
    # attributions sum exactly to prediction minus baseline
    rng = np.random.default_rng(1)

    def fn(r):
        return r[0] * r[1] + np.sin(r[2]) + 0.5 * r[3] ** 2 - r[4] * abs(r[5]) + r[6]

    model = FixedModel(fn)
    background = rng.standard_normal((48, 7))
    for _ in range(20):
        att = exact_shapley(model, rng.standard_normal(7) * 2.0, background)
        assert att.efficiency_gap <= 1e-9


def test_null_feature_gets_exactly_zero():
    # the model never reads features 3 and 4
    rng = np.random.default_rng(2)
    model = FixedModel(lambda r: r[0] * r[1] - 2.0 * r[2])
    background = rng.standard_normal((32, 5))
    att = exact_shapley(model, rng.standard_normal(5), background)
    assert att.phi[3] == 0.0
    assert att.phi[4] == 0.0
    assert att.phi[0] != 0.0


def test_symmetric_features_get_equal_attribution():
    # features 0 and 1 enter the model identically; with identical
    # background columns and equal query values their shares match exactly
    rng = np.random.default_rng(3)
    background = rng.standard_normal((40, 4))
    background[:, 1] = background[:, 0]
    model = FixedModel(lambda r: r[0] + r[1] + 3.0 * r[2] * r[3])
    x = np.array([1.3, 1.3, -0.4, 0.9])
    att = exact_shapley(model, x, background)
    assert att.phi[0] == att.phi[1]


def test_exact_shapley_validation():
    model = LinearStub(np.ones(3))
    bg = np.zeros((4, 3))
    with pytest.raises(ExplainError, match="1-D"):
        exact_shapley(model, np.zeros((2, 3)), bg)
    with pytest.raises(ExplainError, match="columns"):
        exact_shapley(model, np.zeros(3), np.zeros((4, 2)))
    with pytest.raises(ExplainError, match="non-empty"):
        exact_shapley(model, np.zeros(3), np.zeros((0, 3)))
    with pytest.raises(ExplainError, match="15"):
        exact_shapley(LinearStub(np.ones(16)), np.zeros(16), np.zeros((4, 16)))


def test_chunked_enumeration_matches_closed_form():
    # a large background forces the coalition batch to split into chunks;
    # the result must not depend on that batching
    rng = np.random.default_rng(4)
    d = 8
    w = rng.standard_normal(d)
    model = LinearStub(w, b=-3.0)
    background = rng.standard_normal((5000, d))
    x = rng.standard_normal(d)
    att = exact_shapley(model, x, background)
    np.testing.assert_allclose(att.phi, w * (x - background.mean(axis=0)), atol=1e-9)
    assert att.efficiency_gap <= 1e-9


# ---------------------------------------------------- directional impact


def test_directional_impact_recovers_monotone_signs():
    rng = np.random.default_rng(5)
    X = rng.standard_normal((300, 5)) * 2.0 + 5.0
    w = np.array([5.0, -3.0, 0.0, 2.0, -1.0])
    imp = directional_impact(LinearStub(w), X, n_samples=60, n_background=64, seed=0)
    np.testing.assert_array_equal(imp.signs, [1, -1, 0, 1, -1])
    # linear attribution is an affine function of the feature value, so
    # the correlations are perfect where the weight is nonzero
    assert imp.pearson_r[0] == pytest.approx(1.0, abs=1e-9)
    assert imp.pearson_r[1] == pytest.approx(-1.0, abs=1e-9)
    assert imp.pearson_r[2] == 0.0
    assert imp.phi_matrix.shape == (60, 5)
    assert imp.rows.shape == (60, 5)


def test_directional_impact_seeded_and_bounded_by_data():
    rng = np.random.default_rng(6)
    X = rng.standard_normal((10, 3))
    model = LinearStub(np.array([1.0, 2.0, -1.0]))
    a = directional_impact(model, X, n_samples=50, n_background=50, seed=1)
    b = directional_impact(model, X, n_samples=50, n_background=50, seed=1)
    np.testing.assert_array_equal(a.phi_matrix, b.phi_matrix)
    # fewer rows than requested: every row explained exactly once
    assert a.phi_matrix.shape[0] == 10
    rows_set = {tuple(r) for r in X}
    assert all(tuple(r) in rows_set for r in a.rows)


def test_directional_impact_validation():
    model = LinearStub(np.ones(2))
    with pytest.raises(ExplainError, match="2-D"):
        directional_impact(model, np.zeros(4))
    with pytest.raises(ExplainError, match="non-empty"):
        directional_impact(model, np.zeros((0, 2)))
