import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epiobs.lie import finite_diff_jacobian
from epiobs.zoo import REGISTRY, get_entry

MODEL_IDS = sorted(REGISTRY)


@pytest.mark.parametrize("model_id", MODEL_IDS)
def test_defaults_are_admissible(model_id):
    entry = get_entry(model_id)
    spec = entry.spec
    x0, theta = entry.default_x0, entry.default_params
    assert len(x0) == spec.n_states
    assert len(theta) == spec.n_params
    assert entry.admissible(x0)
    dx = spec.eval_f(x0, theta, 0.0)
    y = spec.eval_h(x0, theta, 0.0)
    assert dx.shape == (spec.n_states,)
    assert y.shape == (spec.n_outputs,)
    assert np.all(np.isfinite(dx)) and np.all(np.isfinite(y))


@pytest.mark.parametrize("model_id", MODEL_IDS)
def test_sampler_respects_admissibility(model_id):
    entry = get_entry(model_id)
    rng = np.random.default_rng(7)
    for _ in range(10):
        x = entry.sample_admissible(rng)
        assert entry.admissible(x), f"{model_id} sampled inadmissible {x}"


@settings(max_examples=25, deadline=None)
@given(model_id=st.sampled_from(MODEL_IDS), seed=st.integers(0, 10_000))
def test_analytic_jacobians_match_finite_differences(model_id, seed):
    entry = get_entry(model_id)
    spec = entry.spec
    rng = np.random.default_rng(seed)
    x = entry.sample_admissible(rng)
    theta = entry.default_params
    t = 0.0
    pairs = [
        (spec.jac_f_x, lambda xx: spec.eval_f(xx, theta, t), x,
         spec.state_scales),
        (spec.jac_h_x, lambda xx: spec.eval_h(xx, theta, t), x,
         spec.state_scales),
    ]
    if spec.n_params:
        pairs += [
            (spec.jac_f_theta, lambda th: spec.eval_f(x, th, t), theta,
             spec.param_scales),
            (spec.jac_h_theta, lambda th: spec.eval_h(x, th, t), theta,
             spec.param_scales),
        ]
    for analytic, fn, point, scales in pairs:
        if analytic is None:
            continue
        J = np.atleast_2d(np.asarray(analytic(x, theta, t), float))
        J_fd = finite_diff_jacobian(fn, point, scale=scales)
        denom = max(1.0, float(np.max(np.abs(J_fd))))
        assert np.max(np.abs(J - J_fd)) / denom < 1e-6, model_id


def test_unknown_model_raises():
    with pytest.raises(KeyError):
        get_entry("not-a-model")


def test_piecewise_rates_are_deterministic():
    a = get_entry("sir-fluctuating")
    b = get_entry("sir-fluctuating")
    beta_a, beta_b = a.extras["beta_fn"], b.extras["beta_fn"]
    ts = np.linspace(0.0, 50.0, 23)
    assert np.array_equal([beta_a(t) for t in ts], [beta_b(t) for t in ts])
