import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epiobs.observers import (NoiseSpec, NotObservableError, ObserverConfig,
                              empirical_decay_rate, high_gain_spectrum,
                              pole_place_gain, run_luenberger,
                              run_malaria_observer, run_reduced_order,
                              simulate_with_noise, symmetric_functions,
                              vandermonde_inverse, vandermonde_matrix)
from epiobs.zoo import get_entry


def test_symmetric_functions_explicit_cubic():
    sig = symmetric_functions([-1.0, -2.0, -3.0])
    # sigma1 = sum, sigma2 = pairwise sum, sigma3 = product
    assert np.allclose(sig, [-6.0, 11.0, -6.0])


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-5.0, -0.1), min_size=2, max_size=6))
def test_pole_placement_random_companion_systems(lams):
    lams = np.array(sorted(set(np.round(lams, 3))))
    if len(lams) < 2:
        return
    n = len(lams)
    rng = np.random.default_rng(abs(hash(tuple(lams))) % 2 ** 31)
    # Random observable pair: random similarity transform of a companion form.
    A_c = np.zeros((n, n))
    A_c[1:, :-1] = np.eye(n - 1)
    A_c[:, -1] = rng.uniform(-1, 1, n)
    C_c = np.zeros((1, n))
    C_c[0, -1] = 1.0
    T = rng.uniform(-1, 1, (n, n)) + 2.0 * np.eye(n)
    A = T @ A_c @ np.linalg.inv(T)
    C = C_c @ np.linalg.inv(T)
    gain = pole_place_gain(A, C, lams)
    achieved = np.sort(np.linalg.eigvals(A + gain.g[:, None] @ C).real)
    scale = max(1.0, float(np.max(np.abs(lams))))
    assert np.max(np.abs(achieved - lams)) / scale < 1e-6


def test_pole_placement_rejects_unobservable_pair():
    A = np.diag([-1.0, -2.0])
    C = np.array([[1.0, 0.0]])
    with pytest.raises(NotObservableError):
        pole_place_gain(A, C, [-3.0, -4.0])


def test_vandermonde_inverse_matches_numpy():
    lams = np.array([-1.0, -2.5, -4.0, -7.0])
    V = vandermonde_matrix(lams)
    W = vandermonde_inverse(lams)
    assert np.allclose(W, np.linalg.inv(V), rtol=1e-10)


def test_vandermonde_inverse_norm_approaches_one():
    norms = []
    for alpha in (2.0, 10.0, 100.0):
        lams = -(alpha ** np.arange(1, 4))
        norms.append(np.max(np.sum(np.abs(vandermonde_inverse(lams)), axis=1)))
    assert norms[0] > norms[1] > norms[2]
    assert norms[2] < 1.1


def test_high_gain_spectrum_satisfies_rate_inequality():
    n, L, theta = 3, 0.8, 2.0
    lams = high_gain_spectrum(n, L, theta)
    assert np.all(np.diff(lams) < 0) and np.all(lams < 0)
    Winf = np.max(np.sum(np.abs(vandermonde_inverse(lams)), axis=1))
    assert lams[0] + np.sqrt(n) * L * Winf <= -theta + 1e-9


def test_luenberger_exact_initialization_stays_exact():
    entry = get_entry("three-stage")
    gain = pole_place_gain(entry.extras["A"], entry.extras["C"],
                           [-0.09, -0.099, -0.108])
    run = run_luenberger(entry, gain.g, entry.default_x0.copy(),
                         horizon=60.0)
    assert np.max(run.error_norm) < 1e-8 * max(
        1.0, float(np.max(np.abs(run.x_true))))


def test_luenberger_error_decays_from_wrong_start():
    entry = get_entry("three-stage")
    gain = pole_place_gain(entry.extras["A"], entry.extras["C"],
                           [-0.09, -0.099, -0.108])
    run = run_luenberger(entry, gain.g, np.zeros(3), horizon=200.0)
    assert run.error_norm[-1] < 1e-2 * run.error_norm[0]
    assert run.empirical_decay_rate < -0.05


def test_malaria_observer_dominant_decay_and_spectrum():
    entry = get_entry("malaria")
    L = np.array([0.0, 5.0, 5.0, 0.0, 0.0, 0.0, 0.0])
    run = run_malaria_observer(entry, L, np.zeros(7), horizon=150.0)
    eigs = np.sort(run.flags["spectrum"].real)
    assert np.min(np.abs(eigs - (-10.0))) < 1e-9  # assigned eigenvalue
    assert abs(np.max(eigs) - (-0.05)) < 1e-9     # slowest mode -mu_S
    assert run.error_norm[-1] < run.error_norm[0]


def test_reduced_order_decay_is_exactly_minus_mu():
    entry = get_entry("sir-fluctuating")
    # Start the estimator 50 individuals off so there is an error to decay.
    Z0 = float(entry.default_x0[0] + entry.default_x0[1]) + 50.0
    run = run_reduced_order(entry, Z0=Z0, horizon=120.0)
    assert run.flags["decay_rate_exact"] == -entry.extras["mu"]
    assert abs(run.empirical_decay_rate
               - run.flags["decay_rate_exact"]) < 0.05 * 0.05


def test_empirical_decay_rate_on_synthetic_exponential():
    t = np.linspace(0.0, 50.0, 200)
    err = 3.0 * np.exp(-0.7 * t)
    assert abs(empirical_decay_rate(t, err) + 0.7) < 1e-6


def test_noise_runs_are_seed_reproducible():
    entry = get_entry("sir-fluctuating")
    config = ObserverConfig(family="reduced-order", entry=entry,
                            x_hat0=np.array([float(entry.extras["N"])]),
                            horizon=40.0, n_grid=200)
    noise = NoiseSpec(kind="uniform", amplitude=2.0)
    a = simulate_with_noise(config, noise, seed=11)
    b = simulate_with_noise(config, noise, seed=11)
    c = simulate_with_noise(config, noise, seed=12)
    assert np.array_equal(a.x_hat, b.x_hat)
    assert not np.array_equal(a.x_hat, c.x_hat)


def test_counting_noise_yields_integer_like_streams():
    spec = NoiseSpec(kind="counting", amplitude=3.0)
    rng = np.random.default_rng(0)
    y = np.cumsum(np.abs(np.sin(np.arange(20.0)))) * 10.0
    corrupted = spec.corrupt(y, rng)
    assert np.allclose(corrupted, np.round(corrupted))
