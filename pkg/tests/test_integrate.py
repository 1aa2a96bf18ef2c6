import numpy as np
import pytest

from epiobs.integrate import IntegrationError, integrate, solve_rk45
from epiobs.zoo import get_entry


def test_exponential_decay_matches_closed_form():
    t = np.linspace(0.0, 5.0, 50)
    xs = solve_rk45(lambda tt, x: -2.0 * x, t, np.array([3.0]),
                    rtol=1e-10, atol=1e-12)
    assert np.allclose(xs[:, 0], 3.0 * np.exp(-2.0 * t), rtol=1e-8, atol=1e-10)


def test_linear_oscillator_energy_preserved():
    t = np.linspace(0.0, 20.0, 101)
    A = np.array([[0.0, 1.0], [-1.0, 0.0]])
    xs = solve_rk45(lambda tt, x: A @ x, t, np.array([1.0, 0.0]),
                    rtol=1e-11, atol=1e-13)
    energy = np.sum(xs ** 2, axis=1)
    assert np.max(np.abs(energy - 1.0)) < 1e-8


def test_grid_points_are_hit_exactly():
    t = np.array([0.0, 0.1, 0.7, 0.70001, 3.0])
    xs = solve_rk45(lambda tt, x: np.array([np.cos(tt)]), t, np.array([0.0]),
                    rtol=1e-10, atol=1e-12)
    assert xs.shape == (5, 1)
    assert np.allclose(xs[:, 0], np.sin(t), atol=1e-9)


def test_blowup_raises_with_location():
    t = np.linspace(0.0, 2.0, 21)
    with pytest.raises(IntegrationError) as err:
        solve_rk45(lambda tt, x: x ** 2, t, np.array([5.0]))
    assert err.value.t_last < 2.0


def test_integrate_conserves_sir_population():
    entry = get_entry("sir-classical")
    t = np.linspace(0.0, 14.0, 57)
    traj = integrate(entry.spec, entry.default_x0, entry.default_params, t)
    N = 763.0
    S, I = traj.x[:, 0], traj.x[:, 1]
    assert np.all(S >= -1e-9) and np.all(I >= -1e-9)
    assert np.all(S + I <= N + 1e-6)


def test_tolerance_controls_error():
    t = np.linspace(0.0, 10.0, 11)
    loose = solve_rk45(lambda tt, x: -x, t, np.array([1.0]),
                       rtol=1e-4, atol=1e-6)
    tight = solve_rk45(lambda tt, x: -x, t, np.array([1.0]),
                       rtol=1e-11, atol=1e-13)
    exact = np.exp(-t)
    assert np.max(np.abs(tight[:, 0] - exact)) < np.max(
        np.abs(loose[:, 0] - exact) + 1e-15)
    assert np.max(np.abs(tight[:, 0] - exact)) < 1e-9
