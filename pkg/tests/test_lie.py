import numpy as np
import pytest

from epiobs.lie import finite_diff_jacobian, lie_stack
from epiobs.models import DomainError, ModelSpec
from epiobs.zoo import get_entry


def test_finite_diff_jacobian_on_polynomial():
    def fn(v):
        return np.array([v[0] ** 2 + 3.0 * v[1], v[0] * v[1]])

    point = np.array([2.0, -1.5])
    J = finite_diff_jacobian(fn, point)
    expected = np.array([[4.0, 3.0], [-1.5, 2.0]])
    assert np.allclose(J, expected, atol=1e-8)


def test_finite_diff_jacobian_reports_offending_coordinate():
    def fn(v):
        return np.where(v < 0, np.nan, v)

    with pytest.raises(DomainError, match="coordinate 1"):
        finite_diff_jacobian(fn, np.array([1.0, 0.0]))


def test_lie_stack_linear_system_matches_CA_powers():
    A = np.array([[-1.0, 2.0], [0.0, -3.0]])
    C = np.array([[1.0, 0.0]])
    spec = ModelSpec(
        n_states=2, n_params=0, n_outputs=1,
        f=lambda x, th, t: np.moveaxis(A @ np.moveaxis(x, -1, 0), 0, -1),
        h=lambda x, th, t: x[..., :1],
    )
    x = np.array([0.7, -0.4])
    stack = lie_stack(spec, x, np.array([]), order=1)
    O = np.vstack([C, C @ A])
    assert np.allclose(stack.jacobian, O, atol=1e-9)
    assert np.allclose(stack.values[:, 0], O @ x, atol=1e-9)


def test_lie_values_match_output_time_derivatives_sir():
    # y = k I, ydot = k (beta S I / N - gamma I): closed forms for the first
    # two Lie derivatives of the classical SIR output.
    entry = get_entry("sir-classical", beta=1.5, gamma=0.5, N=1000.0, k=1.0)
    S, I = 500.0, 100.0
    beta, gamma, N, k = 1.5, 0.5, 1000.0, 1.0
    stack = lie_stack(entry.spec, np.array([S, I]), entry.default_params,
                      order=2)
    L0 = k * I
    L1 = k * (beta * S * I / N - gamma * I)
    Sdot = -beta * S * I / N
    Idot = beta * S * I / N - gamma * I
    L2 = k * (beta / N * (Sdot * I + S * Idot) - gamma * Idot)
    assert np.allclose(stack.values[:, 0], [L0, L1, L2], rtol=1e-9)


def test_augmented_stack_det_matches_closed_form():
    # det of the 4x4 stacked Jacobian in the unknowns (S, I, beta, gamma)
    # has the closed form -k^4 beta^4 S I^6 / N^5.
    entry = get_entry("sir-classical", beta=1.5, gamma=0.5, N=1000.0, k=1.0)
    S, I = 500.0, 100.0
    stack = lie_stack(entry.spec, np.array([S, I]), entry.default_params,
                      order=3, augment=True)
    det = np.linalg.det(stack.jacobian)
    expected = -1.0 ** 4 * 1.5 ** 4 * S * I ** 6 / 1000.0 ** 5
    assert abs(det - expected) <= 1e-6 * abs(expected)
    assert not stack.degraded
