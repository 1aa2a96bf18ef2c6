"""Forward sensitivity equations and the output sensitivity matrix.

Integrates the joint system ``x' = f``, ``z' = A z + B`` (z(0) = 0),
``w' = A w`` (w(0) = Id) with A = df/dx and B = df/dtheta evaluated along the
trajectory, plus the scalar quadrature of trace A so the fundamental-matrix
determinant can be cross-checked against the Liouville formula.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .integrate import solve_rk45
from .lie import finite_diff_jacobian
from .models import ModelSpec

Array = np.ndarray


@dataclass(frozen=True)
class SensitivityBundle:
    """State, parameter and initial-condition sensitivities on a grid."""

    t: Array        # (M,)
    x: Array        # (M, n)
    z: Array        # (M, n, p)  dx/dtheta
    w: Array        # (M, n, n)  dx/dx0
    trace_quad: Array  # (M,) integral of trace A, for the Liouville check

    def liouville_residual(self) -> float:
        """Max relative gap between det w(t) and exp(int trace A)."""
        dets = np.array([np.linalg.det(wi) for wi in self.w])
        ref = np.exp(self.trace_quad)
        return float(np.max(np.abs(dets - ref) / np.maximum(np.abs(ref), 1e-300)))


def _jac_f_x(model: ModelSpec, x: Array, theta: Array, t: float) -> Array:
    if model.jac_f_x is not None:
        return np.asarray(model.jac_f_x(x, theta, t), float)
    return finite_diff_jacobian(
        lambda xx: model.f(xx, theta, t), x, scale=model.state_scales)


def _jac_f_theta(model: ModelSpec, x: Array, theta: Array, t: float) -> Array:
    if model.jac_f_theta is not None:
        return np.asarray(model.jac_f_theta(x, theta, t), float)
    return finite_diff_jacobian(
        lambda th: model.f(x, th, t), theta, scale=model.param_scales)


def sensitivity_solve(
    model: ModelSpec,
    theta: Array,
    x0: Array,
    t_grid: Array,
    rtol: float = 1e-10,
    atol: float = 1e-12,
) -> SensitivityBundle:
    """Solve the joint state/sensitivity system on ``t_grid``."""
    theta = np.asarray(theta, float)
    x0 = np.asarray(x0, float)
    n, p = model.n_states, model.n_params
    nz, nw = n * p, n * n

    def rhs(t, v):
        x = v[:n]
        z = v[n:n + nz].reshape(n, p)
        w = v[n + nz:n + nz + nw].reshape(n, n)
        A = _jac_f_x(model, x, theta, t)
        B = _jac_f_theta(model, x, theta, t) if p else np.zeros((n, 0))
        return np.concatenate([
            np.asarray(model.f(x, theta, t), float),
            (A @ z + B).ravel(),
            (A @ w).ravel(),
            [np.trace(A)],
        ])

    v0 = np.concatenate([x0, np.zeros(nz), np.eye(n).ravel(), [0.0]])
    vs = solve_rk45(rhs, np.asarray(t_grid, float), v0, rtol=rtol, atol=atol)
    M = len(vs)
    return SensitivityBundle(
        t=np.asarray(t_grid, float),
        x=vs[:, :n],
        z=vs[:, n:n + nz].reshape(M, n, p),
        w=vs[:, n + nz:n + nz + nw].reshape(M, n, n),
        trace_quad=vs[:, -1],
    )


def output_sensitivity(
    bundle: SensitivityBundle,
    model: ModelSpec,
    theta: Array,
    include_x0: bool = False,
) -> Array:
    """Sensitivity chi of the output to the fitted quantities, per grid point.

    chi = (dh/dx) [z | w] + [dh/dtheta | 0]; shape (M, m, p) or (M, m, p + n)
    when initial conditions count as parameters.
    """
    theta = np.asarray(theta, float)
    n, p, m = model.n_states, model.n_params, model.n_outputs
    M = len(bundle.t)
    cols = p + (n if include_x0 else 0)
    chi = np.empty((M, m, cols))
    for i in range(M):
        x, t = bundle.x[i], bundle.t[i]
        if model.jac_h_x is not None:
            Hx = np.asarray(model.jac_h_x(x, theta, t), float).reshape(m, n)
        else:
            Hx = finite_diff_jacobian(
                lambda xx: model.h(xx, theta, t), x, scale=model.state_scales)
        if p:
            if model.jac_h_theta is not None:
                Ht = np.asarray(model.jac_h_theta(x, theta, t), float).reshape(m, p)
            else:
                Ht = finite_diff_jacobian(
                    lambda th: model.h(x, th, t), theta, scale=model.param_scales)
            chi[i, :, :p] = Hx @ bundle.z[i] + Ht
        if include_x0:
            chi[i, :, p:] = Hx @ bundle.w[i]
    return chi
