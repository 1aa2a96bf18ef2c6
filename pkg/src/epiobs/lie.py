"""Numeric differentiation: Jacobians and stacked Lie derivatives.

Lie derivatives are obtained by recursive directional differentiation
``L_f^{i+1} h = grad(L_f^i h) . f`` with central finite differences.  Nesting
amplifies round-off, so the gradients inside the recursion use 5-point
(fourth-order) central stencils with a step that grows with the nesting
level; plain first-order Jacobians use the usual 3-point stencil with the
cube-root-of-epsilon step.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .models import DomainError, ModelSpec

Array = np.ndarray

_EPS = float(np.finfo(float).eps)

# Relative steps per nesting level: step ~ noise^(1/5), noise_{j+1} ~ noise_j^(4/5).
_LEVEL_STEPS: list[float] = []
_LEVEL_NOISE: list[float] = []
_nz = _EPS
for _ in range(12):
    _LEVEL_NOISE.append(_nz)
    _LEVEL_STEPS.append(min(0.05, _nz ** 0.2))
    _nz = _nz ** 0.8


def finite_diff_jacobian(
    fn: Callable[[Array], Array],
    point: Array,
    scale: float | Array = 1.0,
) -> Array:
    """Central-difference Jacobian of ``fn`` at ``point``.

    Per-coordinate step ``cbrt(eps) * max(|point_i|, scale_i)``.  ``fn`` must
    return a 1-d array; raises :class:`DomainError` naming the coordinate on
    a non-finite evaluation.
    """
    point = np.asarray(point, float)
    scale = np.broadcast_to(np.asarray(scale, float), point.shape)
    steps = _EPS ** (1 / 3) * np.maximum(np.abs(point), scale)
    f0 = np.atleast_1d(np.asarray(fn(point), float))
    jac = np.empty((len(f0), len(point)))
    for i, hi in enumerate(steps):
        hi = float(hi)
        up, dn = point.copy(), point.copy()
        up[i] += hi
        dn[i] -= hi
        fu = np.atleast_1d(np.asarray(fn(up), float))
        fd = np.atleast_1d(np.asarray(fn(dn), float))
        if not (np.all(np.isfinite(fu)) and np.all(np.isfinite(fd))):
            raise DomainError(f"non-finite evaluation while perturbing coordinate {i}")
        jac[:, i] = (fu - fd) / (2 * hi)
    return jac


@dataclass(frozen=True)
class LieStack:
    """Output derivatives ``(y, y', ..., y^(k))`` at a point, with Jacobian.

    ``values[j]`` is the ``m``-vector of ``j``-th output derivatives;
    ``jacobian`` stacks the gradients of all values with respect to the
    (possibly parameter-augmented) point, shape ``(m*(k+1), dim)``.
    ``degraded`` flags orders where finite-difference noise plausibly
    dominates the computed values.
    """

    point: Array
    values: Array  # (k+1, m)
    jacobian: Array  # (m*(k+1), dim)
    degraded: bool = False

    @property
    def order(self) -> int:
        return len(self.values) - 1


def lie_stack(
    model: ModelSpec,
    point: Array,
    theta: Array,
    order: int,
    augment: bool = False,
) -> LieStack:
    """Stack of Lie derivatives of the output map along the vector field.

    With ``augment`` the point is the concatenation ``(x, theta)`` and the
    parameters evolve with zero dynamics, so the Jacobian also carries the
    sensitivities of every output derivative to the parameters.  A bare
    state vector may be passed in the augmented case; ``theta`` is then
    appended.
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    theta = np.asarray(theta, float)
    point = np.asarray(point, float)
    n, p, m = model.n_states, model.n_params, model.n_outputs

    if augment:
        if len(point) == n:
            point = np.concatenate([point, theta])
        elif len(point) != n + p:
            raise ValueError("augmented point must have n or n+p entries")
        scales = np.concatenate([model.state_scales, model.param_scales[:p]])

        def H(pts):  # pts (..., n+p) -> (..., m)
            return model.h(pts[..., :n], np.moveaxis(pts[..., n:], -1, 0), 0.0)

        def F(pts):
            dx = model.f(pts[..., :n], np.moveaxis(pts[..., n:], -1, 0), 0.0)
            return np.concatenate([dx, np.zeros(pts.shape[:-1] + (p,))], axis=-1)

    else:
        if len(point) != n:
            raise ValueError("point must have n entries")
        scales = np.asarray(model.state_scales, float)

        def H(pts):
            return model.h(pts, theta, 0.0)

        def F(pts):
            return np.asarray(model.f(pts, theta, 0.0))

    dim = len(point)
    steps_abs = [_LEVEL_STEPS[j] * np.maximum(np.abs(point), scales) for j in range(order + 2)]

    def grad(level: int, pts: Array) -> Array:
        """Fourth-order central gradient of g_level, batched: (B, m, dim)."""
        B = pts.shape[0]
        h = steps_abs[level]  # (dim,)
        offs = np.array([-2.0, -1.0, 1.0, 2.0])
        # perturbed points: (B, dim, 4, dim)
        pert = pts[:, None, None, :] + offs[None, None, :, None] * (np.eye(dim) * h)[None, :, None, :]
        vals = g(level, pert.reshape(-1, dim)).reshape(B, dim, 4, m)
        w = np.array([1.0, -8.0, 8.0, -1.0])
        d = np.einsum("s,bism->bim", w, vals) / (12.0 * h)[None, :, None]
        return np.swapaxes(d, 1, 2)  # (B, m, dim)

    def g(level: int, pts: Array) -> Array:
        """Value of the level-th Lie derivative at a batch of points: (B, m)."""
        if level == 0:
            return np.asarray(H(pts), float).reshape(pts.shape[0], m)
        gr = grad(level - 1, pts)  # (B, m, dim)
        return np.einsum("bmd,bd->bm", gr, np.asarray(F(pts), float).reshape(pts.shape[0], dim))

    base = point[None, :]
    values = np.stack([g(j, base)[0] for j in range(order + 1)])
    jac = np.concatenate([grad(j, base)[0] for j in range(order + 1)], axis=0)
    if not np.all(np.isfinite(values)) or not np.all(np.isfinite(jac)):
        raise DomainError("non-finite value in Lie derivative stack")

    # Noise heuristic: values are expected to scale like |h| * rate^j; orders
    # whose magnitude falls under the accumulated round-off level are suspect.
    mag0 = max(float(np.max(np.abs(values[0]))), _EPS)
    rate = max(float(np.max(np.abs(F(base)) / np.maximum(scales, _EPS))), 1.0)
    degraded = any(
        0.0 < float(np.max(np.abs(values[j]))) < _LEVEL_NOISE[j] * mag0 * rate ** j
        for j in range(1, order + 1)
    )
    return LieStack(point=point, values=values, jacobian=jac, degraded=degraded)
