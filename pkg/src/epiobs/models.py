"""Model containers shared by every analysis layer.

A model is a pair of maps ``f`` (vector field) and ``h`` (observation),
both written so they broadcast over a trailing state axis: ``f(x, theta, t)``
accepts ``x`` of shape ``(n,)`` or ``(..., n)``.  Autonomous models simply
ignore ``t``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

Array = np.ndarray
FieldFn = Callable[..., Array]


class DomainError(ValueError):
    """A map was evaluated outside its admissible set (non-finite result)."""


@dataclass(frozen=True)
class ModelSpec:
    """Vector field, observation map and optional analytic Jacobians.

    ``f(x, theta, t=0)`` returns the state derivative, ``h(x, theta, t=0)``
    the output vector.  Jacobian maps, when given, have shapes
    ``(n, n)``, ``(n, p)``, ``(m, n)`` and ``(m, p)`` at a single point.
    ``state_scales`` / ``param_scales`` carry characteristic magnitudes used
    to pick finite-difference steps (susceptibles of order 1e4 can coexist
    with rates of order 1e-4).
    """

    n_states: int
    n_params: int
    n_outputs: int
    f: FieldFn
    h: FieldFn
    jac_f_x: Optional[FieldFn] = None
    jac_f_theta: Optional[FieldFn] = None
    jac_h_x: Optional[FieldFn] = None
    jac_h_theta: Optional[FieldFn] = None
    state_names: Sequence[str] = ()
    param_names: Sequence[str] = ()
    output_names: Sequence[str] = ()
    state_scales: Optional[Array] = None
    param_scales: Optional[Array] = None
    time_varying: bool = False

    def __post_init__(self):
        if self.n_states <= 0 or self.n_params < 0 or self.n_outputs <= 0:
            raise ValueError("dimensions must be positive")
        if self.state_scales is None:
            object.__setattr__(self, "state_scales", np.ones(self.n_states))
        if self.param_scales is None:
            object.__setattr__(self, "param_scales", np.ones(max(self.n_params, 1)))

    def eval_f(self, x: Array, theta: Array, t: float = 0.0) -> Array:
        out = np.asarray(self.f(np.asarray(x, float), np.asarray(theta, float), t), float)
        if not np.all(np.isfinite(out)):
            raise DomainError(f"vector field non-finite at x={x!r}")
        return out

    def eval_h(self, x: Array, theta: Array, t: float = 0.0) -> Array:
        out = np.asarray(self.h(np.asarray(x, float), np.asarray(theta, float), t), float)
        if not np.all(np.isfinite(out)):
            raise DomainError(f"observation map non-finite at x={x!r}")
        return out


@dataclass(frozen=True)
class Trajectory:
    """Samples of an integrated solution on a strictly increasing grid.

    ``y`` is always recomputed as ``h(x[i], theta)``, never interpolated.
    """

    t: Array
    x: Array
    y: Array
    theta: Array = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        t = np.asarray(self.t, float)
        if t.ndim != 1 or len(t) == 0:
            raise ValueError("time grid must be a nonempty 1-d array")
        if len(t) > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("time grid must be strictly increasing")
        if len(self.x) != len(t) or len(self.y) != len(t):
            raise ValueError("t, x, y lengths disagree")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "x", np.asarray(self.x, float))
        object.__setattr__(self, "y", np.asarray(self.y, float))

    @classmethod
    def from_states(cls, model: ModelSpec, t: Array, x: Array, theta: Array) -> "Trajectory":
        t = np.asarray(t, float)
        x = np.asarray(x, float)
        y = np.stack([model.eval_h(x[i], theta, t[i]) for i in range(len(t))])
        return cls(t=t, x=x, y=y, theta=np.asarray(theta, float))
