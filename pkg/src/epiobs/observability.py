"""Structural observability and identifiability tests.

Linear observability matrices, the nonlinear observability rank condition on
numeric Lie-derivative stacks, trajectory-level indistinguishability probes
and a rank-based detectability check.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .integrate import integrate
from .lie import lie_stack
from .models import ModelSpec

Array = np.ndarray

#: Factor in the SVD rank rule: sigma counted nonzero iff
#: sigma > max(rows, cols) * sigma_max * RANK_TOL_FACTOR.
RANK_TOL_FACTOR = 1e-10


@dataclass(frozen=True)
class RankReport:
    """Numerical rank verdict on a stacked-derivative Jacobian."""

    point: Array
    stack_order: int
    singular_values: Array
    numerical_rank: int
    full_rank: bool
    condition_number: float
    null_directions: Array  # (n_cols, n_null), orthonormal columns
    determinant: Optional[float] = None
    degraded: bool = False

    def to_dict(self) -> dict:
        return {
            "point": np.asarray(self.point).tolist(),
            "stack_order": self.stack_order,
            "singular_values": np.asarray(self.singular_values).tolist(),
            "numerical_rank": self.numerical_rank,
            "full_rank": self.full_rank,
            "condition_number": self.condition_number,
            "null_directions": np.asarray(self.null_directions).T.tolist(),
            "determinant": self.determinant,
            "degraded": self.degraded,
        }


def _rank_report(
    J: Array,
    point: Array,
    stack_order: int,
    tol_factor: float = RANK_TOL_FACTOR,
    determinant: Optional[float] = None,
    degraded: bool = False,
) -> RankReport:
    J = np.atleast_2d(np.asarray(J, float))
    rows, cols = J.shape
    _, s, Vt = np.linalg.svd(J)
    smax = s[0] if len(s) else 0.0
    tol = max(rows, cols) * smax * tol_factor
    rank = int(np.sum(s > tol))
    full = rank == cols
    if full and s[-1] > 0 and len(s) == min(rows, cols):
        cond = float(smax / s[min(rows, cols) - 1])
    else:
        cond = float("inf")
    null = Vt[rank:].T.copy()
    return RankReport(
        point=np.asarray(point, float),
        stack_order=stack_order,
        singular_values=s,
        numerical_rank=rank,
        full_rank=full,
        condition_number=cond,
        null_directions=null,
        determinant=determinant,
        degraded=degraded,
    )


def linear_observability(
    A: Array, C: Array, tol_factor: float = RANK_TOL_FACTOR
) -> RankReport:
    """Rank of the observability matrix ``[C; CA; ...; C A^(n-1)]``."""
    A = np.atleast_2d(np.asarray(A, float))
    C = np.atleast_2d(np.asarray(C, float))
    n = A.shape[0]
    if A.shape != (n, n) or C.shape[1] != n:
        raise ValueError("dimension mismatch between A and C")
    blocks = [C]
    for _ in range(n - 1):
        blocks.append(blocks[-1] @ A)
    O = np.vstack(blocks)
    return _rank_report(O, point=np.zeros(n), stack_order=n - 1,
                        tol_factor=tol_factor)


def observability_matrix(A: Array, C: Array) -> Array:
    """The Kalman observability matrix of the pair (A, C)."""
    A = np.atleast_2d(np.asarray(A, float))
    C = np.atleast_2d(np.asarray(C, float))
    blocks = [C]
    for _ in range(A.shape[0] - 1):
        blocks.append(blocks[-1] @ A)
    return np.vstack(blocks)


def orc_rank(
    model: ModelSpec,
    point: Array,
    theta: Array,
    augment: bool = False,
    order: Optional[int] = None,
    tol_factor: float = RANK_TOL_FACTOR,
) -> RankReport:
    """Observability rank condition at a point via a numeric Lie stack.

    With ``augment`` the parameters join the state and the verdict covers
    joint state/parameter identifiability.  Default stack order is
    ``dim - 1`` where ``dim`` is the (augmented) point dimension, capped so
    the nested finite-difference stencil (cost ~ (4 dim)^order evaluations)
    stays tractable for large models; pass ``order`` explicitly to go
    deeper.  For square stacked Jacobians the determinant is reported.
    """
    dim = model.n_states + (model.n_params if augment else 0)
    if order is None:
        order = dim - 1
        while order > 1 and (4.0 * dim) ** order > 5e6:
            order -= 1
    order = min(order, model.n_states + model.n_params - 1)
    stack = lie_stack(model, point, theta, order=order, augment=augment)
    J = stack.jacobian
    det = float(np.linalg.det(J)) if J.shape[0] == J.shape[1] else None
    return _rank_report(J, point=stack.point, stack_order=order,
                        tol_factor=tol_factor, determinant=det,
                        degraded=stack.degraded)


def generic_rank(
    model: ModelSpec,
    theta: Array,
    sample,
    n_samples: int = 20,
    seed: int = 0,
    augment: bool = False,
    order: Optional[int] = None,
) -> list:
    """Rank reports at seeded random admissible points.

    ``sample`` is a callable drawing one admissible state from a Generator.
    A model is generically full rank only if every sampled report is.
    """
    rng = np.random.default_rng(seed)
    return [
        orc_rank(model, sample(rng), theta, augment=augment, order=order)
        for _ in range(n_samples)
    ]


def indistinguishability_probe(
    model: ModelSpec,
    point_a: Array,
    point_b: Array,
    theta_a: Array,
    theta_b: Array,
    horizon: float,
    n_grid: int = 200,
    model_b: Optional[ModelSpec] = None,
    rtol: float = 1e-10,
    atol: float = 1e-12,
) -> float:
    """Sup-norm gap between the outputs of two initializations.

    Integrates both (state, parameter) pairs over ``[0, horizon]`` on a
    common grid and returns ``max_t |y_a(t) - y_b(t)|``.  A second model may
    be supplied to compare across reparameterizations.
    """
    t = np.linspace(0.0, horizon, n_grid)
    ya = integrate(model, point_a, theta_a, t, rtol=rtol, atol=atol).y
    yb = integrate(model_b or model, point_b, theta_b, t, rtol=rtol, atol=atol).y
    return float(np.max(np.abs(ya - yb)))


@dataclass(frozen=True)
class DetectabilityVerdict:
    """Outcome of the linear detectability test."""

    observable: bool
    detectable: bool
    marginal: bool
    unobservable_eigenvalues: Array
    rank_report: RankReport = field(repr=False, default=None)


def detectability_linear(
    A: Array, C: Array, tol_factor: float = RANK_TOL_FACTOR
) -> DetectabilityVerdict:
    """Detectability of the pair (A, C).

    Restricts ``A`` to the numerical null space of the observability matrix
    and checks that every eigenvalue there has negative real part.
    Eigenvalues on the imaginary axis (within tolerance) set ``marginal``
    and fail the verdict rather than passing silently.
    """
    A = np.atleast_2d(np.asarray(A, float))
    report = linear_observability(A, C, tol_factor=tol_factor)
    V = report.null_directions
    if V.shape[1] == 0:
        return DetectabilityVerdict(
            observable=True, detectable=True, marginal=False,
            unobservable_eigenvalues=np.zeros(0), rank_report=report)
    M = V.T @ A @ V
    eig = np.linalg.eigvals(M)
    margin = 1e-9 * max(1.0, float(np.max(np.abs(A))))
    marginal = bool(np.any(np.abs(eig.real) <= margin))
    detectable = bool(np.all(eig.real < -margin))
    return DetectabilityVerdict(
        observable=False, detectable=detectable, marginal=marginal,
        unobservable_eigenvalues=eig, rank_report=report)
