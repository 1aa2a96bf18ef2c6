"""OLS fitting, Fisher information and confidence intervals.

Levenberg-Marquardt on the output residuals with the analytic Jacobian from
the forward sensitivity system, then FIM-based standard errors with
Student-t half-widths.  Degrees of freedom follow the dataset's convention:
M - p when the initial condition is known, M - (n + p) when it is estimated
along with the parameters (p counts every fitted entry).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .models import DomainError, ModelSpec
from .integrate import IntegrationError, integrate
from .sensitivity import output_sensitivity, sensitivity_solve
from .student import t_quantile

Array = np.ndarray

#: Condition number beyond which the covariance is flagged unreliable.
ILL_CONDITIONED_THRESHOLD = 1e12


@dataclass(frozen=True)
class Dataset:
    """Scalar observation series with its degrees-of-freedom convention."""

    t: Array
    Y: Array
    output_index: int = 0
    dof_convention: str = "known-x0"  # known-x0 | estimated-x0
    name: str = ""

    def __post_init__(self):
        t = np.asarray(self.t, float)
        Y = np.asarray(self.Y, float)
        if len(t) != len(Y):
            raise ValueError("t and Y lengths disagree")
        if np.any(np.diff(t) < 0):
            raise ValueError("observation times must be nondecreasing")
        if not np.all(np.isfinite(Y)):
            raise ValueError("observations must be finite")
        if self.dof_convention not in ("known-x0", "estimated-x0"):
            raise ValueError(f"unknown dof convention {self.dof_convention!r}")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "Y", Y)

    @property
    def M(self) -> int:
        return len(self.t)

    def estimates_x0(self) -> bool:
        return self.dof_convention == "estimated-x0"

    def dof(self, n_states: int, n_fitted: int) -> int:
        """M - p (known x0) or M - (n + p); p counts every fitted entry."""
        if self.estimates_x0():
            return self.M - (n_states + n_fitted)
        return self.M - n_fitted


@dataclass(frozen=True)
class FitResult:
    theta_hat: Array
    x0_hat: Array
    sse: float
    sigma2_hat: float
    dof: int
    iterations: int
    converged: bool
    stalled: bool
    gradient_norm: float
    estimates_x0: bool


@dataclass(frozen=True)
class FimReport:
    fim: Array
    covariance: Array
    standard_errors: Array
    condition_number: float
    t_quantile: float
    half_widths: Array
    intervals: Array  # (k, 2) lower/upper
    ill_conditioned: bool
    dof: int


def fim(chi_samples: Array, sigma2: float) -> Array:
    """FIM = (1/sigma^2) sum_i chi_i^T chi_i over all observation times."""
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    chi = np.asarray(chi_samples, float)
    if chi.ndim == 2:
        chi = chi[:, None, :]
    F = np.einsum("imk,iml->ikl", chi, chi) .sum(axis=0) / sigma2
    return 0.5 * (F + F.T)


def _predict(model: ModelSpec, theta: Array, x0: Array, dataset: Dataset,
             rtol: float, atol: float) -> Array:
    t = dataset.t
    t_solve, inverse = np.unique(t, return_inverse=True)
    traj = integrate(model, x0, theta, t_solve, rtol=rtol, atol=atol)
    return traj.y[inverse, dataset.output_index]


def _residual_jacobian(model: ModelSpec, theta: Array, x0: Array,
                       dataset: Dataset, estimate_x0: bool,
                       rtol: float, atol: float):
    t_solve, inverse = np.unique(dataset.t, return_inverse=True)
    bundle = sensitivity_solve(model, theta, x0, t_solve, rtol=rtol, atol=atol)
    chi = output_sensitivity(bundle, model, theta, include_x0=estimate_x0)
    chi_out = chi[inverse, dataset.output_index, :]
    y = np.array([
        model.eval_h(bundle.x[i], theta, bundle.t[i])[dataset.output_index]
        for i in range(len(t_solve))
    ])[inverse]
    r = dataset.Y - y
    return r, -chi_out  # J = d residual / d Theta


def ols_fit(
    model: ModelSpec,
    dataset: Dataset,
    initial_guess: Array,
    x0: Optional[Array] = None,
    lower_bounds: Optional[Array] = None,
    max_iter: int = 400,
    ftol: float = 1e-8,
    stall_window: int = 30,
    stall_tol: float = 1e-3,
    rtol: float = 1e-8,
    atol: float = 1e-10,
) -> FitResult:
    """Levenberg-Marquardt least squares fit of theta (and optionally x0).

    When the dataset's convention is ``estimated-x0`` the guess concatenates
    (theta, x0) and ``x0`` must be omitted.  Lower bounds default to 0
    (rates and populations are nonnegative); trial steps are clipped onto
    them.

    On a practically non-identifiable ridge the objective keeps creeping
    down without ever becoming stationary; the fit is then declared
    converged (``stalled`` set) once the relative improvement over the last
    ``stall_window`` accepted steps drops below ``stall_tol``.
    """
    estimate_x0 = dataset.estimates_x0()
    guess = np.asarray(initial_guess, float).copy()
    n, p = model.n_states, model.n_params
    if estimate_x0:
        if x0 is not None:
            raise ValueError("x0 is part of the fit under estimated-x0")
        if len(guess) != p + n:
            raise ValueError(f"guess must have {p + n} entries (theta, x0)")
    else:
        if x0 is None:
            raise ValueError("x0 is required under known-x0")
        if len(guess) != p:
            raise ValueError(f"guess must have {p} entries")
        x0 = np.asarray(x0, float)
    k = len(guess)
    lb = np.zeros(k) if lower_bounds is None else np.asarray(lower_bounds, float)

    def split(v):
        return (v[:p], v[p:]) if estimate_x0 else (v, x0)

    def full_eval(v):
        th, xi = split(v)
        return _residual_jacobian(model, th, xi, dataset, estimate_x0, rtol, atol)

    theta_v = np.maximum(guess, lb)
    r, J = full_eval(theta_v)
    sse = float(r @ r)
    lam = 1e-3
    it = 0
    converged = False
    stalled = False
    grad = J.T @ r
    sse_history = [sse]
    while it < max_iter:
        it += 1
        JtJ = J.T @ J
        D = np.diag(np.maximum(np.diag(JtJ), 1e-300))
        try:
            step = np.linalg.solve(JtJ + lam * D, -grad)
        except np.linalg.LinAlgError:
            lam *= 10.0
            continue
        trial = np.maximum(theta_v + step, lb)
        try:
            th_t, xi_t = split(trial)
            r_trial = dataset.Y - _predict(model, th_t, xi_t, dataset, rtol, atol)
            sse_trial = float(r_trial @ r_trial)
        except (DomainError, IntegrationError):
            lam = min(lam * 10.0, 1e12)
            continue
        if sse_trial < sse:
            rel_step = float(np.max(np.abs(trial - theta_v)
                                    / np.maximum(np.abs(theta_v), 1e-300)))
            rel_gain = (sse - sse_trial) / max(sse_trial, 1e-300)
            theta_v = trial
            r, J = full_eval(theta_v)
            sse = float(r @ r)
            grad = J.T @ r
            lam = max(lam * 0.1, 1e-12)
            sse_history.append(sse)
            if (np.linalg.norm(grad) < 1e-8 * max(1.0, np.linalg.norm(dataset.Y))
                    or rel_step < 1e-10 or rel_gain < ftol):
                converged = True
                break
            if (len(sse_history) > stall_window
                    and (sse_history[-1 - stall_window] - sse) / sse < stall_tol):
                converged = True
                stalled = True
                break
        else:
            rel_step = float(np.max(np.abs(trial - theta_v)
                                    / np.maximum(np.abs(theta_v), 1e-300)))
            if rel_step < 1e-10:
                converged = True
                break
            lam *= 10.0
            if lam > 1e12:
                break

    th_hat, x0_hat = split(theta_v)
    dof = dataset.dof(n, k)
    sigma2 = sse / dof if dof > 0 else float("nan")
    return FitResult(
        theta_hat=np.asarray(th_hat), x0_hat=np.asarray(x0_hat, float),
        sse=sse, sigma2_hat=sigma2, dof=dof, iterations=it,
        converged=converged, stalled=stalled,
        gradient_norm=float(np.linalg.norm(grad)),
        estimates_x0=estimate_x0)


def fit_fim_report(
    model: ModelSpec,
    dataset: Dataset,
    theta_hat: Array,
    x0_hat: Array,
    sigma2: float,
    dof: int,
    level: float = 0.975,
    rtol: float = 1e-10,
    atol: float = 1e-12,
) -> FimReport:
    """FIM and confidence intervals evaluated at a fitted point."""
    estimate_x0 = dataset.estimates_x0()
    t_solve, inverse = np.unique(dataset.t, return_inverse=True)
    bundle = sensitivity_solve(model, theta_hat, x0_hat, t_solve,
                               rtol=rtol, atol=atol)
    chi = output_sensitivity(bundle, model, theta_hat, include_x0=estimate_x0)
    chi_obs = chi[inverse][:, dataset.output_index:dataset.output_index + 1, :]
    F = fim(chi_obs, sigma2)
    theta_full = (np.concatenate([theta_hat, x0_hat]) if estimate_x0
                  else np.asarray(theta_hat, float))
    return confidence_intervals(theta_full, F, dof, level=level)


def confidence_intervals(
    theta_hat: Array,
    fim_matrix: Array,
    dof: int,
    level: float = 0.975,
) -> FimReport:
    """Covariance = FIM^-1 (full SVD inverse), SE, and t half-widths.

    The full inverse is used even for nearly singular matrices because the
    reference computations report intervals from it; ``ill_conditioned`` is
    set whenever cond > 1e12 to mark them unreliable.
    """
    F = np.asarray(fim_matrix, float)
    U, s, Vt = np.linalg.svd(F)
    cond = float(s[0] / s[-1]) if s[-1] > 0 else float("inf")
    if not np.isfinite(cond) :
        raise np.linalg.LinAlgError("FIM is exactly singular")
    cov = (Vt.T / s) @ U.T
    cov = 0.5 * (cov + cov.T)
    diag = np.diag(cov)
    if np.any(diag < 0):
        raise ArithmeticError("covariance has negative diagonal entries")
    se = np.sqrt(diag)
    tq = t_quantile(dof, level)
    hw = tq * se
    theta_hat = np.asarray(theta_hat, float)
    intervals = np.column_stack([theta_hat - hw, theta_hat + hw])
    return FimReport(
        fim=F, covariance=cov, standard_errors=se,
        condition_number=cond, t_quantile=tq, half_widths=hw,
        intervals=intervals,
        ill_conditioned=cond > ILL_CONDITIONED_THRESHOLD, dof=dof)
