"""Observer gain synthesis and runnable observer implementations.

Four families: Luenberger observers for dynamics that are linear up to an
output injection, the change-of-coordinates observer for the intra-host
malaria model, the reduced-order asymptotic observer for SIR with
fluctuating rates, and a high-gain observer for classical SIR observed
through cumulative recoveries.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .integrate import solve_rk45
from .models import ModelSpec
from .observability import linear_observability
from .zoo import ZooEntry

Array = np.ndarray
_EPS = float(np.finfo(float).eps)


class NotObservableError(ValueError):
    """Gain synthesis requested for an unobservable pair (A, C)."""


# ---------------------------------------------------------------------------
# Gain synthesis
# ---------------------------------------------------------------------------

def symmetric_functions(lams: Sequence[complex]) -> Array:
    """Elementary symmetric functions (sigma_1, ..., sigma_n) of the roots."""
    lams = np.asarray(lams)
    if lams.size < 1:
        raise ValueError("need at least one root")
    coeffs = np.poly(lams)  # xi^n + c1 xi^(n-1) + ... with ck = (-1)^k sigma_k
    sig = np.array([(-1.0) ** k * coeffs[k] for k in range(1, len(lams) + 1)])
    if np.max(np.abs(np.imag(sig))) > 1e-9 * max(1.0, np.max(np.abs(sig))):
        raise ValueError("spectrum is not closed under conjugation")
    return np.real(sig)


@dataclass(frozen=True)
class GainVector:
    """Output-injection gain with its assigned spectrum and the Brunovsky
    change-of-basis matrix used to build it."""

    g: Array
    assigned_spectrum: Array
    transform_P: Array
    achieved_spectrum: Array = field(default=None, repr=False)


def pole_place_gain(A: Array, C: Array, Lambda: Sequence[complex]) -> GainVector:
    """Gain G with Sp(A + G C) = Lambda for a single-output observable pair.

    Construction: L = O^-1 e_n, P = [L, AL, ..., A^(n-1) L] brings (A, C) to
    Brunovsky form, where the gain entries read off the characteristic
    polynomial coefficients; G = P gbar.
    """
    A = np.atleast_2d(np.asarray(A, float))
    C = np.atleast_2d(np.asarray(C, float))
    n = A.shape[0]
    if C.shape != (1, n):
        raise ValueError("C must be a single row of length n")
    lams = np.asarray(Lambda)
    if lams.shape != (n,):
        raise ValueError("Lambda must contain n eigenvalues")

    report = linear_observability(A, C)
    if not report.full_rank:
        raise NotObservableError(
            f"pair (A, C) is not observable (rank {report.numerical_rank} < {n})")
    if report.condition_number > 1e12:
        warnings.warn("observability matrix is ill conditioned; "
                      "assigned spectrum may be inaccurate", RuntimeWarning)

    O = np.vstack([C @ np.linalg.matrix_power(A, k) for k in range(n)])
    e_n = np.zeros(n)
    e_n[-1] = 1.0
    L = np.linalg.solve(O, e_n)
    P = np.column_stack([np.linalg.matrix_power(A, k) @ L for k in range(n)])

    a = np.poly(A)[1:]  # a_1 ... a_n of pi_A
    if np.max(np.abs(np.imag(a))) > 0:
        a = np.real(a)
    sig = symmetric_functions(lams)
    gbar = np.array([
        a[n - i] + (-1.0) ** (n - i) * sig[n - i] for i in range(1, n + 1)
    ])
    G = P @ gbar

    achieved = np.linalg.eigvals(A + np.outer(G, C[0]))
    scale = max(float(np.max(np.abs(lams))), 1e-12)
    if _spectrum_gap(achieved, lams) > 1e-6 * scale:
        raise ArithmeticError("assigned spectrum not achieved within tolerance")
    return GainVector(g=G, assigned_spectrum=np.asarray(lams),
                      transform_P=P, achieved_spectrum=achieved)


def _spectrum_gap(achieved: Array, wanted: Array) -> float:
    """Max over wanted eigenvalues of the distance to the closest achieved."""
    return max(
        float(np.min(np.abs(achieved - lam))) for lam in np.asarray(wanted)
    )


def vandermonde_inverse(Lambda: Sequence[float]) -> Array:
    """Closed-form inverse of the Vandermonde matrix with rows
    (lam_j^(n-1), ..., lam_j, 1).

    Entry w_ij = (-1)^(i-1) sigma_(i-1)(Lambda \\ {lam_j}) / prod_(k!=j)(lam_j - lam_k).
    """
    lams = np.asarray(Lambda, float)
    n = len(lams)
    if n < 1:
        raise ValueError("need at least one node")
    for j in range(n):
        for k in range(j + 1, n):
            if lams[j] == lams[k]:
                raise ValueError("Vandermonde nodes must be pairwise distinct")
    W = np.empty((n, n))
    for j in range(n):
        rest = np.delete(lams, j)
        denom = np.prod(lams[j] - rest) if n > 1 else 1.0
        sig_rest = np.concatenate([[1.0], symmetric_functions(rest)]) if n > 1 else np.array([1.0])
        for i in range(n):
            W[i, j] = (-1.0) ** i * sig_rest[i] / denom
    return W


def vandermonde_matrix(Lambda: Sequence[float]) -> Array:
    lams = np.asarray(Lambda, float)
    n = len(lams)
    return np.vander(lams, n, increasing=False)


def high_gain_spectrum(n: int, lipschitz_L: float, theta_rate: float) -> Array:
    """Distinct negative eigenvalues lam_n < ... < lam_1 < 0 with
    ``lam_1 + sqrt(n) L ||V^-1||_inf <= -theta_rate``.

    Searches the one-parameter family lam_i = -c alpha^i (c = theta_rate)
    by doubling then bisecting alpha; as alpha grows the Vandermonde inverse
    norm tends to 1, so the inequality eventually holds.
    """
    if lipschitz_L < 0 or theta_rate <= 0:
        raise ValueError("need L >= 0 and theta_rate > 0")
    c = theta_rate

    def family(alpha: float) -> Array:
        return -c * alpha ** np.arange(1, n + 1)

    def satisfied(alpha: float) -> bool:
        lams = family(alpha)
        Winf = float(np.max(np.abs(vandermonde_inverse(lams)).sum(axis=1)))
        return lams[0] + np.sqrt(n) * lipschitz_L * Winf <= -theta_rate

    lo, hi = 1.0 + 1e-6, 2.0
    for _ in range(200):
        if satisfied(hi):
            break
        hi *= 2.0
    else:
        raise ArithmeticError("no admissible spectrum found in the family")
    if not satisfied(lo):
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if satisfied(mid):
                hi = mid
            else:
                lo = mid
    return family(hi)


# ---------------------------------------------------------------------------
# Observer runs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ObserverRun:
    """Sampled truth, estimate and diagnostics from one observer simulation."""

    t: Array
    x_true: Array
    x_hat: Array
    error_norm: Array
    empirical_decay_rate: float
    innovation: Optional[Array] = None
    flags: dict = field(default_factory=dict)

    @property
    def tail_error(self) -> float:
        tail = self.t >= 0.9 * self.t[-1]
        return float(np.max(self.error_norm[tail]))


def empirical_decay_rate(t: Array, err: Array) -> float:
    """Least-squares slope of log error over the window [0.3 T, 0.9 T].

    Samples below 1e3 x machine epsilon (relative to the initial error) are
    excluded to avoid fitting the round-off floor.
    """
    t = np.asarray(t, float)
    err = np.asarray(err, float)
    T = t[-1]
    floor = 1e3 * _EPS * max(1.0, float(err[0]))
    mask = (t >= 0.3 * T) & (t <= 0.9 * T) & (err > floor)
    if int(mask.sum()) < 2:
        return 0.0
    return float(np.polyfit(t[mask], np.log(err[mask]), 1)[0])


def _finish_run(t, x_true, x_hat, innovation=None, flags=None) -> ObserverRun:
    err = np.linalg.norm(x_hat - x_true, axis=1)
    return ObserverRun(
        t=t, x_true=x_true, x_hat=x_hat, error_norm=err,
        empirical_decay_rate=empirical_decay_rate(t, err),
        innovation=innovation, flags=flags or {})


def run_luenberger(
    entry: ZooEntry,
    gain,
    x_hat0: Array,
    x0: Optional[Array] = None,
    horizon: Optional[float] = None,
    n_grid: int = 600,
    y_stream: Optional[Callable[[float], Array]] = None,
    rtol: float = 1e-9,
    atol: float = 1e-11,
) -> ObserverRun:
    """Observer ``xhat' = A xhat + Phi(t, y) + G (C xhat - y)`` for models
    that are linear up to an output injection.

    Without an explicit measurement stream, truth and observer are
    integrated as one coupled system so no interpolation error enters y(t).
    """
    A = np.asarray(entry.extras["A"], float)
    C = np.atleast_2d(np.asarray(entry.extras["C"], float))
    phi = entry.extras.get("phi")
    G = gain.g if isinstance(gain, GainVector) else np.asarray(gain, float)
    n = A.shape[0]
    theta = entry.default_params
    x0 = entry.default_x0 if x0 is None else np.asarray(x0, float)
    horizon = entry.default_horizon if horizon is None else horizon
    t = np.linspace(0.0, horizon, n_grid)
    x_hat0 = np.asarray(x_hat0, float)

    def obs_rhs(tt, xh, y):
        inj = phi(tt, float(y[0])) if phi is not None else 0.0
        return A @ xh + inj + G * float((C @ xh - y)[0])

    if y_stream is None:
        def rhs(tt, z):
            x, xh = z[:n], z[n:]
            y = C @ x
            return np.concatenate([entry.spec.f(x, theta, tt), obs_rhs(tt, xh, y)])

        zs = solve_rk45(rhs, t, np.concatenate([x0, x_hat0]), rtol=rtol, atol=atol)
        x_true, x_hat = zs[:, :n], zs[:, n:]
    else:
        from .integrate import integrate
        x_true = integrate(entry.spec, x0, theta, t, rtol=rtol, atol=atol).x

        def rhs(tt, xh):
            return obs_rhs(tt, xh, np.atleast_1d(y_stream(tt)))

        x_hat = solve_rk45(rhs, t, x_hat0, rtol=rtol, atol=atol)

    innov = (x_hat @ C.T - x_true @ C.T)
    return _finish_run(t, x_true, x_hat, innovation=innov)


def run_malaria_observer(
    entry: ZooEntry,
    L: Array,
    w_hat0: Array,
    x0: Optional[Array] = None,
    horizon: Optional[float] = None,
    n_grid: int = 600,
    rtol: float = 1e-9,
    atol: float = 1e-11,
) -> ObserverRun:
    """Change-of-coordinates observer for the intra-host malaria model.

    In the variable w = x - E y the bilinear term drops out, giving
    ``what' = (Abar - L C) what + (L + (Abar - L C) E) y + Lambda e1`` and
    the estimate ``xhat = what + E y``.  The estimate never uses the
    infection parameter beta.
    """
    A = entry.extras["Abar"]
    C = np.atleast_2d(np.asarray(entry.extras["C"], float))
    E = np.asarray(entry.extras["E"], float)
    e1 = np.asarray(entry.extras["e1"], float)
    lam = float(entry.extras["Lambda"])
    L = np.asarray(L, float)
    M = A - np.outer(L, C[0])
    drive = L + M @ E
    n = 7
    theta = entry.default_params
    x0 = entry.default_x0 if x0 is None else np.asarray(x0, float)
    horizon = entry.default_horizon if horizon is None else horizon
    t = np.linspace(0.0, horizon, n_grid)

    def rhs(tt, z):
        x, wh = z[:n], z[n:]
        y = float((C @ x)[0])
        return np.concatenate([
            entry.spec.f(x, theta, tt),
            M @ wh + drive * y + lam * e1,
        ])

    zs = solve_rk45(rhs, t, np.concatenate([x0, np.asarray(w_hat0, float)]),
                    rtol=rtol, atol=atol)
    x_true = zs[:, :n]
    y = x_true @ C.T
    x_hat = zs[:, n:] + y * E
    innov = x_hat @ C.T - y
    return _finish_run(t, x_true, x_hat, innovation=innov,
                       flags={"spectrum": np.linalg.eigvals(M)})


def run_reduced_order(
    entry: ZooEntry,
    Z0: float,
    x0: Optional[Array] = None,
    horizon: Optional[float] = None,
    n_grid: int = 600,
    y_stream: Optional[Callable[[float], Array]] = None,
    rtol: float = 1e-9,
    atol: float = 1e-11,
) -> ObserverRun:
    """Asymptotic reduced-order observer for SIR with fluctuating rates.

    ``Z' = nu N - y2(t) - mu Z`` estimates S + I; then Shat = Z - y1 and
    Rhat = N - Z.  The error decays exactly at rate mu regardless of the
    unknown beta(t), rho(t) signals.
    """
    N = float(entry.extras["N"])
    nu = float(entry.extras["nu"])
    mu = float(entry.extras["mu"])
    theta = entry.default_params
    x0 = entry.default_x0 if x0 is None else np.asarray(x0, float)
    horizon = entry.default_horizon if horizon is None else horizon
    t = np.linspace(0.0, horizon, n_grid)

    if y_stream is None:
        def rhs(tt, z):
            x, Z = z[:3], z[3]
            y2 = float(entry.spec.h(x, theta, tt)[1])
            return np.concatenate([
                entry.spec.f(x, theta, tt), [nu * N - y2 - mu * Z]])

        zs = solve_rk45(rhs, t, np.concatenate([x0, [float(Z0)]]),
                        rtol=rtol, atol=atol)
        x_true, Z = zs[:, :3], zs[:, 3]
        y1 = x_true[:, 1]
    else:
        from .integrate import integrate
        x_true = integrate(entry.spec, x0, theta, t, rtol=rtol, atol=atol).x

        def rhs(tt, z):
            return np.array([nu * N - float(np.atleast_1d(y_stream(tt))[1]) - mu * z[0]])

        Z = solve_rk45(rhs, t, np.array([float(Z0)]), rtol=rtol, atol=atol)[:, 0]
        y1 = np.array([np.atleast_1d(y_stream(tt))[0] for tt in t])

    S_hat = Z - y1
    x_hat = np.column_stack([S_hat, y1, N - Z])
    return _finish_run(t, x_true, x_hat, innovation=None,
                       flags={"decay_rate_exact": -mu})


def saturate(x, lo: float, hi: float):
    return np.clip(x, lo, hi)


def run_high_gain_sir(
    beta: float,
    rho: float,
    N: float,
    Lambda: Sequence[float],
    z_hat0: Array,
    y_stream: Callable[[float], float],
    t_grid: Array,
    x_true: Optional[Array] = None,
    rtol: float = 1e-9,
    atol: float = 1e-11,
) -> ObserverRun:
    """High-gain observer for classical SIR observed through cumulative
    recoveries ``y = int rho I``.

    Internal coordinates z = (y, rho I, (beta S / N - rho) rho I); the
    nonlinearity is saturated so estimates stay finite even if zhat2
    crosses zero.  Gains are the elementary symmetric functions of the
    assigned spectrum, applied to the innovation zhat1 - y(t).
    """
    lams = np.asarray(Lambda, float)
    if lams.shape != (3,):
        raise ValueError("Lambda must contain 3 eigenvalues")
    # Gains built from the elementary symmetric functions of the spectrum,
    # signs alternating so that the error matrix has characteristic
    # polynomial prod (xi - lambda_i); verified by eigen-solve below.
    sig = symmetric_functions(lams)
    s1, s2, s3 = sig[0], -sig[1], sig[2]
    err_mat = np.array([[s1, 1.0, 0.0], [s2, 0.0, 1.0], [s3, 0.0, 0.0]])
    achieved = np.linalg.eigvals(err_mat)
    if _spectrum_gap(achieved, lams) > 1e-6 * float(np.max(np.abs(lams))):
        raise ArithmeticError("high-gain spectrum not assigned")
    lo_ratio, hi_ratio = -rho, beta - rho
    lo_psi = -rho ** 3 * N - rho * beta ** 2 * N
    hi_psi = rho * (beta - rho) * N

    def psi_sat(z2, z3):
        ratio = saturate(z3 / z2 if z2 != 0 else np.inf, lo_ratio, hi_ratio)
        val = ratio * z3 - beta / (rho * N) * z3 * z2 - beta / N * z2 ** 2
        return saturate(val, lo_psi, hi_psi)

    crossed = [False]

    def rhs(tt, z):
        inn = z[0] - float(y_stream(tt))
        if z[1] <= 0:
            crossed[0] = True
        return np.array([
            z[1] + s1 * inn,
            z[2] + s2 * inn,
            psi_sat(z[1], z[2]) + s3 * inn,
        ])

    t = np.asarray(t_grid, float)
    zs = solve_rk45(rhs, t, np.asarray(z_hat0, float), rtol=rtol, atol=atol)
    ratio = saturate(np.divide(zs[:, 2], zs[:, 1],
                               out=np.full(len(zs), np.inf),
                               where=zs[:, 1] != 0), lo_ratio, hi_ratio)
    S_hat = (N / beta) * (ratio + rho)
    I_hat = zs[:, 1] / rho
    x_hat = np.column_stack([S_hat, I_hat, N - S_hat - I_hat])

    if x_true is None:
        x_true = np.full_like(x_hat, np.nan)
    y = np.array([float(y_stream(tt)) for tt in t])
    innov = (zs[:, 0] - y)[:, None]
    run = _finish_run(t, x_true, x_hat, innovation=innov,
                      flags={"z_hat": zs, "z2_crossed_zero": crossed[0]})
    return run


def highgain_truth(
    beta: float, rho: float, N: float, x0: Array, t_grid: Array,
    rtol: float = 1e-10, atol: float = 1e-12,
) -> tuple:
    """Truth trajectory (S, I, R) and cumulative-recovered output for the
    frequency-dependent classical SIR model."""

    def rhs(tt, z):
        S, I = z[0], z[1]
        inc = beta * S * I / N
        return np.array([-inc, inc - rho * I, rho * I, rho * I])

    z0 = np.concatenate([np.asarray(x0, float), [0.0]])
    zs = solve_rk45(rhs, np.asarray(t_grid, float), z0, rtol=rtol, atol=atol)
    return zs[:, :3], zs[:, 3]


# ---------------------------------------------------------------------------
# Noise experiments
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NoiseSpec:
    """Measurement corruption: additive uniform/gaussian or integer counting
    error of the given amplitude."""

    kind: str = "uniform"  # uniform | gaussian | counting
    amplitude: float = 0.0

    def corrupt(self, y: Array, rng: np.random.Generator) -> Array:
        y = np.asarray(y, float)
        if self.amplitude == 0.0:
            return y.copy()
        if self.kind == "uniform":
            return y + rng.uniform(-self.amplitude, self.amplitude, y.shape)
        if self.kind == "gaussian":
            return y + rng.normal(0.0, self.amplitude, y.shape)
        if self.kind == "counting":
            return np.round(y) + rng.integers(
                -int(self.amplitude), int(self.amplitude) + 1, y.shape)
        raise ValueError(f"unknown noise kind {self.kind!r}")


@dataclass(frozen=True)
class ObserverConfig:
    """Everything needed to reproduce one observer simulation."""

    family: str  # luenberger | malaria | reduced-order | high-gain
    entry: ZooEntry
    x_hat0: Array
    spectrum: Optional[Array] = None
    gain: Optional[Array] = None
    x0: Optional[Array] = None
    horizon: Optional[float] = None
    n_grid: int = 600
    sample_every: float = 1.0
    highgain_params: dict = field(default_factory=dict)


def simulate_with_noise(config: ObserverConfig, noise: NoiseSpec, seed: int = 0) -> ObserverRun:
    """Generate truth, corrupt sampled measurements, lift them back to a
    continuous signal by cubic splines, and run the configured observer."""
    rng = np.random.default_rng(seed)
    entry = config.entry
    x0 = entry.default_x0 if config.x0 is None else np.asarray(config.x0, float)
    horizon = entry.default_horizon if config.horizon is None else config.horizon
    theta = entry.default_params

    if config.family == "high-gain":
        p = config.highgain_params
        beta, rho, N = p["beta"], p["rho"], p["N"]
        t_data = np.arange(0.0, horizon + 1e-9, config.sample_every)
        x_tr, y_cum = highgain_truth(beta, rho, N, x0, t_data)
        y_noisy = noise.corrupt(y_cum, rng) if noise.kind != "counting" else (
            np.round(y_cum) + np.concatenate(
                [[0.0], np.cumsum(rng.integers(-int(noise.amplitude),
                                               int(noise.amplitude) + 1,
                                               len(y_cum) - 1))])
            if noise.amplitude else np.round(y_cum))
        spline = CubicSpline(t_data, y_noisy)
        t_run = np.linspace(0.0, horizon, config.n_grid)
        x_tr_dense, _ = highgain_truth(beta, rho, N, x0, t_run)
        return run_high_gain_sir(beta, rho, N, config.spectrum, config.x_hat0,
                                 lambda tt: float(spline(tt)), t_run,
                                 x_true=x_tr_dense)

    from .integrate import integrate
    t_data = np.arange(0.0, horizon + 1e-9, config.sample_every)
    truth = integrate(entry.spec, x0, theta, t_data, rtol=1e-10, atol=1e-12)
    y_noisy = noise.corrupt(truth.y, rng)
    spline = CubicSpline(t_data, y_noisy)

    if config.family == "luenberger":
        return run_luenberger(entry, config.gain, config.x_hat0, x0=x0,
                              horizon=horizon, n_grid=config.n_grid,
                              y_stream=lambda tt: np.atleast_1d(spline(tt)))
    if config.family == "reduced-order":
        return run_reduced_order(entry, float(config.x_hat0[0]), x0=x0,
                                 horizon=horizon, n_grid=config.n_grid,
                                 y_stream=lambda tt: np.atleast_1d(spline(tt)))
    if config.family == "malaria":
        raise NotImplementedError(
            "noise experiments for the malaria observer are not wired; "
            "run run_malaria_observer directly")
    raise ValueError(f"unknown observer family {config.family!r}")
