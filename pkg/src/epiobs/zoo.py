"""Built-in compartmental and population models.

Each factory returns a :class:`ZooEntry` bundling a :class:`ModelSpec` with
default parameters, a default initial state and horizon, an admissible-set
predicate plus sampler, and (for the linear or linear-up-to-output models)
the structural matrices the observer layer works with.

Conventions: ``f``/``h`` broadcast over a trailing state axis and return
``(..., n)`` / ``(..., m)``; parameters are indexed ``theta[i]`` so that the
augmented Lie machinery can feed batched parameter values.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, Optional

import numpy as np

from .models import ModelSpec

Array = np.ndarray


@dataclass(frozen=True)
class ZooEntry:
    id: str
    spec: ModelSpec
    default_params: Array
    default_x0: Array
    default_horizon: float
    admissible: Callable[[Array], bool]
    admissible_desc: str
    sample_admissible: Callable[[np.random.Generator], Array]
    notes: str = ""
    extras: Dict[str, object] = field(default_factory=dict)


def _positive(**kwargs: float) -> None:
    for name, val in kwargs.items():
        if not np.isfinite(val) or val <= 0:
            raise ValueError(f"parameter {name} must be positive, got {val!r}")


# ---------------------------------------------------------------------------
# SIR family
# ---------------------------------------------------------------------------

def sir_classical(
    beta: float = 1.9605032,
    gamma: float = 0.4751562,
    N: float = 763.0,
    k: float = 1.0,
    k_equals_gamma: bool = False,
    k_as_param: bool = False,
) -> ZooEntry:
    """Two-state SIR with observation ``y = k I`` (``R`` recovered as N-S-I).

    ``k_equals_gamma`` ties the observation fraction to the recovery rate
    (deaths-rate observation); ``k_as_param`` exposes ``k`` as a third free
    parameter for joint state/parameter rank analysis.
    """
    _positive(beta=beta, gamma=gamma, N=N)
    if k_equals_gamma:
        if k_as_param:
            raise ValueError("k cannot be both free and tied to gamma")
    else:
        if not (0 < k <= 1):
            raise ValueError(f"k must lie in (0, 1], got {k!r}")

    def f(x, theta, t=0.0):
        S, I = x[..., 0], x[..., 1]
        b, g = theta[0], theta[1]
        inc = b * S * I / N
        return np.stack([-inc, inc - g * I], axis=-1)

    def jac_f_x(x, theta, t=0.0):
        S, I = x[..., 0], x[..., 1]
        b, g = theta[0], theta[1]
        return np.array([[-b * I / N, -b * S / N], [b * I / N, b * S / N - g]])

    if k_equals_gamma:
        n_params = 2

        def h(x, theta, t=0.0):
            return (theta[1] * x[..., 1])[..., None]

        def jac_h_x(x, theta, t=0.0):
            return np.array([[0.0, theta[1]]])

        def jac_h_theta(x, theta, t=0.0):
            return np.array([[0.0, x[..., 1]]], dtype=float).reshape(1, 2)

        def jac_f_theta(x, theta, t=0.0):
            S, I = x[..., 0], x[..., 1]
            return np.array([[-S * I / N, 0.0], [S * I / N, -I]])

    elif k_as_param:
        n_params = 3

        def h(x, theta, t=0.0):
            return (theta[2] * x[..., 1])[..., None]

        def jac_h_x(x, theta, t=0.0):
            return np.array([[0.0, theta[2]]])

        def jac_h_theta(x, theta, t=0.0):
            return np.array([[0.0, 0.0, x[..., 1]]], dtype=float).reshape(1, 3)

        def jac_f_theta(x, theta, t=0.0):
            S, I = x[..., 0], x[..., 1]
            return np.array([[-S * I / N, 0.0, 0.0], [S * I / N, -I, 0.0]])

    else:
        n_params = 2

        def h(x, theta, t=0.0):
            return (k * x[..., 1])[..., None]

        def jac_h_x(x, theta, t=0.0):
            return np.array([[0.0, k]])

        def jac_h_theta(x, theta, t=0.0):
            return np.zeros((1, 2))

        def jac_f_theta(x, theta, t=0.0):
            S, I = x[..., 0], x[..., 1]
            return np.array([[-S * I / N, 0.0], [S * I / N, -I]])

    theta0 = np.array([beta, gamma, k][:n_params])
    spec = ModelSpec(
        n_states=2, n_params=n_params, n_outputs=1,
        f=f, h=h,
        jac_f_x=jac_f_x, jac_f_theta=jac_f_theta,
        jac_h_x=jac_h_x, jac_h_theta=jac_h_theta,
        state_names=("S", "I"),
        param_names=("beta", "gamma", "k")[:n_params],
        output_names=("y",),
        state_scales=np.array([N, N]),
        param_scales=np.abs(theta0),
    )

    def admissible(x):
        return bool(np.all(x >= 0) and np.sum(x) <= N * (1 + 1e-9))

    def sample(rng):
        S = rng.uniform(0.05, 0.9) * N
        I = rng.uniform(0.01, 0.9) * (N - S)
        return np.array([S, I])

    return ZooEntry(
        id="sir-classical", spec=spec, default_params=theta0,
        default_x0=np.array([N - 1.0, 1.0]), default_horizon=13.0,
        admissible=admissible,
        admissible_desc="S >= 0, I >= 0, S + I <= N",
        sample_admissible=sample,
        notes="Kermack-McKendrick SIR, frequency-dependent incidence, y = k I",
        extras={"N": N, "k": gamma if k_equals_gamma else k,
                "k_equals_gamma": k_equals_gamma},
    )


def sir_cumulative(
    beta: float = 0.4,
    gamma: float = 0.2,
    N: float = 1000.0,
    k: float = 1.0,
) -> ZooEntry:
    """SIR observed through cumulative incidence ``y = k * int beta S I / N``.

    The running integral is carried as a third state ``C`` so sensitivity and
    observer machinery apply unchanged.
    """
    _positive(beta=beta, gamma=gamma, N=N)
    if not (0 < k <= 1):
        raise ValueError(f"k must lie in (0, 1], got {k!r}")

    def f(x, theta, t=0.0):
        S, I = x[..., 0], x[..., 1]
        b, g = theta[0], theta[1]
        inc = b * S * I / N
        return np.stack([-inc, inc - g * I, k * inc], axis=-1)

    def h(x, theta, t=0.0):
        return x[..., 2:3]

    def jac_f_x(x, theta, t=0.0):
        S, I = x[..., 0], x[..., 1]
        b, g = theta[0], theta[1]
        return np.array([
            [-b * I / N, -b * S / N, 0.0],
            [b * I / N, b * S / N - g, 0.0],
            [k * b * I / N, k * b * S / N, 0.0],
        ])

    def jac_f_theta(x, theta, t=0.0):
        S, I = x[..., 0], x[..., 1]
        return np.array([[-S * I / N, 0.0], [S * I / N, -I], [k * S * I / N, 0.0]])

    spec = ModelSpec(
        n_states=3, n_params=2, n_outputs=1,
        f=f, h=h,
        jac_f_x=jac_f_x, jac_f_theta=jac_f_theta,
        jac_h_x=lambda x, th, t=0.0: np.array([[0.0, 0.0, 1.0]]),
        jac_h_theta=lambda x, th, t=0.0: np.zeros((1, 2)),
        state_names=("S", "I", "C"), param_names=("beta", "gamma"),
        output_names=("y",),
        state_scales=np.array([N, N, N]),
        param_scales=np.array([beta, gamma]),
    )

    def admissible(x):
        return bool(np.all(x >= 0) and x[0] + x[1] <= N * (1 + 1e-9))

    def sample(rng):
        S = rng.uniform(0.05, 0.9) * N
        I = rng.uniform(0.01, 0.9) * (N - S)
        return np.array([S, I, 0.0])

    return ZooEntry(
        id="sir-cumulative", spec=spec,
        default_params=np.array([beta, gamma]),
        default_x0=np.array([N - 10.0, 10.0, 0.0]), default_horizon=60.0,
        admissible=admissible,
        admissible_desc="S, I, C >= 0 and S + I <= N",
        sample_admissible=sample,
        notes="SIR with cumulative-incidence output carried as an extra state",
        extras={"N": N, "k": k},
    )


def sir_demography(
    beta: float = 0.5,
    gamma: float = 0.2,
    mu: float = 0.02,
    N: float = 1000.0,
) -> ZooEntry:
    """SIR with births and deaths at equal rate ``mu`` (constant population)."""
    _positive(beta=beta, gamma=gamma, mu=mu, N=N)

    def f(x, theta, t=0.0):
        S, I, R = x[..., 0], x[..., 1], x[..., 2]
        b, g, m = theta[0], theta[1], theta[2]
        inc = b * S * I / N
        return np.stack([m * N - inc - m * S, inc - (g + m) * I, g * I - m * R], axis=-1)

    def h(x, theta, t=0.0):
        return x[..., 1:2]

    def jac_f_x(x, theta, t=0.0):
        S, I = x[..., 0], x[..., 1]
        b, g, m = theta[0], theta[1], theta[2]
        return np.array([
            [-b * I / N - m, -b * S / N, 0.0],
            [b * I / N, b * S / N - g - m, 0.0],
            [0.0, g, -m],
        ])

    def jac_f_theta(x, theta, t=0.0):
        S, I, R = x[..., 0], x[..., 1], x[..., 2]
        return np.array([
            [-S * I / N, 0.0, N - S],
            [S * I / N, -I, -I],
            [0.0, I, -R],
        ])

    spec = ModelSpec(
        n_states=3, n_params=3, n_outputs=1,
        f=f, h=h,
        jac_f_x=jac_f_x, jac_f_theta=jac_f_theta,
        jac_h_x=lambda x, th, t=0.0: np.array([[0.0, 1.0, 0.0]]),
        jac_h_theta=lambda x, th, t=0.0: np.zeros((1, 3)),
        state_names=("S", "I", "R"), param_names=("beta", "gamma", "mu"),
        output_names=("y",),
        state_scales=np.array([N, N, N]),
        param_scales=np.array([beta, gamma, mu]),
    )

    def admissible(x):
        return bool(np.all(x >= 0) and np.sum(x) <= N * (1 + 1e-9))

    def sample(rng):
        w = rng.dirichlet([2.0, 1.0, 1.0])
        return w * N

    return ZooEntry(
        id="sir-demography", spec=spec,
        default_params=np.array([beta, gamma, mu]),
        default_x0=np.array([N - 10.0, 10.0, 0.0]), default_horizon=100.0,
        admissible=admissible,
        admissible_desc="nonnegative orthant with S + I + R <= N",
        sample_admissible=sample,
        notes="SIR with population renewal rate mu",
        extras={"N": N},
    )


def piecewise_rate(
    lo: float, hi: float, seed: int, dwell: float = 1.0, n_cells: int = 8192
) -> Callable[[float], float]:
    """Seeded piecewise-constant signal with values in [lo, hi], dwell time
    ``dwell``.  Deterministic given the seed."""
    vals = np.random.default_rng(seed).uniform(lo, hi, n_cells)

    def fn(t: float) -> float:
        i = int(np.clip(np.floor(t / dwell), 0, n_cells - 1))
        return float(vals[i])

    return fn


def sir_fluctuating(
    beta_fn: Optional[Callable[[float], float]] = None,
    rho_fn: Optional[Callable[[float], float]] = None,
    nu: float = 0.05,
    mu: float = 0.05,
    N: float = 1000.0,
    seed: int = 0,
) -> ZooEntry:
    """SIR with unpredictably fluctuating infection/recovery rates.

    Two outputs: ``y1 = I`` and ``y2 = rho(t) I``.  Defaults draw beta(t) in
    0.4 +/- 0.08 and rho(t) in 0.2 +/- 0.04 as seeded piecewise-constant
    signals with unit dwell time.
    """
    _positive(nu=nu, mu=mu, N=N)
    if beta_fn is None:
        beta_fn = piecewise_rate(0.32, 0.48, seed)
    if rho_fn is None:
        rho_fn = piecewise_rate(0.16, 0.24, seed + 1)

    def f(x, theta, t=0.0):
        S, I, R = x[..., 0], x[..., 1], x[..., 2]
        b, r = beta_fn(t), rho_fn(t)
        inc = b * S * I / N
        return np.stack([-inc + nu * N - mu * S, inc - r * I - mu * I, r * I - mu * R], axis=-1)

    def h(x, theta, t=0.0):
        I = x[..., 1]
        return np.stack([I, rho_fn(t) * I], axis=-1)

    spec = ModelSpec(
        n_states=3, n_params=0, n_outputs=2,
        f=f, h=h,
        state_names=("S", "I", "R"), param_names=(),
        output_names=("y1", "y2"),
        state_scales=np.array([N, N, N]),
        time_varying=True,
    )

    def admissible(x):
        return bool(np.all(x >= 0) and np.sum(x) <= N * (1 + 1e-9))

    def sample(rng):
        return rng.dirichlet([2.0, 1.0, 1.0]) * N

    return ZooEntry(
        id="sir-fluctuating", spec=spec,
        default_params=np.zeros(0),
        default_x0=np.array([0.9 * N, 0.1 * N, 0.0]), default_horizon=100.0,
        admissible=admissible,
        admissible_desc="nonnegative orthant with S + I + R <= N",
        sample_admissible=sample,
        notes="SIR with fluctuating beta(t), rho(t); outputs I and rho(t) I",
        extras={"N": N, "nu": nu, "mu": mu, "beta_fn": beta_fn, "rho_fn": rho_fn},
    )


# ---------------------------------------------------------------------------
# Population / stage-structured models
# ---------------------------------------------------------------------------

def three_stage(
    a1: float = 0.1,
    a2: float = 0.1,
    m1: float = 0.05,
    m2: float = 0.07,
    m3: float = 0.07,
    rbar_fn: Optional[Callable[[float], float]] = None,
    half_sat: float = 1.0,
) -> ZooEntry:
    """Three-stage population (young / subadult / adult), adults measured.

    Reproduction feeds the young class with the saturating rate
    ``rbar(t) * x3 / (half_sat + x3)``; ``rbar`` defaults to the constant 1.
    """
    _positive(a1=a1, a2=a2, m1=m1, m2=m2, m3=m3, half_sat=half_sat)
    if rbar_fn is None:
        rbar_fn = lambda t: 1.0

    A = np.array([
        [-(a1 + m1), 0.0, 0.0],
        [a1, -(a2 + m2), 0.0],
        [0.0, a2, -m3],
    ])
    C = np.array([[0.0, 0.0, 1.0]])

    def repro(t, x3):
        return rbar_fn(t) * x3 / (half_sat + x3)

    def f(x, theta, t=0.0):
        x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]
        aa1, aa2, mm1, mm2, mm3 = theta[0], theta[1], theta[2], theta[3], theta[4]
        return np.stack([
            -(aa1 + mm1) * x1 + repro(t, x3),
            aa1 * x1 - (aa2 + mm2) * x2,
            aa2 * x2 - mm3 * x3,
        ], axis=-1)

    def h(x, theta, t=0.0):
        return x[..., 2:3]

    def jac_f_x(x, theta, t=0.0):
        x3 = x[..., 2]
        aa1, aa2, mm1, mm2, mm3 = theta[0], theta[1], theta[2], theta[3], theta[4]
        drep = rbar_fn(t) * half_sat / (half_sat + x3) ** 2
        return np.array([
            [-(aa1 + mm1), 0.0, drep],
            [aa1, -(aa2 + mm2), 0.0],
            [0.0, aa2, -mm3],
        ])

    def jac_f_theta(x, theta, t=0.0):
        x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]
        return np.array([
            [-x1, 0.0, -x1, 0.0, 0.0],
            [x1, -x2, 0.0, -x2, 0.0],
            [0.0, x2, 0.0, 0.0, -x3],
        ])

    theta0 = np.array([a1, a2, m1, m2, m3])
    spec = ModelSpec(
        n_states=3, n_params=5, n_outputs=1,
        f=f, h=h,
        jac_f_x=jac_f_x, jac_f_theta=jac_f_theta,
        jac_h_x=lambda x, th, t=0.0: C.copy(),
        jac_h_theta=lambda x, th, t=0.0: np.zeros((1, 5)),
        state_names=("x1", "x2", "x3"),
        param_names=("a1", "a2", "m1", "m2", "m3"),
        output_names=("y",),
        state_scales=np.ones(3),
        param_scales=theta0,
        time_varying=True,
    )

    def phi(t, y):
        # nonlinear part of the dynamics, function of time and output only
        return np.array([repro(t, y), 0.0, 0.0])

    def admissible(x):
        return bool(np.all(x >= 0))

    def sample(rng):
        return rng.uniform(0.1, 5.0, 3)

    return ZooEntry(
        id="three-stage", spec=spec, default_params=theta0,
        default_x0=np.array([2.0, 1.5, 1.0]), default_horizon=200.0,
        admissible=admissible,
        admissible_desc="nonnegative orthant",
        sample_admissible=sample,
        notes="age-structured population, linear up to an output injection",
        extras={"A": A, "C": C, "phi": phi, "rbar_fn": rbar_fn},
    )


def five_class_age(
    alpha: float = 0.5,
    beta: float = 1.0,
    m1: float = 0.1,
    m2: float = 0.1,
    output: str = "x5",
) -> ZooEntry:
    """Linear five-age-class population; the measured class is selectable.

    Only ``output='x5'`` yields an observable pair (A, C).
    """
    _positive(alpha=alpha, beta=beta, m1=m1, m2=m2)
    idx = {"x1": 0, "x2": 1, "x3": 2, "x4": 3, "x5": 4}
    if output not in idx:
        raise ValueError(f"output must be one of {sorted(idx)}")
    j = idx[output]

    def build_A(a, b, mm1, mm2):
        return np.array([
            [-a, 0.0, 0.0, b, 0.0],
            [a / 2, -a - mm1, 0.0, 0.0, 0.0],
            [a / 2, 0.0, -a - mm1, 0.0, 0.0],
            [0.0, a, 0.0, -mm2, 0.0],
            [0.0, 0.0, a, 0.0, -mm2],
        ])

    A = build_A(alpha, beta, m1, m2)
    C = np.zeros((1, 5))
    C[0, j] = 1.0

    def f(x, theta, t=0.0):
        a, b, mm1, mm2 = theta[0], theta[1], theta[2], theta[3]
        x1, x2, x3, x4, x5 = (x[..., i] for i in range(5))
        return np.stack([
            -a * x1 + b * x4,
            a / 2 * x1 - (a + mm1) * x2,
            a / 2 * x1 - (a + mm1) * x3,
            a * x2 - mm2 * x4,
            a * x3 - mm2 * x5,
        ], axis=-1)

    def h(x, theta, t=0.0):
        return x[..., j:j + 1]

    def jac_f_theta(x, theta, t=0.0):
        x1, x2, x3, x4, x5 = (x[..., i] for i in range(5))
        return np.array([
            [-x1, x4, 0.0, 0.0],
            [x1 / 2 - x2, 0.0, -x2, 0.0],
            [x1 / 2 - x3, 0.0, -x3, 0.0],
            [x2, 0.0, 0.0, -x4],
            [x3, 0.0, 0.0, -x5],
        ])

    theta0 = np.array([alpha, beta, m1, m2])
    spec = ModelSpec(
        n_states=5, n_params=4, n_outputs=1,
        f=f, h=h,
        jac_f_x=lambda x, th, t=0.0: build_A(th[0], th[1], th[2], th[3]),
        jac_f_theta=jac_f_theta,
        jac_h_x=lambda x, th, t=0.0: C.copy(),
        jac_h_theta=lambda x, th, t=0.0: np.zeros((1, 4)),
        state_names=("x1", "x2", "x3", "x4", "x5"),
        param_names=("alpha", "beta", "m1", "m2"),
        output_names=(output,),
        state_scales=np.ones(5),
        param_scales=theta0,
    )

    def admissible(x):
        return bool(np.all(x >= 0))

    def sample(rng):
        return rng.uniform(0.1, 5.0, 5)

    return ZooEntry(
        id="five-class-age", spec=spec, default_params=theta0,
        default_x0=np.array([5.0, 3.0, 3.0, 2.0, 2.0]), default_horizon=40.0,
        admissible=admissible,
        admissible_desc="nonnegative orthant",
        sample_admissible=sample,
        notes="linear age-structured model used for sensor placement",
        extras={"A": A, "C": C, "output": output},
    )


def malaria_intrahost(
    Lambda: float = 100.0,
    mu_S: float = 0.05,
    mu_I: tuple = (0.1, 0.1, 0.1, 0.1, 0.1),
    gamma_I: tuple = (1.0, 1.0, 1.0, 1.0, 1.0),
    r: float = 10.0,
    mu_M: float = 2.0,
    beta: float = 1e-3,
) -> ZooEntry:
    """Intra-host malaria model: erythrocytes, five infected stages, merozoites.

    State ``x = (S, I1..I5, M)``, observation ``y = I1 + I2`` (circulating
    parasitized cells).  The dynamics decompose as
    ``x' = A x + beta S M E + Lambda e1`` with the structural matrices kept in
    ``extras``; ``beta`` is the only parameter treated as unknown.
    """
    _positive(Lambda=Lambda, mu_S=mu_S, r=r, mu_M=mu_M, beta=beta)
    mu_I = np.asarray(mu_I, float)
    gamma_I = np.asarray(gamma_I, float)
    if mu_I.shape != (5,) or gamma_I.shape != (5,):
        raise ValueError("mu_I and gamma_I must each have 5 entries")
    if np.any(mu_I <= 0) or np.any(gamma_I <= 0):
        raise ValueError("stage rates must be positive")

    A = np.zeros((7, 7))
    A[0, 0] = -mu_S
    for i in range(5):
        A[1 + i, 1 + i] = -(gamma_I[i] + mu_I[i])
        if i > 0:
            A[1 + i, i] = gamma_I[i - 1]
    A[6, 5] = r * gamma_I[4]
    A[6, 6] = -mu_M
    E = np.array([-1.0, 1.0, 0.0, 0.0, 0.0, 0.0, -1.0])
    e1 = np.zeros(7)
    e1[0] = 1.0
    C = np.zeros((1, 7))
    C[0, 1] = C[0, 2] = 1.0
    Abar = A - np.outer(E, C[0] @ A)

    def f(x, theta, t=0.0):
        b = theta[0]
        lin = x @ A.T
        bil = (b * x[..., 0] * x[..., 6])[..., None] * E
        return lin + bil + Lambda * e1

    def h(x, theta, t=0.0):
        return (x[..., 1] + x[..., 2])[..., None]

    def jac_f_x(x, theta, t=0.0):
        b = theta[0]
        J = A.copy()
        J += b * x[..., 6] * np.outer(E, np.eye(7)[0])
        J += b * x[..., 0] * np.outer(E, np.eye(7)[6])
        return J

    def jac_f_theta(x, theta, t=0.0):
        return (x[..., 0] * x[..., 6] * E)[:, None]

    S_bar = Lambda / mu_S
    spec = ModelSpec(
        n_states=7, n_params=1, n_outputs=1,
        f=f, h=h,
        jac_f_x=jac_f_x, jac_f_theta=jac_f_theta,
        jac_h_x=lambda x, th, t=0.0: C.copy(),
        jac_h_theta=lambda x, th, t=0.0: np.zeros((1, 1)),
        state_names=("S", "I1", "I2", "I3", "I4", "I5", "M"),
        param_names=("beta",),
        output_names=("y",),
        state_scales=np.array([S_bar] + [S_bar / 4] * 6),
        param_scales=np.array([beta]),
    )

    def admissible(x):
        return bool(np.all(x >= 0))

    def sample(rng):
        return rng.uniform(0.0, 1.0, 7) * spec.state_scales

    return ZooEntry(
        id="malaria", spec=spec, default_params=np.array([beta]),
        default_x0=np.array([S_bar, 10.0, 10.0, 10.0, 10.0, 10.0, 10.0]),
        default_horizon=150.0,
        admissible=admissible,
        admissible_desc="nonnegative orthant",
        sample_admissible=sample,
        notes="intra-host malaria; y = I1 + I2; change of variable w = x - E y "
              "removes the beta S M nonlinearity",
        extras={"A": A, "E": E, "e1": e1, "C": C, "Abar": Abar, "Lambda": Lambda},
    )


# ---------------------------------------------------------------------------
# Counterexamples
# ---------------------------------------------------------------------------

def two_compartment(a12: float = 1.0, a21: float = 0.5) -> ZooEntry:
    """Two linear compartments with ``y = x1``.

    Injective input-output coefficients, yet indistinguishable parameter
    pairs exist on the ``x2 = 0`` slice.
    """
    _positive(a12=a12, a21=a21)

    def f(x, theta, t=0.0):
        x1, x2 = x[..., 0], x[..., 1]
        A12, A21 = theta[0], theta[1]
        return np.stack([-A21 * x1 + A12 * x2, -A12 * x2], axis=-1)

    def h(x, theta, t=0.0):
        return x[..., 0:1]

    theta0 = np.array([a12, a21])
    spec = ModelSpec(
        n_states=2, n_params=2, n_outputs=1,
        f=f, h=h,
        jac_f_x=lambda x, th, t=0.0: np.array([[-th[1], th[0]], [0.0, -th[0]]]),
        jac_f_theta=lambda x, th, t=0.0: np.array(
            [[x[..., 1], -x[..., 0]], [-x[..., 1], 0.0]], dtype=float),
        jac_h_x=lambda x, th, t=0.0: np.array([[1.0, 0.0]]),
        jac_h_theta=lambda x, th, t=0.0: np.zeros((1, 2)),
        state_names=("x1", "x2"), param_names=("a12", "a21"),
        output_names=("y",),
        param_scales=theta0,
    )

    return ZooEntry(
        id="two-compartment", spec=spec, default_params=theta0,
        default_x0=np.array([1.0, 1.0]), default_horizon=10.0,
        admissible=lambda x: bool(np.all(x >= 0)),
        admissible_desc="nonnegative orthant",
        sample_admissible=lambda rng: rng.uniform(0.1, 3.0, 2),
        notes="input-output relation injective but unidentifiable when x2(0)=0",
    )


def academic_unobservable(alpha: float = 1.0) -> ZooEntry:
    """Rotation-decay system with radial output: identifiable, not observable."""
    _positive(alpha=alpha)

    def f(x, theta, t=0.0):
        x1, x2 = x[..., 0], x[..., 1]
        a = theta[0]
        return np.stack([-a * (x1 + x2), a * (x1 - x2)], axis=-1)

    def h(x, theta, t=0.0):
        return (0.5 * (x[..., 0] ** 2 + x[..., 1] ** 2))[..., None]

    spec = ModelSpec(
        n_states=2, n_params=1, n_outputs=1,
        f=f, h=h,
        jac_f_x=lambda x, th, t=0.0: np.array(
            [[-th[0], -th[0]], [th[0], -th[0]]]),
        jac_f_theta=lambda x, th, t=0.0: np.array(
            [[-(x[..., 0] + x[..., 1])], [x[..., 0] - x[..., 1]]], dtype=float),
        jac_h_x=lambda x, th, t=0.0: np.array([[x[..., 0], x[..., 1]]], dtype=float),
        jac_h_theta=lambda x, th, t=0.0: np.zeros((1, 1)),
        state_names=("x1", "x2"), param_names=("alpha",),
        output_names=("y",),
        param_scales=np.array([alpha]),
    )

    return ZooEntry(
        id="academic", spec=spec, default_params=np.array([alpha]),
        default_x0=np.array([1.0, 0.5]), default_horizon=5.0,
        admissible=lambda x: bool(np.all(np.isfinite(x))),
        admissible_desc="all of R^2",
        sample_admissible=lambda rng: rng.normal(0.0, 1.0, 2),
        notes="y = (x1^2 + x2^2)/2 decays at rate alpha regardless of angle",
    )


REGISTRY: Dict[str, Callable[..., ZooEntry]] = {
    "sir-classical": sir_classical,
    "sir-cumulative": sir_cumulative,
    "sir-demography": sir_demography,
    "sir-fluctuating": sir_fluctuating,
    "three-stage": three_stage,
    "five-class-age": five_class_age,
    "malaria": malaria_intrahost,
    "two-compartment": two_compartment,
    "academic": academic_unobservable,
}


def get_entry(model_id: str, **overrides) -> ZooEntry:
    """Look up a model by CLI identifier, applying keyword overrides."""
    try:
        factory = REGISTRY[model_id]
    except KeyError:
        raise KeyError(f"unknown model id {model_id!r}; known: {sorted(REGISTRY)}")
    return factory(**overrides)
