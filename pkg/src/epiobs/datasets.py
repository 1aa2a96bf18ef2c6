"""Embedded reference datasets and reproducible case studies.

Two classical outbreaks: influenza in an English boarding school (1978,
daily bed counts, initial condition known) and plague in Bombay (1905-06,
weekly deaths, initial condition estimated).  Each case study carries an
expected-results block so a run can self-check against the reference
numbers.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .fitting import Dataset, FimReport, FitResult, fit_fim_report, ols_fit
from .integrate import integrate
from .models import Trajectory
from .zoo import ZooEntry, get_entry

Array = np.ndarray

BOARDING_SCHOOL_CASES = np.array(
    [1, 6, 26, 73, 222, 293, 258, 237, 191, 124, 68, 26, 10, 3], float)
BOMBAY_DEATHS = np.array(
    [8, 10, 12, 16, 24, 48, 51, 92, 124, 178, 280, 387, 442, 644, 779, 702,
     695, 870, 925, 802, 578, 404, 296, 162, 106, 64, 46, 35, 27, 28, 24],
    float)


def dataset_boarding_school() -> Dataset:
    """Daily number of influenza cases, t = 0..13 days; x0 known
    (N = 763, S0 = 762, I0 = 1)."""
    return Dataset(t=np.arange(14.0), Y=BOARDING_SCHOOL_CASES.copy(),
                   dof_convention="known-x0", name="boarding-school")


def dataset_bombay() -> Dataset:
    """Weekly plague deaths, t = 0..30 weeks; x0 estimated with the
    parameters, output is gamma I."""
    return Dataset(t=np.arange(31.0), Y=BOMBAY_DEATHS.copy(),
                   dof_convention="estimated-x0", name="bombay")


@dataclass(frozen=True)
class CaseStudy:
    id: str
    dataset: Dataset
    entry: ZooEntry
    guess: Array
    x0: Optional[Array]
    expected: dict = field(default_factory=dict)


def _boarding_case() -> CaseStudy:
    return CaseStudy(
        id="boarding-school",
        dataset=dataset_boarding_school(),
        entry=get_entry("sir-classical", beta=2.0, gamma=0.5, N=763.0, k=1.0),
        guess=np.array([2.0, 0.5]),
        x0=np.array([762.0, 1.0]),
        expected={
            "beta": (1.9605032, 0.005),
            "gamma": (0.4751562, 0.005),
            "sse": (4892.6472, 0.005),
            "sigma2": (407.72060, 0.005),
            "fim": ([[974.5073, -523.73985], [-523.73985, 3132.2047]], 0.005),
            "cond": (3.8082403, 0.01),
            "half_widths": ([0.0731602, 0.0408077], 0.01),
            "t_quantile": (2.1788128, 1e-4),
        },
    )


def _bombay_case() -> CaseStudy:
    return CaseStudy(
        id="bombay",
        dataset=dataset_bombay(),
        entry=get_entry("sir-classical", beta=8e-5, gamma=0.6, N=1.0,
                        k_equals_gamma=True),
        guess=np.array([8e-5, 0.6, 15000.0, 7.0]),
        x0=None,
        expected={
            "sse_max": 1.01 * 106336.49,
            "ridge_point": {"gamma": (3.7161743, 0.05), "S0": (48113.13, 0.05)},
            "cond_min": 1e20,
            "huge_interval_ratio": 5.0,  # for gamma, S0, I0
            "t_quantile": (2.0595386, 1e-4),
        },
    )


CASE_STUDIES = {"boarding-school": _boarding_case, "bombay": _bombay_case}


def _rel_ok(actual, expected, tol) -> bool:
    a, e = np.asarray(actual, float), np.asarray(expected, float)
    return bool(np.all(np.abs(a - e) <= tol * np.abs(e)))


def run_case_study(case_id: str, out_dir: Optional[str] = None) -> dict:
    """Fit, compute the FIM report and self-check against the expected block.

    Returns a JSON-serializable report with one pass/fail entry per check
    and an overall ``passed`` flag.  Optionally writes the report and a
    plot-ready CSV of data plus fitted curve (0.01 time resolution).
    """
    if case_id not in CASE_STUDIES:
        raise KeyError(f"unknown case study {case_id!r}; "
                       f"known: {sorted(CASE_STUDIES)}")
    case = CASE_STUDIES[case_id]()
    ds = case.dataset
    fit = ols_fit(case.entry.spec, ds, case.guess, x0=case.x0)
    rep = fit_fim_report(case.entry.spec, ds, fit.theta_hat, fit.x0_hat,
                         fit.sigma2_hat, fit.dof)

    checks = []

    def check(name, passed, actual, expected):
        checks.append({"name": name, "passed": bool(passed),
                       "actual": actual, "expected": expected})

    exp = case.expected
    check("fit_converged", fit.converged, fit.converged, True)
    if case_id == "boarding-school":
        for key, idx in (("beta", 0), ("gamma", 1)):
            e, tol = exp[key]
            check(key, _rel_ok(fit.theta_hat[idx], e, tol),
                  float(fit.theta_hat[idx]), e)
        e, tol = exp["sse"]
        check("sse", _rel_ok(fit.sse, e, tol), fit.sse, e)
        e, tol = exp["sigma2"]
        check("sigma2", _rel_ok(fit.sigma2_hat, e, tol), fit.sigma2_hat, e)
        e, tol = exp["fim"]
        check("fim", _rel_ok(rep.fim, e, tol), rep.fim.tolist(), e)
        e, tol = exp["cond"]
        check("cond", _rel_ok(rep.condition_number, e, tol),
              rep.condition_number, e)
        e, tol = exp["half_widths"]
        check("half_widths", _rel_ok(rep.half_widths, e, tol),
              rep.half_widths.tolist(), e)
        e, tol = exp["t_quantile"]
        check("t_quantile", abs(rep.t_quantile - e) <= tol, rep.t_quantile, e)
    else:
        check("sse", fit.sse <= exp["sse_max"], fit.sse, exp["sse_max"])
        rp = exp["ridge_point"]
        at_paper_point = (
            _rel_ok(fit.theta_hat[1], rp["gamma"][0], rp["gamma"][1])
            and _rel_ok(fit.x0_hat[0], rp["S0"][0], rp["S0"][1]))
        # The optimum is a ridge: either the reference point is recovered or
        # an equivalent-or-better minimum with the ill-conditioned flag set.
        check("ridge_minimum",
              at_paper_point or (rep.ill_conditioned
                                 and fit.sse <= exp["sse_max"]),
              {"gamma": float(fit.theta_hat[1]), "S0": float(fit.x0_hat[0]),
               "ill_conditioned": rep.ill_conditioned},
              "paper point or equivalent-SSE ridge minimum")
        check("ill_conditioned", rep.ill_conditioned, rep.ill_conditioned, True)
        check("cond", rep.condition_number >= exp["cond_min"],
              rep.condition_number, exp["cond_min"])
        full = np.concatenate([fit.theta_hat, fit.x0_hat])
        ratios = rep.half_widths / np.abs(full)
        for name, idx in (("gamma", 1), ("S0", 2), ("I0", 3)):
            check(f"huge_interval_{name}",
                  ratios[idx] > exp["huge_interval_ratio"],
                  float(ratios[idx]), f"> {exp['huge_interval_ratio']}")
        e, tol = exp["t_quantile"]
        check("t_quantile", abs(rep.t_quantile - e) <= tol, rep.t_quantile, e)

    report = {
        "case_study": case_id,
        "theta_hat": fit.theta_hat.tolist(),
        "x0_hat": fit.x0_hat.tolist(),
        "sse": fit.sse,
        "sigma2_hat": fit.sigma2_hat,
        "dof": fit.dof,
        "iterations": fit.iterations,
        "converged": fit.converged,
        "stalled": fit.stalled,
        "fim": rep.fim.tolist(),
        "condition_number": rep.condition_number,
        "ill_conditioned": rep.ill_conditioned,
        "t_quantile": rep.t_quantile,
        "standard_errors": rep.standard_errors.tolist(),
        "half_widths": rep.half_widths.tolist(),
        "intervals": rep.intervals.tolist(),
        "checks": checks,
        "passed": all(c["passed"] for c in checks),
    }

    if out_dir is not None:
        import os
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, f"{case_id}.json"), "w") as fh:
            json.dump(report, fh, indent=2)
        t_fine = np.arange(ds.t[0], ds.t[-1] + 1e-9, 0.01)
        traj = integrate(case.entry.spec, fit.x0_hat, fit.theta_hat, t_fine)
        with open(os.path.join(out_dir, f"{case_id}_curve.csv"), "w",
                  newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "fitted"])
            for ti, yi in zip(t_fine, traj.y[:, ds.output_index]):
                w.writerow([f"{ti:.2f}", repr(float(yi))])
        with open(os.path.join(out_dir, f"{case_id}_data.csv"), "w",
                  newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "observed"])
            for ti, yi in zip(ds.t, ds.Y):
                w.writerow([repr(float(ti)), repr(float(yi))])
    return report


def emit_plot_data(obj, path: str, model=None) -> None:
    """Write a trajectory or observer run as a deterministic CSV."""
    from .observers import ObserverRun

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if isinstance(obj, Trajectory):
            n = obj.x.shape[1]
            m = obj.y.shape[1]
            state_names = (list(model.state_names) if model is not None
                           and model.state_names else
                           [f"x{i+1}" for i in range(n)])
            out_names = (list(model.output_names) if model is not None
                         and model.output_names else
                         [f"y{i+1}" for i in range(m)])
            w.writerow(["t"] + state_names + out_names)
            for i in range(len(obj.t)):
                w.writerow([repr(float(obj.t[i]))]
                           + [repr(float(v)) for v in obj.x[i]]
                           + [repr(float(v)) for v in obj.y[i]])
        elif isinstance(obj, ObserverRun):
            n = obj.x_true.shape[1]
            header = (["t"] + [f"x{i+1}_true" for i in range(n)]
                      + [f"x{i+1}_hat" for i in range(n)] + ["error_norm"])
            has_innov = obj.innovation is not None
            if has_innov:
                header += [f"innovation{j+1}"
                           for j in range(obj.innovation.shape[1])]
            w.writerow(header)
            for i in range(len(obj.t)):
                row = ([repr(float(obj.t[i]))]
                       + [repr(float(v)) for v in obj.x_true[i]]
                       + [repr(float(v)) for v in obj.x_hat[i]]
                       + [repr(float(obj.error_norm[i]))])
                if has_innov:
                    row += [repr(float(v)) for v in obj.innovation[i]]
                w.writerow(row)
        else:
            raise TypeError(f"cannot emit plot data for {type(obj).__name__}")
