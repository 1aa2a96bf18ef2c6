import numpy as np
import pytest

from epiobs.fitting import (Dataset, confidence_intervals, fim,
                            fit_fim_report, ols_fit)
from epiobs.integrate import integrate
from epiobs.zoo import get_entry


def test_dataset_validation():
    with pytest.raises(ValueError):
        Dataset(t=np.array([0.0, 1.0]), Y=np.array([1.0]))
    with pytest.raises(ValueError):
        Dataset(t=np.array([1.0, 0.0]), Y=np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        Dataset(t=np.array([0.0]), Y=np.array([np.nan]))
    with pytest.raises(ValueError):
        Dataset(t=np.array([0.0]), Y=np.array([1.0]), dof_convention="bogus")


def test_dof_conventions():
    ds_known = Dataset(t=np.arange(14.0), Y=np.zeros(14))
    assert ds_known.dof(2, 2) == 12
    ds_est = Dataset(t=np.arange(31.0), Y=np.zeros(31),
                     dof_convention="estimated-x0")
    assert ds_est.dof(2, 4) == 25


def test_fim_is_symmetric_psd():
    rng = np.random.default_rng(0)
    chi = rng.normal(size=(12, 1, 3))
    F = fim(chi, 2.0)
    assert np.allclose(F, F.T)
    assert np.all(np.linalg.eigvalsh(F) >= -1e-12)
    with pytest.raises(ValueError):
        fim(chi, 0.0)


def test_confidence_intervals_known_diagonal_case():
    F = np.diag([4.0, 25.0])
    rep = confidence_intervals(np.array([1.0, 2.0]), F, dof=12)
    assert np.allclose(rep.standard_errors, [0.5, 0.2])
    assert abs(rep.t_quantile - 2.1788128) < 1e-6
    assert np.allclose(rep.half_widths, rep.t_quantile * np.array([0.5, 0.2]))
    assert not rep.ill_conditioned
    assert np.allclose(rep.intervals[:, 1] - rep.intervals[:, 0],
                       2.0 * rep.half_widths)


def test_ill_conditioned_flag_set_for_singular_like_fim():
    F = np.array([[1.0, 1.0], [1.0, 1.0 + 1e-14]])
    rep = confidence_intervals(np.array([1.0, 1.0]), F, dof=10)
    assert rep.ill_conditioned


def test_ols_fit_argument_contract():
    entry = get_entry("sir-classical")
    ds = Dataset(t=np.arange(5.0), Y=np.ones(5))
    with pytest.raises(ValueError):
        ols_fit(entry.spec, ds, np.array([2.0, 0.5]))  # x0 missing
    with pytest.raises(ValueError):
        ols_fit(entry.spec, ds, np.array([2.0]), x0=np.array([762.0, 1.0]))
    ds_est = Dataset(t=np.arange(5.0), Y=np.ones(5),
                     dof_convention="estimated-x0")
    with pytest.raises(ValueError):
        ols_fit(entry.spec, ds_est, np.array([2.0, 0.5, 700.0, 1.0]),
                x0=np.array([762.0, 1.0]))


def test_round_trip_recovers_truth_from_perturbed_guess():
    entry = get_entry("sir-classical", beta=1.7, gamma=0.45, N=763.0, k=1.0)
    truth = entry.default_params
    x0 = np.array([760.0, 3.0])
    t = np.arange(0.0, 14.0)
    traj = integrate(entry.spec, x0, truth, t, rtol=1e-12, atol=1e-14)
    ds = Dataset(t=t, Y=traj.y[:, 0])
    fit = ols_fit(entry.spec, ds, truth * np.array([1.3, 0.8]), x0=x0)
    assert fit.converged
    assert np.max(np.abs(fit.theta_hat - truth) / truth) < 1e-6
    assert fit.sse < 1e-10


def test_fit_fim_report_end_to_end_shapes():
    entry = get_entry("sir-classical")
    t = np.arange(0.0, 14.0)
    x0 = np.array([762.0, 1.0])
    traj = integrate(entry.spec, x0, entry.default_params, t)
    rng = np.random.default_rng(1)
    ds = Dataset(t=t, Y=traj.y[:, 0] + rng.normal(0.0, 5.0, len(t)))
    fit = ols_fit(entry.spec, ds, np.array([2.0, 0.5]), x0=x0)
    rep = fit_fim_report(entry.spec, ds, fit.theta_hat, fit.x0_hat,
                         fit.sigma2_hat, fit.dof)
    assert rep.fim.shape == (2, 2)
    assert rep.intervals.shape == (2, 2)
    assert rep.dof == 12
    assert np.all(rep.half_widths > 0)
