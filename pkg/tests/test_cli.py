import csv
import json
import os

import numpy as np
import pytest

from epiobs.cli import main
from epiobs.datasets import (dataset_boarding_school, dataset_bombay,
                             emit_plot_data, run_case_study)
from epiobs.integrate import integrate
from epiobs.zoo import get_entry


def test_embedded_datasets():
    ds = dataset_boarding_school()
    assert ds.M == 14 and ds.dof_convention == "known-x0"
    assert ds.Y[4] == 222.0
    ds = dataset_bombay()
    assert ds.M == 31 and ds.dof_convention == "estimated-x0"
    assert ds.Y[18] == 925.0


def test_run_case_study_unknown_id():
    with pytest.raises(KeyError):
        run_case_study("lockdown")


def test_emit_plot_data_trajectory(tmp_path):
    entry = get_entry("sir-classical")
    t = np.linspace(0.0, 5.0, 6)
    traj = integrate(entry.spec, entry.default_x0, entry.default_params, t)
    path = tmp_path / "traj.csv"
    emit_plot_data(traj, str(path), model=entry.spec)
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0][0] == "t"
    assert len(rows) == 7
    assert float(rows[1][0]) == 0.0


def test_cli_simulate_writes_report(tmp_path):
    rc = main(["simulate", "--model", "sir-classical",
               "--out", str(tmp_path)])
    assert rc == 0
    report = json.load(open(tmp_path / "simulate_sir-classical.json"))
    assert report["self_check_passed"]
    assert os.path.exists(tmp_path / "simulate_sir-classical.csv")


def test_cli_rank_generic(tmp_path):
    rc = main(["rank", "--model", "two-compartment", "--samples", "4",
               "--out", str(tmp_path)])
    assert rc == 0
    report = json.load(open(tmp_path / "rank_two-compartment.json"))
    assert len(report["reports"]) == 4


def test_cli_observe_reduced_order(tmp_path):
    rc = main(["observe", "--family", "reduced-order", "--noise", "uniform",
               "--amplitude", "1.0", "--seed", "0", "--out", str(tmp_path)])
    assert rc == 0


def test_cli_fit_and_fim_on_boarding_data(tmp_path):
    data = tmp_path / "boarding.csv"
    ds = dataset_boarding_school()
    with open(data, "w", newline="") as fh:
        w = csv.writer(fh)
        for t, y in zip(ds.t, ds.Y):
            w.writerow([t, y])
    rc = main(["fit", "--model", "sir-classical", "--data", str(data),
               "--guess", "2,0.5", "--x0", "762,1", "--out", str(tmp_path)])
    assert rc == 0
    fit = json.load(open(tmp_path / "fit_sir-classical.json"))
    assert fit["converged"]
    assert abs(fit["theta_hat"][0] - 1.9605032) < 0.01
    rc = main(["fim", "--model", "sir-classical", "--data", str(data),
               "--theta", "1.9605032,0.4751562", "--x0", "762,1",
               "--out", str(tmp_path)])
    assert rc == 0


def test_cli_unknown_model_fails_cleanly(tmp_path):
    with pytest.raises(SystemExit):
        main(["simulate", "--model", "nope", "--out", str(tmp_path)])


def test_cli_env_var_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("EPIOBS_OUT_DIR", str(tmp_path / "envout"))
    rc = main(["simulate", "--model", "two-compartment"])
    assert rc == 0
    assert os.path.exists(tmp_path / "envout" / "simulate_two-compartment.json")
