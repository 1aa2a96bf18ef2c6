"""Observability, identifiability and state estimation for compartmental models."""

__version__ = "0.1.0"

from .models import DomainError, ModelSpec, Trajectory
from .integrate import IntegrationError, integrate, solve_rk45
from .lie import LieStack, finite_diff_jacobian, lie_stack
from .zoo import REGISTRY, ZooEntry, get_entry
from .observability import (DetectabilityVerdict, RankReport,
                            detectability_linear, generic_rank,
                            indistinguishability_probe, linear_observability,
                            observability_matrix, orc_rank)
from .observers import (GainVector, NoiseSpec, NotObservableError,
                        ObserverConfig, ObserverRun, empirical_decay_rate,
                        high_gain_spectrum, highgain_truth, pole_place_gain,
                        run_high_gain_sir, run_luenberger,
                        run_malaria_observer, run_reduced_order,
                        simulate_with_noise, symmetric_functions,
                        vandermonde_inverse, vandermonde_matrix)
from .sensitivity import SensitivityBundle, output_sensitivity, sensitivity_solve
from .student import t_cdf, t_pdf, t_quantile
from .fitting import (Dataset, FimReport, FitResult, confidence_intervals,
                      fim, fit_fim_report, ols_fit)
from .datasets import (CASE_STUDIES, CaseStudy, dataset_boarding_school,
                       dataset_bombay, emit_plot_data, run_case_study)

__all__ = [
    "DomainError", "ModelSpec", "Trajectory",
    "IntegrationError", "integrate", "solve_rk45",
    "LieStack", "finite_diff_jacobian", "lie_stack",
    "REGISTRY", "ZooEntry", "get_entry",
    "DetectabilityVerdict", "RankReport", "detectability_linear",
    "generic_rank", "indistinguishability_probe", "linear_observability",
    "observability_matrix", "orc_rank",
    "GainVector", "NoiseSpec", "NotObservableError", "ObserverConfig",
    "ObserverRun", "empirical_decay_rate", "high_gain_spectrum",
    "highgain_truth", "pole_place_gain", "run_high_gain_sir",
    "run_luenberger", "run_malaria_observer", "run_reduced_order",
    "simulate_with_noise", "symmetric_functions", "vandermonde_inverse",
    "vandermonde_matrix",
    "SensitivityBundle", "output_sensitivity", "sensitivity_solve",
    "t_cdf", "t_pdf", "t_quantile",
    "Dataset", "FimReport", "FitResult", "confidence_intervals", "fim",
    "fit_fim_report", "ols_fit",
    "CASE_STUDIES", "CaseStudy", "dataset_boarding_school", "dataset_bombay",
    "emit_plot_data", "run_case_study",
]
