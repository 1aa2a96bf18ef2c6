import numpy as np

from epiobs.observability import (detectability_linear, generic_rank,
                                  indistinguishability_probe,
                                  linear_observability, observability_matrix,
                                  orc_rank)
from epiobs.zoo import get_entry


def test_observability_matrix_shape_and_content():
    A = np.array([[0.0, 1.0], [-2.0, -3.0]])
    C = np.array([[1.0, 0.0]])
    O = observability_matrix(A, C)
    assert O.shape == (2, 2)
    assert np.allclose(O, np.vstack([C, C @ A]))


def test_linear_observable_pair():
    A = np.array([[0.0, 1.0], [-2.0, -3.0]])
    C = np.array([[1.0, 0.0]])
    rep = linear_observability(A, C)
    assert rep.full_rank and rep.numerical_rank == 2


def test_linear_unobservable_pair_has_null_direction():
    # Block-diagonal with an output that only sees the first block.
    A = np.diag([-1.0, -2.0, 4.0])
    C = np.array([[1.0, 0.0, 0.0]])
    rep = linear_observability(A, C)
    assert rep.numerical_rank == 1
    assert rep.null_directions.shape[1] == 2
    # Null directions must be orthogonal to every row of the matrix.
    O = observability_matrix(A, C)
    assert np.max(np.abs(O @ rep.null_directions)) < 1e-10


def test_detectability_depends_on_unobservable_spectrum():
    C = np.array([[1.0, 0.0]])
    stable = detectability_linear(np.diag([-1.0, -2.0]), C)
    unstable = detectability_linear(np.diag([-1.0, 2.0]), C)
    assert stable.detectable and not stable.observable
    assert not unstable.detectable


def test_sir_state_rank_full_and_param_rank_full():
    entry = get_entry("sir-classical", beta=1.5, gamma=0.5, N=1000.0, k=1.0)
    point = np.array([500.0, 100.0])
    rep_state = orc_rank(entry.spec, point, entry.default_params)
    assert rep_state.full_rank and rep_state.numerical_rank == 2
    rep_aug = orc_rank(entry.spec, point, entry.default_params, augment=True)
    assert rep_aug.full_rank and rep_aug.numerical_rank == 4


def test_sir_rank_collapses_at_disease_free_point():
    entry = get_entry("sir-classical", beta=1.5, gamma=0.5, N=1000.0, k=1.0)
    rep = orc_rank(entry.spec, np.array([1000.0, 0.0]), entry.default_params)
    assert rep.numerical_rank == 1


def test_five_class_output_choice_changes_rank():
    # Observing the last age class sees everything; observing the middle
    # classes loses directions.
    full = get_entry("five-class-age", output="x5")
    A, C = full.extras["A"], full.extras["C"]
    assert linear_observability(A, C).numerical_rank == 5
    partial = get_entry("five-class-age", output="x3")
    assert linear_observability(partial.extras["A"],
                                partial.extras["C"]).numerical_rank < 5


def test_malaria_linear_part_detectable_not_observable():
    entry = get_entry("malaria")
    A, C = entry.extras["A"], entry.extras["C"]
    verdict = detectability_linear(A, C)
    assert verdict.detectable and not verdict.observable


def test_generic_rank_samples_are_reproducible():
    entry = get_entry("two-compartment")
    a = generic_rank(entry.spec, entry.default_params,
                     entry.sample_admissible, n_samples=5, seed=3)
    b = generic_rank(entry.spec, entry.default_params,
                     entry.sample_admissible, n_samples=5, seed=3)
    assert [r.numerical_rank for r in a] == [r.numerical_rank for r in b]
    assert all(r.full_rank for r in a)


def test_academic_example_rank_deficient_on_circle():
    # Output (x1^2 + x2^2)/2 under rotation: radius observable, angle not.
    entry = get_entry("academic")
    rep = orc_rank(entry.spec, np.array([1.0, 1.0]), entry.default_params)
    assert rep.numerical_rank == 1


def test_indistinguishability_probe_separates_distinct_states():
    entry = get_entry("sir-classical")
    gap = indistinguishability_probe(
        entry.spec, np.array([762.0, 1.0]), np.array([700.0, 30.0]),
        entry.default_params, entry.default_params, horizon=10.0)
    assert gap > 1.0
