import numpy as np
import pytest
from helpers import random_density, random_hermitian
from hypothesis import given, settings
from hypothesis import strategies as st

from qmeas.operators import DimensionMismatchError, identity, zeros
from qmeas.povm import (
    OutcomeDistribution,
    Povm,
    PovmValidationError,
    distribution,
    is_pvm,
    marginal,
    marginal_pair,
    validate_povm,
)
from qmeas.states import polarization_projector, pure_state, spectral_pvm
from qmeas.experiments import EprBellConfig, WhichWayConfig, eprbell_povm, whichway_povm

gammas = st.floats(min_value=0.0, max_value=1.0)


def three_effect_whichway(gamma=0.5, theta=0.0, theta_prime=np.pi / 4):
    e = polarization_projector(theta)
    ep = polarization_projector(theta_prime)
    return [gamma * e, (1 - gamma) * ep, identity(2) - gamma * e - (1 - gamma) * ep]


def test_validate_projector_pair():
    e = polarization_projector(0.3)
    povm = validate_povm([e, identity(2) - e])
    assert len(povm) == 2
    assert povm.outcome_labels == ("0", "1")


def test_validate_whichway_three_effects():
    # transmitted, reflected, absorbed: all positive, closing to identity
    povm = validate_povm(three_effect_whichway(), ["D", "D'", "none"])
    assert len(povm) == 3


def test_validate_reports_positivity_failure_with_index():
    # closure holds but I - 1.2 E dips to eigenvalue -0.2
    e = polarization_projector(0.0)
    with pytest.raises(PovmValidationError, match="effect 1.*positive"):
        validate_povm([1.2 * e, identity(2) - 1.2 * e])


def test_validate_reports_closure_failure():
    e = polarization_projector(0.0)
    with pytest.raises(PovmValidationError, match="closure"):
        validate_povm([0.5 * e, 0.5 * e])


def test_validate_reports_dimension_mismatch():
    with pytest.raises(DimensionMismatchError, match="effect 1"):
        validate_povm([identity(2), identity(3)])


def test_is_pvm_on_spectral_output():
    rng = np.random.default_rng(3)
    pvm = spectral_pvm(random_hermitian(rng, 3))
    assert is_pvm(Povm.from_pvm(pvm))


def test_is_pvm_false_for_proper_povm():
    # gamma E is not idempotent for gamma strictly inside (0, 1)
    povm = whichway_povm(WhichWayConfig(0.0, np.pi / 4, 0.5)).flatten()
    assert not is_pvm(povm)


def test_is_pvm_true_at_transmission_one():
    row = marginal(whichway_povm(WhichWayConfig(0.0, np.pi / 4, 1.0)), "row")
    assert is_pvm(row)


def test_is_pvm_over_gamma_grid():
    for gamma in np.linspace(0.0, 1.0, 11):
        flat = whichway_povm(WhichWayConfig(0.0, np.pi / 4, float(gamma))).flatten()
        assert is_pvm(flat) == (gamma in (0.0, 1.0))


def test_distribution_trivial_povm():
    rng = np.random.default_rng(5)
    rho = random_density(rng, 3)
    dist = distribution(rho, validate_povm([identity(3)]))
    assert np.allclose(dist.probabilities, [1.0])


def test_distribution_whichway_detection_probabilities():
    # transmitted detector fires with gamma <E_theta>, reflected with (1-gamma) <E_theta'>
    rho = pure_state([1, 0])
    grid = whichway_povm(WhichWayConfig(0.0, np.pi / 4, 0.5))
    probs = distribution(rho, grid).probabilities
    assert np.abs(probs - [[0.0, 0.5], [0.25, 0.25]]).max() < 1e-12


def test_distribution_sums_to_one_many():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        rho = random_density(rng, 2)
        povm = validate_povm(
            three_effect_whichway(rng.uniform(0, 1), rng.uniform(0, np.pi), rng.uniform(0, np.pi))
        )
        dist = distribution(rho, povm)
        assert abs(dist.probabilities.sum() - 1.0) < 1e-9
        assert dist.probabilities.min() > -1e-9


def test_outcome_distribution_validation():
    with pytest.raises(Exception):
        OutcomeDistribution([0.7, 0.7])
    with pytest.raises(Exception):
        OutcomeDistribution([1.5, -0.5])


def test_marginal_closure():
    grid = whichway_povm(WhichWayConfig(0.2, 1.1, 0.35))
    for axis in ("row", "col"):
        total = sum(e.mat for e in marginal(grid, axis).effects)
        assert np.abs(total - np.eye(2)).max() < 1e-12


def test_marginals_of_whichway_grid():
    gamma, theta, theta_prime = 0.5, 0.0, np.pi / 4
    grid = whichway_povm(WhichWayConfig(theta, theta_prime, gamma))
    row = marginal(grid, "row")
    e = polarization_projector(theta).mat
    assert np.abs(row.effects[0].mat - gamma * e).max() < 1e-12
    assert np.abs(row.effects[1].mat - (np.eye(2) - gamma * e)).max() < 1e-12
    col = marginal(grid, "col")
    ep = polarization_projector(theta_prime).mat
    assert np.abs(col.effects[0].mat - (1 - gamma) * ep).max() < 1e-12
    assert np.abs(col.effects[1].mat - (np.eye(2) - (1 - gamma) * ep)).max() < 1e-12


def test_marginal_bad_axis():
    grid = whichway_povm(WhichWayConfig(0.0, 1.0, 0.5))
    with pytest.raises(Exception):
        marginal(grid, "diagonal")


def _example_quad(g1=0.4, g2=0.7):
    return eprbell_povm(
        EprBellConfig(
            WhichWayConfig(0.0, np.pi / 4, g1), WhichWayConfig(np.pi / 8, 3 * np.pi / 8, g2)
        )
    )


def test_marginal_pair_factorizes_over_arms():
    g1, g2 = 0.4, 0.7
    quad = _example_quad(g1, g2)
    pair = marginal_pair(quad, "m1", "m2")
    arm1 = marginal(whichway_povm(WhichWayConfig(0.0, np.pi / 4, g1)), "row")
    arm2 = marginal(whichway_povm(WhichWayConfig(np.pi / 8, 3 * np.pi / 8, g2)), "row")
    for a in range(2):
        for b in range(2):
            expected = np.kron(arm1.effects[a].mat, arm2.effects[b].mat)
            assert np.abs(pair.grid[a, b] - expected).max() < 1e-12


def test_marginal_pair_all_six_axis_pairs_valid():
    quad = _example_quad()
    pairs = [(i, j) for i in range(4) for j in range(4) if i < j]
    assert len(pairs) == 6
    for i, j in pairs:
        bivariate = marginal_pair(quad, i, j)
        bivariate.flatten()  # validates POVM axioms


def test_marginal_pair_at_full_transmission():
    quad = _example_quad(g1=1.0, g2=0.7)
    pair = marginal_pair(quad, "m1", "m2")
    e1 = polarization_projector(0.0).mat
    arm2 = marginal(whichway_povm(WhichWayConfig(np.pi / 8, 3 * np.pi / 8, 0.7)), "row")
    for a, proj in enumerate((e1, np.eye(2) - e1)):
        for b in range(2):
            expected = np.kron(proj, arm2.effects[b].mat)
            assert np.abs(pair.grid[a, b] - expected).max() < 1e-12


def test_marginal_pair_rejects_identical_axes():
    with pytest.raises(Exception, match="distinct"):
        marginal_pair(_example_quad(), "m1", "m1")


def test_marginalization_commutes_with_distribution():
    rng = np.random.default_rng(11)
    for _ in range(20):
        rho = random_density(rng, 2)
        grid = whichway_povm(
            WhichWayConfig(rng.uniform(0, np.pi), rng.uniform(0, np.pi), rng.uniform(0, 1))
        )
        joint = distribution(rho, grid).probabilities
        row_direct = distribution(rho, marginal(grid, "row")).probabilities
        col_direct = distribution(rho, marginal(grid, "col")).probabilities
        assert np.abs(joint.sum(axis=1) - row_direct).max() < 1e-12
        assert np.abs(joint.sum(axis=0) - col_direct).max() < 1e-12


@settings(max_examples=60)
@given(gammas)
def test_whichway_flat_povm_is_valid_for_all_gamma(gamma):
    flat = whichway_povm(WhichWayConfig(0.3, 1.2, gamma)).flatten()
    total = sum(e.mat for e in flat.effects)
    assert np.abs(total - np.eye(2)).max() < 1e-9


def test_bivariate_grid_shape_and_labels():
    grid = whichway_povm(WhichWayConfig(0.0, np.pi / 4, 0.5))
    assert grid.shape == (2, 2)
    assert grid.row_labels == ("+", "-")
    assert grid.col_labels == ("+", "-")
    assert np.abs(grid.effect(0, 0).mat - zeros(2).mat).max() == 0.0
    flat = grid.flatten()
    assert flat.outcome_labels == ("+,+", "+,-", "-,+", "-,-")
