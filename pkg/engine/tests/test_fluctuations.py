import math

import numpy as np
import pytest
from ppm_shared.exceptions.ppm_error import PpmError, PpmErrorCode

from ppm_engine.correlations import correlation
from ppm_engine.fluctuations import reconstruct_populations, sample_covariances, simulate_sde, stationary_covariances
from ppm_engine.kinetics import make_rng
from ppm_engine.models import FluctPath
from ppm_engine.parameters import fixed_points


def test_stationary_covariances_reference(reference_fc):
    cov = stationary_covariances(reference_fc)

    assert cov.C_xx0 == pytest.approx(2.1)
    assert cov.C_yy0 == pytest.approx(0.468)
    assert cov.C_xy0 == pytest.approx(-0.6)
    assert cov.is_positive_definite


def test_covariance_over_squared_density_is_magnification(reference_fc):
    cov = stationary_covariances(reference_fc)

    assert cov.C_xx0 / reference_fc.R_A_star**2 == pytest.approx(52.5)


def test_noiseless_path_spirals_into_origin(reference_fc):
    quiet = reference_fc.model_copy(update={"sigma_x": 0.0, "sigma_y": 0.0, "rho": 0.0})

    first = simulate_sde(quiet, 300.0, make_rng(1), burn_in=0.0, init=(1.0, 0.0))
    second = simulate_sde(quiet, 300.0, make_rng(2), burn_in=0.0, init=(1.0, 0.0))

    np.testing.assert_array_equal(first.X, second.X)
    assert first.X[0] == 1.0
    assert abs(first.X[-1]) < 1e-6 and abs(first.Y[-1]) < 1e-6
    # the spiral crosses zero
    assert first.X.min() < 0


def test_simulate_sde_grid(reference_fc, rng):
    path = simulate_sde(reference_fc, 50.0, rng, dt=0.1)

    assert len(path.times) == 501
    assert path.times[-1] == pytest.approx(50.0)
    assert path.dt == 0.1


def test_simulate_sde_default_step(reference_fc, rng):
    path = simulate_sde(reference_fc, 10.0, rng)

    assert path.dt == pytest.approx(reference_fc.tau0 / 100)


def test_simulate_sde_resolution_guard(reference_fc, rng):
    with pytest.raises(PpmError) as error:
        simulate_sde(reference_fc, 100.0, rng, dt=reference_fc.tau0 / 10)

    assert error.value.error_code == PpmErrorCode.RESOLUTION_GUARD


def test_reconstruct_populations(reference_macro):
    fp = fixed_points(reference_macro)
    path = FluctPath(times=np.array([0.0, 1.0]), X=np.array([0.0, 1.45]), Y=np.array([0.0, 0.0]), dt=1.0)

    n, m = reconstruct_populations(path, fp, 1000)

    assert n[0] == pytest.approx(200.0)
    assert m[0] == pytest.approx(200.0)
    assert n[1] == pytest.approx(200 + math.sqrt(1000) * 1.45)
    assert n[1] == pytest.approx(245.85, abs=0.01)


def test_reconstruct_populations_needs_two_agents(reference_macro):
    path = FluctPath(times=np.zeros(1), X=np.zeros(1), Y=np.zeros(1), dt=1.0)

    with pytest.raises(PpmError) as error:
        reconstruct_populations(path, fixed_points(reference_macro), 1)

    assert error.value.error_code == PpmErrorCode.INVALID_INPUT


@pytest.mark.slow
def test_long_run_moments_match_stationary_covariances(reference_fc):
    """
    10^6 steps of 0.1 min
    """
    path = simulate_sde(reference_fc, 100_000.0, make_rng(99), dt=0.1)
    expected = stationary_covariances(reference_fc)

    sample = sample_covariances(path)

    # about 10^4 decorrelated samples at tau0 = 10 min
    standard_error = math.sqrt(expected.C_xx0 / 5_000)
    assert abs(path.X.mean()) < 3 * standard_error
    assert abs(path.Y.mean()) < 3 * math.sqrt(expected.C_yy0 / 5_000)
    assert sample.C_xx0 == pytest.approx(expected.C_xx0, rel=0.05)
    assert sample.C_yy0 == pytest.approx(expected.C_yy0, rel=0.05)
    assert sample.C_xy0 == pytest.approx(expected.C_xy0, rel=0.05)


@pytest.mark.slow
def test_path_autocorrelation_follows_closed_form(reference_fc):
    path = simulate_sde(reference_fc, 100_000.0, make_rng(7), dt=0.1)
    x = path.X - path.X.mean()
    variance = np.dot(x, x) / len(x)

    for lag_min in (5.0, 10.0, 22.0, 44.0):
        k = int(round(lag_min / path.dt))
        acf = np.dot(x[:-k], x[k:]) / (len(x) - k) / variance
        closed = correlation("xx", reference_fc, lag_min) / correlation("xx", reference_fc, 0.0)
        assert acf == pytest.approx(closed, abs=0.05)


def batch_covariances(path: FluctPath, batches: int = 20) -> np.ndarray:
    """(C_xx, C_yy, C_xy) estimated on each of ``batches`` consecutive stretches."""
    rows = []
    for X, Y in zip(np.array_split(path.X, batches), np.array_split(path.Y, batches)):
        cov = np.cov(np.vstack((X, Y)), bias=True)
        rows.append((cov[0, 0], cov[1, 1], cov[0, 1]))
    return np.array(rows)


@pytest.mark.slow
def test_halving_the_step_stays_within_monte_carlo_error(reference_fc):
    coarse = batch_covariances(simulate_sde(reference_fc, 100_000.0, make_rng(31), dt=reference_fc.tau0 / 50))
    fine = batch_covariances(simulate_sde(reference_fc, 100_000.0, make_rng(32), dt=reference_fc.tau0 / 100))

    standard_error = np.sqrt(coarse.var(axis=0, ddof=1) / len(coarse) + fine.var(axis=0, ddof=1) / len(fine))
    np.testing.assert_array_less(np.abs(coarse.mean(axis=0) - fine.mean(axis=0)), 4 * standard_error)
