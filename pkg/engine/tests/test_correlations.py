import math

import numpy as np
import pytest
from ppm_shared.schemas.protocol import CanonicalParams, MacroParams, PairKind
from scipy import optimize

from ppm_engine.correlations import (
    correlation,
    correlation_curve,
    correlation_oracle,
    envelope,
    kappa_coefficients,
    spectral_density,
)
from ppm_engine.fluctuations import stationary_covariances
from ppm_engine.parameters import canonical_to_macro, decaying_boundary, fluct_constants


def stationary(pair: PairKind, fc) -> float:
    cov = stationary_covariances(fc)
    return {PairKind.XX: cov.C_xx0, PairKind.YY: cov.C_yy0, PairKind.XY: cov.C_xy0}[pair]


def test_kappa_coefficients_reference(reference_fc):
    xx = kappa_coefficients(PairKind.XX, reference_fc)

    assert xx.kappa1 == pytest.approx(0.018)
    assert xx.kappa2 == 0
    assert xx.kappa3 == pytest.approx(0.24)
    assert kappa_coefficients(PairKind.YY, reference_fc).kappa2 == 0


def test_cross_kappa3_vanishes_without_noise_correlation(reference_fc):
    uncorrelated = reference_fc.model_copy(update={"rho": 0.0})

    assert kappa_coefficients(PairKind.XY, uncorrelated).kappa3 == 0


def test_spectral_density_at_zero(reference_fc):
    assert spectral_density(PairKind.XX, reference_fc, 0.0).real == pytest.approx(20.0)


def test_auto_spectrum_is_even_and_real(reference_fc):
    omega = np.linspace(0.01, 3.0, 50)

    plus = spectral_density(PairKind.XX, reference_fc, omega)
    minus = spectral_density(PairKind.XX, reference_fc, -omega)

    np.testing.assert_allclose(plus, minus)
    np.testing.assert_allclose(plus.imag, 0.0)


@pytest.mark.parametrize("pair", list(PairKind))
def test_correlation_at_zero_lag_is_stationary_covariance(reference_fc, pair):
    assert correlation(pair, reference_fc, 0.0) == pytest.approx(stationary(pair, reference_fc), abs=1e-9)


@pytest.mark.parametrize("pair", [PairKind.XX, PairKind.YY])
def test_autocorrelation_is_even(reference_fc, pair):
    taus = np.linspace(0.5, 120.0, 40)

    np.testing.assert_allclose(correlation(pair, reference_fc, taus), correlation(pair, reference_fc, -taus))


@pytest.mark.parametrize("tau", [1.0, 5.0, 10.0, 44.43, -10.0])
def test_cross_correlation_matches_inverse_transform(reference_fc, tau):
    closed = correlation(PairKind.XY, reference_fc, tau)

    assert correlation_oracle(PairKind.XY, reference_fc, tau) == pytest.approx(closed, rel=1e-6, abs=1e-10)


@pytest.mark.parametrize("pair", list(PairKind))
def test_oracle_on_lag_grid(reference_fc, pair):
    for tau in np.linspace(-100.0, 100.0, 100):
        closed = correlation(pair, reference_fc, tau)
        assert correlation_oracle(pair, reference_fc, tau) == pytest.approx(closed, rel=1e-6, abs=1e-9)


@pytest.mark.parametrize("tau", [30.0, 87.88, -30.0, -87.88])
def test_oracle_keeps_the_sign_of_the_odd_part(reference_fc, tau):
    """
    Past half a period the sine-weighted integral turns negative
    """
    closed = correlation(PairKind.XY, reference_fc, tau)

    assert correlation_oracle(PairKind.XY, reference_fc, tau) == pytest.approx(closed, rel=1e-6, abs=1e-9)


def test_oracle_matches_closed_form_at_thirty_minutes(reference_fc):
    assert correlation(PairKind.XY, reference_fc, 30.0) == pytest.approx(-0.007196, abs=1e-6)
    assert correlation_oracle(PairKind.XY, reference_fc, 30.0) == pytest.approx(-0.007196, abs=1e-6)


@pytest.mark.parametrize("fc_name", ["reference_fc", "decaying_fc"])
def test_cross_correlation_is_asymmetric(request, fc_name):
    fc = request.getfixturevalue(fc_name)
    taus = np.array([2.0, 5.0, 10.0])
    assert kappa_coefficients(PairKind.XY, fc).kappa2 != 0

    forward = correlation(PairKind.XY, fc, taus)
    backward = correlation(PairKind.XY, fc, -taus)

    assert np.all(np.abs(forward - backward) > 1e-3)


def test_first_zero_of_xx_autocorrelation(reference_fc):
    """
    e^{-|tau|/tau0} (a cos(w tau) + b sin(w tau) / w) vanishes at w tau = pi/2 + atan(b / (a w))
    """
    k = kappa_coefficients(PairKind.XX, reference_fc)
    coupling = reference_fc.mu_xy * reference_fc.mu_yx
    a = stationary(PairKind.XX, reference_fc)
    b = (k.kappa1 - k.kappa3 * coupling) / (4 * coupling)
    w = reference_fc.omega0
    expected = (math.pi / 2 + math.atan(b / (a * w))) / w

    root = optimize.brentq(lambda tau: correlation(PairKind.XX, reference_fc, tau), 0.0, math.pi / w, xtol=1e-12)

    assert root == pytest.approx(expected, rel=1e-9)
    assert root == pytest.approx(13.19, abs=0.01)


@pytest.mark.parametrize("pair", list(PairKind))
def test_hyperbolic_regime_matches_oracle(decaying_fc, pair):
    for tau in (0.0, 2.0, 15.0, -30.0, 80.0):
        closed = correlation(pair, decaying_fc, tau)
        assert correlation_oracle(pair, decaying_fc, tau) == pytest.approx(closed, rel=1e-6, abs=1e-9)


def test_degenerate_regime_matches_oracle():
    fc = fluct_constants(MacroParams(gamma_A=0.375, gamma_B=0.125, alpha_AA=1.0, alpha_AB=2.0, beta_AB=0.5))

    for tau in (0.0, 3.0, -12.0, 40.0):
        closed = correlation(PairKind.XY, fc, tau)
        assert correlation_oracle(PairKind.XY, fc, tau) == pytest.approx(closed, rel=1e-6, abs=1e-9)


def test_wiener_khinchin_closure_on_random_parameters():
    draws = np.random.default_rng(42)
    for _ in range(20):
        chi, epsilon, eta, xi = draws.uniform(0.2, 0.8, size=4)
        fc = fluct_constants(canonical_to_macro(CanonicalParams(chi=chi, epsilon=epsilon, eta=eta, xi=xi, tau0=10.0)))
        for pair in PairKind:
            expected = stationary(pair, fc)
            assert correlation_oracle(pair, fc, 0.0) == pytest.approx(expected, rel=1e-6)


def test_decay_envelope_bounds_correlation(reference_fc, decaying_fc):
    taus = np.linspace(-200.0, 200.0, 401)

    for fc in (reference_fc, decaying_fc):
        for pair in PairKind:
            assert np.all(np.abs(correlation(pair, fc, taus)) <= envelope(pair, fc, taus) + 1e-12)


def test_correlation_curve_columns(reference_fc):
    curve = correlation_curve(PairKind.XY, reference_fc, [0.0, 1.0, 2.0])

    assert curve.names == ("lag_min", "C_xy")
    assert curve.y[0] == pytest.approx(-0.6)


def _random_constants(draws: np.random.Generator, decaying: bool):
    chi, epsilon, eta, xi = draws.uniform(0.2, 0.8, size=4)
    canonical = CanonicalParams(chi=chi, epsilon=epsilon, eta=eta, xi=xi, tau0=draws.uniform(2.0, 50.0))
    boundary = decaying_boundary(canonical)
    if decaying:
        canonical = canonical.model_copy(update={"xi": 0.5 * min(boundary, 0.99)})
    elif xi <= boundary:
        canonical = canonical.model_copy(update={"xi": min(2 * boundary, 0.99)})
    return fluct_constants(canonical_to_macro(canonical))


@pytest.mark.slow
def test_closed_form_matches_oracle_across_regimes():
    """
    20 random sets, half of them below the decaying boundary, each on a 100-point lag grid
    """
    draws = np.random.default_rng(2027)
    for k in range(20):
        fc = _random_constants(draws, decaying=k % 2 == 1)
        taus = np.linspace(-8 * fc.tau0, 8 * fc.tau0, 100)
        for pair in PairKind:
            closed = correlation(pair, fc, taus)
            oracle = np.array([correlation_oracle(pair, fc, tau) for tau in taus])
            np.testing.assert_allclose(oracle, closed, rtol=1e-6, atol=1e-9)
