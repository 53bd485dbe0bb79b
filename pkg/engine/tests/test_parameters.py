import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from ppm_shared.exceptions.ppm_error import PpmError, PpmErrorCode
from ppm_shared.schemas.protocol import CanonicalParams, MacroParams, MicroParams, Regime, Stability
from pydantic import ValidationError

from ppm_engine.fluctuations import stationary_covariances
from ppm_engine.parameters import (
    canonical_to_macro,
    decaying_boundary,
    fixed_points,
    fluct_constants,
    macro_to_canonical,
    magnification,
    magnification_consistency,
    micro_to_macro,
    oscillation_condition,
)

unit = st.floats(min_value=0.05, max_value=0.95)
canonical_params = st.builds(
    CanonicalParams,
    chi=unit,
    epsilon=unit,
    eta=unit,
    xi=unit,
    tau0=st.floats(min_value=0.5, max_value=500.0),
)


def test_micro_to_macro_rejects_vanishing_predation():
    """
    nu = lambda = 1/2 with unit probabilities gives beta_AB = 0
    """
    micro = MicroParams(p=1, q=1, a=1, b=1, c=1, nu=0.5, lambda_=0.5, N=1000)

    with pytest.raises(PpmError) as error:
        micro_to_macro(micro)

    assert error.value.error_code == PpmErrorCode.UNSTABLE_REGIME
    assert error.value.exit_code == 2


def test_micro_to_macro_matches_hand_transcription():
    nu, lam, a, b, c, p, q = 0.6, 0.25, 1.0, 2.0, 1.5, 0.5, 0.3
    micro = MicroParams(p=p, q=q, a=a, b=b, c=c, nu=nu, **{"lambda": lam}, N=500)

    macro = micro_to_macro(micro)

    assert macro.gamma_A == pytest.approx(1.6)
    assert macro.gamma_B == pytest.approx(0.12)
    assert macro.alpha_AA == pytest.approx(1.8)
    assert macro.alpha_AB == pytest.approx(2 * nu * (lam * a + (1 - lam) * b + c))
    assert macro.beta_AB == pytest.approx(2 * nu * ((1 - lam) * b - lam * a))


def test_micro_to_macro_annihilation_vanishes_without_lambda():
    micro = MicroParams(p=0.1, q=0.3, a=1.0, b=2.0, c=1.0, nu=0.5, lambda_=1e-12, N=100)

    macro = micro_to_macro(micro)

    assert macro.beta_AB == pytest.approx(2 * 0.5 * 2.0)
    assert abs(macro.annihilation_coefficient) < 1e-10


def test_canonical_to_macro_reference_set(reference_canonical):
    macro = canonical_to_macro(reference_canonical)

    assert macro.as_tuple() == pytest.approx((0.7, 0.06, 1.0, 2.5, 0.3))


def test_market_set_coexistence_point():
    fp = fixed_points(canonical_to_macro(CanonicalParams.market()))

    assert fp.R_A_star == pytest.approx(0.2)
    assert fp.R_B_star == pytest.approx(0.8 * 0.4 * 0.643)
    assert round(fp.R_B_star, 3) == 0.206


def test_macro_to_canonical_inverts_mapping(reference_canonical):
    back = macro_to_canonical(canonical_to_macro(reference_canonical))

    for name, value in reference_canonical.model_dump().items():
        assert getattr(back, name) == pytest.approx(value)


def test_macro_to_canonical_outside_box():
    # annihilation a rounding error below zero puts xi just above 1
    macro = MacroParams(gamma_A=0.7, gamma_B=0.06, alpha_AA=1.0, alpha_AB=1.5 - 1e-13, beta_AB=0.5)

    with pytest.raises(PpmError) as error:
        macro_to_canonical(macro)

    assert error.value.error_code == PpmErrorCode.INVALID_PARAMETERS


def test_macro_constraints_are_validated():
    with pytest.raises(ValidationError):
        MacroParams(gamma_A=1.2, gamma_B=0.06, alpha_AA=1.0, alpha_AB=2.5, beta_AB=0.3)


def test_fixed_points_reference(reference_macro):
    fp = fixed_points(reference_macro)

    assert fp.R_A_star == pytest.approx(0.2)
    assert fp.R_B_star == pytest.approx(0.2)
    assert fp.M_over_N == pytest.approx(0.7)
    assert fp.coexistence.stability == Stability.STABLE
    assert fp.trivial.stability == Stability.SADDLE
    assert fp.extinction.stability == Stability.SADDLE


def test_fixed_points_invariant_under_rate_scaling(reference_macro):
    base = fixed_points(reference_macro)

    for k in (0.01, 3.0, 250.0):
        scaled = fixed_points(reference_macro.scaled(k))
        assert scaled.R_A_star == pytest.approx(base.R_A_star)
        assert scaled.R_B_star == pytest.approx(base.R_B_star)
        assert scaled.M_over_N == pytest.approx(base.M_over_N)


def test_fluct_constants_reference(reference_fc):
    fc = reference_fc

    assert fc.mu_xx == pytest.approx(0.2)
    assert fc.mu_xy == pytest.approx(0.5)
    assert fc.mu_yx == pytest.approx(0.06)
    assert fc.sigma_x**2 == pytest.approx(0.24)
    assert fc.sigma_y**2 == pytest.approx(0.072)
    assert fc.rho == pytest.approx(0.0913, abs=1e-4)
    assert fc.regime == Regime.OSCILLATORY
    assert fc.omega0 == pytest.approx(math.sqrt(0.02))
    assert fc.period == pytest.approx(44.43, abs=0.01)
    assert fc.tau0 == pytest.approx(10.0)
    assert fc.t0 == pytest.approx(10.0)


def test_fluct_constants_decaying_regime(decaying_fc):
    assert decaying_fc.regime == Regime.DECAYING
    assert decaying_fc.omega0 is None
    assert decaying_fc.T0 > decaying_fc.tau0
    assert decaying_fc.t0 == pytest.approx(1 / (1 / decaying_fc.tau0 - 1 / decaying_fc.T0))


def test_fluct_constants_degenerate_boundary():
    """
    Binary-exact rates with mu_xy mu_yx == mu_xx^2 / 4
    """
    macro = MacroParams(gamma_A=0.375, gamma_B=0.125, alpha_AA=1.0, alpha_AB=2.0, beta_AB=0.5)

    fc = fluct_constants(macro)

    assert fc.regime == Regime.DECAYING
    assert fc.degenerate
    assert math.isinf(fc.T0)
    assert fc.t0 == fc.tau0


def test_magnification_reference(reference_canonical):
    mag = magnification(reference_canonical)

    assert mag.omega_xx == pytest.approx(52.5)
    assert mag.omega_yy == pytest.approx(11.7)
    assert mag.omega_xy == pytest.approx(-15.0)
    assert mag.omega_zz == pytest.approx(94.2)


def test_magnification_independent_of_tau0(reference_canonical):
    slow = reference_canonical.model_copy(update={"tau0": 1000.0})

    assert magnification(slow) == magnification(reference_canonical)


def test_magnification_grows_as_xi_vanishes(reference_canonical):
    values = [
        magnification(reference_canonical.model_copy(update={"xi": xi})).omega_xx
        for xi in np.geomspace(0.5, 1e-4, 12)
    ]

    assert all(np.diff(values) > 0)


@pytest.mark.parametrize(
    "canonical",
    [CanonicalParams.reference(), CanonicalParams(chi=0.5, epsilon=0.5, eta=0.5, xi=0.5, tau0=10.0)],
)
def test_magnification_consistency_examples(canonical):
    assert magnification_consistency(canonical).max() <= 1e-9


def test_decaying_boundary_reference(reference_canonical):
    assert decaying_boundary(reference_canonical) == pytest.approx(1 / 15)


@settings(max_examples=200, deadline=None)
@given(canonical_params)
def test_canonical_always_yields_valid_macro(canonical):
    macro = canonical_to_macro(canonical)
    fp = fixed_points(macro)

    assert fp.R_A_star == pytest.approx(canonical.chi)
    assert fp.R_A_star + fp.R_B_star < 1
    assert fp.coexistence.stability == Stability.STABLE


@settings(max_examples=200, deadline=None)
@given(canonical_params)
def test_noise_correlation_below_one_half(canonical):
    assert fluct_constants(canonical_to_macro(canonical)).rho < 0.5


@settings(max_examples=100, deadline=None)
@given(canonical_params)
def test_magnification_consistency_property(canonical):
    assert magnification_consistency(canonical).max() <= 1e-9


@settings(max_examples=200, deadline=None)
@given(canonical_params)
def test_oscillation_condition_matches_regime(canonical):
    macro = canonical_to_macro(canonical)
    fc = fluct_constants(macro)
    assume(abs(fc.omega_sq) > 1e-9 * fc.mu_xx**2)

    assert oscillation_condition(macro) == (fc.regime == Regime.OSCILLATORY)
    assert (canonical.xi > decaying_boundary(canonical)) == (fc.regime == Regime.OSCILLATORY)


@settings(max_examples=200, deadline=None)
@given(canonical_params)
def test_stationary_covariance_positive_definite(canonical):
    assert stationary_covariances(fluct_constants(canonical_to_macro(canonical))).is_positive_definite


def test_ten_thousand_random_canonical_sets():
    draws = np.random.default_rng(10_000).uniform(0.02, 0.98, size=(10_000, 4))
    tau0s = np.random.default_rng(10_001).uniform(1.0, 100.0, size=10_000)

    for (chi, epsilon, eta, xi), tau0 in zip(draws, tau0s):
        macro = canonical_to_macro(CanonicalParams(chi=chi, epsilon=epsilon, eta=eta, xi=xi, tau0=tau0))
        fc = fluct_constants(macro)
        assert fc.rho < 0.5
        assert fixed_points(macro).coexistence.stability == Stability.STABLE
