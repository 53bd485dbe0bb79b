"""Stationary spectra and auto/cross-correlation functions of the linear-noise fluctuations.

All three spectra share one shape,

    P(w) = (kappa1 + i kappa2 w + kappa3 w^2) / (w^2 mu_xx^2 + (w^2 - mu_xy mu_yx)^2),

and the correlation C(tau) = E[X(t) Y(t + tau)] is its inverse transform
(1/2pi) int P(w) exp(-i w tau) dw, evaluated in closed form below.
"""

import math
from typing import Tuple

import numpy as np
from loguru import logger
from ppm_shared.exceptions.ppm_error import PpmError, PpmErrorCode
from ppm_shared.schemas.protocol import FluctConstants, KappaCoeffs, PairKind, Regime
from scipy import integrate, special

from ppm_engine.config import settings
from ppm_engine.models import Curve


def kappa_coefficients(pair: PairKind, fc: FluctConstants) -> KappaCoeffs:
    mu_xx, mu_xy, mu_yx = fc.mu_xx, fc.mu_xy, fc.mu_yx
    var_x, var_y = fc.sigma_x**2, fc.sigma_y**2
    noise_xy = fc.rho * fc.sigma_x * fc.sigma_y

    match PairKind(pair):
        case PairKind.XX:
            return KappaCoeffs(kappa1=mu_xy**2 * var_y, kappa2=0.0, kappa3=var_x)
        case PairKind.YY:
            return KappaCoeffs(
                kappa1=mu_yx**2 * var_x + mu_xx**2 * var_y - 2 * mu_xx * mu_yx * noise_xy,
                kappa2=0.0,
                kappa3=var_y,
            )
        case PairKind.XY:
            return KappaCoeffs(
                kappa1=-mu_xx * mu_xy * var_y + mu_xy * mu_yx * noise_xy,
                kappa2=mu_yx * var_x + mu_xy * var_y - mu_xx * noise_xy,
                kappa3=-noise_xy,
            )


def _denominator(fc: FluctConstants, omega):
    omega_sq = np.square(omega)
    return omega_sq * fc.mu_xx**2 + (omega_sq - fc.mu_xy * fc.mu_yx) ** 2


def spectral_density(pair: PairKind, fc: FluctConstants, omega):
    k = kappa_coefficients(pair, fc)
    denominator = _denominator(fc, omega)
    assert np.all(denominator > 0), "spectral denominator must be positive on the real axis"
    return (k.kappa1 + 1j * k.kappa2 * np.asarray(omega) + k.kappa3 * np.square(omega)) / denominator


def _amplitudes(k: KappaCoeffs, fc: FluctConstants) -> Tuple[float, float, float]:
    """Weights of the even, |tau|-odd and tau-odd parts of C(tau) e^{|tau|/tau0}."""
    coupling = fc.mu_xy * fc.mu_yx
    even = (k.kappa1 + k.kappa3 * coupling) / (2 * fc.mu_xx * coupling)
    odd_abs = (k.kappa1 - k.kappa3 * coupling) / (4 * coupling)
    odd = k.kappa2 / (2 * fc.mu_xx)
    return even, odd_abs, odd


def _damped_modes(fc: FluctConstants, tau: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """e^{-|tau|/tau0} times (cos, sin(w|tau|)/w, sin(w tau)/w) or their hyperbolic counterparts."""
    lag = np.abs(tau)
    decay = 1 / fc.tau0
    if fc.regime == Regime.OSCILLATORY:
        w = fc.omega0
        envelope = np.exp(-decay * lag)
        return envelope * np.cos(w * lag), envelope * np.sin(w * lag) / w, envelope * np.sin(w * tau) / w

    nu = 0.0 if math.isinf(fc.T0) else 1 / fc.T0
    if nu == 0.0:
        envelope = np.exp(-decay * lag)
        return envelope, envelope * lag, envelope * tau
    # split into exponentials so large lags do not overflow cosh/sinh
    slow = np.exp(-(decay - nu) * lag)
    fast = np.exp(-(decay + nu) * lag)
    sinh_lag = (slow - fast) / (2 * nu)
    return (slow + fast) / 2, sinh_lag, np.sign(tau) * sinh_lag


def correlation(pair: PairKind, fc: FluctConstants, tau):
    """Closed-form C(tau); accepts a scalar or an array of lags."""
    even, odd_abs, odd = _amplitudes(kappa_coefficients(pair, fc), fc)
    lags = np.asarray(tau, dtype=np.float64)
    cos_mode, sin_lag_mode, sin_mode = _damped_modes(fc, lags)
    value = even * cos_mode + odd_abs * sin_lag_mode + odd * sin_mode
    return float(value) if value.ndim == 0 else value


def correlation_curve(pair: PairKind, fc: FluctConstants, taus) -> Curve:
    taus = np.asarray(taus, dtype=np.float64)
    return Curve(x=taus, y=correlation(pair, fc, taus), names=("lag_min", f"C_{PairKind(pair).value}"))


def envelope(pair: PairKind, fc: FluctConstants, tau):
    """Upper bound of |C(tau)| from the magnitudes of the three mode weights."""
    weights = np.abs(_amplitudes(kappa_coefficients(pair, fc), fc))
    cos_mode, sin_lag_mode, _ = _damped_modes(fc, np.asarray(tau, dtype=np.float64))
    lag = np.abs(np.asarray(tau, dtype=np.float64))
    if fc.regime == Regime.OSCILLATORY:
        bound = np.exp(-lag / fc.tau0) * (weights[0] + (weights[1] + weights[2]) / fc.omega0)
    else:
        bound = weights[0] * cos_mode + (weights[1] + weights[2]) * sin_lag_mode
    return float(bound) if np.ndim(bound) == 0 else bound


def _cos_tail(x: float) -> float:
    """int_x^inf cos(u)/u^2 du."""
    si, _ = special.sici(x)
    return math.cos(x) / x - (math.pi / 2 - si)


def _tails(k: KappaCoeffs, tau: float, cutoff: float) -> float:
    """Contribution of |w| > cutoff, where P(w) ~ (kappa3 w^2 + i kappa2 w) / w^4."""
    if tau == 0:
        return k.kappa3 / cutoff / math.pi
    lag = abs(tau)
    x = cutoff * lag
    cos_tail = _cos_tail(x)
    even = k.kappa3 * lag * cos_tail
    odd = k.kappa2 * math.copysign(1.0, tau) * tau**2 * (math.sin(x) / (2 * x * x) + cos_tail / 2)
    return (even + odd) / math.pi


def correlation_oracle(
    pair: PairKind,
    fc: FluctConstants,
    tau: float,
    epsabs: float = 1e-13,
    epsrel: float = 1e-11,
) -> float:
    """Inverse transform of the spectrum by adaptive quadrature, for checking ``correlation``.

    The integral runs over [0, QUAD_CUTOFF_TAU0 / tau0]; the remainder is added analytically.
    """
    k = kappa_coefficients(pair, fc)
    cutoff = settings.QUAD_CUTOFF_TAU0 / fc.tau0
    options = dict(epsabs=epsabs, epsrel=epsrel, limit=2000)

    def even_part(w):
        return (k.kappa1 + k.kappa3 * w * w) / _denominator(fc, w)

    def odd_part(w):
        return k.kappa2 * w / _denominator(fc, w)

    if tau == 0:
        value, error = integrate.quad(even_part, 0.0, cutoff, **options)
    else:
        lag = abs(tau)
        value, error = integrate.quad(even_part, 0.0, cutoff, weight="cos", wvar=lag, **options)
        if k.kappa2 != 0:
            odd_value, odd_error = integrate.quad(odd_part, 0.0, cutoff, weight="sin", wvar=lag, **options)
            value += odd_value * math.copysign(1.0, tau)
            error += odd_error

    result = value / math.pi + _tails(k, tau, cutoff)
    error /= math.pi
    if not math.isfinite(result) or error > max(1e-9, 1e-7 * abs(result)):
        logger.warning(f"quadrature of C_{PairKind(pair).value}({tau}) stopped with error estimate {error}")
        raise PpmError(
            f"quadrature of C_{PairKind(pair).value} at tau={tau} did not converge (error estimate {error:.3g})",
            error_code=PpmErrorCode.QUADRATURE_NOT_CONVERGED,
        )
    return result
