"""Sample autocorrelations and the return/volatility (leverage) cross-correlation."""

import numpy as np
from ppm_shared.exceptions.ppm_error import PpmError, PpmErrorCode

from ppm_engine.models import Curve, PriceSeries, VolatilitySeries

MIN_PAIRS = 3


def autocorrelation(series, max_lag: int) -> Curve:
    x = np.asarray(series, dtype=np.float64)
    if len(x) < 2 * max_lag or len(x) < 2:
        raise PpmError(
            f"{len(x)} samples are too few for lags up to {max_lag}", error_code=PpmErrorCode.INSUFFICIENT_DATA
        )
    x = x - x.mean()
    power = np.dot(x, x)
    if power == 0:
        raise PpmError("autocorrelation of a constant series", error_code=PpmErrorCode.ZERO_VARIANCE)
    acf = np.array([np.dot(x[: len(x) - lag], x[lag:]) for lag in range(max_lag + 1)]) / power
    return Curve(x=np.arange(max_lag + 1), y=acf, names=("lag", "acf"))


def volatility_autocorrelation(vol: VolatilitySeries, max_lag: int) -> Curve:
    return autocorrelation(vol.V, max_lag)


def _pearson(a: np.ndarray, b: np.ndarray) -> float:
    a = a - a.mean()
    b = b - b.mean()
    scale = np.sqrt(np.dot(a, a) * np.dot(b, b))
    return float(np.dot(a, b) / scale) if scale > 0 else float("nan")


def leverage_correlation(closing: PriceSeries, vol: VolatilitySeries, max_lag: int) -> Curve:
    """Correlation of the n-session return ending on day k with the volatility of day k + lag."""
    n = vol.window
    C = np.asarray(closing.R, dtype=np.float64)
    days = len(C)
    session_return = np.full(days + 1, np.nan)
    session_return[n + 1 :] = C[n:] - C[:-n]
    volatility = np.full(days + 1, np.nan)
    volatility[vol.days] = vol.V

    lags = np.arange(-max_lag, max_lag + 1)
    values = []
    for lag in lags:
        k = np.arange(max(0, -lag), min(days + 1, days + 1 - lag))
        a, b = session_return[k], volatility[k + lag]
        both = ~(np.isnan(a) | np.isnan(b))
        if both.sum() < MIN_PAIRS:
            raise PpmError(
                f"{both.sum()} overlapping sessions at lag {lag}", error_code=PpmErrorCode.INSUFFICIENT_DATA
            )
        values.append(_pearson(a[both], b[both]))
    return Curve(x=lags, y=np.asarray(values), names=("lag", "xcorr"))
