"""Volatility versus horizon and realized n-session volatility."""

import math
from typing import Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from ppm_shared.exceptions.ppm_error import PpmError, PpmErrorCode

from ppm_engine.analytics.returns import fixed_time_returns
from ppm_engine.models import Curve, PriceSeries, VolatilitySeries


def volatility_scaling(ps: PriceSeries, taus: Sequence[float], burn_in: float = 100.0) -> Curve:
    stds = []
    for tau in taus:
        rs = fixed_time_returns(ps, tau, burn_in=burn_in)
        if len(rs) < 2:
            raise PpmError(f"one return only at tau={tau}", error_code=PpmErrorCode.INSUFFICIENT_DATA)
        stds.append(np.std(rs.samples, ddof=1))
    return Curve(x=np.asarray(taus, dtype=np.float64), y=np.asarray(stds), names=("tau_min", "std"))


def slope(curve: Curve, lo: float, hi: float) -> float:
    """Least-squares slope of log y against log x on lo <= x <= hi."""
    band = (curve.x >= lo) & (curve.x <= hi) & (curve.y > 0)
    if band.sum() < 2:
        raise PpmError(f"fewer than two points in [{lo}, {hi}]", error_code=PpmErrorCode.INSUFFICIENT_DATA)
    fitted, _ = np.polyfit(np.log(curve.x[band]), np.log(curve.y[band]), 1)
    return float(fitted)


def realized_volatility(
    closing: PriceSeries, tau_days: int = 1, n: int = 20, days_per_year: int = 250
) -> VolatilitySeries:
    """Population std of the last n tau-day returns about their mean, annualized.

    ``closing`` holds day 1, 2, ...; the value on day k needs days k - n - tau + 1 .. k, so the
    first one is on day n + tau.
    """
    C = np.asarray(closing.R, dtype=np.float64)
    returns = C[tau_days:] - C[:-tau_days]
    if len(returns) < n:
        raise PpmError(
            f"{len(C)} closing prices cannot fill a window of {n} returns over {tau_days} day(s)",
            error_code=PpmErrorCode.INSUFFICIENT_DATA,
        )
    annualization = math.sqrt(days_per_year / (n * tau_days))
    V = sliding_window_view(returns, n).std(axis=1) * annualization
    days = np.arange(n + tau_days, len(C) + 1)
    return VolatilitySeries(days=days, V=V, window=n, annualization=annualization)
