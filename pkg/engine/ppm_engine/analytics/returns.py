"""Fixed-time returns and their one-point statistics."""

import math
from typing import Optional

import numpy as np
from ppm_shared.exceptions.ppm_error import PpmError, PpmErrorCode
from ppm_shared.schemas.protocol import MomentSummary
from scipy import stats

from ppm_engine.models import Curve, PriceSeries, ReturnSamples

# skewness needs three points
MIN_MOMENT_SAMPLES = 3


def grid_spacing(ps: PriceSeries) -> float:
    if len(ps.times) < 2:
        raise PpmError("price series has fewer than two points", error_code=PpmErrorCode.INSUFFICIENT_DATA)
    return float(ps.times[1] - ps.times[0])


def lag_steps(tau: float, grid_step: float) -> int:
    steps = int(round(tau / grid_step))
    if steps < 1 or not math.isclose(steps * grid_step, tau, rel_tol=1e-9):
        raise PpmError(
            f"tau={tau} is not a positive multiple of the grid step {grid_step}",
            error_code=PpmErrorCode.INVALID_INPUT,
        )
    return steps


def fixed_time_returns(
    ps: PriceSeries, tau: float, grid_step: Optional[float] = None, burn_in: float = 100.0
) -> ReturnSamples:
    """Overlapping R(t + tau) - R(t) for every grid origin t >= burn_in."""
    grid_step = grid_step or grid_spacing(ps)
    lag = lag_steps(tau, grid_step)
    stride = int(round(grid_step / grid_spacing(ps)))
    if stride < 1:
        raise PpmError(
            f"grid step {grid_step} is finer than the series spacing {grid_spacing(ps)}",
            error_code=PpmErrorCode.INVALID_INPUT,
        )
    R = ps.R[ps.times >= burn_in][::stride]
    if len(R) <= lag:
        raise PpmError(
            f"{len(R)} grid points after burn-in {burn_in} cannot hold a return over tau={tau}",
            error_code=PpmErrorCode.INSUFFICIENT_DATA,
        )
    return ReturnSamples(tau=float(tau), samples=R[lag:] - R[:-lag])


def moments(rs: ReturnSamples) -> MomentSummary:
    x = np.asarray(rs.samples, dtype=np.float64)
    if len(x) < MIN_MOMENT_SAMPLES:
        raise PpmError(f"{len(x)} samples are too few for moments", error_code=PpmErrorCode.INSUFFICIENT_DATA)
    std = float(np.std(x, ddof=1))
    if std == 0:
        return MomentSummary(count=len(x), mean=float(np.mean(x)), std=0.0)
    return MomentSummary(
        count=len(x),
        mean=float(np.mean(x)),
        std=std,
        skewness=float(stats.skew(x)),
        excess_kurtosis=float(stats.kurtosis(x, fisher=True)),
    )


def standardize(rs: ReturnSamples) -> ReturnSamples:
    std = np.std(rs.samples, ddof=1) if len(rs) > 1 else 0.0
    if std == 0:
        raise PpmError(f"returns over tau={rs.tau} have zero variance", error_code=PpmErrorCode.ZERO_VARIANCE)
    return ReturnSamples(tau=rs.tau, samples=rs.samples / std, standardized=True)


def return_histogram(rs: ReturnSamples, bins: int = 201, span: float = 10.0) -> Curve:
    """Density of the standardized returns on equal-width bins over [-span, span]."""
    z = rs.samples if rs.standardized else standardize(rs).samples
    counts, edges = np.histogram(z, bins=bins, range=(-span, span))
    width = edges[1] - edges[0]
    centers = (edges[:-1] + edges[1:]) / 2
    return Curve(x=centers, y=counts / (len(z) * width), names=("bin_center", "density"))


def effective_sample_size(n_samples: int, tau: float, grid_step: float) -> float:
    """Overlapping returns over tau share tau/grid_step increments; count them once."""
    return n_samples / max(1.0, tau / grid_step)
