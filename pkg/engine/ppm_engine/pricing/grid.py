from typing import Optional

import numpy as np
from ppm_shared.exceptions.ppm_error import PpmError, PpmErrorCode

from ppm_engine.models import PriceSeries


def uniform_grid(horizon: float, step: float) -> np.ndarray:
    """Points 0, step, 2 step, ... up to and including the last one not past ``horizon``."""
    count = int(np.floor(horizon / step + 1e-9)) + 1
    return step * np.arange(count, dtype=np.float64)


def value_at(ps: PriceSeries, times, end: Optional[float] = None) -> np.ndarray:
    """Right-continuous evaluation of a series that is constant between its sample times.

    The last value holds until ``end`` (default: the last sample time).
    """
    times = np.asarray(times, dtype=np.float64)
    end = ps.times[-1] if end is None else end
    if times.size and (times.min() < ps.times[0] or times.max() > end + 1e-9):
        raise PpmError(
            f"evaluation times outside [{ps.times[0]}, {end}]",
            error_code=PpmErrorCode.TIME_OUT_OF_RANGE,
        )
    index = np.searchsorted(ps.times, times, side="right") - 1
    return ps.R[index]


def resample(ps: PriceSeries, step: float, horizon: float) -> PriceSeries:
    times = uniform_grid(horizon, step)
    return PriceSeries(times=times, R=value_at(ps, times, end=horizon), model=ps.model, r=ps.r)
