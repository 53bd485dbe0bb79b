import numpy as np
from ppm_shared.exceptions.ppm_error import PpmError, PpmErrorCode

from ppm_engine.models import PriceSeries
from ppm_engine.pricing.grid import value_at


def closing_prices(ps: PriceSeries, day_length: float = 480.0) -> PriceSeries:
    """One sample per trading day, at t = day_length * k for k = 1, 2, ..."""
    days = int(np.floor((ps.times[-1] - ps.times[0]) / day_length + 1e-9))
    if days < 1:
        raise PpmError(
            f"series spans {ps.span} min, less than one {day_length}-min day",
            error_code=PpmErrorCode.INSUFFICIENT_DATA,
        )
    times = ps.times[0] + day_length * np.arange(1, days + 1, dtype=np.float64)
    return PriceSeries(times=times, R=value_at(ps, times), model=ps.model, r=ps.r)
