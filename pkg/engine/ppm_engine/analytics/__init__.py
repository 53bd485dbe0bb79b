from .correlation import autocorrelation, leverage_correlation, volatility_autocorrelation
from .recurrence import recurrence_map
from .returns import effective_sample_size, fixed_time_returns, moments, return_histogram, standardize
from .volatility import realized_volatility, slope, volatility_scaling

__all__ = [
    "fixed_time_returns",
    "moments",
    "standardize",
    "return_histogram",
    "effective_sample_size",
    "volatility_scaling",
    "slope",
    "realized_volatility",
    "autocorrelation",
    "volatility_autocorrelation",
    "leverage_correlation",
    "recurrence_map",
]
