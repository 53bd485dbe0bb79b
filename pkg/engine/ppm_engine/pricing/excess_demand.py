import numpy as np
from ppm_shared.schemas.protocol import PricingConfig, PricingModel

from ppm_engine.models import PriceSeries, Trajectory
from ppm_engine.pricing.grid import uniform_grid


def excess_demand_at(tr: Trajectory, cfg: PricingConfig, times) -> np.ndarray:
    """R(t) = R0 + (xi/N) int_0^t (n_B - n_A) ds, exact on the piecewise-constant path."""
    tr.require_exact()
    times = np.asarray(times, dtype=np.float64)
    edges = tr.breakpoints()
    n, m = tr.states()
    demand = (m - n).astype(np.float64)

    accumulated = np.concatenate(([0.0], np.cumsum(demand * np.diff(edges))))
    index = np.clip(np.searchsorted(edges, times, side="right") - 1, 0, len(demand) - 1)
    integral = accumulated[index] + demand[index] * (times - edges[index])
    return cfg.R0 + cfg.xi / tr.N * integral


def excess_demand_price(tr: Trajectory, cfg: PricingConfig) -> PriceSeries:
    times = uniform_grid(tr.horizon, cfg.grid_step)
    return PriceSeries(times=times, R=excess_demand_at(tr, cfg, times), model=PricingModel.EXCESS_DEMAND, r=cfg.r)
