from .builder import PricingBuilder, price
from .closing import closing_prices
from .excess_demand import excess_demand_at, excess_demand_price
from .grid import resample, uniform_grid, value_at
from .liquidity import liquidity_events, liquidity_increment, liquidity_price, resolve_zeta

__all__ = [
    "PricingBuilder",
    "price",
    "closing_prices",
    "excess_demand_at",
    "excess_demand_price",
    "liquidity_events",
    "liquidity_increment",
    "liquidity_price",
    "resolve_zeta",
    "resample",
    "uniform_grid",
    "value_at",
]
