from typing import Callable, Optional

from ppm_shared.schemas.protocol import MacroParams, PricingConfig, PricingModel

from ppm_engine.models import PriceSeries, Trajectory
from ppm_engine.pricing.excess_demand import excess_demand_price
from ppm_engine.pricing.liquidity import liquidity_price


class PricingBuilder:
    """Dispatches a pricing request to the rule of the requested model."""

    def __init__(self, p: Optional[MacroParams] = None) -> None:
        self.p = p

    def get_builder(self, model: PricingModel) -> Callable[..., PriceSeries]:
        match PricingModel(model):
            case PricingModel.EXCESS_DEMAND:
                return lambda tr, cfg: excess_demand_price(tr, cfg)
            case PricingModel.LIQUIDITY:
                return lambda tr, cfg: liquidity_price(tr, cfg, self.p)

    def price(self, tr: Trajectory, cfg: PricingConfig, model: PricingModel) -> PriceSeries:
        return self.get_builder(model)(tr, cfg)


def price(
    tr: Trajectory, cfg: PricingConfig, model: PricingModel, p: Optional[MacroParams] = None
) -> PriceSeries:
    return PricingBuilder(p).price(tr, cfg, model)
