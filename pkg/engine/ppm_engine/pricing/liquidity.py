from typing import Optional

import numpy as np
from loguru import logger
from ppm_shared.exceptions.ppm_error import PpmError, PpmErrorCode
from ppm_shared.schemas.protocol import MacroParams, PricingConfig, PricingModel

from ppm_engine.models import PriceSeries, Trajectory
from ppm_engine.parameters import fixed_points
from ppm_engine.pricing.grid import resample


def resolve_zeta(cfg: PricingConfig, p: Optional[MacroParams] = None) -> float:
    """Configured threshold, or R_B°/R_A° of ``p`` when none is set."""
    if cfg.zeta is not None:
        return cfg.zeta
    if p is None:
        raise PpmError(
            "liquidity pricing needs either zeta or the model parameters", error_code=PpmErrorCode.INVALID_INPUT
        )
    fp = fixed_points(p)
    return fp.R_B_star / fp.R_A_star


def liquidity_increment(n, m, dt, xi: float, zeta: float):
    """Ungated increment xi (m/n - zeta) dt."""
    return xi * (np.asarray(m) / np.asarray(n) - zeta) * np.asarray(dt)


def gate(previous: float, theta_at_zero: float) -> float:
    if previous > 0:
        return 1.0
    if previous < 0:
        return 0.0
    return theta_at_zero


def liquidity_events(tr: Trajectory, cfg: PricingConfig, p: Optional[MacroParams] = None) -> PriceSeries:
    """Event-indexed series: one update per event, using the state held since the previous event.

    The increment at an event is gated by the sign of the increment applied at the event before;
    the first one sees a zero previous increment. The stretch after the last event is not priced.
    """
    tr.require_exact()
    zeta = resolve_zeta(cfg, p)
    n, m = tr.states()
    held_n, held_m = n[:-1], m[:-1]
    waits = np.diff(np.concatenate(([0.0], tr.times)))

    empty = np.flatnonzero(held_n == 0)
    if len(empty):
        at = float(tr.times[empty[0]])
        logger.error(f"liquidity pricing reached n = 0 before the event at t={at}")
        raise PpmError(
            f"no A-agents left before the event at t={at}; the run left the liquidity regime",
            error_code=PpmErrorCode.LIQUIDITY_REGIME_LEFT,
        )

    raw = liquidity_increment(held_n, held_m, waits, cfg.xi, zeta).tolist()
    applied = np.empty(len(raw))
    previous = 0.0
    for i, increment in enumerate(raw):
        previous = gate(previous, cfg.theta_at_zero) * increment
        applied[i] = previous

    R = cfg.R0 + np.concatenate(([0.0], np.cumsum(applied)))
    times = np.concatenate(([0.0], tr.times))
    return PriceSeries(times=times, R=R, model=PricingModel.LIQUIDITY, r=cfg.r)


def liquidity_price(tr: Trajectory, cfg: PricingConfig, p: Optional[MacroParams] = None) -> PriceSeries:
    """Liquidity-model excess return on the uniform ``cfg.grid_step`` grid."""
    return resample(liquidity_events(tr, cfg, p), cfg.grid_step, tr.horizon)
