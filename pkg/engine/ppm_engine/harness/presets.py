"""Shipped experiment presets, as raw mappings merged under the config file and the CLI flags.

Horizons default to one simulated year (250 days of 480 min); ``FULL_HORIZON`` is the
30-year span behind ``--full-horizon``.
"""

from typing import Any, Dict

from ppm_shared.exceptions.ppm_error import PpmError, PpmErrorCode

YEAR = 120_000.0
FULL_HORIZON = 30 * YEAR

REFERENCE = {"chi": 0.2, "epsilon": 0.625, "eta": 0.4, "xi": 0.2, "tau0": 10.0}
MARKET = {"chi": 0.2, "epsilon": 0.643, "eta": 0.4, "xi": 0.2, "tau0": 10.0}
# below the decaying boundary xi = chi eta / (4 (1 - chi)(1 - eta) epsilon) = 1/15
DECAYING = {"chi": 0.2, "epsilon": 0.625, "eta": 0.4, "xi": 0.05, "tau0": 10.0}

EXCESS_DEMAND_ONLY = {"models": ["excess_demand"], "excess_demand": {"xi": 1e-3}}
LIQUIDITY_ONLY = {"models": ["liquidity"], "liquidity": {"xi": 0.05}}
BOTH_MODELS = {
    "models": ["excess_demand", "liquidity"],
    "excess_demand": {"xi": 1e-3},
    "liquidity": {"xi": 0.05},
}

PRESETS: Dict[str, Dict[str, Any]] = {
    "reference": {
        "canonical": REFERENCE,
        "simulation": {"horizon": 10_000.0, "lna": True},
        "pricing": {"models": []},
        "analytics": {"enabled": False},
    },
    "decaying": {
        "canonical": DECAYING,
        "simulation": {"horizon": 10_000.0, "lna": True},
        "pricing": {"models": []},
        "analytics": {"enabled": False},
    },
    # populations against the mean-field overlay
    "fig2": {
        "canonical": MARKET,
        "simulation": {"horizon": 10_000.0, "lna": True},
        "pricing": {"models": []},
        "analytics": {"enabled": False},
    },
    # price path under excess demand
    "fig3": {
        "canonical": MARKET,
        "simulation": {"horizon": YEAR},
        "pricing": EXCESS_DEMAND_ONLY,
        "analytics": {"recurrence": False},
    },
    # return distributions
    "fig4": {
        "canonical": MARKET,
        "simulation": {"horizon": YEAR},
        "pricing": EXCESS_DEMAND_ONLY,
        "analytics": {"return_taus": [1.0, 10.0, 100.0, 480.0], "recurrence": False},
    },
    # volatility against horizon
    "fig5": {
        "canonical": MARKET,
        "simulation": {"horizon": YEAR},
        "pricing": EXCESS_DEMAND_ONLY,
        "analytics": {"recurrence": False},
    },
    # realized volatility and its memory
    "fig6": {
        "canonical": MARKET,
        "simulation": {"horizon": 4 * YEAR},
        "pricing": EXCESS_DEMAND_ONLY,
        "analytics": {"recurrence": False},
    },
    # recurrence times in the (n, m) plane
    "fig7": {
        "canonical": MARKET,
        "simulation": {"horizon": YEAR, "overlay_meanfield": False},
        "pricing": {"models": []},
        "analytics": {"recurrence": True},
    },
    # returns against later volatility
    "fig8": {
        "canonical": MARKET,
        "simulation": {"horizon": 4 * YEAR},
        "pricing": EXCESS_DEMAND_ONLY,
        "analytics": {"recurrence": False},
    },
    # liquidity-model returns
    "fig9": {
        "canonical": MARKET,
        "simulation": {"horizon": YEAR},
        "pricing": LIQUIDITY_ONLY,
        "analytics": {"return_taus": [1.0, 10.0, 100.0], "recurrence": False},
    },
    # one-minute return autocorrelation of both models
    "fig10": {
        "canonical": MARKET,
        "simulation": {"horizon": YEAR},
        "pricing": BOTH_MODELS,
        "analytics": {"return_taus": [1.0], "recurrence": False},
    },
}


def get_preset(name: str) -> Dict[str, Any]:
    try:
        preset = PRESETS[name]
    except KeyError:
        raise PpmError(
            f"unknown preset '{name}', expected one of {sorted(PRESETS)}", error_code=PpmErrorCode.UNKNOWN_PRESET
        ) from None
    return {"name": name, **preset}
