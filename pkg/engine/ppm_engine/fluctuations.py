"""Linear-noise (second-order) fluctuations X(t), Y(t) around the coexistence point."""

import math
from typing import Optional, Tuple

import numpy as np
from loguru import logger
from ppm_shared.exceptions.ppm_error import PpmError, PpmErrorCode
from ppm_shared.schemas.protocol import FixedPoints, FluctConstants, StationaryCovariances
from ppm_shared.utils import log_timing

from ppm_engine.config import settings
from ppm_engine.models import FluctPath

# coarsest step accepted by simulate_sde, in units of tau0
MAX_STEP_TAU0 = 1 / 50


def stationary_covariances(fc: FluctConstants) -> StationaryCovariances:
    mu_xx, mu_xy, mu_yx = fc.mu_xx, fc.mu_xy, fc.mu_yx
    var_x, var_y = fc.sigma_x**2, fc.sigma_y**2
    noise_xy = fc.rho * fc.sigma_x * fc.sigma_y

    C_xx0 = (mu_yx * var_x + mu_xy * var_y) / (2 * mu_xx * mu_yx)
    C_yy0 = (mu_yx**2 * var_x + (mu_xx**2 + mu_xy * mu_yx) * var_y - 2 * mu_xx * mu_yx * noise_xy) / (
        2 * mu_xx * mu_xy * mu_yx
    )
    C_xy0 = -var_y / (2 * mu_yx)
    return StationaryCovariances(C_xx0=C_xx0, C_yy0=C_yy0, C_xy0=C_xy0)


@log_timing
def simulate_sde(
    fc: FluctConstants,
    horizon: float,
    rng: np.random.Generator,
    dt: Optional[float] = None,
    burn_in: Optional[float] = None,
    init: Tuple[float, float] = (0.0, 0.0),
) -> FluctPath:
    """Euler-Maruyama path of the constant-coefficient linear SDEs.

    The first ``burn_in`` minutes (default 20 tau0) are simulated from ``init`` and discarded;
    the returned grid starts at 0 and has ``round(horizon / dt) + 1`` points.
    """
    dt = dt if dt is not None else fc.tau0 / settings.SDE_STEPS_PER_TAU0
    burn_in = burn_in if burn_in is not None else settings.SDE_BURN_IN_TAU0 * fc.tau0
    if dt <= 0 or dt > MAX_STEP_TAU0 * fc.tau0 * (1 + 1e-12):
        raise PpmError(
            f"dt={dt} must lie in (0, tau0/50] = (0, {MAX_STEP_TAU0 * fc.tau0}]",
            error_code=PpmErrorCode.RESOLUTION_GUARD,
        )
    if horizon <= 0 or burn_in < 0:
        raise PpmError("horizon must be positive and burn-in nonnegative", error_code=PpmErrorCode.INVALID_INPUT)

    skipped = int(round(burn_in / dt))
    kept = int(round(horizon / dt))
    sqrt_dt = math.sqrt(dt)
    draws = rng.standard_normal((skipped + kept, 2)).tolist()

    a_xx = 1 - fc.mu_xx * dt
    a_xy = -fc.mu_xy * dt
    a_yx = fc.mu_yx * dt
    s_x = fc.sigma_x * sqrt_dt
    s_y1 = -fc.rho * fc.sigma_y * sqrt_dt
    s_y2 = fc.sigma_y * math.sqrt(1 - fc.rho**2) * sqrt_dt

    X = np.empty(kept + 1)
    Y = np.empty(kept + 1)
    x, y = init
    for k, (w1, w2) in enumerate(draws):
        if k >= skipped:
            X[k - skipped] = x
            Y[k - skipped] = y
        x, y = a_xx * x + a_xy * y + s_x * w1, y + a_yx * x + s_y1 * w1 + s_y2 * w2
    X[kept] = x
    Y[kept] = y

    logger.info(f"linear-noise path: {kept} steps of {dt} after {skipped} burn-in steps")
    return FluctPath(times=dt * np.arange(kept + 1), X=X, Y=Y, dt=dt)


def reconstruct_populations(path: FluctPath, fp: FixedPoints, N: int) -> Tuple[np.ndarray, np.ndarray]:
    """Real-valued counts N R° + sqrt(N) (X, Y); rounding is left to the caller."""
    if N < 2:
        raise PpmError(f"N must be at least 2, got {N}", error_code=PpmErrorCode.INVALID_INPUT)
    scale = math.sqrt(N)
    return N * fp.R_A_star + scale * path.X, N * fp.R_B_star + scale * path.Y


def sample_covariances(path: FluctPath, burn_in: float = 0.0) -> StationaryCovariances:
    keep = path.times >= burn_in
    if keep.sum() < 2:
        raise PpmError("fewer than two samples after burn-in", error_code=PpmErrorCode.INSUFFICIENT_DATA)
    cov = np.cov(np.vstack((path.X[keep], path.Y[keep])), bias=True)
    return StationaryCovariances(C_xx0=cov[0, 0], C_yy0=cov[1, 1], C_xy0=cov[0, 1])
