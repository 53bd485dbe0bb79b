"""First-order (mean-field) dynamics of the densities R_A(t), R_B(t)."""

from typing import Optional, Tuple

import numpy as np
from loguru import logger
from ppm_shared.exceptions.ppm_error import PpmError, PpmErrorCode
from ppm_shared.schemas.protocol import MacroParams
from scipy.integrate import solve_ivp

from ppm_engine.config import settings
from ppm_engine.models import DensityPath
from ppm_engine.parameters import fixed_points, jacobian

SIMPLEX_TOLERANCE = 1e-9


def rhs(R_A: float, R_B: float, p: MacroParams) -> Tuple[float, float]:
    dR_A = (p.gamma_A - p.alpha_AA * R_A - p.alpha_AB * R_B) * R_A
    dR_B = (p.beta_AB * R_A - p.gamma_B) * R_B
    return dR_A, dR_B


def _in_simplex(R_A, R_B, tol: float = 0.0) -> bool:
    return bool(np.all(R_A >= -tol) and np.all(R_B >= -tol) and np.all(R_A + R_B <= 1 + tol))


def integrate(
    init: Tuple[float, float],
    p: MacroParams,
    horizon: float,
    grid_step: float = 1.0,
    method: str = "DOP853",
    rtol: Optional[float] = None,
    atol: Optional[float] = None,
) -> DensityPath:
    """Adaptive Runge-Kutta integration, reported on a uniform grid through the dense output."""
    R_A0, R_B0 = init
    if not _in_simplex(R_A0, R_B0):
        raise PpmError(f"initial densities {init} outside the simplex", error_code=PpmErrorCode.INVALID_INPUT)
    if horizon <= 0 or grid_step <= 0:
        raise PpmError("horizon and grid step must be positive", error_code=PpmErrorCode.INVALID_INPUT)

    times = np.arange(0.0, horizon, grid_step)
    times = np.append(times, horizon) if times[-1] < horizon else times

    solution = solve_ivp(
        lambda t, y: rhs(y[0], y[1], p),
        (0.0, horizon),
        [R_A0, R_B0],
        method=method,
        t_eval=times,
        rtol=rtol or settings.ODE_RTOL,
        atol=atol or settings.ODE_ATOL,
    )
    if not solution.success:
        logger.error(f"mean-field integration stopped at t={solution.t[-1] if len(solution.t) else 0}")
        raise PpmError(
            f"step control failed: {solution.message}",
            error_code=PpmErrorCode.STEP_CONTROL_FAILURE,
        )

    R_A, R_B = solution.y
    if not _in_simplex(R_A, R_B, SIMPLEX_TOLERANCE):
        raise PpmError(
            "integrated densities left the simplex; tighten the tolerances",
            error_code=PpmErrorCode.STEP_CONTROL_FAILURE,
        )
    logger.debug(f"mean-field path from {init} over {horizon} min: {solution.nfev} rhs evaluations")
    return DensityPath(times=solution.t, R_A=R_A, R_B=R_B)


def linearization(p: MacroParams) -> np.ndarray:
    """Eigenvalues of the Jacobian at the coexistence point, ordered by imaginary then real part."""
    fp = fixed_points(p)
    eigenvalues = np.linalg.eigvals(jacobian(p, fp.R_A_star, fp.R_B_star)).astype(complex)
    return np.sort_complex(eigenvalues)


def dominant_frequency(path: DensityPath, p: MacroParams, relative_floor: float = 1e-6) -> float:
    """Angular frequency of R_A(t) - R_A° from the mean spacing of its zero crossings.

    Samples after the deviation has decayed below ``relative_floor`` times its largest value
    are ignored; past that point the integrator's own error decides the sign.
    """
    deviation = path.R_A - fixed_points(p).R_A_star
    live = np.abs(deviation) > relative_floor * np.abs(deviation).max()
    last = np.flatnonzero(live)[-1] + 1 if live.any() else 0
    t, x = path.times[:last], deviation[:last]

    change = np.flatnonzero(np.signbit(x[:-1]) != np.signbit(x[1:]))
    if len(change) < 2:
        raise PpmError(
            f"transient has {len(change)} zero crossing(s); no oscillation to measure",
            error_code=PpmErrorCode.INSUFFICIENT_DATA,
        )
    crossings = t[change] - x[change] * (t[change + 1] - t[change]) / (x[change + 1] - x[change])
    return float(np.pi / np.mean(np.diff(crossings)))
