"""Parameterisations of the agent model, the mappings between them and the derived constants.

Three surfaces describe the same model:

* ``MicroParams``: per-agent interaction probabilities (p, q, a, b, c, nu, lambda, N);
* ``MacroParams``: the five rate constants of the master equation, stored N-free;
* ``CanonicalParams``: (chi, epsilon, eta, xi, tau0), which satisfies every constraint by construction.

Everything downstream consumes ``MacroParams``.
"""

import math
from typing import NamedTuple

import numpy as np
from loguru import logger
from ppm_shared.exceptions.ppm_error import PpmError, PpmErrorCode
from ppm_shared.schemas.protocol import (
    CanonicalParams,
    FixedPoint,
    FixedPoints,
    FluctConstants,
    MacroParams,
    Magnification,
    MicroParams,
    Regime,
    Stability,
)
from pydantic import ValidationError

EIGEN_TOLERANCE = 1e-10


class MagnificationResiduals(NamedTuple):
    xx: float
    yy: float
    xy: float

    def max(self) -> float:
        return max(self.xx, self.yy, self.xy)


def micro_to_macro(m: MicroParams) -> MacroParams:
    """Rate constants of the master equation, multiplied by N so they are N-free."""
    lam = m.lambda_
    gamma_A = 2 * m.nu * m.c - (1 - m.nu) * m.p
    gamma_B = (1 - m.nu) * m.q
    alpha_AA = 2 * m.nu * m.c
    alpha_AB = 2 * m.nu * (lam * m.a + (1 - lam) * m.b + m.c)
    beta_AB = 2 * m.nu * ((1 - lam) * m.b - lam * m.a)
    try:
        return MacroParams(
            gamma_A=gamma_A,
            gamma_B=gamma_B,
            alpha_AA=alpha_AA,
            alpha_AB=alpha_AB,
            beta_AB=beta_AB,
        )
    except ValidationError as error:
        logger.warning(f"micro parameters {m} lead to a degenerate regime: {error}")
        raise PpmError(
            f"micro parameters do not define a stable coexistence regime: {error}",
            error_code=PpmErrorCode.UNSTABLE_REGIME,
        ) from error


def canonical_to_macro(c: CanonicalParams) -> MacroParams:
    unit = 2 / c.tau0
    shape = (1 - c.eta) / c.eta
    return MacroParams(
        gamma_A=(1 + (1 - c.chi) / c.chi * c.epsilon) * unit,
        gamma_B=c.xi * shape * unit,
        alpha_AA=unit / c.chi,
        alpha_AB=unit / (c.eta * c.chi),
        beta_AB=c.xi / c.chi * shape * unit,
    )


def macro_to_canonical(p: MacroParams) -> CanonicalParams:
    """Inverse of canonical_to_macro."""
    chi = p.gamma_B / p.beta_AB
    tau0 = 2 / (p.alpha_AA * chi)
    eta = 2 / (p.alpha_AB * chi * tau0)
    xi = p.gamma_B * tau0 * eta / (2 * (1 - eta)) if eta < 1 else math.nan
    epsilon = (p.gamma_A * tau0 / 2 - 1) * chi / (1 - chi)
    try:
        return CanonicalParams(chi=chi, epsilon=epsilon, eta=eta, xi=xi, tau0=tau0)
    except ValidationError as error:
        raise PpmError(
            f"macro parameters have no canonical counterpart: {error}",
            error_code=PpmErrorCode.INVALID_PARAMETERS,
        ) from error


def to_macro(params: CanonicalParams | MacroParams) -> MacroParams:
    if isinstance(params, CanonicalParams):
        return canonical_to_macro(params)
    return params


def jacobian(p: MacroParams, R_A: float, R_B: float) -> np.ndarray:
    return np.array(
        [
            [p.gamma_A - 2 * p.alpha_AA * R_A - p.alpha_AB * R_B, -p.alpha_AB * R_A],
            [p.beta_AB * R_B, p.beta_AB * R_A - p.gamma_B],
        ]
    )


def classify(eigenvalues: np.ndarray, tol: float = EIGEN_TOLERANCE) -> Stability:
    real = np.real(eigenvalues)
    if np.any(np.abs(real) <= tol):
        return Stability.MARGINAL
    if np.all(real < 0):
        return Stability.STABLE
    if np.all(real > 0):
        return Stability.UNSTABLE
    return Stability.SADDLE


def _fixed_point(p: MacroParams, R_A: float, R_B: float) -> FixedPoint:
    stability = classify(np.linalg.eigvals(jacobian(p, R_A, R_B)))
    return FixedPoint(R_A=R_A, R_B=R_B, stability=stability)


def fixed_points(p: MacroParams) -> FixedPoints:
    M_over_N = p.gamma_A / p.alpha_AA
    R_A_star = p.gamma_B / p.beta_AB
    R_B_star = (p.gamma_A * p.beta_AB - p.gamma_B * p.alpha_AA) / (p.alpha_AB * p.beta_AB)
    return FixedPoints(
        trivial=_fixed_point(p, 0.0, 0.0),
        extinction=_fixed_point(p, M_over_N, 0.0),
        coexistence=_fixed_point(p, R_A_star, R_B_star),
        M_over_N=M_over_N,
    )


def oscillation_condition(p: MacroParams) -> bool:
    """Macro-rate form of the criterion for transient oscillations around coexistence."""
    return p.alpha_AA / p.beta_AB < 2 * math.sqrt(1 + p.gamma_A / p.gamma_B) - 2


def fluct_constants(p: MacroParams) -> FluctConstants:
    fp = fixed_points(p)
    R_A, R_B = fp.R_A_star, fp.R_B_star

    mu_xx = p.alpha_AA * R_A
    mu_xy = p.alpha_AB * R_A
    mu_yx = p.beta_AB * R_B
    sigma_x = math.sqrt(2 * p.alpha_AA * R_A * (1 - R_A - R_B))
    sigma_y = math.sqrt(R_A * R_B * (p.beta_AB + p.alpha_AB - p.alpha_AA))
    rho = p.beta_AB * R_A * R_B / (sigma_x * sigma_y)
    tau0 = 2 / mu_xx

    radicand = mu_xy * mu_yx - mu_xx**2 / 4
    omega0 = T0 = None
    degenerate = False
    if radicand > 0:
        regime = Regime.OSCILLATORY
        omega0 = math.sqrt(radicand)
        t0 = tau0
    elif radicand == 0:
        regime = Regime.DECAYING
        T0 = math.inf
        degenerate = True
        t0 = tau0
        logger.warning("omega0 vanishes exactly; reporting T0 = inf on the decaying side")
    else:
        regime = Regime.DECAYING
        T0 = 1 / math.sqrt(-radicand)
        t0 = 1 / (1 / tau0 - 1 / T0)

    return FluctConstants(
        mu_xx=mu_xx,
        mu_xy=mu_xy,
        mu_yx=mu_yx,
        sigma_x=sigma_x,
        sigma_y=sigma_y,
        rho=rho,
        omega0=omega0,
        T0=T0,
        tau0=tau0,
        t0=t0,
        regime=regime,
        degenerate=degenerate,
        R_A_star=R_A,
        R_B_star=R_B,
    )


def decaying_boundary(c: CanonicalParams) -> float:
    """Value of xi below which the transient stops oscillating."""
    return c.chi * c.eta / (4 * (1 - c.chi) * (1 - c.eta) * c.epsilon)


def magnification(c: CanonicalParams) -> Magnification:
    chi, eps, eta, xi = c.chi, c.epsilon, c.eta, c.xi
    noise = 0.5 * (1 + xi) / xi

    omega_xx = (1 - eta * eps) * (1 - chi) / chi**2 + noise / (chi * eta)
    omega_yy = ((((1 - chi) / chi) * (1 - eta * eps) - 1) * eta * xi + (1 + xi) / 2) * (1 - eta) / (
        (1 - chi) * eta**2 * eps
    ) + noise * chi / ((1 - chi) ** 2 * eta * eps**2)
    omega_xy = -noise / ((1 - chi) * eta * eps)

    return Magnification(
        omega_xx=omega_xx,
        omega_yy=omega_yy,
        omega_xy=omega_xy,
        omega_zz=omega_xx + omega_yy - 2 * omega_xy,
    )


def magnification_consistency(c: CanonicalParams) -> MagnificationResiduals:
    """Relative gaps between the closed-form magnifying factors and covariances over squared densities."""
    from ppm_engine.fluctuations import stationary_covariances

    fc = fluct_constants(canonical_to_macro(c))
    cov = stationary_covariances(fc)
    mag = magnification(c)
    R_A, R_B = fc.R_A_star, fc.R_B_star

    def rel(closed: float, derived: float) -> float:
        return abs(closed - derived) / abs(closed)

    return MagnificationResiduals(
        xx=rel(mag.omega_xx, cov.C_xx0 / R_A**2),
        yy=rel(mag.omega_yy, cov.C_yy0 / R_B**2),
        xy=rel(mag.omega_xy, cov.C_xy0 / (R_A * R_B)),
    )
