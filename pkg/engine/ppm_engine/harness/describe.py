"""Derived constants of a configuration, before any simulation."""

import math
from typing import Any, Dict, List, Optional

from loguru import logger
from ppm_shared.exceptions.ppm_error import PpmError
from ppm_shared.schemas.protocol import (
    CanonicalParams,
    ExperimentConfig,
    FixedPoints,
    MacroParams,
    Magnification,
    Regime,
    StationaryCovariances,
)

from ppm_engine.fluctuations import stationary_covariances
from ppm_engine.parameters import (
    decaying_boundary,
    fixed_points,
    fluct_constants,
    magnification,
    macro_to_canonical,
    oscillation_condition,
    to_macro,
)

Entry = Dict[str, Any]


def _canonical_or_none(p: MacroParams) -> Optional[CanonicalParams]:
    try:
        return macro_to_canonical(p)
    except PpmError:
        logger.info("macro rates lie outside the canonical box; magnification from the covariances")
        return None


def _magnification_from_covariances(cov: StationaryCovariances, fp: FixedPoints) -> Magnification:
    R_A, R_B = fp.R_A_star, fp.R_B_star
    omega_xx = cov.C_xx0 / R_A**2
    omega_yy = cov.C_yy0 / R_B**2
    omega_xy = cov.C_xy0 / (R_A * R_B)
    return Magnification(
        omega_xx=omega_xx, omega_yy=omega_yy, omega_xy=omega_xy, omega_zz=omega_xx + omega_yy - 2 * omega_xy
    )


def _entry(value, definition: str) -> Entry:
    return {"value": value, "definition": definition}


def describe(config: ExperimentConfig) -> Dict[str, Dict[str, Entry]]:
    p = to_macro(config.canonical or config.macro)
    canonical = config.canonical or _canonical_or_none(p)
    fp = fixed_points(p)
    fc = fluct_constants(p)
    cov = stationary_covariances(fc)
    mag = magnification(canonical) if canonical else _magnification_from_covariances(cov, fp)
    N = config.simulation.N

    report: Dict[str, Dict[str, Entry]] = {
        "macro": {
            "gamma_A": _entry(p.gamma_A, "[1 + (1 - chi) epsilon / chi] 2 / tau0"),
            "gamma_B": _entry(p.gamma_B, "xi (1 - eta) / eta 2 / tau0"),
            "alpha_AA": _entry(p.alpha_AA, "2 / (chi tau0)"),
            "alpha_AB": _entry(p.alpha_AB, "2 / (eta chi tau0)"),
            "beta_AB": _entry(p.beta_AB, "xi (1 - eta) / (chi eta) 2 / tau0"),
        },
        "canonical": {
            name: _entry(value, "free parameter")
            for name, value in (canonical.model_dump() if canonical else {}).items()
        },
        "fixed_points": {
            "R_A_star": _entry(fp.R_A_star, "gamma_B / beta_AB"),
            "R_B_star": _entry(fp.R_B_star, "(gamma_A beta_AB - gamma_B alpha_AA) / (alpha_AB beta_AB)"),
            "M_over_N": _entry(fp.M_over_N, "gamma_A / alpha_AA"),
            "coexistence": _entry(fp.coexistence.stability.value, "Jacobian eigenvalues"),
            "extinction": _entry(fp.extinction.stability.value, "Jacobian eigenvalues at (M/N, 0)"),
            "trivial": _entry(fp.trivial.stability.value, "Jacobian eigenvalues at (0, 0)"),
            "n_star": _entry(N * fp.R_A_star, "N R_A_star"),
            "m_star": _entry(N * fp.R_B_star, "N R_B_star"),
        },
        "fluctuations": {
            "mu_xx": _entry(fc.mu_xx, "alpha_AA R_A_star = 2 / tau0"),
            "mu_xy": _entry(fc.mu_xy, "alpha_AB R_A_star"),
            "mu_yx": _entry(fc.mu_yx, "beta_AB R_B_star"),
            "sigma_x": _entry(fc.sigma_x, "sqrt(2 alpha_AA R_A_star (1 - R_A_star - R_B_star))"),
            "sigma_y": _entry(fc.sigma_y, "sqrt(R_A_star R_B_star (beta_AB + alpha_AB - alpha_AA))"),
            "rho": _entry(fc.rho, "beta_AB R_A_star R_B_star / (sigma_x sigma_y)"),
            "regime": _entry(fc.regime.value, "sign of mu_xy mu_yx - 1 / tau0^2"),
            "tau0": _entry(fc.tau0, "2 / (alpha_AA R_A_star)"),
            "t0": _entry(fc.t0, "1 / t0 = 1 / tau0 - Re[1 / T0]"),
        },
        "covariances": {
            "C_xx0": _entry(cov.C_xx0, "(mu_yx sigma_x^2 + mu_xy sigma_y^2) / (2 mu_xx mu_yx)"),
            "C_yy0": _entry(cov.C_yy0, "stationary Var[Y]"),
            "C_xy0": _entry(cov.C_xy0, "-sigma_y^2 / (2 mu_yx)"),
            "std_n": _entry(math.sqrt(N * cov.C_xx0), "sqrt(N C_xx0)"),
            "std_m": _entry(math.sqrt(N * cov.C_yy0), "sqrt(N C_yy0)"),
        },
        "magnification": {
            "omega_xx": _entry(mag.omega_xx, "C_xx0 / R_A_star^2"),
            "omega_yy": _entry(mag.omega_yy, "C_yy0 / R_B_star^2"),
            "omega_xy": _entry(mag.omega_xy, "C_xy0 / (R_A_star R_B_star)"),
            "omega_zz": _entry(mag.omega_zz, "omega_xx + omega_yy - 2 omega_xy"),
        },
        "regime": {
            "oscillation_condition": _entry(
                oscillation_condition(p), "alpha_AA / beta_AB < 2 sqrt(1 + gamma_A / gamma_B) - 2"
            ),
            "decaying_boundary_xi": _entry(
                decaying_boundary(canonical) if canonical else None, "chi eta / (4 (1 - chi)(1 - eta) epsilon)"
            ),
        },
    }
    if fc.regime == Regime.OSCILLATORY:
        report["fluctuations"]["omega0"] = _entry(fc.omega0, "sqrt(mu_xy mu_yx - 1 / tau0^2)")
        report["fluctuations"]["period"] = _entry(fc.period, "2 pi / omega0")
    else:
        report["fluctuations"]["T0"] = _entry(fc.T0, "1 / sqrt(1 / tau0^2 - mu_xy mu_yx)")
        report["fluctuations"]["degenerate"] = _entry(fc.degenerate, "omega0^2 == 0 exactly")
    return report


def render(report: Dict[str, Dict[str, Entry]]) -> str:
    lines: List[str] = []
    for section, entries in report.items():
        lines.append(f"[{section}]")
        width = max((len(name) for name in entries), default=0)
        for name, entry in entries.items():
            value = entry["value"]
            shown = f"{value:.10g}" if isinstance(value, float) else str(value)
            lines.append(f"  {name:<{width}} = {shown:<20} # {entry['definition']}")
    return "\n".join(lines)
