"""Value types shared by the simulator, the analytics and the harness."""

import math
from enum import Enum, IntEnum
from pathlib import Path
from typing import Annotated, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

Unit = Annotated[float, Field(gt=0, lt=1)]
PositiveRate = Annotated[float, Field(gt=0)]
NonNegativeRate = Annotated[float, Field(ge=0)]

# relative slack on the channel-nonnegativity constraints, absorbs rounding in exact-zero cases
CHANNEL_TOLERANCE = 1e-12


class Stability(Enum):
    STABLE = "STABLE"
    UNSTABLE = "UNSTABLE"
    SADDLE = "SADDLE"
    MARGINAL = "MARGINAL"


class Regime(Enum):
    OSCILLATORY = "OSCILLATORY"
    DECAYING = "DECAYING"


class Channel(IntEnum):
    DEATH_A = 0
    DEATH_B = 1
    ANNIHILATE = 2
    PREDATE = 3
    BIRTH_A = 4

    @property
    def increment(self) -> Tuple[int, int]:
        return CHANNEL_INCREMENTS[self]


CHANNEL_INCREMENTS = {
    Channel.DEATH_A: (-1, 0),
    Channel.DEATH_B: (0, -1),
    Channel.ANNIHILATE: (-1, -1),
    Channel.PREDATE: (-1, 1),
    Channel.BIRTH_A: (1, 0),
}


class PairKind(str, Enum):
    XX = "xx"
    YY = "yy"
    XY = "xy"


class PricingModel(str, Enum):
    EXCESS_DEMAND = "excess_demand"
    LIQUIDITY = "liquidity"


class ParamsBase(BaseModel):
    model_config = ConfigDict(frozen=True, allow_inf_nan=False, populate_by_name=True)


class MicroParams(ParamsBase):
    """Interaction probabilities per unit of time of the individual agents."""

    p: NonNegativeRate
    q: NonNegativeRate
    a: NonNegativeRate
    b: NonNegativeRate
    c: NonNegativeRate
    nu: Unit
    lambda_: Unit = Field(alias="lambda")
    N: int = Field(ge=2)


class MacroParams(ParamsBase):
    """The five N-free rate constants (1/time) of the master equation."""

    gamma_A: PositiveRate
    gamma_B: PositiveRate
    alpha_AA: PositiveRate
    alpha_AB: PositiveRate
    beta_AB: PositiveRate

    @model_validator(mode="after")
    def check_constraints(self) -> "MacroParams":
        if not self.alpha_AA > self.gamma_A:
            raise ValueError("alpha_AA must exceed gamma_A (A-death channel rate must be positive)")
        if self.annihilation_coefficient < -CHANNEL_TOLERANCE * self.alpha_AB:
            raise ValueError("alpha_AB - beta_AB - alpha_AA must be nonnegative (annihilation channel)")
        if not self.beta_AB + self.alpha_AB - self.alpha_AA > 0:
            raise ValueError("beta_AB + alpha_AB - alpha_AA must be positive (predation channel)")
        if not self.gamma_B / self.beta_AB < self.gamma_A / self.alpha_AA:
            raise ValueError("gamma_B/beta_AB must be below gamma_A/alpha_AA (prey-only point must be unstable)")
        return self

    @property
    def death_A_coefficient(self) -> float:
        return self.alpha_AA - self.gamma_A

    @property
    def annihilation_coefficient(self) -> float:
        return (self.alpha_AB - self.beta_AB - self.alpha_AA) / 2

    @property
    def predation_coefficient(self) -> float:
        return (self.alpha_AB + self.beta_AB - self.alpha_AA) / 2

    def as_tuple(self) -> Tuple[float, float, float, float, float]:
        return (self.gamma_A, self.gamma_B, self.alpha_AA, self.alpha_AB, self.beta_AB)

    def scaled(self, k: float) -> "MacroParams":
        """Same model with every rate multiplied by k (a change of time unit)."""
        return MacroParams(
            gamma_A=k * self.gamma_A,
            gamma_B=k * self.gamma_B,
            alpha_AA=k * self.alpha_AA,
            alpha_AB=k * self.alpha_AB,
            beta_AB=k * self.beta_AB,
        )


class CanonicalParams(ParamsBase):
    """Free parameterisation: four shape parameters in (0,1) and the decay time tau0."""

    chi: Unit
    epsilon: Unit
    eta: Unit
    xi: Unit
    tau0: PositiveRate

    @classmethod
    def reference(cls, tau0: float = 10.0) -> "CanonicalParams":
        """Symmetric set with R_A = R_B = 0.2 and M = 0.7 N."""
        return cls(chi=0.2, epsilon=0.625, eta=0.4, xi=0.2, tau0=tau0)

    @classmethod
    def market(cls, tau0: float = 10.0) -> "CanonicalParams":
        """Growing-market set, R_B slightly above R_A."""
        return cls(chi=0.2, epsilon=0.643, eta=0.4, xi=0.2, tau0=tau0)


class FixedPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    R_A: float
    R_B: float
    stability: Stability


class FixedPoints(BaseModel):
    model_config = ConfigDict(frozen=True)

    trivial: FixedPoint
    extinction: FixedPoint
    coexistence: FixedPoint
    M_over_N: float

    @property
    def R_A_star(self) -> float:
        return self.coexistence.R_A

    @property
    def R_B_star(self) -> float:
        return self.coexistence.R_B


class FluctConstants(BaseModel):
    """Drift and diffusion constants of the linear-noise equations at the coexistence point."""

    model_config = ConfigDict(frozen=True)

    mu_xx: float
    mu_xy: float
    mu_yx: float
    sigma_x: float
    sigma_y: float
    rho: float
    omega0: Optional[float] = None
    T0: Optional[float] = None
    tau0: float
    t0: float
    regime: Regime
    # omega0^2 == 0 exactly: reported on the decaying side with T0 = inf
    degenerate: bool = False
    R_A_star: float
    R_B_star: float

    @model_validator(mode="after")
    def check_one_time_scale(self) -> "FluctConstants":
        if (self.omega0 is None) == (self.T0 is None):
            raise ValueError("exactly one of omega0 and T0 must be set")
        return self

    @property
    def omega_sq(self) -> float:
        """mu_xy mu_yx - tau0^-2; positive in the oscillatory regime."""
        return self.mu_xy * self.mu_yx - 1.0 / self.tau0**2

    @property
    def period(self) -> Optional[float]:
        if self.omega0 is None:
            return None
        return 2 * math.pi / self.omega0


class Magnification(BaseModel):
    model_config = ConfigDict(frozen=True)

    omega_xx: float
    omega_yy: float
    omega_xy: float
    omega_zz: float


class StationaryCovariances(BaseModel):
    model_config = ConfigDict(frozen=True)

    C_xx0: float
    C_yy0: float
    C_xy0: float

    @property
    def determinant(self) -> float:
        return self.C_xx0 * self.C_yy0 - self.C_xy0**2

    @property
    def is_positive_definite(self) -> bool:
        return self.C_xx0 > 0 and self.determinant > 0


class KappaCoeffs(BaseModel):
    """Numerator coefficients kappa1 + i kappa2 w + kappa3 w^2 of a spectral density."""

    model_config = ConfigDict(frozen=True)

    kappa1: float
    kappa2: float
    kappa3: float


class AgentState(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=0)
    m: int = Field(ge=0)
    N: int = Field(ge=2)

    @model_validator(mode="after")
    def check_population(self) -> "AgentState":
        if self.n + self.m > self.N:
            raise ValueError(f"n + m = {self.n + self.m} exceeds N = {self.N}")
        return self

    @property
    def E(self) -> int:
        return self.N - self.n - self.m


class RateVector(BaseModel):
    model_config = ConfigDict(frozen=True)

    death_A: NonNegativeRate
    death_B: NonNegativeRate
    annihilate: NonNegativeRate
    predate: NonNegativeRate
    birth_A: NonNegativeRate

    @property
    def total(self) -> float:
        return self.death_A + self.death_B + self.annihilate + self.predate + self.birth_A

    def as_list(self) -> List[float]:
        return [self.death_A, self.death_B, self.annihilate, self.predate, self.birth_A]


class OccupationMoments(BaseModel):
    """Time-weighted moments of the piecewise-constant counts over an observation window."""

    model_config = ConfigDict(frozen=True)

    duration: float
    mean_n: float
    mean_m: float
    var_n: float = Field(ge=0)
    var_m: float = Field(ge=0)
    cov_nm: float

    @property
    def corr_nm(self) -> Optional[float]:
        if self.var_n == 0 or self.var_m == 0:
            return None
        return self.cov_nm / math.sqrt(self.var_n * self.var_m)


class EnsembleSummary(BaseModel):
    """Ensemble statistics of the counts next to the linear-noise predictions N C(0)."""

    members: int
    N: int
    mean_n: float
    mean_m: float
    var_n: float
    var_m: float
    corr_nm: Optional[float] = None
    predicted_var_n: float
    predicted_var_m: float
    absorbed: int = 0


class PricingConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    xi: PositiveRate
    # liquidity threshold; None means R_B/R_A at the coexistence point
    zeta: Optional[PositiveRate] = None
    r: float = 0.0
    R0: float = 0.0
    theta_at_zero: float = Field(default=1.0, ge=0, le=1)
    grid_step: PositiveRate = 1.0


class MomentSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    count: int
    mean: float
    std: float = Field(ge=0)
    # None when the sample has zero variance
    skewness: Optional[float] = None
    excess_kurtosis: Optional[float] = None


class CalendarConfig(BaseModel):
    day_length: PositiveRate = 480.0
    days_per_year: int = Field(default=250, gt=0)

    @property
    def year_length(self) -> float:
        return self.day_length * self.days_per_year


class SimulationConfig(BaseModel):
    N: int = Field(default=1000, ge=2)
    horizon: PositiveRate = 120_000.0
    seed: int = Field(default=0, ge=0)
    seeds: int = Field(default=1, ge=1)
    # default: rounded coexistence point
    init: Optional[Tuple[int, int]] = None
    # window start of the time-averaged count moments
    moments_burn_in: float = Field(default=200.0, ge=0)
    record_every: int = Field(default=1, ge=1)
    overlay_meanfield: bool = True
    lna: bool = False
    sde_dt: Optional[PositiveRate] = None


class PricingSection(BaseModel):
    models: List[PricingModel] = [PricingModel.EXCESS_DEMAND]
    excess_demand: PricingConfig = PricingConfig(xi=1e-3)
    liquidity: PricingConfig = PricingConfig(xi=0.05)

    def config_for(self, model: PricingModel) -> PricingConfig:
        return self.excess_demand if model == PricingModel.EXCESS_DEMAND else self.liquidity


class AnalyticsConfig(BaseModel):
    enabled: bool = True
    burn_in: float = Field(default=100.0, ge=0)
    grid_step: PositiveRate = 1.0
    return_taus: List[PositiveRate] = [1.0, 10.0, 100.0, 480.0]
    histogram_bins: int = Field(default=201, ge=3)
    histogram_span: PositiveRate = 10.0
    volatility_taus: List[PositiveRate] = [1, 2, 3, 4, 5, 7, 10, 15, 20, 30, 50, 70, 100, 150, 200, 300, 500]
    acf_max_lag: int = Field(default=120, ge=1)
    realized_window: int = Field(default=20, ge=2)
    realized_tau_days: int = Field(default=1, ge=1)
    vol_acf_max_lag: int = Field(default=100, ge=1)
    leverage_max_lag: int = Field(default=60, ge=0)
    recurrence: bool = True
    recurrence_min_mean: float = Field(default=1.0, ge=0)
    recurrence_burn_in: float = Field(default=480.0, ge=0)


class ExperimentConfig(BaseModel):
    name: str = "custom"
    canonical: Optional[CanonicalParams] = None
    macro: Optional[MacroParams] = None
    simulation: SimulationConfig = SimulationConfig()
    pricing: PricingSection = PricingSection()
    analytics: AnalyticsConfig = AnalyticsConfig()
    calendar: CalendarConfig = CalendarConfig()
    output_dir: Optional[Path] = None

    @model_validator(mode="after")
    def check_parameterisation(self) -> "ExperimentConfig":
        if (self.canonical is None) == (self.macro is None):
            raise ValueError("exactly one of 'canonical' and 'macro' must be given")
        return self
