from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
from ppm_shared.schemas.protocol import PricingModel


@dataclass(frozen=True)
class DensityPath:
    times: np.ndarray
    R_A: np.ndarray
    R_B: np.ndarray

    def columns(self) -> Tuple[List[str], List[np.ndarray]]:
        return ["time_min", "R_A", "R_B"], [self.times, self.R_A, self.R_B]


@dataclass(frozen=True)
class FluctPath:
    times: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    dt: float

    def columns(self) -> Tuple[List[str], List[np.ndarray]]:
        return ["time_min", "X", "Y"], [self.times, self.X, self.Y]


@dataclass(frozen=True)
class PriceSeries:
    """Excess return R(t) = ln[S(t) exp(-r t)] on an increasing time grid."""

    times: np.ndarray
    R: np.ndarray
    model: PricingModel
    r: float = 0.0

    @property
    def S(self) -> np.ndarray:
        return np.exp(self.R + self.r * self.times)

    @property
    def span(self) -> float:
        return float(self.times[-1] - self.times[0]) if len(self.times) else 0.0

    def columns(self) -> Tuple[List[str], List[np.ndarray]]:
        return ["time_min", "R", "S"], [self.times, self.R, self.S]


@dataclass(frozen=True)
class ReturnSamples:
    tau: float
    samples: np.ndarray
    standardized: bool = False

    def __len__(self) -> int:
        return len(self.samples)


@dataclass(frozen=True)
class RecurrenceMap:
    """Visit count and mean inter-visit time per state visited at least twice."""

    n: np.ndarray
    m: np.ndarray
    visits: np.ndarray
    mean_recurrence: np.ndarray

    def __len__(self) -> int:
        return len(self.n)

    def lookup(self, n: int, m: int) -> Tuple[int, float] | None:
        hit = np.flatnonzero((self.n == n) & (self.m == m))
        if len(hit) == 0:
            return None
        return int(self.visits[hit[0]]), float(self.mean_recurrence[hit[0]])

    def filtered(self, min_mean: float) -> "RecurrenceMap":
        keep = self.mean_recurrence >= min_mean
        return RecurrenceMap(self.n[keep], self.m[keep], self.visits[keep], self.mean_recurrence[keep])

    def columns(self) -> Tuple[List[str], List[np.ndarray]]:
        return ["n", "m", "visits", "mean_recurrence_min"], [self.n, self.m, self.visits, self.mean_recurrence]


@dataclass(frozen=True)
class VolatilitySeries:
    """Realized volatility indexed by the closing day it is computed at."""

    days: np.ndarray
    V: np.ndarray
    window: int
    annualization: float

    def columns(self) -> Tuple[List[str], List[np.ndarray]]:
        return ["day", "V"], [self.days, self.V]


@dataclass(frozen=True)
class Curve:
    """Two-column result such as (tau, std), (lag, acf) or (bin_center, density)."""

    x: np.ndarray
    y: np.ndarray
    names: Tuple[str, str] = field(default=("x", "y"))

    def columns(self) -> Tuple[List[str], List[np.ndarray]]:
        return list(self.names), [self.x, self.y]
