from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from ppm_shared.exceptions.ppm_error import PpmError, PpmErrorCode
from ppm_shared.schemas.protocol import AgentState


@dataclass(frozen=True)
class Trajectory:
    """Piecewise-constant path of the counts (n, m), one row per recorded event.

    ``n`` and ``m`` hold the post-event state. The state before the first event is ``init``.
    """

    init: AgentState
    times: np.ndarray
    channels: np.ndarray
    n: np.ndarray
    m: np.ndarray
    horizon: float
    absorbed: bool = False
    absorbed_at: Optional[float] = None
    # every record_every-th event only; consecutive rows no longer differ by one channel increment
    record_every: int = 1
    rng_algorithm: str = "PCG64"

    @property
    def N(self) -> int:
        return self.init.N

    @property
    def thinned(self) -> bool:
        return self.record_every > 1

    @property
    def events(self) -> int:
        return len(self.times)

    def require_exact(self) -> None:
        if self.thinned:
            raise PpmError(
                f"trajectory keeps one event in {self.record_every}; this needs the full event log",
                error_code=PpmErrorCode.THINNED_TRAJECTORY,
            )

    def breakpoints(self) -> np.ndarray:
        """Interval edges [0, t_1, ..., t_k, horizon] of the piecewise-constant path."""
        return np.concatenate(([0.0], self.times, [self.horizon]))

    def states(self) -> Tuple[np.ndarray, np.ndarray]:
        """Counts held on each interval of ``breakpoints()``, initial state first."""
        n = np.concatenate(([self.init.n], self.n)).astype(np.int64)
        m = np.concatenate(([self.init.m], self.m)).astype(np.int64)
        return n, m

    def columns(self) -> Tuple[List[str], List[np.ndarray]]:
        return ["time_min", "channel", "n", "m"], [self.times, self.channels, self.n, self.m]
