"""Exact stochastic simulation of the three-state agent system (Gillespie's direct method)."""

import math
from functools import partial
from typing import List, Optional, Tuple

import numpy as np
from loguru import logger
from ppm_shared.exceptions.ppm_error import PpmError, PpmErrorCode
from ppm_shared.schemas.protocol import AgentState, Channel, MacroParams, OccupationMoments, RateVector
from ppm_shared.utils import log_timing

from ppm_engine.config import settings
from ppm_engine.models import Trajectory
from ppm_engine.parameters import fixed_points


def make_rng(seed: int | np.random.SeedSequence) -> np.random.Generator:
    """Generator of the configured bit generator family, seeded through a SeedSequence."""
    sequence = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    bit_generator = getattr(np.random, settings.RNG_ALGORITHM)
    return np.random.Generator(bit_generator(sequence))


def _coefficients(p: MacroParams, N: int) -> Tuple[float, float, float, float, float]:
    # annihilation may sit a rounding error below zero on the lambda -> 0 edge
    return (
        p.death_A_coefficient,
        p.gamma_B,
        max(p.annihilation_coefficient, 0.0) / (N - 1),
        p.predation_coefficient / (N - 1),
        p.alpha_AA / (N - 1),
    )


def event_rates(s: AgentState, p: MacroParams) -> RateVector:
    k_dA, k_dB, k_ann, k_pred, k_birth = _coefficients(p, s.N)
    nm = s.n * s.m
    return RateVector(
        death_A=k_dA * s.n,
        death_B=k_dB * s.m,
        annihilate=k_ann * nm,
        predate=k_pred * nm,
        birth_A=k_birth * s.n * s.E,
    )


def step(s: AgentState, p: MacroParams, rng: np.random.Generator) -> Tuple[float, AgentState]:
    rates = np.asarray(event_rates(s, p).as_list())
    cumulative = np.cumsum(rates)
    total = cumulative[-1]
    if total <= 0:
        raise PpmError(f"no channel can fire from {s}", error_code=PpmErrorCode.ABSORBING_STATE)

    dt = rng.exponential(1.0 / total)
    index = int(np.searchsorted(cumulative, rng.uniform() * total, side="right"))
    # the product can round up to the total; fall back to the last open channel
    index = min(index, int(np.flatnonzero(rates)[-1]))
    dn, dm = Channel(index).increment
    return dt, AgentState(n=s.n + dn, m=s.m + dm, N=s.N)


class _EventLog:
    """Chunked columnar buffer of (time, channel, n, m)."""

    def __init__(self, chunk: int):
        self.chunk = chunk
        self.blocks: List[Tuple[np.ndarray, ...]] = []
        self._allocate()

    def _allocate(self) -> None:
        self.t = np.empty(self.chunk, dtype=np.float64)
        self.c = np.empty(self.chunk, dtype=np.int8)
        self.n = np.empty(self.chunk, dtype=np.int32)
        self.m = np.empty(self.chunk, dtype=np.int32)
        self.size = 0

    def append(self, t: float, channel: int, n: int, m: int) -> None:
        if self.size == self.chunk:
            self.blocks.append((self.t, self.c, self.n, self.m))
            self._allocate()
        i = self.size
        self.t[i] = t
        self.c[i] = channel
        self.n[i] = n
        self.m[i] = m
        self.size = i + 1

    def arrays(self) -> Tuple[np.ndarray, ...]:
        size = self.size
        blocks = self.blocks + [(self.t[:size], self.c[:size], self.n[:size], self.m[:size])]
        return tuple(np.concatenate([block[k] for block in blocks]) for k in range(4))


@log_timing
def simulate(
    init: AgentState,
    p: MacroParams,
    horizon: float,
    rng: np.random.Generator,
    record_every: int = 1,
) -> Trajectory:
    """Run the direct method from ``init`` until the first event past ``horizon`` or absorption.

    Waiting times and channel selectors are drawn in blocks of ``RANDOM_BLOCK_SIZE``, so a
    trajectory is reproducible for a given seed and block size.
    """
    if horizon <= 0:
        raise PpmError(f"horizon must be positive, got {horizon}", error_code=PpmErrorCode.INVALID_INPUT)
    if record_every < 1:
        raise PpmError("record_every must be at least 1", error_code=PpmErrorCode.INVALID_INPUT)

    N = init.N
    k_dA, k_dB, k_ann, k_pred, k_birth = _coefficients(p, N)
    block = settings.RANDOM_BLOCK_SIZE
    log = _EventLog(settings.EVENT_BUFFER_CHUNK)

    t = 0.0
    n, m = init.n, init.m
    fired = 0
    absorbed = False
    waits = selectors = np.empty(0)
    i = block

    while True:
        d_A = k_dA * n
        c1 = d_A
        c2 = c1 + k_dB * m
        nm = n * m
        c3 = c2 + k_ann * nm
        c4 = c3 + k_pred * nm
        total = c4 + k_birth * n * (N - n - m)
        if total <= 0.0:
            absorbed = True
            break

        if i == block:
            waits = rng.standard_exponential(block)
            selectors = rng.random(block)
            i = 0
        t += waits[i] / total
        if t > horizon:
            break
        u = min(selectors[i] * total, math.nextafter(total, 0.0))
        i += 1

        if u < c1:
            channel = 0
            n -= 1
        elif u < c2:
            channel = 1
            m -= 1
        elif u < c3:
            channel = 2
            n -= 1
            m -= 1
        elif u < c4:
            channel = 3
            n -= 1
            m += 1
        else:
            channel = 4
            n += 1

        fired += 1
        if fired % record_every == 0 or (n == 0 and m == 0):
            log.append(t, channel, n, m)

    times, channels, ns, ms = log.arrays()
    absorbed_at = float(times[-1]) if absorbed and len(times) else (0.0 if absorbed else None)
    if absorbed:
        logger.warning(f"absorbed at (0, 0) at t={absorbed_at} after {fired} events, horizon {horizon}")
    logger.info(f"simulated {fired} events on [0, {horizon}] with N={N}, recorded {len(times)}")

    return Trajectory(
        init=init,
        times=times,
        channels=channels,
        n=ns,
        m=ms,
        horizon=float(horizon),
        absorbed=absorbed,
        absorbed_at=absorbed_at,
        record_every=record_every,
        rng_algorithm=settings.RNG_ALGORITHM,
    )


def coexistence_state(p: MacroParams, N: int) -> AgentState:
    """Coexistence point rounded to counts."""
    fp = fixed_points(p)
    return AgentState(n=round(N * fp.R_A_star), m=round(N * fp.R_B_star), N=N)


def sample_at(tr: Trajectory, times) -> Tuple[np.ndarray, np.ndarray]:
    """Right-continuous lookup: the state after the last event at or before each query time."""
    times = np.asarray(times, dtype=np.float64)
    if times.size and (times.min() < 0 or times.max() > tr.horizon):
        raise PpmError(
            f"query times [{times.min()}, {times.max()}] outside [0, {tr.horizon}]",
            error_code=PpmErrorCode.TIME_OUT_OF_RANGE,
        )
    index = np.searchsorted(tr.times, times, side="right") - 1
    before = index < 0
    safe = np.where(before, 0, index)
    if tr.events == 0:
        return np.full(times.shape, tr.init.n, dtype=np.int64), np.full(times.shape, tr.init.m, dtype=np.int64)
    n = np.where(before, tr.init.n, tr.n[safe]).astype(np.int64)
    m = np.where(before, tr.init.m, tr.m[safe]).astype(np.int64)
    return n, m


def occupation_moments(tr: Trajectory, burn_in: float = 0.0) -> OccupationMoments:
    """Exact time-weighted mean, variance and covariance of n and m over [burn_in, horizon]."""
    if not 0 <= burn_in < tr.horizon:
        raise PpmError(
            f"burn-in {burn_in} outside [0, {tr.horizon})", error_code=PpmErrorCode.TIME_OUT_OF_RANGE
        )
    edges = np.clip(tr.breakpoints(), burn_in, tr.horizon)
    weights = np.diff(edges)
    n, m = tr.states()
    duration = weights.sum()

    mean_n = float(np.dot(weights, n) / duration)
    mean_m = float(np.dot(weights, m) / duration)
    dn = n - mean_n
    dm = m - mean_m
    return OccupationMoments(
        duration=float(duration),
        mean_n=mean_n,
        mean_m=mean_m,
        var_n=float(np.dot(weights, dn * dn) / duration),
        var_m=float(np.dot(weights, dm * dm) / duration),
        cov_nm=float(np.dot(weights, dn * dm) / duration),
    )


def _simulate_member(
    sequence: np.random.SeedSequence,
    init: AgentState,
    p: MacroParams,
    horizon: float,
    record_every: int,
) -> Trajectory:
    return simulate(init, p, horizon, make_rng(sequence), record_every=record_every)


def simulate_ensemble(
    init: AgentState,
    p: MacroParams,
    horizon: float,
    seed: int,
    members: int,
    max_workers: Optional[int] = None,
    record_every: int = 1,
) -> List[Trajectory]:
    """Independent trajectories, one per child of ``SeedSequence(seed)``, in child order."""
    from ppm_engine.tasks.worker import map_seeds

    job = partial(_simulate_member, init=init, p=p, horizon=horizon, record_every=record_every)
    return map_seeds(job, seed, members, max_workers=max_workers)
