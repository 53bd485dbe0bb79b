"""Experiment pipeline: simulate -> price -> analyze, one directory per ensemble member."""

from contextlib import contextmanager
from functools import partial
from pathlib import Path
from typing import Dict, FrozenSet, List, Optional, Tuple

import numpy as np
from loguru import logger
from ppm_shared.exceptions.ppm_error import PpmError, PpmErrorCode
from ppm_shared.schemas.protocol import (
    AgentState,
    EnsembleSummary,
    ExperimentConfig,
    FluctConstants,
    MacroParams,
    OccupationMoments,
    PricingModel,
)
from ppm_shared.utils import ScopeTimer, log_timing
from pydantic import BaseModel

from ppm_engine import analytics
from ppm_engine.analytics.correlation import MIN_PAIRS
from ppm_engine.config import settings
from ppm_engine.fluctuations import sample_covariances, simulate_sde, stationary_covariances
from ppm_engine.harness.describe import describe
from ppm_engine.harness.io import (
    price_path,
    read_price_series,
    read_trajectory,
    write_json,
    write_record,
    write_trajectory,
)
from ppm_engine.harness.manifest import write_manifest
from ppm_engine.kinetics import coexistence_state, make_rng, occupation_moments, simulate
from ppm_engine.meanfield import integrate
from ppm_engine.models import PriceSeries, Trajectory
from ppm_engine.parameters import fluct_constants, to_macro
from ppm_engine.pricing import closing_prices, price
from ppm_engine.tasks.worker import map_seeds

ALL_STAGES = frozenset({"simulate", "price", "analyze"})


class MemberResult(BaseModel):
    index: int
    directory: Path
    outputs: List[Path] = []
    occupation: Optional[OccupationMoments] = None
    absorbed: bool = False
    events: int = 0


@contextmanager
def stage(name: str):
    """Re-raise any failure as a PpmError naming the stage; PpmError codes are kept."""
    try:
        yield
    except PpmError as error:
        logger.error(f"stage '{name}' failed: {repr(error)}")
        raise PpmError(
            f"stage '{name}' failed: {error.message}", error_code=error.error_code, exit_code=error.exit_code
        ) from error
    except Exception as error:
        logger.exception(f"stage '{name}' failed [UNHANDLED]: {repr(error)}")
        raise PpmError(f"stage '{name}' failed: {repr(error)}", error_code=PpmErrorCode.STAGE_FAILED) from error


def output_dir(config: ExperimentConfig, out: Optional[Path] = None) -> Path:
    return Path(out or config.output_dir or settings.OUTPUT_DIR / config.name)


def initial_state(config: ExperimentConfig, p: MacroParams) -> AgentState:
    sim = config.simulation
    if sim.init is None:
        return coexistence_state(p, sim.N)
    return AgentState(n=sim.init[0], m=sim.init[1], N=sim.N)


def simulate_stage(
    config: ExperimentConfig, p: MacroParams, sequence: np.random.SeedSequence, directory: Path
) -> Tuple[Trajectory, List[Path], Optional[OccupationMoments]]:
    """Exact trajectory plus the optional mean-field overlay and linear-noise path.

    The member's seed sequence is split in two: the first child drives the events, the second
    the linear-noise path.
    """
    sim = config.simulation
    events_sequence, noise_sequence = sequence.spawn(2)
    occupation = None

    with stage("simulate"):
        init = initial_state(config, p)
        tr = simulate(init, p, sim.horizon, make_rng(events_sequence), record_every=sim.record_every)
        outputs = write_trajectory(directory, tr)
        if sim.moments_burn_in < sim.horizon:
            occupation = occupation_moments(tr, sim.moments_burn_in)
            outputs.append(write_json(directory / "occupation.json", occupation.model_dump()))

    if sim.overlay_meanfield:
        with stage("meanfield"):
            path = integrate((init.n / sim.N, init.m / sim.N), p, sim.horizon)
            outputs.append(write_record(directory / "density.tsv", path))

    if sim.lna:
        with stage("fluctuations"):
            fc = fluct_constants(p)
            fluct = simulate_sde(fc, sim.horizon, make_rng(noise_sequence), dt=sim.sde_dt)
            outputs.append(write_record(directory / "fluct.tsv", fluct))
            covariances = {
                "sample": sample_covariances(fluct).model_dump(),
                "stationary": stationary_covariances(fc).model_dump(),
            }
            outputs.append(write_json(directory / "fluct_covariances.json", covariances))

    return tr, outputs, occupation


def price_stage(
    config: ExperimentConfig, p: MacroParams, tr: Trajectory, directory: Path
) -> Tuple[Dict[PricingModel, PriceSeries], List[Path]]:
    prices: Dict[PricingModel, PriceSeries] = {}
    outputs: List[Path] = []
    for model in config.pricing.models:
        with stage(f"price:{model.value}"):
            ps = price(tr, config.pricing.config_for(model), model, p)
            prices[model] = ps
            outputs.append(write_record(price_path(directory, model), ps))
            if ps.span >= config.calendar.day_length:
                closing = closing_prices(ps, config.calendar.day_length)
                outputs.append(write_record(price_path(directory, model, closing=True), closing))
    return prices, outputs


def _band_slope(curve, lo: float, hi: float) -> Optional[float]:
    try:
        return analytics.slope(curve, lo, hi)
    except PpmError:
        return None


def analyze_prices(config: ExperimentConfig, ps: PriceSeries, directory: Path) -> List[Path]:
    a, calendar = config.analytics, config.calendar
    tag = ps.model.value
    outputs: List[Path] = []
    summary = {"model": tag, "returns": {}, "slopes": {}}
    # longest tau leaving at least two return samples after burn-in
    longest = ps.times[-1] - a.burn_in - a.grid_step

    for tau in a.return_taus:
        if tau > longest:
            logger.warning(f"{tag}: tau={tau} exceeds the usable span, skipped")
            continue
        rs = analytics.fixed_time_returns(ps, tau, a.grid_step, a.burn_in)
        summary["returns"][f"{tau:g}"] = {
            **analytics.moments(rs).model_dump(),
            "effective_samples": analytics.effective_sample_size(len(rs), tau, a.grid_step),
        }
        histogram = analytics.return_histogram(rs, a.histogram_bins, a.histogram_span)
        outputs.append(write_record(directory / f"histogram_{tag}_tau{tau:g}.tsv", histogram))

    taus = [tau for tau in a.volatility_taus if tau <= longest]
    if len(taus) >= 2:
        curve = analytics.volatility_scaling(ps, taus, a.burn_in)
        outputs.append(write_record(directory / f"volscaling_{tag}.tsv", curve))
        summary["slopes"] = {"short": _band_slope(curve, 1, 5), "long": _band_slope(curve, 50, 500)}

    one_step = analytics.fixed_time_returns(ps, a.grid_step, a.grid_step, a.burn_in)
    acf = analytics.autocorrelation(one_step.samples, min(a.acf_max_lag, len(one_step) // 2))
    outputs.append(write_record(directory / f"acf_{tag}.tsv", acf))

    days = int((ps.times[-1] - ps.times[0]) // calendar.day_length)
    if days >= a.realized_window + a.realized_tau_days + MIN_PAIRS:
        closing = closing_prices(ps, calendar.day_length)
        vol = analytics.realized_volatility(closing, a.realized_tau_days, a.realized_window, calendar.days_per_year)
        outputs.append(write_record(directory / f"realized_vol_{tag}.tsv", vol))
        vol_lag = min(a.vol_acf_max_lag, len(vol.V) // 2)
        if vol_lag >= 1:
            outputs.append(
                write_record(directory / f"vol_acf_{tag}.tsv", analytics.volatility_autocorrelation(vol, vol_lag))
            )
        leverage_lag = min(a.leverage_max_lag, len(vol.V) - MIN_PAIRS)
        leverage = analytics.leverage_correlation(closing, vol, leverage_lag)
        outputs.append(write_record(directory / f"leverage_{tag}.tsv", leverage))
    else:
        logger.warning(f"{tag}: {days} trading day(s) are too few for realized volatility, skipped")

    outputs.append(write_json(directory / f"analytics_{tag}.json", summary))
    return outputs


def analyze_stage(
    config: ExperimentConfig,
    prices: Dict[PricingModel, PriceSeries],
    tr: Optional[Trajectory],
    directory: Path,
) -> List[Path]:
    a = config.analytics
    if not a.enabled:
        return []
    outputs: List[Path] = []
    for model, ps in prices.items():
        with stage(f"analyze:{model.value}"):
            outputs += analyze_prices(config, ps, directory)
    if a.recurrence and tr is not None:
        with stage("recurrence"):
            recurrence = analytics.recurrence_map(tr, a.recurrence_burn_in, a.recurrence_min_mean)
            outputs.append(write_record(directory / "recurrence.tsv", recurrence))
    return outputs


def run_member(
    sequence: np.random.SeedSequence,
    config: ExperimentConfig,
    p: MacroParams,
    root: Path,
    stages: FrozenSet[str] = ALL_STAGES,
    nested: bool = False,
) -> MemberResult:
    index = sequence.spawn_key[-1] if sequence.spawn_key else 0
    directory = root / f"member_{index:03d}" if nested else root
    directory.mkdir(parents=True, exist_ok=True)

    tr, outputs, occupation = simulate_stage(config, p, sequence, directory)
    prices: Dict[PricingModel, PriceSeries] = {}
    if "price" in stages:
        prices, price_outputs = price_stage(config, p, tr, directory)
        outputs += price_outputs
    if "analyze" in stages:
        outputs += analyze_stage(config, prices, tr, directory)

    return MemberResult(
        index=index,
        directory=directory,
        outputs=outputs,
        occupation=occupation,
        absorbed=tr.absorbed,
        events=tr.events,
    )


def reduce_ensemble(results: List[MemberResult], N: int, fc: FluctConstants) -> EnsembleSummary:
    """Pooled count moments of equally long members against N C_xx0 and N C_yy0."""
    moments = [r.occupation for r in results if r.occupation is not None]
    if not moments:
        raise PpmError("no member has count moments to pool", error_code=PpmErrorCode.INSUFFICIENT_DATA)
    mean_n = np.array([o.mean_n for o in moments])
    mean_m = np.array([o.mean_m for o in moments])

    var_n = np.mean([o.var_n for o in moments]) + np.var(mean_n)
    var_m = np.mean([o.var_m for o in moments]) + np.var(mean_m)
    cov_nm = np.mean([o.cov_nm for o in moments]) + np.mean((mean_n - mean_n.mean()) * (mean_m - mean_m.mean()))
    corr = float(cov_nm / np.sqrt(var_n * var_m)) if var_n > 0 and var_m > 0 else None

    covariances = stationary_covariances(fc)
    return EnsembleSummary(
        members=len(moments),
        N=N,
        mean_n=float(mean_n.mean()),
        mean_m=float(mean_m.mean()),
        var_n=float(var_n),
        var_m=float(var_m),
        corr_nm=corr,
        predicted_var_n=N * covariances.C_xx0,
        predicted_var_m=N * covariances.C_yy0,
        absorbed=sum(r.absorbed for r in results),
    )


@log_timing(level="INFO")
def run(
    config: ExperimentConfig,
    out: Optional[Path] = None,
    max_workers: Optional[int] = None,
    stages: FrozenSet[str] = ALL_STAGES,
    command: str = "run",
) -> Path:
    """Run the configured stages for every member and write the manifest; returns the output directory."""
    directory = output_dir(config, out)
    directory.mkdir(parents=True, exist_ok=True)
    sink = logger.add(
        directory / settings.LOG_FILE_NAME, rotation=settings.LOG_ROTATION, compression="zip", level="DEBUG"
    )
    try:
        with ScopeTimer() as timer:
            with stage("parameters"):
                p = to_macro(config.canonical or config.macro)
                fc = fluct_constants(p)
                outputs = [write_json(directory / "describe.json", describe(config))]

            sim = config.simulation
            if sim.seeds == 1:
                sequence = np.random.SeedSequence(sim.seed)
                results = [run_member(sequence, config, p, directory, stages)]
            else:
                job = partial(run_member, config=config, p=p, root=directory, stages=stages, nested=True)
                results = map_seeds(job, sim.seed, sim.seeds, max_workers=max_workers)
                with stage("ensemble"):
                    summary = reduce_ensemble(results, sim.N, fc)
                    outputs.append(write_json(directory / "ensemble.json", summary.model_dump()))
            for result in results:
                outputs += result.outputs

        write_manifest(
            directory,
            config,
            command,
            outputs,
            timer.elapsed,
            extra={"absorbed": [r.absorbed for r in results], "events": [r.events for r in results]},
        )
        logger.info(f"{command} '{config.name}' wrote {len(outputs)} file(s) to {directory}")
    finally:
        logger.remove(sink)
    return directory


def price_from(config: ExperimentConfig, source: Path, out: Optional[Path] = None) -> Path:
    """Price a trajectory written by an earlier ``simulate``."""
    directory = output_dir(config, out)
    directory.mkdir(parents=True, exist_ok=True)
    with ScopeTimer() as timer:
        with stage("read"):
            tr = read_trajectory(Path(source))
        p = to_macro(config.canonical or config.macro)
        _, outputs = price_stage(config, p, tr, directory)
    write_manifest(directory, config, "price", outputs, timer.elapsed, extra={"source": str(source)})
    return directory


def analyze_from(config: ExperimentConfig, source: Path, out: Optional[Path] = None) -> Path:
    """Analyze the price files (and the trajectory, when present) of an earlier stage."""
    source = Path(source)
    directory = output_dir(config, out)
    directory.mkdir(parents=True, exist_ok=True)
    with ScopeTimer() as timer:
        with stage("read"):
            prices = {
                model: read_price_series(price_path(source, model), model, config.pricing.config_for(model).r)
                for model in config.pricing.models
                if price_path(source, model).exists()
            }
            tr = read_trajectory(source) if (source / "trajectory.tsv").exists() else None
        if not prices and tr is None:
            raise PpmError(f"nothing to analyze in {source}", error_code=PpmErrorCode.INVALID_INPUT)
        outputs = analyze_stage(config, prices, tr, directory)
    write_manifest(directory, config, "analyze", outputs, timer.elapsed, extra={"source": str(source)})
    return directory
