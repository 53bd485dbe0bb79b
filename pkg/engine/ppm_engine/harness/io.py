"""Columnar text files: one header line of tab-separated names, then rows of numbers."""

import json
from pathlib import Path
from typing import Dict, List, Sequence

import numpy as np
from ppm_shared.exceptions.ppm_error import PpmError, PpmErrorCode
from ppm_shared.schemas.protocol import AgentState, PricingModel
from ppm_shared.utils import custom_serializer

from ppm_engine.config import settings
from ppm_engine.models import PriceSeries, Trajectory


def write_columns(path: Path, names: Sequence[str], columns: Sequence[np.ndarray]) -> Path:
    table = np.column_stack([np.asarray(c, dtype=np.float64) for c in columns]) if len(columns[0]) else None
    delimiter = settings.COLUMN_DELIMITER
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(delimiter.join(names) + "\n")
        if table is not None:
            np.savetxt(f, table, fmt=settings.FLOAT_FORMAT, delimiter=delimiter)
    return path


def write_record(path: Path, record) -> Path:
    names, columns = record.columns()
    return write_columns(path, names, columns)


def read_columns(path: Path) -> Dict[str, np.ndarray]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            names = f.readline().rstrip("\n").split(settings.COLUMN_DELIMITER)
            table = np.loadtxt(f, delimiter=settings.COLUMN_DELIMITER, ndmin=2)
    except (OSError, ValueError) as error:
        raise PpmError(f"cannot read {path}: {error}", error_code=PpmErrorCode.INVALID_INPUT) from error
    if table.size == 0:
        return {name: np.empty(0) for name in names}
    return {name: table[:, i] for i, name in enumerate(names)}


def write_json(path: Path, payload) -> Path:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, default=custom_serializer)
        f.write("\n")
    return path


def read_json(path: Path):
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except (OSError, ValueError) as error:
        raise PpmError(f"cannot read {path}: {error}", error_code=PpmErrorCode.INVALID_INPUT) from error


def write_trajectory(directory: Path, tr: Trajectory) -> List[Path]:
    meta = {
        "init": tr.init.model_dump(),
        "horizon": tr.horizon,
        "absorbed": tr.absorbed,
        "absorbed_at": tr.absorbed_at,
        "record_every": tr.record_every,
        "rng_algorithm": tr.rng_algorithm,
        "events": tr.events,
    }
    return [write_record(directory / "trajectory.tsv", tr), write_json(directory / "trajectory.json", meta)]


def read_trajectory(directory: Path) -> Trajectory:
    meta = read_json(directory / "trajectory.json")
    columns = read_columns(directory / "trajectory.tsv")
    return Trajectory(
        init=AgentState(**meta["init"]),
        times=columns["time_min"],
        channels=columns["channel"].astype(np.int8),
        n=columns["n"].astype(np.int32),
        m=columns["m"].astype(np.int32),
        horizon=float(meta["horizon"]),
        absorbed=bool(meta["absorbed"]),
        absorbed_at=meta["absorbed_at"],
        record_every=int(meta["record_every"]),
        rng_algorithm=meta["rng_algorithm"],
    )


def price_path(directory: Path, model: PricingModel, closing: bool = False) -> Path:
    prefix = "closing" if closing else "price"
    return directory / f"{prefix}_{PricingModel(model).value}.tsv"


def read_price_series(path: Path, model: PricingModel, r: float = 0.0) -> PriceSeries:
    columns = read_columns(path)
    return PriceSeries(times=columns["time_min"], R=columns["R"], model=PricingModel(model), r=r)
