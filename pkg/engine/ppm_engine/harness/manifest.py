import platform
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from ppm_shared.schemas.protocol import ExperimentConfig
from ppm_shared.utils import utcnow

from ppm_engine.config import settings
from ppm_engine.harness.io import read_json, write_json
from ppm_engine.harness.loader import validate_config

MANIFEST_NAME = "manifest.json"
TRACKED_PACKAGES = ("numpy", "scipy", "pydantic", "pydantic-settings", "loguru", "PyYAML", "ppm_shared")


def package_versions() -> Dict[str, str]:
    versions = {"python": platform.python_version()}
    for package in TRACKED_PACKAGES:
        try:
            versions[package] = version(package)
        except PackageNotFoundError:
            versions[package] = "unknown"
    return versions


def write_manifest(
    directory: Path,
    config: ExperimentConfig,
    command: str,
    outputs: List[Path],
    wall_time: float,
    extra: Optional[Dict[str, Any]] = None,
) -> Path:
    manifest = {
        "command": command,
        "config": config.model_dump(mode="json"),
        "seed": config.simulation.seed,
        "members": config.simulation.seeds,
        "rng_algorithm": settings.RNG_ALGORITHM,
        "versions": package_versions(),
        "created_at": utcnow(),
        "wall_time_s": wall_time,
        "outputs": sorted(str(Path(p).relative_to(directory)) for p in outputs),
        **(extra or {}),
    }
    return write_json(directory / MANIFEST_NAME, manifest)


def read_manifest(path: Path) -> Tuple[ExperimentConfig, Dict[str, Any]]:
    """Re-validated config echo and the raw manifest."""
    path = Path(path)
    manifest = read_json(path / MANIFEST_NAME if path.is_dir() else path)
    return validate_config(manifest["config"]), manifest
