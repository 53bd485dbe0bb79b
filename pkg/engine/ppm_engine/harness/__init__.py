from .describe import describe, render
from .loader import load_config
from .manifest import read_manifest, write_manifest
from .presets import get_preset
from .run import analyze_from, price_from, run

__all__ = [
    "describe",
    "render",
    "load_config",
    "get_preset",
    "read_manifest",
    "write_manifest",
    "run",
    "price_from",
    "analyze_from",
]
