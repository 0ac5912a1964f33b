"""GIF-PO RTL coverage, stuck-at fault simulation and test-set tools."""

import os
from pathlib import Path

from ._gifpo import (
    Design,
    GateNetlist,
    GifpoError,
    __version__,
    enumerate_gifs,
)
from ._gifpo import report as _report

__all__ = [
    "Design",
    "GateNetlist",
    "GifpoError",
    "__version__",
    "circuit_path",
    "enumerate_gifs",
    "load",
    "report",
]


def circuit_path(name: str) -> Path:
    """Path of a bundled circuit, e.g. circuit_path("c1")."""
    roots = []
    if os.environ.get("GIFPO_CIRCUITS"):
        roots.append(Path(os.environ["GIFPO_CIRCUITS"]))
    roots.append(Path(__file__).with_name("circuits"))
    for root in roots:
        p = root / f"{name}.gnl"
        if p.exists():
            return p
    raise FileNotFoundError(f"no bundled circuit '{name}'")


def load(name_or_path) -> Design:
    """Loads a GNL file, or a bundled circuit by name."""
    p = Path(name_or_path)
    return Design.load(p if p.exists() else circuit_path(str(name_or_path)))


def report(name_or_path, style: str = "aotree", seed: int = 1) -> dict:
    """Coverage results row for a GNL file or a bundled circuit."""
    p = Path(name_or_path)
    return _report(p if p.exists() else circuit_path(str(name_or_path)), style, seed)
