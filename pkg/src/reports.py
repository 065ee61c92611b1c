# src/reports.py
"""
Deterministic report writers and the run manifest.

CSV goes through pandas with a fixed float format and ``\\n`` line endings;
JSON is written with sorted keys. Files written by a run are tracked so a
failing run can remove them again.
"""
import hashlib, json, logging, math, os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from .logging_config import log_input

logger = logging.getLogger("metnet.reports")

VERSION = "0.1.0"
FLOAT_FORMAT = "%.12g"


def file_digest(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return f"sha256:{h.hexdigest()}"


def jsonable(obj: Any) -> Any:
    """Plain JSON types; NaN and infinities become None."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [jsonable(v) for v in items]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


@dataclass
class RunManifest:
    command: str
    seed: int
    flags: Dict[str, Any]
    config: Dict[str, Any]
    inputs: Dict[str, str] = field(default_factory=dict)       # path -> digest
    outputs: Dict[str, List[str]] = field(default_factory=dict)  # module -> files
    version: str = VERSION
    wall_time_s: Optional[float] = None

    def record_input(self, path: str) -> str:
        digest = file_digest(path)
        self.inputs[path] = digest
        log_input(logger, path, digest)
        return digest

    def to_dict(self) -> Dict[str, Any]:
        out = {
            "version": self.version,
            "command": self.command,
            "seed": self.seed,
            "flags": self.flags,
            "config": self.config,
            "inputs": self.inputs,
            "outputs": {k: sorted(v) for k, v in self.outputs.items()},
        }
        if self.wall_time_s is not None:
            out["wall_time_s"] = self.wall_time_s
        return jsonable(out)


class ReportWriter:
    """Writes into one output directory and remembers what it wrote."""

    def __init__(self, out_dir: str, manifest: RunManifest):
        self.out_dir = out_dir
        self.manifest = manifest
        self.written: List[str] = []
        self._created_dir = not os.path.isdir(out_dir)
        os.makedirs(out_dir, exist_ok=True)

    def path(self, name: str) -> str:
        return os.path.join(self.out_dir, name)

    def _track(self, name: str, module: str) -> str:
        p = self.path(name)
        if p not in self.written:
            self.written.append(p)
        files = self.manifest.outputs.setdefault(module, [])
        if name not in files:
            files.append(name)
        return p

    def write_csv(self, name: str, df: pd.DataFrame, module: str) -> str:
        p = self._track(name, module)
        df.to_csv(p, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        logger.debug(f"Wrote {p}", extra={"path": p, "count": len(df)})
        return p

    def write_json(self, name: str, obj: Any, module: str) -> str:
        p = self._track(name, module)
        with open(p, "w", encoding="utf-8", newline="\n") as f:
            json.dump(jsonable(obj), f, sort_keys=True, indent=2, ensure_ascii=False)
            f.write("\n")
        return p

    def write_text(self, name: str, text: str, module: str) -> str:
        p = self._track(name, module)
        with open(p, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        return p

    def write_manifest(self) -> str:
        p = self.path("manifest.json")
        if p not in self.written:
            self.written.append(p)
        with open(p, "w", encoding="utf-8", newline="\n") as f:
            json.dump(self.manifest.to_dict(), f, sort_keys=True, indent=2, ensure_ascii=False)
            f.write("\n")
        return p

    def cleanup(self) -> None:
        """Remove every file this writer produced (used when a run fails)."""
        for p in reversed(self.written):
            try:
                os.remove(p)
            except FileNotFoundError:
                pass
        if self._created_dir:
            try:
                os.rmdir(self.out_dir)
            except OSError:
                pass
        logger.warning(f"Removed {len(self.written)} partial outputs", extra={"count": len(self.written)})
        self.written = []


@dataclass(frozen=True)
class PlotSpec:
    csv: str
    x: str
    y: Sequence[str]
    title: str
    style: str = "linespoints"
    logscale: str = ""           # "", "x", "y" or "xy"
    errors: Optional[str] = None  # std column drawn as error bars on y[1]


def gnuplot_script(spec: PlotSpec, columns: Sequence[str]) -> str:
    """gnuplot commands plotting columns of a CSV written by this tool."""
    col = {name: i + 1 for i, name in enumerate(columns)}
    lines = [
        "set datafile separator ','",
        "set key autotitle columnhead",
        f"set title '{spec.title}'",
        f"set xlabel '{spec.x}'",
        "set terminal pngcairo size 900,600",
        f"set output '{os.path.splitext(spec.csv)[0]}.png'",
    ]
    if spec.logscale:
        lines.append(f"set logscale {spec.logscale}")
    plots = []
    for k, y in enumerate(spec.y):
        if spec.errors and k == 1:
            plots.append(f"'{spec.csv}' using {col[spec.x]}:{col[y]}:{col[spec.errors]} with yerrorbars")
        else:
            plots.append(f"'{spec.csv}' using {col[spec.x]}:{col[y]} with {spec.style}")
    lines.append("plot " + ", \\\n     ".join(plots))
    return "\n".join(lines) + "\n"
