"""Deterministic CSV output with ``#``-prefixed run metadata."""

from __future__ import annotations

import json
import platform
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .groundstate import TOL_FIDELITY, TOL_RESIDUAL
from .model import ModelParams

__all__ = ["RunManifest", "fmt", "write_csv", "read_csv"]


def fmt(value) -> str:
    """17 significant digits, locale independent; strings pass through."""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if np.isnan(v):
        return "nan"
    return format(v, ".17g")


@dataclass
class RunManifest:
    command: str
    params: ModelParams
    spec: dict = field(default_factory=dict)
    tol_fidelity: float = TOL_FIDELITY
    tol_residual: float = TOL_RESIDUAL
    extra: dict = field(default_factory=dict)
    started: float = field(default_factory=time.time)
    elapsed: float = None

    def finish(self):
        self.elapsed = time.time() - self.started

    def as_dict(self) -> dict:
        p = self.params
        out = {
            "tool": "gendicke",
            "version": __version__,
            "command": self.command,
            "units": "energies in units of hbar*omega_3; couplings x = mu/mu_c dimensionless",
            "config": p.config.value,
            "omega": list(p.omega),
            "Omega": dict(zip(p.config.mode_tags, p.Omega)),
            "x": dict(zip(p.config.mode_tags, p.x)),
            "Na": p.n_atoms,
            "tol_fidelity": self.tol_fidelity,
            "tol_residual": self.tol_residual,
            "sector_order": "ee<eo<oe<oo",
            **self.spec,
            **self.extra,
            "python": platform.python_version(),
            "numpy": np.__version__,
        }
        if self.elapsed is not None:
            out["elapsed_s"] = round(self.elapsed, 3)
        return out

    def header_lines(self) -> list[str]:
        return [f"# {k}: {json.dumps(v, default=str)}" for k, v in self.as_dict().items()]


def write_csv(path, columns, rows, manifest: "RunManifest | None" = None, extra_header=()) -> Path:
    """Write ``rows`` under a metadata header. Only the header carries timing."""
    path = Path(path)
    lines = []
    if manifest is not None:
        lines += manifest.header_lines()
    lines += [f"# {line}" for line in extra_header]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def read_csv(path) -> tuple[dict, list[str], list[list[str]]]:
    """Parse a file written by :func:`write_csv` into (metadata, columns, rows)."""
    meta, columns, rows = {}, None, []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            key, sep, val = line[1:].strip().partition(": ")
            if sep:
                try:
                    meta[key] = json.loads(val)
                except json.JSONDecodeError:
                    meta[key] = val
            continue
        if columns is None:
            columns = line.split(",")
        elif line:
            rows.append(line.split(","))
    return meta, columns, rows
