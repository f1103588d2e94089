"""Physical parameters of the three-level, two-mode generalised Dicke model.

Energies are measured in units of the top level energy (omega_3 = 1) and the
couplings ``x`` are dimensionless, ``x_jk = mu_jk / mu^c_jk``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

__all__ = [
    "AtomicConfiguration",
    "ModelParams",
    "ParameterError",
    "critical_coupling",
    "dipolar_strengths",
    "load_params",
    "dump_params",
    "PRESETS",
]


class ParameterError(ValueError):
    """Invalid model parameters or parameter file."""


class AtomicConfiguration(enum.Enum):
    XI = "xi"
    LAMBDA = "lambda"
    V = "v"

    @property
    def modes(self) -> tuple[tuple[int, int], tuple[int, int]]:
        """The two active field modes, as (lower, upper) level pairs."""
        return _ACTIVE_MODES[self]

    @property
    def inactive_mode(self) -> tuple[int, int]:
        return _INACTIVE_MODE[self]

    @property
    def mode_tags(self) -> tuple[str, str]:
        return tuple(f"{j}{k}" for j, k in self.modes)

    @classmethod
    def parse(cls, value: "str | AtomicConfiguration") -> "AtomicConfiguration":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {"xi": "xi", "ξ": "xi", "cascade": "xi", "lambda": "lambda",
                   "λ": "lambda", "v": "v"}
        if key not in aliases:
            raise ParameterError(f"unknown atomic configuration {value!r}")
        return cls(aliases[key])


_ACTIVE_MODES = {
    AtomicConfiguration.XI: ((1, 2), (2, 3)),
    AtomicConfiguration.LAMBDA: ((1, 3), (2, 3)),
    AtomicConfiguration.V: ((1, 2), (1, 3)),
}
_INACTIVE_MODE = {
    AtomicConfiguration.XI: (1, 3),
    AtomicConfiguration.LAMBDA: (1, 2),
    AtomicConfiguration.V: (2, 3),
}


def critical_coupling(omega_j: float, omega_k: float, Omega_jk: float) -> float:
    """Two-level critical dipolar strength ``sqrt((omega_k - omega_j) Omega_jk) / 2``.

    This is the coupling at which the mean-field energy of the two-level,
    single-mode Dicke model first develops a minimum away from the vacuum.
    """
    splitting = omega_k - omega_j
    if not (splitting > 0) or omega_j < 0:
        raise ParameterError(
            f"need omega_k > omega_j >= 0, got omega_j={omega_j}, omega_k={omega_k}")
    if not (Omega_jk > 0):
        raise ParameterError(f"field frequency must be positive, got {Omega_jk}")
    return math.sqrt(splitting * Omega_jk) / 2.0


@dataclass(frozen=True)
class ModelParams:
    """Immutable parameter set for one point of the coupling plane.

    ``Omega`` and ``x`` are ordered like ``config.modes``; e.g. for the
    Lambda configuration ``x = (x_13, x_23)``.
    """

    config: AtomicConfiguration
    omega: tuple[float, float, float] = (0.0, 0.5, 1.0)
    Omega: tuple[float, float] = (1.0, 1.0)
    x: tuple[float, float] = (0.0, 0.0)
    n_atoms: int = 1
    normalized: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "config", AtomicConfiguration.parse(self.config))
        omega = tuple(float(w) for w in self.omega)
        Omega = tuple(float(w) for w in self.Omega)
        x = tuple(float(v) for v in self.x)
        if len(omega) != 3 or len(Omega) != 2 or len(x) != 2:
            raise ParameterError("need three level energies, two field frequencies and two couplings")
        if not all(map(math.isfinite, omega + Omega + x)):
            raise ParameterError("parameters must be finite")
        if not omega[0] <= omega[1] <= omega[2]:
            raise ParameterError(f"level energies must be ordered, got {omega}")
        if self.normalized and (omega[0] != 0.0 or omega[2] != 1.0):
            raise ParameterError("normalised parameters need omega_1 = 0 and omega_3 = 1")
        if min(Omega) <= 0:
            raise ParameterError(f"field frequencies must be positive, got {Omega}")
        if min(x) < 0:
            raise ParameterError(f"couplings must be non-negative, got {x}")
        if int(self.n_atoms) != self.n_atoms or self.n_atoms < 1:
            raise ParameterError(f"atom count must be a positive integer, got {self.n_atoms}")
        for (j, k) in self.config.modes:
            if omega[k - 1] <= omega[j - 1]:
                raise ParameterError(f"mode {j}{k} connects degenerate levels")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "Omega", Omega)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "n_atoms", int(self.n_atoms))

    @classmethod
    def preset(cls, name: "str | AtomicConfiguration", x=(0.0, 0.0), n_atoms: int = 1) -> "ModelParams":
        """Resonant parameter sets used for the finite-size phase diagrams."""
        config = AtomicConfiguration.parse(name)
        omega, Omega = PRESETS[config]
        return cls(config, omega, Omega, tuple(x), n_atoms)

    def with_x(self, x) -> "ModelParams":
        return replace(self, x=tuple(float(v) for v in x))

    @property
    def modes(self):
        return self.config.modes

    @property
    def critical_couplings(self) -> np.ndarray:
        return np.array([critical_coupling(self.omega[j - 1], self.omega[k - 1], W)
                         for (j, k), W in zip(self.modes, self.Omega)])

    @property
    def mu(self) -> np.ndarray:
        """Dipolar strengths of the two active modes."""
        return np.asarray(self.x) * self.critical_couplings


PRESETS = {
    AtomicConfiguration.XI: ((0.0, 0.25, 1.0), (0.25, 0.75)),
    AtomicConfiguration.LAMBDA: ((0.0, 0.1, 1.0), (1.0, 0.9)),
    AtomicConfiguration.V: ((0.0, 0.8, 1.0), (0.8, 1.0)),
}


def dipolar_strengths(params: ModelParams) -> dict[tuple[int, int], float]:
    """Dipolar strength ``mu_jk`` for all three level pairs.

    The pair that is not coupled in ``params.config`` is exactly zero.
    """
    out = {(1, 2): 0.0, (1, 3): 0.0, (2, 3): 0.0}
    for mode, mu in zip(params.modes, params.mu):
        out[mode] = float(mu)
    return out


_FILE_KEYS = ("config", "omega2", "Na")


def load_params(path: "str | Path") -> ModelParams:
    """Read a ``key = value`` parameter file.

    Recognised keys are ``config``, ``omega2``, ``Omega_<jk>``, ``x_<jk>`` and
    ``Na``; ``#`` starts a comment. Unknown keys raise :class:`ParameterError`.
    Values not given fall back to the preset of the configuration.
    """
    text = Path(path).read_text()
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, _, val = line.partition("=")
        elif ":" in line:
            key, _, val = line.partition(":")
        else:
            raise ParameterError(f"{path}:{lineno}: expected 'key = value'")
        key, val = key.strip(), val.strip()
        if key in values:
            raise ParameterError(f"{path}:{lineno}: duplicate key {key!r}")
        values[key] = val
    if "config" not in values:
        raise ParameterError(f"{path}: missing 'config'")
    config = AtomicConfiguration.parse(values["config"])
    allowed = set(_FILE_KEYS)
    for j, k in config.modes:
        allowed |= {f"Omega_{j}{k}", f"x_{j}{k}"}
    unknown = sorted(set(values) - allowed)
    if unknown:
        raise ParameterError(f"{path}: unknown keys {unknown} for configuration {config.value}")
    base = ModelParams.preset(config)
    try:
        omega2 = float(values.get("omega2", base.omega[1]))
        Omega = tuple(float(values.get(f"Omega_{t}", W))
                      for t, W in zip(config.mode_tags, base.Omega))
        x = tuple(float(values.get(f"x_{t}", 0.0)) for t in config.mode_tags)
        n_atoms = values.get("Na", "1")
        if not n_atoms.isdigit():
            raise ParameterError(f"{path}: Na must be a positive integer, got {n_atoms!r}")
    except ValueError as exc:
        if isinstance(exc, ParameterError):
            raise
        raise ParameterError(f"{path}: {exc}") from None
    return ModelParams(config, (0.0, omega2, 1.0), Omega, x, int(n_atoms))


def dump_params(params: ModelParams) -> str:
    """Inverse of :func:`load_params` for normalised parameter sets."""
    lines = [f"config = {params.config.value}", f"omega2 = {params.omega[1]!r}"]
    for tag, W, x in zip(params.config.mode_tags, params.Omega, params.x):
        lines.append(f"Omega_{tag} = {W!r}")
        lines.append(f"x_{tag} = {x!r}")
    lines.append(f"Na = {params.n_atoms}")
    return "\n".join(lines) + "\n"
