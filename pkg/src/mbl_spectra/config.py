"""Run configuration: presets per mode, JSON file loading, validation."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from .errors import InvalidArgumentError

MODES = ("figure2", "figure3", "figure4", "appendixB", "oracle-check")

DEFAULT_SEED = 7


class ConfigError(InvalidArgumentError):
    pass


@dataclass(frozen=True)
class RunConfig:
    n: int = 3
    J_list: tuple[float, ...] = (0.1, 0.3, 0.7)
    w: float = 1.0
    m: int = 6
    t_max: float = 10.0
    samples: int = 10
    realizations: int = 24
    shots: int | None = None
    noise_p: float | None = None
    base_seed: int = DEFAULT_SEED
    out: str = "results"
    mode: str = "figure3"
    # appendixB sweeps w over w_list; there t_max is in units of 1/w so that
    # every w shares one omega/w grid
    w_list: tuple[float, ...] = (6.0, 9.0, 12.0)
    workers: int = 1
    skip_first_interaction: bool = True
    per_realization_norm: bool = False
    dump_circuit: bool = False
    figures: bool = True
    resolution: float = 200.0
    ripple: float = 0.02
    interpolation: str = "spline"

    def validate(self) -> "RunConfig":
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.n < 2:
            raise ConfigError("n must be >= 2")
        if not self.J_list:
            raise ConfigError("J_list must be non-empty")
        if any(j < 0 for j in self.J_list):
            raise ConfigError("J values must be non-negative")
        if self.w < 0 or any(w <= 0 for w in self.w_list):
            raise ConfigError("disorder strengths must be positive")
        for name in ("m", "samples", "realizations", "workers"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.t_max <= 0:
            raise ConfigError("t_max must be positive")
        if self.shots is not None and self.shots < 1:
            raise ConfigError("shots must be >= 1")
        if self.noise_p is not None and not 0 <= self.noise_p <= 1:
            raise ConfigError("noise_p must lie in [0, 1]")
        if self.interpolation not in ("spline", "polynomial"):
            raise ConfigError("interpolation must be 'spline' or 'polynomial'")
        return self

    def to_dict(self) -> dict:
        d = asdict(self)
        d["J_list"] = list(self.J_list)
        d["w_list"] = list(self.w_list)
        return d


PRESETS: dict[str, dict] = {
    "figure2": {"realizations": 2},
    "figure3": {},
    "figure4": {},
    "appendixB": {
        "n": 7, "J_list": (1.0,), "m": 500, "realizations": 100,
        "t_max": 20.0, "samples": 40,
    },
    "oracle-check": {},
}

_TUPLE_FIELDS = {"J_list", "w_list"}


def _coerce(updates: dict) -> dict:
    known = {f.name for f in fields(RunConfig)}
    out = {}
    for k, v in updates.items():
        if k not in known:
            raise ConfigError(f"unknown config field {k!r}")
        if k in _TUPLE_FIELDS and v is not None:
            v = tuple(float(x) for x in (v if isinstance(v, (list, tuple)) else [v]))
        out[k] = v
    return out


def make_config(mode: str = "figure3", file: str | Path | None = None, **overrides) -> RunConfig:
    """Preset for ``mode``, then the JSON file, then explicit overrides."""
    layers: dict = {}
    if file is not None:
        try:
            layers.update(json.loads(Path(file).read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {file}: {exc}") from exc
    overrides = {k: v for k, v in overrides.items() if v is not None}
    mode = overrides.get("mode", layers.get("mode", mode))
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")
    cfg = replace(RunConfig(mode=mode), **_coerce(PRESETS[mode]))
    cfg = replace(cfg, **_coerce(layers))
    cfg = replace(cfg, **_coerce(overrides))
    return cfg.validate()
