"""Flat key = value run configuration with strict unknown-key rejection.

Sources merge in fixed precedence: built-in defaults, then the config file,
then explicit command-line flags.  Every key is typed; anything unknown or
unparsable raises ConfigError, which the command line maps to exit code 2.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from typing import Optional

from .families import DIAGNOSTIC_FAMILY_IDS, FAMILY_IDS, MAX_OPERATOR_INDEX
from .glide import diagonal_row


class ConfigError(ValueError):
    """A configuration value is missing, unknown, or out of range."""


@dataclass(frozen=True)
class RunConfig:
    family: str = "coordinate"
    p: float = 0.5
    horizon: int = 6
    cap: float = 0.5
    index_max: Optional[int] = None
    seed: int = 0
    out_dir: str = "out"
    quadrature_order: int = 65536
    grid_resolution: int = 4096
    points: tuple[float, ...] = (-2.0, 0.0, 2.0)
    smoothing_width: Optional[float] = None
    eta: Optional[float] = None
    plots: bool = True
    samples: int = 10000
    trend_samples: int = 32
    probe_index_max: int = 64
    probe_row_max: int = 8
    blowup_floor: float = 1.5
    increment_constant: float = 1.0
    subadditivity_constant: float = 1.0

    def resolved_index_max(self) -> int:
        if self.index_max is not None:
            return self.index_max
        return 4096 if self.family == "fourier" else 10**60


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_points(text: str) -> tuple[float, ...]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise ValueError("empty angle list")
    return tuple(float(p) for p in parts)


def _parse_optional_float(text: str) -> Optional[float]:
    lowered = text.strip().lower()
    if lowered in ("none", ""):
        return None
    return float(text)


# config-file key -> (dataclass field, parser)
_KEY_TABLE = {
    "family": ("family", str.strip),
    "p": ("p", float),
    "K": ("horizon", int),
    "cap": ("cap", float),
    "n_max": ("index_max", int),
    "seed": ("seed", int),
    "out": ("out_dir", str.strip),
    "quadrature_order": ("quadrature_order", int),
    "grid_resolution": ("grid_resolution", int),
    "points": ("points", _parse_points),
    "smoothing_width": ("smoothing_width", _parse_optional_float),
    "eta": ("eta", float),
    "plots": ("plots", _parse_bool),
    "samples": ("samples", int),
    "trend_samples": ("trend_samples", int),
    "probe_index_max": ("probe_index_max", int),
    "probe_row_max": ("probe_row_max", int),
    "blowup_floor": ("blowup_floor", float),
    "L": ("increment_constant", float),
    "C": ("subadditivity_constant", float),
}


def parse_config_text(text: str) -> dict:
    """Parse key = value lines into typed field overrides."""
    overrides: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _KEY_TABLE:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        field_name, parser = _KEY_TABLE[key]
        try:
            overrides[field_name] = parser(value.strip())
        except (ValueError, TypeError) as err:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {err}") from err
    return overrides


def load_config_file(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_config_text(fh.read())
    except OSError as err:
        raise ConfigError(f"cannot read config file {path!r}: {err}") from err


def merge_config(base: RunConfig, overrides: dict) -> RunConfig:
    known = {f.name for f in fields(RunConfig)}
    unknown = set(overrides) - known
    if unknown:
        raise ConfigError(f"unknown config fields {sorted(unknown)!r}")
    return replace(base, **overrides)


def validate_config(cfg: RunConfig, command: str) -> None:
    """Raise ConfigError for anything a command cannot honor."""
    if command in ("run", "check"):
        allowed = FAMILY_IDS if command == "run" else DIAGNOSTIC_FAMILY_IDS
        if cfg.family not in allowed:
            raise ConfigError(f"family must be one of {list(allowed)}, got {cfg.family!r}")
    if not (0.0 < cfg.p <= 1.0):
        raise ConfigError(f"p must lie in (0, 1], got {cfg.p}")
    if cfg.horizon < 0:
        raise ConfigError(f"K must be >= 0, got {cfg.horizon}")
    if not (0.0 < cfg.cap <= 1.0):
        raise ConfigError(f"cap must lie in (0, 1], got {cfg.cap}")
    if cfg.seed < 0:
        raise ConfigError(f"seed must be >= 0, got {cfg.seed}")
    index_max = cfg.resolved_index_max()
    if index_max < 1:
        raise ConfigError(f"n_max must be >= 1, got {index_max}")
    if index_max > MAX_OPERATOR_INDEX:
        raise ConfigError(
            f"n_max {index_max} exceeds the largest representable operator index "
            f"{MAX_OPERATOR_INDEX}"
        )
    if cfg.quadrature_order < 4:
        raise ConfigError(f"quadrature_order must be >= 4, got {cfg.quadrature_order}")
    if cfg.grid_resolution < 16:
        raise ConfigError(f"grid_resolution must be >= 16, got {cfg.grid_resolution}")
    if cfg.samples < 1 or cfg.trend_samples < 1:
        raise ConfigError("samples and trend_samples must be >= 1")
    if cfg.probe_index_max < 16:
        raise ConfigError(f"probe_index_max must be >= 16, got {cfg.probe_index_max}")
    if cfg.probe_row_max < 1:
        raise ConfigError(f"probe_row_max must be >= 1, got {cfg.probe_row_max}")
    if cfg.blowup_floor <= 1.0:
        raise ConfigError(f"blowup_floor must exceed 1, got {cfg.blowup_floor}")
    if cfg.increment_constant < 1.0 or cfg.subadditivity_constant < 1.0:
        raise ConfigError("L and C must be >= 1")
    if cfg.eta is not None and not (0.0 < cfg.eta <= 1.0):
        raise ConfigError(f"eta must lie in (0, 1], got {cfg.eta}")
    if cfg.smoothing_width is not None and cfg.smoothing_width <= 0.0:
        raise ConfigError(f"smoothing_width must be positive, got {cfg.smoothing_width}")
    if cfg.family == "fourier":
        if len(set(cfg.points)) != len(cfg.points) or not cfg.points:
            raise ConfigError(f"points must be nonempty and distinct, got {list(cfg.points)}")
        if command == "run":
            if cfg.horizon >= 1:
                rows_needed = max(diagonal_row(k) for k in range(1, cfg.horizon + 1))
                if rows_needed > len(cfg.points):
                    raise ConfigError(
                        f"K = {cfg.horizon} interleaves {rows_needed} rows but only "
                        f"{len(cfg.points)} target angles are configured"
                    )
            if cfg.quadrature_order < 2 * (index_max + 1):
                raise ConfigError(
                    f"quadrature_order {cfg.quadrature_order} cannot resolve kernel "
                    f"orders up to n_max = {index_max}; need at least {2 * (index_max + 1)}"
                )
    if command == "lebesgue":
        if cfg.quadrature_order < 2 * (index_max + 1):
            raise ConfigError(
                f"quadrature_order {cfg.quadrature_order} cannot resolve kernel "
                f"orders up to n_max = {index_max}; need at least {2 * (index_max + 1)}"
            )
