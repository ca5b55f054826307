"""Flat key = value run configuration.

One assignment per line, '#' starts a comment, no nesting.  Unknown keys are
rejected so typos fail loudly rather than silently using a default.
"""

from dataclasses import dataclass

from .errors import ConfigParseError, ConfigValidationError

_SEEDS = ("zero", "wave", "file")


@dataclass
class RunConfig:
    nx: int
    ny: int
    lx: float
    ly: float
    radius: float = 1.0
    theta: float = 0.0
    tol: float = 1e-10
    max_iter: int = 30
    seed: str = "zero"
    wave_energy: float | None = None
    field_path: str | None = None
    out_dir: str = "."
    projection: str = "pca"
    re_unitarize: bool = False
    substeps: int = 24
    extend_closure: bool = True


_REQUIRED = ("nx", "ny", "lx", "ly")

_PARSERS = {
    "nx": int,
    "ny": int,
    "lx": float,
    "ly": float,
    "radius": float,
    "theta": float,
    "tol": float,
    "max_iter": int,
    "seed": str,
    "wave_energy": float,
    "field_path": str,
    "out_dir": str,
    "projection": str,
    "re_unitarize": None,
    "substeps": int,
    "extend_closure": None,
}


def _parse_bool(raw, key):
    low = raw.lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ConfigValidationError(f"{key} must be a boolean, got {raw!r}")


def parse_config_text(text, source="<config>"):
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParseError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if not key or not val:
            raise ConfigParseError(f"{source}:{lineno}: empty key or value in {raw!r}")
        if key in values:
            raise ConfigParseError(f"{source}:{lineno}: duplicate key {key!r}")
        values[key] = val

    for key in values:
        if key not in _PARSERS:
            raise ConfigValidationError(f"unknown config key {key!r}")
    for key in _REQUIRED:
        if key not in values:
            raise ConfigValidationError(f"missing required config key {key!r}")

    kwargs = {}
    for key, raw in values.items():
        parser = _PARSERS[key]
        if parser is None:
            kwargs[key] = _parse_bool(raw, key)
        else:
            try:
                kwargs[key] = parser(raw)
            except ValueError as exc:
                raise ConfigValidationError(f"bad value for {key}: {raw!r}") from exc
    cfg = RunConfig(**kwargs)
    validate_config(cfg)
    return cfg


def parse_config(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigParseError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text, source=str(path))


def validate_config(cfg):
    if cfg.nx < 8 or cfg.ny < 8:
        raise ConfigValidationError(f"need nx, ny >= 8, got ({cfg.nx}, {cfg.ny})")
    for key in ("lx", "ly", "radius", "tol"):
        if getattr(cfg, key) <= 0:
            raise ConfigValidationError(f"{key} must be positive")
    if cfg.max_iter < 1:
        raise ConfigValidationError("max_iter must be >= 1")
    if cfg.substeps < 1:
        raise ConfigValidationError("substeps must be >= 1")
    if cfg.seed not in _SEEDS:
        raise ConfigValidationError(f"seed must be one of {_SEEDS}, got {cfg.seed!r}")
    if cfg.seed == "wave":
        if cfg.wave_energy is None:
            raise ConfigValidationError("seed = wave requires wave_energy")
        if cfg.wave_energy <= 6.0:
            raise ConfigValidationError("wave_energy must exceed 6")
    if cfg.seed == "file" and not cfg.field_path:
        raise ConfigValidationError("seed = file requires field_path")
    if cfg.projection != "pca":
        names = [n.strip() for n in cfg.projection.split(",")]
        from .meshout import COORD_NAMES

        if len(names) != 3 or any(n not in COORD_NAMES for n in names):
            raise ConfigValidationError(
                f"projection must be 'pca' or three of {COORD_NAMES}"
            )
