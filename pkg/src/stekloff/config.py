"""Run configuration: flat ``key = value`` files overridden by command-line flags."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from .errors import StekloffError

__all__ = ["ConfigError", "RunConfig", "COMMANDS", "parse_config_text", "read_config", "parse_seeds",
           "parse_dims", "parse_window", "OUT_DIR_ENV"]

COMMANDS = ("ball-spectrum", "model-verify", "tau-curves", "modified")
OUT_DIR_ENV = "STEKLOFF_OUT_DIR"


class ConfigError(StekloffError, ValueError):
    """Malformed configuration; a usage error."""


@dataclass
class RunConfig:
    command: str
    omega: float | None = None
    n_max: int = 10
    dims: tuple = (20, 20, 10)
    seeds: tuple = (0,)
    window: tuple | None = None
    grid: int = 200
    basis: int = 32
    format: str | None = None
    out: str | None = None
    model: str | None = None
    side: str = "W1"
    problem: str = "both"
    convention: str = "standard"
    mu: float = 1.0
    jobs: int = 1

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.format not in (None, "csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")
        if self.side not in ("W1", "V"):
            raise ConfigError(f"side must be W1 or V, got {self.side!r}")
        if self.problem not in ("ScalarLB", "SProjection", "both"):
            raise ConfigError(f"problem must be ScalarLB, SProjection or both, got {self.problem!r}")
        if self.convention not in ("standard", "reversed"):
            raise ConfigError(f"convention must be standard or reversed, got {self.convention!r}")
        if self.omega is not None and not self.omega > 0:
            raise ConfigError(f"omega must be positive, got {self.omega}")
        if self.n_max < 1:
            raise ConfigError(f"n-max must be >= 1, got {self.n_max}")
        if self.grid < 2:
            raise ConfigError(f"grid must be >= 2, got {self.grid}")
        if self.basis < 4:
            raise ConfigError(f"basis must be >= 4, got {self.basis}")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}")
        if len(self.dims) != 3 or min(self.dims) < 0:
            raise ConfigError(f"dims must be three non-negative integers, got {self.dims}")
        if not self.seeds:
            raise ConfigError("at least one seed is required")

    def to_text(self) -> str:
        """Serialise to the ``key = value`` format accepted by ``parse_config_text``."""
        lines = []
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if v is None:
                continue
            lines.append(f"{f.name} = {_format_value(f.name, v)}")
        return "\n".join(lines) + "\n"


def _format_value(name, v):
    if name == "seeds":
        return ",".join(str(s) for s in v)
    if name in ("dims", "window"):
        return ",".join(format(x, ".17g") if isinstance(x, float) else str(x) for x in v)
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def parse_seeds(text: str) -> tuple:
    """``"0,1,5"`` or half-open ranges ``"0:10"``, comma separated."""
    out = []
    try:
        for part in str(text).split(","):
            part = part.strip()
            if ":" in part:
                a, b = part.split(":")
                out.extend(range(int(a), int(b)))
            elif part:
                out.append(int(part))
    except ValueError:
        raise ConfigError(f"bad seed list {text!r}") from None
    if not out:
        raise ConfigError(f"empty seed list {text!r}")
    return tuple(out)


def parse_dims(text: str) -> tuple:
    try:
        dims = tuple(int(x) for x in str(text).split(","))
    except ValueError:
        raise ConfigError(f"bad dims {text!r}; expected V,W1,W2") from None
    if len(dims) != 3:
        raise ConfigError(f"bad dims {text!r}; expected V,W1,W2")
    return dims


def parse_window(text: str) -> tuple:
    try:
        a, b = (float(x) for x in str(text).split(","))
    except ValueError:
        raise ConfigError(f"bad window {text!r}; expected a,b") from None
    if not a < b:
        raise ConfigError(f"window needs a < b, got {text!r}")
    return (a, b)


_PARSERS = {
    "command": str,
    "omega": float,
    "n_max": int,
    "dims": parse_dims,
    "seeds": parse_seeds,
    "window": parse_window,
    "grid": int,
    "basis": int,
    "format": str,
    "out": str,
    "model": str,
    "side": str,
    "problem": str,
    "convention": str,
    "mu": float,
    "jobs": int,
}


def parse_value(key: str, value: str):
    key = key.strip().replace("-", "_")
    if key not in _PARSERS:
        raise ConfigError(f"unknown config key {key!r}")
    try:
        return key, _PARSERS[key](value.strip())
    except ConfigError:
        raise
    except ValueError:
        raise ConfigError(f"bad value for {key}: {value!r}") from None


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines; blank lines and ``#`` comments are skipped."""
    out = {}
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {no}: expected key = value, got {raw!r}")
        k, v = line.split("=", 1)
        k, val = parse_value(k, v)
        if k in out:
            raise ConfigError(f"line {no}: duplicate key {k!r}")
        out[k] = val
    return out


def read_config(path: str) -> dict:
    with open(path) as fh:
        return parse_config_text(fh.read())
