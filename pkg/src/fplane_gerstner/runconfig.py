"""Plain-text run configuration files.

One ``key = value`` pair per line; blank lines and ``#`` comments are ignored::

    # 45 N, eastward wave, no current
    lat_deg = 45
    wavenumber = 0.01
    current = 0
    branch = east
    r0 = -10
    s0 = 100000
    rho = 1025
    p0 = 101325

Latitude is given in degrees here and converted to radians exactly once, in
:meth:`RunConfig.flow_config`.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, fields

from .model import DEFAULT_TOLERANCE, EARTH, FlowConfig, PhysicalConstants

_FLOAT_KEYS = ("lat_deg", "wavenumber", "current", "r0", "s0", "rho", "p0", "omega", "g", "tolerance")


class ConfigFileError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    lat_deg: float = 45.0
    wavenumber: float = 0.01
    current: float = 0.0
    branch: str = "east"
    r0: float = -10.0
    s0: float = 1.0e5
    rho: float = 1025.0
    p0: float = 101325.0
    omega: float | None = None
    g: float | None = None
    profile: str | None = None
    tolerance: float | None = None

    @classmethod
    def keys(cls):
        return [f.name for f in fields(cls)]

    @classmethod
    def from_mapping(cls, values: dict) -> RunConfig:
        unknown = sorted(set(values) - set(cls.keys()))
        if unknown:
            raise ConfigFileError(f"unknown configuration key {unknown[0]!r}")
        parsed = {}
        for key, value in values.items():
            if value is None:
                continue
            if key in _FLOAT_KEYS:
                try:
                    parsed[key] = float(value)
                except (TypeError, ValueError):
                    raise ConfigFileError(f"key {key!r} expects a number, got {value!r}") from None
            else:
                parsed[key] = str(value)
        if parsed.get("branch", "east") not in ("east", "west"):
            raise ConfigFileError(f"branch must be east or west, got {parsed['branch']!r}")
        return cls(**parsed)

    def merged(self, overrides: dict) -> RunConfig:
        """Return a copy with every non-None entry of ``overrides`` applied."""
        return dataclasses.replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def constants(self) -> PhysicalConstants:
        return PhysicalConstants(
            Omega=EARTH.Omega if self.omega is None else self.omega,
            g=EARTH.g if self.g is None else self.g,
        )

    def flow_config(self) -> FlowConfig:
        return FlowConfig.from_latitude(
            math.radians(self.lat_deg), self.wavenumber, self.current, self.branch,
            r0=self.r0, s0=self.s0, rho=self.rho, P0=self.p0, constants=self.constants(),
            tolerance=DEFAULT_TOLERANCE if self.tolerance is None else self.tolerance)

    def dumps(self) -> str:
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            lines.append(f"{f.name} = {value!r}" if isinstance(value, float) else f"{f.name} = {value}")
        return "\n".join(lines) + "\n"


def parse_text(text: str) -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        sep = "=" if "=" in line else ":" if ":" in line else None
        if sep is None:
            raise ConfigFileError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split(sep, 1))
        if key not in RunConfig.keys():
            raise ConfigFileError(f"line {lineno}: unknown configuration key {key!r}")
        values[key] = value
    return values


def loads(text: str) -> RunConfig:
    return RunConfig.from_mapping(parse_text(text))


def load(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())
