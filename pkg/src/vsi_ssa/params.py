"""Converter parameters and the flat ``key = value`` configuration format.

Voltages ``u_od``/``u_oq`` are amplitude-invariant dq components, i.e. the
peak of the phase-to-neutral grid voltage, not its RMS value. All values are
SI; the config keys carry a unit suffix so that µH or mΩ cannot slip in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ConfigError

# Minimum carrier-to-fundamental ratio accepted by validate().
MIN_CARRIER_RATIO = 100.0


@dataclass(frozen=True)
class ConverterParams:
    f_sw: float
    f_grid: float
    u_in: float
    i_in: float
    u_od: float
    u_oq: float
    inductance: float
    r_l: float
    r_on: float
    r_s: float

    @property
    def omega_s(self) -> float:
        return 2.0 * math.pi * self.f_grid

    @property
    def r_eq(self) -> float:
        return self.r_l + self.r_on + self.r_s

    def replace(self, **changes) -> ConverterParams:
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(changes)
        return ConverterParams(**values)


# config key -> dataclass field
CONFIG_KEYS = {
    "f_sw_hz": "f_sw",
    "f_grid_hz": "f_grid",
    "u_in_v": "u_in",
    "i_in_a": "i_in",
    "u_od_v": "u_od",
    "u_oq_v": "u_oq",
    "l_h": "inductance",
    "r_l_ohm": "r_l",
    "r_on_ohm": "r_on",
    "r_s_ohm": "r_s",
}
_FIELD_TO_KEY = {v: k for k, v in CONFIG_KEYS.items()}

REFERENCE = ConverterParams(
    f_sw=100e3,
    f_grid=50.0,
    u_in=30.0,
    i_in=2.0,
    u_od=8.6,
    u_oq=0.0,
    inductance=73e-6,
    r_l=0.015,
    r_on=0.1,
    r_s=0.05,
)


def validate(params: ConverterParams) -> list[str]:
    """Return one message per violated invariant; empty when ``params`` is fine."""
    report = []
    for f in fields(params):
        value = getattr(params, f.name)
        if not math.isfinite(value):
            report.append(f"{_FIELD_TO_KEY[f.name]}: must be finite, got {value!r}")
    if report:
        return report

    if params.f_sw <= 0:
        report.append(f"f_sw_hz: must be > 0, got {params.f_sw!r}")
    if params.f_grid <= 0:
        report.append(f"f_grid_hz: must be > 0, got {params.f_grid!r}")
    if params.f_sw > 0 and params.f_grid > 0 and params.f_sw < MIN_CARRIER_RATIO * params.f_grid:
        report.append(
            f"f_sw_hz: carrier ratio f_sw/f_grid = {params.f_sw / params.f_grid:g} "
            f"is below the minimum of {MIN_CARRIER_RATIO:g}"
        )
    if params.u_in <= 0:
        report.append(f"u_in_v: must be > 0, got {params.u_in!r}")
    if params.inductance <= 0:
        report.append(f"l_h: must be > 0, got {params.inductance!r}")
    for name in ("r_l", "r_on", "r_s"):
        if getattr(params, name) < 0:
            report.append(f"{_FIELD_TO_KEY[name]}: must be >= 0, got {getattr(params, name)!r}")
    return report


def loads_params(text: str) -> ConverterParams:
    """Parse a config document. Raises ConfigError naming the offending key."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}", key=key)
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}", key=key)
        try:
            values[key] = float(value)
        except ValueError:
            raise ConfigError(f"{key}: not a number: {value!r}", key=key) from None

    missing = [k for k in CONFIG_KEYS if k not in values]
    if missing:
        raise ConfigError(f"missing required key(s): {', '.join(missing)}", key=missing[0])

    params = ConverterParams(**{CONFIG_KEYS[k]: v for k, v in values.items()})
    problems = validate(params)
    if problems:
        raise ConfigError("invalid parameters: " + "; ".join(problems),
                          key=problems[0].split(":", 1)[0])
    return params


def load_params(source) -> ConverterParams:
    """Load parameters from a path or from an open text stream."""
    if hasattr(source, "read"):
        return loads_params(source.read())
    try:
        text = Path(source).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {str(source)!r}: {exc.strerror}") from None
    return loads_params(text)


def dumps_params(params: ConverterParams) -> str:
    lines = [
        "# converter parameters, SI units",
        "# u_od_v / u_oq_v: amplitude-invariant dq grid voltage (phase peak, not RMS)",
    ]
    for key, name in CONFIG_KEYS.items():
        lines.append(f"{key} = {getattr(params, name)!r}")
    return "\n".join(lines) + "\n"
