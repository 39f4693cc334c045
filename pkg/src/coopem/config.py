"""Run configuration: INI ingestion, merging with command-line values, checks.

Schema (every key optional; command-line flags override file values)::

    [run]       quantity = decay | g2tau | pulsed | pattern | ratescan | xiscan
                observable = <sub-quantity for pattern / ratescan>
                output = <path>
    [scenario]  kind = single | distinguishable | superradiant | selective
                drive = none | pump | sym | antisym
                xi2 = <detector visibility, selective only>
    [rates]     gamma, gamma_p, gamma_d, gamma_S, omega, I0
    [state]     n_ee0, n_S0          (initial / post-pulse populations)
                pattern_state = excited | uncorrelated | collapsed
    [geometry]  kr, dipole_cos2, aperture, r_angle, k1_phase
    [grid]      t_max, tau_max, points, period, n_periods, kr_max

Rates are in units of ``gamma``, times in ``1/gamma``, angles in radians.
"""

import configparser
import math
import re
from dataclasses import dataclass, field, fields, replace
from enum import Enum

from .errors import ConfigError

MAX_POINTS = 10**6


class Quantity(str, Enum):
    DECAY = "decay"
    G2TAU = "g2tau"
    PULSED = "pulsed"
    PATTERN = "pattern"
    RATESCAN = "ratescan"
    XISCAN = "xiscan"


DEFAULT_POINTS = {
    Quantity.DECAY: 601,
    Quantity.G2TAU: 600,
    Quantity.PULSED: 2001,
    Quantity.PATTERN: 361,
    Quantity.RATESCAN: 601,
    Quantity.XISCAN: 201,
}

DEFAULT_OBSERVABLE = {Quantity.PATTERN: "g2", Quantity.RATESCAN: "gamma2eff"}
OBSERVABLES = {
    Quantity.PATTERN: ("g2", "cross", "intensity"),
    Quantity.RATESCAN: ("gamma2eff", "gammasup", "gammasup_scalar", "gammaind"),
}
PATTERN_STATES = ("excited", "uncorrelated", "collapsed")
KINDS = ("single", "distinguishable", "superradiant", "selective")
DRIVES = ("none", "pump", "sym", "antisym")


@dataclass(frozen=True)
class RunConfig:
    quantity: Quantity = None
    observable: str = None
    output: str = None
    kind: str = "single"
    drive: str = None  # inferred: pump if gamma_p > 0, else none
    xi2: float = None  # None: from the aperture for selective runs, else 1
    gamma: float = 1.0
    gamma_p: float = 0.0
    gamma_d: float = 0.0
    gamma_S: float = None
    omega: float = 0.0
    I0: float = 1.0
    n_ee0: float = 1.0
    n_S0: float = 0.0
    pattern_state: str = "excited"
    kr: float = 0.0
    dipole_cos2: float = 1.0 / 3.0
    aperture: float = 0.0
    r_angle: float = math.pi / 2
    k1_phase: float = 0.0
    t_max: float = 6.0
    tau_max: float = 6.0
    points: int = None
    period: float = 10.0
    n_periods: int = 2
    kr_max: float = 15.0
    positions: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def resolved_drive(self):
        if self.drive is not None:
            return self.drive
        return "pump" if self.gamma_p > 0 else "none"

    @property
    def resolved_points(self):
        if self.points is not None:
            return self.points
        return DEFAULT_POINTS.get(self.quantity, 601)

    @property
    def resolved_observable(self):
        return self.observable or DEFAULT_OBSERVABLE.get(self.quantity)

    def with_overrides(self, **values):
        values = {k: v for k, v in values.items() if v is not None}
        return replace(self, **values)


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}

SCHEMA = {
    "run": {"quantity": "quantity", "observable": "observable", "output": "output"},
    "scenario": {"kind": "kind", "drive": "drive", "xi2": "xi2"},
    "rates": {"gamma": "gamma", "gamma_p": "gamma_p", "gamma_d": "gamma_d",
              "gamma_s": "gamma_S", "omega": "omega", "i0": "I0"},
    "state": {"n_ee0": "n_ee0", "n_s0": "n_S0", "pattern_state": "pattern_state"},
    "geometry": {"kr": "kr", "dipole_cos2": "dipole_cos2", "aperture": "aperture",
                 "r_angle": "r_angle", "k1_phase": "k1_phase"},
    "grid": {"t_max": "t_max", "tau_max": "tau_max", "points": "points", "period": "period",
             "n_periods": "n_periods", "kr_max": "kr_max"},
}

_SECTION_RE = re.compile(r"^\s*\[([^\]]*)\]")
_KEY_RE = re.compile(r"^(\s*)([^=:\s][^=:]*?)\s*[=:]\s*")


def _locate(text):
    """Map ``(section, key)`` to ``(line, column)`` of the value (1-based)."""
    where, section = {}, None
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.lstrip().startswith(("#", ";")):
            continue
        m = _SECTION_RE.match(line)
        if m:
            section = m.group(1).strip().lower()
            where[(section, None)] = (lineno, line.index("[") + 1)
            continue
        m = _KEY_RE.match(line)
        if m and section is not None:
            where[(section, m.group(2).strip().lower())] = (lineno, m.end() + 1)
    return where


def _convert(name, raw):
    kind = _FIELD_TYPES[name]
    if name == "quantity":
        try:
            return Quantity(raw.strip().lower())
        except ValueError:
            raise ValueError(f"unknown quantity {raw!r}; choose from {[q.value for q in Quantity]}") from None
    if kind is int:
        try:
            return int(raw)
        except ValueError:
            raise ValueError(f"{name} must be an integer, got {raw!r}") from None
    if kind is float:
        try:
            return float(raw)
        except ValueError:
            raise ValueError(f"{name} must be a number, got {raw!r}") from None
    return raw.strip()


def parse_config(text, source="<config>"):
    """Parse an INI document into a :class:`RunConfig`.

    Syntax errors, unknown sections or keys and malformed values raise
    :class:`ConfigError` carrying the offending line and column.
    """
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text, source=source)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("key outside of any [section]", exc.lineno, 1) from None
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(f"duplicate key {exc.option!r} in [{exc.section}]", exc.lineno, 1) from None
    except configparser.DuplicateSectionError as exc:
        raise ConfigError(f"duplicate section [{exc.section}]", exc.lineno, 1) from None
    except configparser.ParsingError as exc:
        lineno, line = exc.errors[0]
        raise ConfigError(f"cannot parse {line.strip()!r} (expected key = value)", lineno, 1) from None

    where = _locate(text)
    values, positions = {}, {}
    for section in parser.sections():
        sec = section.strip().lower()
        if sec not in SCHEMA:
            line, col = where.get((sec, None), (None, None))
            raise ConfigError(f"unknown section [{section}]; expected one of {sorted(SCHEMA)}", line, col)
        for key, raw in parser.items(section):
            pos = where.get((sec, key), (None, None))
            if key not in SCHEMA[sec]:
                raise ConfigError(f"unknown key {key!r} in [{section}]; expected one of "
                                  f"{sorted(SCHEMA[sec])}", *pos)
            name = SCHEMA[sec][key]
            try:
                values[name] = _convert(name, raw)
            except ValueError as exc:
                raise ConfigError(str(exc), *pos) from None
            positions[name] = pos
    return RunConfig(positions=positions, **values)


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
    return parse_config(text, source=str(path))


@dataclass(frozen=True)
class Diagnostic:
    message: str
    key: str = None
    line: int = None
    column: int = None

    def __str__(self):
        where = f"line {self.line}, column {self.column}: " if self.line is not None else ""
        return f"{where}{self.message}"


def validate(cfg):
    """List every violated invariant of ``cfg``; an empty list means runnable."""
    out = []

    def bad(message, key=None):
        line, col = cfg.positions.get(key, (None, None)) if key else (None, None)
        out.append(Diagnostic(message, key, line, col))

    q = cfg.quantity
    if q is None:
        bad("no quantity selected")
    if cfg.kind not in KINDS:
        bad(f"unknown scenario {cfg.kind!r}; choose from {list(KINDS)}", "kind")
    if cfg.drive is not None and cfg.drive not in DRIVES:
        bad(f"unknown drive {cfg.drive!r}; choose from {list(DRIVES)}", "drive")

    for name in ("gamma_p", "gamma_d", "omega", "I0", "kr", "aperture", "n_ee0", "n_S0"):
        value = getattr(cfg, name)
        if not math.isfinite(value) or value < 0:
            bad(f"{name} must be a finite non-negative number, got {value!r}", name)
    if not math.isfinite(cfg.gamma) or cfg.gamma <= 0:
        bad(f"gamma must be positive, got {cfg.gamma!r}", "gamma")
    if cfg.gamma_S is not None and (not math.isfinite(cfg.gamma_S) or cfg.gamma_S < 0):
        bad(f"gamma_S must be a finite non-negative number, got {cfg.gamma_S!r}", "gamma_S")
    if cfg.xi2 is None:
        pass
    elif not 0 <= cfg.xi2 <= 1:
        bad(f"xi2 must lie in [0, 1], got {cfg.xi2!r}", "xi2")
    elif cfg.xi2 != 1 and cfg.kind != "selective":
        bad("a detector visibility xi2 < 1 applies to the selective scenario only", "xi2")
    if not 0 <= cfg.dipole_cos2 <= 1:
        bad(f"dipole_cos2 must lie in [0, 1], got {cfg.dipole_cos2!r}", "dipole_cos2")
    if not 0 <= cfg.aperture < math.pi / 2:
        bad("aperture half angle must lie in [0, pi/2)", "aperture")
    if cfg.n_ee0 + cfg.n_S0 > 1 + 1e-12:
        bad("n_ee0 + n_S0 exceeds one", "n_S0")

    drive = cfg.resolved_drive
    if cfg.omega > 0 and cfg.gamma_p > 0:
        bad("coherent drive and incoherent pump are both nonzero", "omega")
    elif cfg.gamma_p > 0 and drive != "pump":
        bad(f"gamma_p > 0 requires drive = pump, got {drive!r}", "drive")
    elif cfg.omega > 0 and drive not in ("sym", "antisym"):
        bad("omega > 0 requires drive = sym or antisym", "drive")
    if drive in ("sym", "antisym") and cfg.kind in ("single", "distinguishable"):
        bad(f"coherent driving is not modelled for {cfg.kind} emitters", "drive")

    n = cfg.resolved_points
    if not 2 <= n <= MAX_POINTS:
        bad(f"points must lie in [2, {MAX_POINTS}], got {n}", "points")
    for name in ("t_max", "tau_max", "kr_max"):
        value = getattr(cfg, name)
        if not math.isfinite(value) or value <= 0 or value > 1e6:
            bad(f"{name} must be positive and at most 1e6, got {value!r}", name)

    if q is Quantity.PULSED:
        if cfg.period * cfg.gamma < 5:
            bad("repetition time below 5/gamma", "period")
        if cfg.gamma_p > 0 or cfg.omega > 0:
            bad("pulsed excitation needs free decay between pulses (gamma_p = omega = 0)", "gamma_p")
        if n % 2 == 0:
            bad("pulsed points per period must be odd", "points")
        elif (n - 1) // 2 + 1 < 401:
            bad("pulsed points per period must be at least 801", "points")
        if n * (cfg.n_periods + 1) > MAX_POINTS:
            bad("pulsed histogram exceeds the point budget", "points")
        if cfg.n_periods < 2:
            bad("n_periods must be at least 2", "n_periods")
    if q in OBSERVABLES:
        obs = cfg.resolved_observable
        if obs not in OBSERVABLES[q]:
            bad(f"unknown {q.value} quantity {obs!r}; choose from {list(OBSERVABLES[q])}", "observable")
    elif cfg.observable is not None:
        bad(f"{q.value if q else 'this run'} takes no observable", "observable")
    if q is Quantity.PATTERN:
        if cfg.kind not in ("superradiant", "selective", "distinguishable"):
            bad("radiation patterns need two emitters", "kind")
        if cfg.pattern_state not in PATTERN_STATES:
            bad(f"unknown pattern_state {cfg.pattern_state!r}; choose from {list(PATTERN_STATES)}",
                "pattern_state")
    return out
