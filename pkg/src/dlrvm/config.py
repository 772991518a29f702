"""Run configuration: a flat ``key = value`` text format.

Grammar (one assignment per line)::

    line     := blank | comment | key '=' value [comment]
    comment  := '#' anything
    key      := identifier
    value    := number | boolean | identifier | '1e-2h2' | list | path
    list     := number (',' number)*

Numbers are decimal or scientific (``0.1``, ``1e-3``, ``-2.5E+2``); booleans
are ``true``/``false``.  ``eps_dissipation`` accepts the literal ``1e-2h2``
meaning ``1e-2 * h_x**2``.  Unknown or repeated keys are errors.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, fields, replace

from .scenarios import DEFAULT_PARAMS, DEFAULT_SIZES, KINDS, default_domains, intrinsic_rank

EPS_SYMBOL = "1e-2h2"

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_INT = re.compile(r"[+-]?\d+\Z")
_FLOAT = re.compile(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?\Z")

PARAM_KEYS = sorted({k for p in DEFAULT_PARAMS.values() for k in p})
DOMAIN_KEYS = ["x_min", "x_max", "v1_min", "v1_max", "v2_min", "v2_max"]


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None, key: str | None = None):
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)
        self.line = line
        self.column = column
        self.key = key


@dataclass
class RunConfig:
    scenario: str
    rank: int
    tau: float
    t_final: float
    n_x: int | None = None
    n_v1: int | None = None
    n_v2: int | None = None
    correction: bool = False
    eps_dissipation: float | str = 0.0
    cadence: int = 1
    snapshot_times: list[float] = field(default_factory=list)
    output_dir: str = "out"
    seed: int = 0
    pad: float = 1e-12
    n_substeps: int = 5
    rk_scheme: str = "rk4"
    params: dict[str, float] = field(default_factory=dict)
    domains: dict[str, float] = field(default_factory=dict)

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.tau))


_KIND = {
    "scenario": "ident",
    "rank": "int",
    "tau": "float",
    "t_final": "float",
    "n_x": "int",
    "n_v1": "int",
    "n_v2": "int",
    "correction": "bool",
    "eps_dissipation": "eps",
    "cadence": "int",
    "snapshot_times": "floats",
    "output_dir": "path",
    "seed": "int",
    "pad": "float",
    "n_substeps": "int",
    "rk_scheme": "ident",
    **{k: "float" for k in PARAM_KEYS},
    **{k: "float" for k in DOMAIN_KEYS},
}
REQUIRED = ("scenario", "rank", "tau", "t_final")


def _convert(kind: str, raw: str, key: str, line: int, col: int):
    def bad(what):
        return ConfigError(f"{key}: expected {what}, got {raw!r}", line, col, key)

    if kind == "int":
        if not _INT.match(raw):
            raise bad("an integer")
        return int(raw)
    if kind == "float":
        if not (_FLOAT.match(raw) or _INT.match(raw)):
            raise bad("a number")
        return float(raw)
    if kind == "bool":
        if raw not in ("true", "false"):
            raise bad("true or false")
        return raw == "true"
    if kind == "ident":
        if not _IDENT.match(raw):
            raise bad("an identifier")
        return raw
    if kind == "eps":
        if raw == EPS_SYMBOL:
            return EPS_SYMBOL
        if not (_FLOAT.match(raw) or _INT.match(raw)):
            raise bad(f"a number or {EPS_SYMBOL}")
        return float(raw)
    if kind == "floats":
        if raw == "":
            return []
        out = []
        for item in raw.split(","):
            item = item.strip()
            if not (_FLOAT.match(item) or _INT.match(item)):
                raise bad("a comma-separated list of numbers")
            out.append(float(item))
        return out
    if kind == "path":
        if raw == "":
            raise bad("a path")
        return raw
    raise AssertionError(kind)


def parse_config(text: str) -> RunConfig:
    values: dict = {}
    params: dict = {}
    domains: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0]
        if not body.strip():
            continue
        if "=" not in body:
            col = len(body) - len(body.lstrip()) + 1
            raise ConfigError("expected 'key = value'", lineno, col)
        key_part, value_part = body.split("=", 1)
        key = key_part.strip()
        key_col = len(key_part) - len(key_part.lstrip()) + 1
        if not _IDENT.match(key):
            raise ConfigError(f"invalid key {key!r}", lineno, key_col)
        if key not in _KIND:
            raise ConfigError(f"unknown key {key!r}", lineno, key_col, key)
        if key in values or key in params or key in domains:
            raise ConfigError(f"duplicate key {key!r}", lineno, key_col, key)
        raw = value_part.strip()
        val_col = len(key_part) + 2 + (len(value_part) - len(value_part.lstrip()))
        value = _convert(_KIND[key], raw, key, lineno, val_col)
        if key in PARAM_KEYS:
            params[key] = value
        elif key in DOMAIN_KEYS:
            domains[key] = value
        else:
            values[key] = value
    missing = [k for k in REQUIRED if k not in values]
    if missing:
        raise ConfigError(f"missing required key(s): {', '.join(missing)}", key=missing[0])
    cfg = RunConfig(**values, params=params, domains=domains)
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> None:
    """Field-level checks that do not need any numerics."""

    def fail(key, msg):
        raise ConfigError(f"{key}: {msg}", key=key)

    if cfg.scenario not in KINDS:
        fail("scenario", f"unknown scenario {cfg.scenario!r}; expected one of {', '.join(KINDS)}")
    if cfg.rank < intrinsic_rank(cfg.scenario):
        fail("rank", f"must be >= {intrinsic_rank(cfg.scenario)} (intrinsic rank of {cfg.scenario})")
    if not (cfg.tau > 0 and math.isfinite(cfg.tau)):
        fail("tau", "must be a positive finite number")
    if not cfg.t_final >= cfg.tau:
        fail("t_final", "must be >= tau")
    if cfg.n_x is not None and (cfg.n_x < 1 or cfg.n_x % 2 == 0):
        fail("n_x", f"must be a positive odd integer (got {cfg.n_x}); use an odd number of grid points")
    for key in ("n_v1", "n_v2", "cadence", "n_substeps"):
        value = getattr(cfg, key)
        if value is not None and value < 1:
            fail(key, "must be >= 1")
    if cfg.rk_scheme not in ("rk4", "dopri5"):
        fail("rk_scheme", "must be rk4 or dopri5")
    if isinstance(cfg.eps_dissipation, str):
        if cfg.eps_dissipation != EPS_SYMBOL:
            fail("eps_dissipation", f"must be a number or {EPS_SYMBOL}")
    elif cfg.eps_dissipation < 0:
        fail("eps_dissipation", "must be >= 0")
    if cfg.pad < 0:
        fail("pad", "must be >= 0")
    for t in cfg.snapshot_times:
        if not 0.0 <= t <= cfg.t_final:
            fail("snapshot_times", f"{t} is outside [0, t_final={cfg.t_final}]")
    allowed = set(DEFAULT_PARAMS[cfg.scenario])
    for key in cfg.params:
        if key not in allowed:
            fail(key, f"not a parameter of {cfg.scenario} (allowed: {', '.join(sorted(allowed))})")
    for key in cfg.domains:
        if key not in DOMAIN_KEYS:
            fail(key, "unknown domain key")


def resolve(cfg: RunConfig) -> RunConfig:
    """Fill scenario defaults so that every field carries its effective value."""
    validate(cfg)
    sizes = DEFAULT_SIZES[cfg.scenario]
    params = {**DEFAULT_PARAMS[cfg.scenario], **cfg.params}
    xd, v1d, v2d = default_domains(cfg.scenario, params)
    domains = dict(zip(DOMAIN_KEYS, (*xd, *v1d, *v2d)))
    domains.update(cfg.domains)
    return replace(
        cfg,
        n_x=cfg.n_x if cfg.n_x is not None else sizes[0],
        n_v1=cfg.n_v1 if cfg.n_v1 is not None else sizes[1],
        n_v2=cfg.n_v2 if cfg.n_v2 is not None else sizes[2],
        params={k: float(v) for k, v in params.items()},
        domains={k: float(v) for k, v in domains.items()},
        snapshot_times=list(cfg.snapshot_times),
    )


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, list):
        return ", ".join(_fmt(float(v)) for v in value)
    return str(value)


def format_config(cfg: RunConfig) -> str:
    """Emit ``cfg`` in the same grammar; ``parse_config`` reads it back unchanged."""
    lines = []
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        if f.name in ("params", "domains"):
            lines.extend(f"{k} = {_fmt(float(v))}" for k, v in sorted(value.items()))
        elif value is None:
            continue
        elif f.name == "snapshot_times" and not value:
            continue
        else:
            lines.append(f"{f.name} = {_fmt(value)}")
    return "\n".join(lines) + "\n"
