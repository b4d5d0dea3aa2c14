"""Run configuration: plain ``key = value`` text with flag overrides.

Lines are ``key = value``; ``#`` starts a comment.  Lists (``gammas``,
``seeds``) are comma separated.  Unknown keys are errors.  Every resolved
field records where it came from (``default``, ``file`` or ``flag``).
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Any, Callable, Mapping

from .errors import MalformedConfig, UnknownKey

__all__ = ["COMMANDS", "RunConfig", "parse_config", "config_echo"]

COMMANDS = ("ground-state", "evolve", "stability", "converge-gamma", "spectrum", "soliton-check")
INITS = ("soliton", "gaussian", "sech2")


@dataclass(frozen=True)
class RunConfig:
    command: str
    n: int = 4096
    half_length: float = 128.0
    c: float = 1.0
    gamma: float = 0.01
    gammas: tuple = (0.1, 0.01, 0.001)
    tol: float = 1e-10
    max_iter: int = 500
    stabilizer_exponent: float = 2.0
    init: str = "soliton"
    dt: float | None = None  # None: use the advective estimate
    t_end: float = 20.0
    save_stride: int = 16
    amp: float = 0.01
    seed: int = 0
    seeds: tuple = (0,)
    nl_coeff: int = 2
    input: str | None = None
    out_dir: str = "rbo_out"
    provenance: Mapping[str, str] = field(default_factory=dict, compare=False)


def _float(s: str) -> float:
    return float(s)


def _int(s: str) -> int:
    v = float(s)
    if v != int(v):
        raise ValueError(f"{s!r} is not an integer")
    return int(v)


def _floats(s: str) -> tuple:
    return tuple(float(t) for t in s.split(",") if t.strip())


def _ints(s: str) -> tuple:
    return tuple(_int(t) for t in s.split(",") if t.strip())


def _opt_float(s: str):
    return None if s.strip().lower() in ("", "auto", "none") else float(s)


def _opt_str(s: str):
    return None if s.strip() == "" else s.strip()


_PARSERS: dict[str, Callable[[str], Any]] = {
    "n": _int, "half_length": _float, "c": _float, "gamma": _float, "gammas": _floats,
    "tol": _float, "max_iter": _int, "stabilizer_exponent": _float, "init": str.strip,
    "dt": _opt_float, "t_end": _float, "save_stride": _int, "amp": _float, "seed": _int,
    "seeds": _ints, "nl_coeff": _int, "input": _opt_str, "out_dir": str.strip,
}


def _is_pow2(n: int) -> bool:
    return n >= 16 and n & (n - 1) == 0


_CHECKS: dict[str, tuple[Callable[[Any], bool], str]] = {
    "n": (_is_pow2, "a power of two >= 16"),
    "half_length": (lambda v: v > 0, "positive"),
    "c": (lambda v: v > 0, "positive"),
    "gamma": (lambda v: v >= 0, "non-negative"),
    "gammas": (lambda v: len(v) > 0 and all(g > 0 for g in v)
               and all(b < a for a, b in zip(v, v[1:])), "positive and strictly decreasing"),
    "tol": (lambda v: v > 0, "positive"),
    "max_iter": (lambda v: v >= 1, ">= 1"),
    "stabilizer_exponent": (lambda v: 1 <= v <= 3, "in [1, 3]"),
    "init": (lambda v: v in INITS, f"one of {', '.join(INITS)}"),
    "dt": (lambda v: v is None or v > 0, "positive or 'auto'"),
    "t_end": (lambda v: v >= 0, "non-negative"),
    "save_stride": (lambda v: v >= 1, ">= 1"),
    "amp": (lambda v: v >= 0, "non-negative"),
    "seed": (lambda v: v >= 0, "non-negative"),
    "seeds": (lambda v: len(v) > 0 and all(s >= 0 for s in v), "non-empty, non-negative"),
    "nl_coeff": (lambda v: v in (1, 2), "1 or 2"),
    "input": (lambda v: True, ""),
    "out_dir": (lambda v: v != "", "non-empty"),
}


def _coerce(key: str, raw, where: str):
    if key not in _PARSERS:
        raise UnknownKey(f"{where}: unknown key {key!r}")
    try:
        val = _PARSERS[key](raw) if isinstance(raw, str) else raw
        if isinstance(val, list):
            val = tuple(val)
    except (ValueError, TypeError) as exc:
        raise MalformedConfig(f"{where}: cannot parse {key} = {raw!r} ({exc})") from exc
    ok, what = _CHECKS[key]
    try:
        good = ok(val)
    except TypeError:
        good = False
    if not good:
        raise MalformedConfig(f"{where}: {key} = {raw!r} must be {what}")
    return val


def parse_config(text: str, command: str, overrides: Mapping[str, Any] | None = None) -> RunConfig:
    """Build a :class:`RunConfig` from config text and flag overrides.

    Raises
    ------
    MalformedConfig
        Bad syntax, duplicate keys, unparsable or out-of-range values; the
        message names the line or the flag.
    UnknownKey
        A key (in the text or among the overrides) that is not a field.
    """
    if command not in COMMANDS:
        raise MalformedConfig(f"unknown command {command!r}")
    values: dict[str, Any] = {}
    prov: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise MalformedConfig(f"line {lineno}: expected 'key = value', got {line.strip()!r}")
        key, raw = (s.strip() for s in body.split("=", 1))
        if not key:
            raise MalformedConfig(f"line {lineno}: missing key")
        if key in values:
            raise MalformedConfig(f"line {lineno}: duplicate key {key!r}")
        values[key] = _coerce(key, raw, f"line {lineno}")
        prov[key] = "file"
    for key, raw in (overrides or {}).items():
        if raw is None:
            continue
        values[key] = _coerce(key, raw, f"flag --{key.replace('_', '-')}")
        prov[key] = "flag"
    for f in fields(RunConfig):
        if f.name not in ("command", "provenance"):
            prov.setdefault(f.name, "default")
    return RunConfig(command=command, provenance=prov, **values)


def config_echo(cfg: RunConfig) -> dict:
    """``{key: {"value": ..., "source": ...}}`` for every field."""
    out = {"command": {"value": cfg.command, "source": "flag"}}
    for f in fields(RunConfig):
        if f.name in ("command", "provenance"):
            continue
        v = getattr(cfg, f.name)
        out[f.name] = {"value": list(v) if isinstance(v, tuple) else v,
                       "source": cfg.provenance.get(f.name, "default")}
    return out
