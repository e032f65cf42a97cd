"""Plain-text ``key = value`` experiment configs.

Keys are exactly the :class:`~gswdenoise.simkit.ExperimentConfig` field
names. ``#`` starts a comment. Values::

    N = 1000
    K = 10
    field = complex                  # or real
    nonzero_magnitude = 1.0
    phase_mode = random_phase        # or unit_real
    sigma_grid = db(0, 25, 1)        # or a comma-separated list of sigmas
    trials = 1000
    seed = 1
    rules = gsw, sw, st, js, ls, oracle
    lambda_rule = universal(1.1)     # or fixed(4.09)
    fixed_signal = false

Errors carry the offending line number.
"""

from __future__ import annotations

import dataclasses
import hashlib
import re
from typing import Dict, Tuple

from .shrinkage import GSW, ST, rule_label
from .simkit import ExperimentConfig, LambdaRule, db_grid

__all__ = ["ConfigError", "parse_config", "load_config", "canonical_items",
           "canonical_text", "config_digest"]

FIELDS = [f.name for f in dataclasses.fields(ExperimentConfig)]

_CALL_RE = re.compile(r"^([a-z_]+)\s*\((.*)\)$", re.IGNORECASE)


class ConfigError(ValueError):
    """Invalid config; ``line`` is 1-based, or 0 when no line applies."""

    def __init__(self, message: str, line: int = 0, source: str = "<config>"):
        self.line = line
        self.source = source
        self.reason = message
        where = f"{source}:{line}" if line else source
        super().__init__(f"{where}: {message}")


def _parse_int(text):
    return int(text)


def _parse_float(text):
    return float(text)


def _parse_bool(text):
    low = text.lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"expected true/false, got {text!r}")


def _split_list(text):
    items, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            items.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    items.append("".join(cur).strip())
    return [i for i in (s.strip("[] ") for s in items) if i]


def _parse_grid(text):
    m = _CALL_RE.match(text)
    if m and m.group(1).lower() == "db":
        args = [float(a) for a in _split_list(m.group(2))]
        if len(args) != 3 or args[2] <= 0:
            raise ValueError("db(start, stop, step) needs three numbers with step > 0")
        return tuple(float(s) for s in db_grid(*args))
    return tuple(float(v) for v in _split_list(text))


def _parse_lambda_rule(text):
    m = _CALL_RE.match(text)
    if not m:
        raise ValueError("expected fixed(<lambda>) or universal(<factor>)")
    return LambdaRule(m.group(1).lower(), float(m.group(2)))


_PARSERS = {
    "N": _parse_int,
    "K": _parse_int,
    "field": str.lower,
    "nonzero_magnitude": _parse_float,
    "phase_mode": str.lower,
    "sigma_grid": _parse_grid,
    "trials": _parse_int,
    "seed": _parse_int,
    "rules": lambda t: tuple(_split_list(t)),
    "lambda_rule": _parse_lambda_rule,
    "fixed_signal": _parse_bool,
}


def parse_config(text: str, source: str = "<config>",
                 overrides: Dict[str, str] = None) -> ExperimentConfig:
    """Parse config text; ``overrides`` (raw strings) take precedence."""
    values, lines = {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno, source)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _PARSERS:
            raise ConfigError(f"unknown key {key!r}", lineno, source)
        if key in values:
            raise ConfigError(f"duplicate key {key!r} (first on line {lines[key]})", lineno, source)
        try:
            values[key] = _PARSERS[key](value)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {exc}", lineno, source) from None
        lines[key] = lineno
    for key, value in (overrides or {}).items():
        try:
            values[key] = _PARSERS[key](str(value))
        except ValueError as exc:
            raise ConfigError(f"bad override for {key}: {exc}", 0, source) from None
        lines[key] = 0
    try:
        return ExperimentConfig(**values)
    except ValueError as exc:
        msg = str(exc)
        # blame the key named first in the message
        hits = [(m.start(), k) for k in values
                for m in [re.search(rf"\b{re.escape(k)}\b", msg)] if m]
        line = lines.get(min(hits)[1], 0) if hits else 0
        raise ConfigError(msg, line, source) from None


def load_config(path, overrides: Dict[str, str] = None) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), str(path), overrides)


def _rule_spec(rule) -> str:
    if isinstance(rule, GSW):
        return f"gsw({rule.lam!r})"
    if isinstance(rule, ST):
        return f"st({rule.tau!r})"
    return rule_label(rule).lower()


def canonical_items(cfg: ExperimentConfig) -> Tuple[Tuple[str, str], ...]:
    """Fully resolved ``(key, value)`` pairs that reparse to an equal config."""
    out = []
    for name in FIELDS:
        v = getattr(cfg, name)
        if name == "sigma_grid":
            text = ", ".join(repr(float(s)) for s in v)
        elif name == "rules":
            text = ", ".join(_rule_spec(r) for r in v)
        elif name in ("field", "phase_mode"):
            text = v.value
        elif name == "fixed_signal":
            text = "true" if v else "false"
        else:
            text = str(v) if not isinstance(v, float) else repr(v)
        out.append((name, text))
    return tuple(out)


def canonical_text(cfg: ExperimentConfig) -> str:
    return "".join(f"{k} = {v}\n" for k, v in canonical_items(cfg))


def config_digest(cfg: ExperimentConfig) -> str:
    return hashlib.sha256(canonical_text(cfg).encode("utf-8")).hexdigest()
