"""JSON experiment configs.

Schema (version 1)::

    {
      "version": 1,
      "manifold": {"kind": "torus", "dim": 2},          # or {"kind": "sphere"}
      "window": {"a": 1.0, "D": 6.0},
      "h": [0.1]          or  "h_inv": [20, 80, 320],   # strictly decreasing h
      "submanifold": {"kind": "torus_line", "direction": [1, 0], "closed": true},
      "p": [1, 2, 3], "q": [2, 4, 6],
      "samples": 100000, "seed": 7, "workers": 1,
      "lq_samples": 2000,            # optional, Monte Carlo size for L^q runs
      "r_points": 20, "lambda_points": 50, "sweep_mc_samples": 0
    }

Unknown keys anywhere in the top level, manifold or window blocks raise
ConfigError; submanifold parameters are checked by ``build_submanifold``.
"""
import json
from fractions import Fraction

from .curves import build_submanifold
from .errors import ConfigError, RandPeriodsError
from .experiments import ExperimentConfig
from .spectral import Manifold, SpectralWindow

__all__ = ["SCHEMA_VERSION", "load_config", "parse_config", "parse_h", "config_to_dict"]

SCHEMA_VERSION = 1
_TOP = {"version", "manifold", "window", "h", "h_inv", "submanifold", "p", "q", "samples", "seed",
        "workers", "lq_samples", "r_points", "lambda_points", "sweep_mc_samples"}
_DEFAULTS = {"p": [1, 2, 3], "q": [2, 4, 6], "samples": 100_000, "seed": 0, "workers": 1,
             "r_points": 20, "lambda_points": 50, "sweep_mc_samples": 0}


def parse_h(value):
    """A float, or a fraction string such as "1/320".

    >>> parse_h("1/320")
    0.003125
    >>> parse_h("1/12.5")
    0.08
    """
    if isinstance(value, str):
        try:
            num, _, den = value.strip().partition("/")
            return float(Fraction(num) / Fraction(den)) if den else float(Fraction(num))
        except (ValueError, ZeroDivisionError) as e:
            raise ConfigError(f"cannot parse h value {value!r}") from e
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"h values must be numbers or fraction strings, got {value!r}")
    return float(value)


def _check_keys(block, allowed, where):
    if not isinstance(block, dict):
        raise ConfigError(f"{where} must be an object")
    extra = set(block) - allowed
    if extra:
        raise ConfigError(f"unknown keys in {where}: {sorted(extra)}")


def _manifold(block):
    _check_keys(block, {"kind", "dim"}, "manifold")
    kind = block.get("kind")
    if kind == "torus":
        return Manifold.torus(int(block.get("dim", 2)))
    if kind == "sphere":
        if block.get("dim", 2) != 2:
            raise ConfigError("only the 2-sphere is supported")
        return Manifold.sphere()
    raise ConfigError(f"manifold kind must be 'torus' or 'sphere', got {kind!r}")


def _h_list(raw):
    if "h" in raw and "h_inv" in raw:
        raise ConfigError("give either 'h' or 'h_inv', not both")
    if "h_inv" in raw:
        vals = raw["h_inv"]
        vals = vals if isinstance(vals, list) else [vals]
        return tuple(1.0 / parse_h(v) for v in vals)
    if "h" not in raw:
        raise ConfigError("config needs an 'h' or 'h_inv' list")
    vals = raw["h"] if isinstance(raw["h"], list) else [raw["h"]]
    return tuple(parse_h(v) for v in vals)


def _int_list(value, name):
    vals = value if isinstance(value, list) else [value]
    try:
        return tuple(int(v) for v in vals)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{name} must be a list of integers") from e


def parse_config(raw):
    """Dict -> (ExperimentConfig, extras) where extras holds the keys not on the config object."""
    _check_keys(raw, _TOP, "config")
    version = raw.get("version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported config version {version}; expected {SCHEMA_VERSION}")
    for key in ("manifold", "window", "submanifold"):
        if key not in raw:
            raise ConfigError(f"config is missing '{key}'")
    manifold = _manifold(raw["manifold"])
    _check_keys(raw["window"], {"a", "D"}, "window")
    sub_block = dict(raw["submanifold"])
    if "kind" not in sub_block:
        raise ConfigError("submanifold needs a 'kind'")
    merged = {**_DEFAULTS, **raw}
    try:
        window = SpectralWindow(float(raw["window"].get("a", 1.0)), float(raw["window"].get("D", 6.0)))
        sub = build_submanifold(sub_block.pop("kind"), **sub_block)
        config = ExperimentConfig(
            manifold=manifold, window=window, h=_h_list(raw), submanifold=sub,
            p=_int_list(merged["p"], "p"), q=_int_list(merged["q"], "q"),
            samples=int(merged["samples"]), seed=int(merged["seed"]), workers=int(merged["workers"]),
            r_points=int(merged["r_points"]), lambda_points=int(merged["lambda_points"]),
            sweep_mc_samples=int(merged["sweep_mc_samples"]),
        )
    except ConfigError:
        raise
    except (RandPeriodsError, KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"invalid config: {e}") from e
    extras = {"lq_samples": int(raw["lq_samples"]) if "lq_samples" in raw else None}
    return config, extras


def load_config(path):
    try:
        with open(path, encoding="utf-8") as f:
            raw = json.load(f)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {path} is not valid JSON: {e}") from e
    return raw


def config_to_dict(raw):
    """Normalized echo of a raw config for the run manifest."""
    out = {**_DEFAULTS, **raw}
    out["version"] = SCHEMA_VERSION
    return out
