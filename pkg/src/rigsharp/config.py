"""Experiment configuration: strict TOML schema and named presets.

A config has top-level keys plus one section per task::

    name = "theorem5"
    task = "sweep"            # sweep | couple | tv | bound | mindeg
    seed = 20261019
    threads = 1
    output = "results"        # optional; RIGSHARP_OUT or ./results otherwise

    [sweep]
    model = "rig"             # rig | gnp
    n = [1000]
    alpha = 2.0               # or m = 1000000
    k = 1
    properties = ["connectivity"]
    grid = [-6, -4, -2, -1, 0, 1, 2, 4, 6]
    samples = 300
    formula_k = 1             # optional: order used in the threshold formula
    exploratory = false

    [hamilton]                # optional, sweep only
    restarts = 20
    rotations_per_vertex = 100
    exact_n = 28
    exact_nodes = 2000000

Unknown keys, missing required keys and wrong types are errors that name
the offending field.
"""
from __future__ import annotations

import copy
import sys

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

TASKS = ("sweep", "couple", "tv", "bound", "mindeg")

_NUM = (int, float)
# field -> (types, required)
_TOP = {
    "name": (str, True),
    "task": (str, True),
    "seed": (int, True),
    "threads": (int, False),
    "output": (str, False),
    "description": (str, False),
}
_SECTIONS = {
    "sweep": {
        "model": (str, True),
        "n": (list, True),
        "alpha": (_NUM, False),
        "m": (int, False),
        "k": (int, False),
        "properties": (list, True),
        "grid": (list, True),
        "samples": (int, True),
        "formula_k": (int, False),
        "exploratory": (bool, False),
    },
    "hamilton": {
        "restarts": (int, False),
        "rotations_per_vertex": (int, False),
        "exact_n": (int, False),
        "exact_nodes": (int, False),
    },
    "couple": {
        "n": (int, True),
        "alpha": (_NUM, False),
        "m": (int, False),
        "p": (_NUM, False),
        "property": (str, False),
        "k": (int, False),
        "omega": (_NUM, False),
        "omega_c": (_NUM, False),
        "regime": (str, False),
        "samples": (int, True),
    },
    "tv": {
        "n": (int, True),
        "law1": (str, True),
        "law2": (str, True),
    },
    "bound": {
        "mean": (_NUM, True),
        "t": (list, True),
        "poisson": (bool, False),
        "i": (int, False),
    },
    "mindeg": {
        "n": (int, True),
        "m": (int, True),
        "omega": (_NUM, True),
        "samples": (int, True),
    },
}


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the field."""


def _check_fields(where: str, data: dict, schema: dict) -> None:
    for key in data:
        if key not in schema:
            raise ConfigError(f"{where}: unknown field {key!r}")
    for key, (types, required) in schema.items():
        if key not in data:
            if required:
                raise ConfigError(f"{where}: missing required field {key!r}")
            continue
        val = data[key]
        if not isinstance(val, types) or (isinstance(val, bool) and types is not bool):
            raise ConfigError(f"{where}: field {key!r} has wrong type {type(val).__name__}")


def validate(cfg: dict) -> dict:
    """Check ``cfg`` against the schema and the target modules' preconditions; return it unchanged."""
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a table")
    allowed = dict(_TOP)
    allowed.update({s: (dict, False) for s in _SECTIONS})
    _check_fields("config", cfg, allowed)
    task = cfg["task"]
    if task not in TASKS:
        raise ConfigError(f"config: field 'task' must be one of {TASKS}, got {task!r}")
    if task not in cfg:
        raise ConfigError(f"config: missing section [{task}]")
    for sec in _SECTIONS:
        if sec in cfg:
            _check_fields(f"[{sec}]", cfg[sec], _SECTIONS[sec])
    if cfg["seed"] < 0 or cfg["seed"] >= 1 << 64:
        raise ConfigError("config: field 'seed' must be a 64-bit unsigned integer")
    if cfg.get("threads", 1) < 1:
        raise ConfigError("config: field 'threads' must be >= 1")
    sec = cfg[task]
    if task == "sweep":
        if sec["model"] not in ("rig", "gnp"):
            raise ConfigError("[sweep]: field 'model' must be 'rig' or 'gnp'")
        if not sec["grid"]:
            raise ConfigError("[sweep]: field 'grid' must be nonempty")
        if any(not isinstance(x, _NUM) or isinstance(x, bool) for x in sec["grid"]):
            raise ConfigError("[sweep]: field 'grid' must hold numbers")
        if sorted(sec["grid"]) != list(sec["grid"]):
            raise ConfigError("[sweep]: field 'grid' must be sorted")
        if not sec["n"] or any(not isinstance(x, int) or x < 2 for x in sec["n"]):
            raise ConfigError("[sweep]: field 'n' must be a nonempty list of integers >= 2")
        if not sec["properties"]:
            raise ConfigError("[sweep]: field 'properties' must be nonempty")
        from .thresholds import KINDS

        for prop in sec["properties"]:
            if prop not in KINDS:
                raise ConfigError(f"[sweep]: field 'properties' has unknown property {prop!r}")
        if sec["model"] == "rig" and "alpha" not in sec and "m" not in sec:
            raise ConfigError("[sweep]: field 'alpha' (or 'm') is required for model 'rig'")
        if sec.get("k", 1) < 1:
            raise ConfigError("[sweep]: field 'k' must be >= 1")
        if sec["samples"] < 0:
            raise ConfigError("[sweep]: field 'samples' must be >= 0")
    elif task == "couple":
        if "alpha" not in sec and "m" not in sec:
            raise ConfigError("[couple]: field 'alpha' (or 'm') is required")
        if "p" not in sec and "property" not in sec:
            raise ConfigError("[couple]: field 'p' (or 'property') is required")
        if sec["samples"] < 0:
            raise ConfigError("[couple]: field 'samples' must be >= 0")
    elif task == "bound":
        if not sec["t"] or any(not isinstance(x, _NUM) or x <= 0 for x in sec["t"]):
            raise ConfigError("[bound]: field 't' must be a nonempty list of positive numbers")
    elif task == "tv":
        if not 2 <= sec["n"] <= 5:
            raise ConfigError("[tv]: field 'n' must lie in 2..5")
    elif task == "mindeg":
        if sec["m"] >= sec["n"]:
            raise ConfigError("[mindeg]: field 'm' must be smaller than 'n' (alpha < 1)")
    return cfg


def loads(text: str) -> dict:
    try:
        cfg = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config: TOML syntax error: {exc}") from exc
    return validate(cfg)


def load(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def dumps(cfg: dict) -> str:
    """Serialise a config back to TOML (flat scalars and lists only)."""
    def value(v):
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, str):
            return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
        if isinstance(v, list):
            return "[" + ", ".join(value(x) for x in v) + "]"
        return repr(v)

    lines = [f"{k} = {value(v)}" for k, v in cfg.items() if not isinstance(v, dict)]
    for k, v in cfg.items():
        if isinstance(v, dict):
            lines.append("")
            lines.append(f"[{k}]")
            lines.extend(f"{kk} = {value(vv)}" for kk, vv in v.items())
    return "\n".join(lines) + "\n"


DEFAULT_SEED = 20261019
DEFAULT_GRID = [-6, -4, -2, -1, 0, 1, 2, 4, 6]


def _sweep(name, desc, **sweep):
    base = {"model": "rig", "n": [1000], "alpha": 2.0, "k": 1, "grid": list(DEFAULT_GRID), "samples": 300}
    base.update(sweep)
    return {"name": name, "task": "sweep", "seed": DEFAULT_SEED, "description": desc, "sweep": base}


PRESETS = {
    "theorem5": _sweep("theorem5", "connectivity of the intersection graph, alpha=2",
                       properties=["connectivity"]),
    "theorem6": _sweep("theorem6", "perfect matching, alpha=2", properties=["perfect_matching"]),
    "theorem7": _sweep("theorem7", "2-connectivity and Hamilton cycle at p_2, alpha=2",
                       k=2, properties=["k_connectivity", "hamilton"]),
    "theorem7-k1": _sweep("theorem7-k1", "1-connectivity at p_1, alpha=2", k=1, properties=["k_connectivity"]),
    "theorem8": _sweep("theorem8", "2-connectivity and Hamilton cycle at p_2, alpha=0.75 (upper side)",
                       alpha=0.75, k=2, properties=["k_connectivity", "hamilton"]),
    "conjecture": _sweep("conjecture", "exploratory: Hamilton cycle at p_1, alpha=0.8",
                         alpha=0.8, k=2, properties=["hamilton"], formula_k=1, exploratory=True),
    "lemma7": {"name": "lemma7", "task": "mindeg", "seed": DEFAULT_SEED,
               "description": "minimum degree in units of n ln n / m, alpha~0.7",
               "mindeg": {"n": 2000, "m": 200, "omega": 3.0, "samples": 100}},
    "coupling-case1": {"name": "coupling-case1", "task": "couple", "seed": DEFAULT_SEED,
                       "description": "coupling, np -> 0 regime, alpha=2 at the connectivity threshold",
                       "couple": {"n": 300, "alpha": 2.0, "property": "connectivity", "k": 1, "omega": 0.0,
                                  "samples": 200}},
    "coupling-case2": {"name": "coupling-case2", "task": "couple", "seed": DEFAULT_SEED,
                       "description": "coupling, np -> infinity regime, alpha=2/3 at the connectivity threshold",
                       "couple": {"n": 1000, "alpha": 2.0 / 3.0, "property": "connectivity", "k": 1,
                                  "omega": 0.0, "samples": 200}},
    "fact1-tv": {"name": "fact1-tv", "task": "tv", "seed": DEFAULT_SEED,
                 "description": "G*(Po(1.3)) against G(4, 1 - exp(-1.3/6))",
                 "tv": {"n": 4, "law1": "poisson:1.3", "law2": "gnp:auto"}},
    "fact9-tv": {"name": "fact9-tv", "task": "tv", "seed": DEFAULT_SEED,
                 "description": "G*(Bin(2, 0.1)) against G(3, 1 - exp(-0.2/3))",
                 "tv": {"n": 3, "law1": "binomial:2:0.1", "law2": "gnp:auto"}},
    "chernoff": {"name": "chernoff", "task": "bound", "seed": DEFAULT_SEED,
                 "description": "binomial tail bound at mean 10 (Bin(1000, 0.01))",
                 "bound": {"mean": 10.0, "t": [5, 10, 20, 30]}},
}


def preset(name: str) -> dict:
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}")
    return validate(copy.deepcopy(PRESETS[name]))
