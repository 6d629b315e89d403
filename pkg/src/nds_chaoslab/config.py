"""Run configuration: TOML input, validation and a canonical TOML echo.

Every key lives in a dataclass field below; field metadata carries the
constraint checked by :func:`parse_config`.  All problems are collected and
reported together.
"""
from __future__ import annotations

import dataclasses
import math
import re
import sys
from dataclasses import dataclass, field, fields, replace

from .errors import ParseError, ValidationError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

EXPERIMENTS = ("simulate", "metrics", "classify", "kato", "iterate-check", "theorem", "preset")
THEOREMS = ("3.1", "3.2", "3.3", "3.4", "example", "question")
PRESETS = ("counterexample", "sequence-chaos", "logistic-invariance", "identity", "open-question")
SYSTEM_KINDS = ("autonomous", "explicit", "convergent", "counterexample")
SPACES = ("interval", "square", "shift1", "shift2")


def _c(check=None, choices=None, doc=""):
    return {"check": check, "choices": choices, "doc": doc}


def positive(v):
    return v > 0 or "must be positive"


def at_least_one(v):
    return v >= 1 or "must be >= 1"


def non_negative(v):
    return v >= 0 or "must be >= 0"


def unit_window(v):
    return 0 < v <= 1 or "must lie in (0, 1]"


def positive_list(v):
    return all(x > 0 for x in v) or "entries must be positive"


def at_least_one_list(v):
    return all(x >= 1 for x in v) or "entries must be >= 1"


@dataclass(frozen=True)
class SystemConfig:
    kind: str = field(default="autonomous", metadata=_c(choices=SYSTEM_KINDS))
    space: str = field(default="interval", metadata=_c(choices=SPACES))
    map: str = field(default="logistic:4", metadata=_c(doc="name[:param][^power]"))
    maps: tuple = field(default=(), metadata=_c(doc="map list for kind = explicit"))
    tail: str = field(default="repeat-last", metadata=_c(choices=("repeat-last", "cycle")))
    family: str = field(default="logistic", metadata=_c(choices=("logistic", "tent", "warped-logistic")))
    limit_param: float = field(default=4.0, metadata=_c(non_negative))
    rule: str = field(default="harmonic", metadata=_c(choices=("harmonic", "geometric", "constant")))
    scale: float = field(default=1.0, metadata=_c(non_negative))
    ratio: float = field(default=0.5, metadata=_c(lambda v: 0 < v < 1 or "must lie in (0, 1)"))
    iterate: int = field(default=1, metadata=_c(at_least_one))


@dataclass(frozen=True)
class PairsConfig:
    points: tuple = field(default=(), metadata=_c(doc="list of [x, y] (interval) or [[x1, x2], [y1, y2]]"))
    random: int = field(default=0, metadata=_c(non_negative))
    dc1_pair: bool = field(default=False, metadata=_c(doc="use the constructed shift pair"))
    family_size: int = field(default=8, metadata=_c(lambda v: v >= 2 or "must be >= 2",
                                                   doc="selector points in the sequence construction"))


@dataclass(frozen=True)
class HorizonConfig:
    n: int = field(default=5040, metadata=_c(at_least_one))
    window: float = field(default=0.5, metadata=_c(unit_window))
    k: tuple = field(default=(2, 3), metadata=_c(at_least_one_list, doc="iterate orders for theorem runs"))
    pairs: int = field(default=200, metadata=_c(at_least_one))
    n_max: int = field(default=10_000, metadata=_c(at_least_one))
    n_identity: int = field(default=500, metadata=_c(at_least_one))


@dataclass(frozen=True)
class ThresholdsConfig:
    eps_zero: float = field(default=0.05, metadata=_c(positive))
    one_tol: float = field(default=0.05, metadata=_c(positive))
    gap: float = field(default=0.2, metadata=_c(positive))
    eps_prox: float = field(default=1e-3, metadata=_c(positive))
    eps_sep: float = field(default=0.5, metadata=_c(positive))
    delta: float = field(default=0.25, metadata=_c(positive))
    epsilon: float = field(default=1e-3, metadata=_c(positive))
    preserve: float = field(default=0.9, metadata=_c(unit_window))
    dc3_variant: str = field(default="strict", metadata=_c(choices=("strict", "standard")))


@dataclass(frozen=True)
class GridConfig:
    t_min: float = field(default=0.01, metadata=_c(positive))
    count: int = field(default=64, metadata=_c(lambda v: v >= 2 or "must be >= 2"))
    checkpoints: tuple = field(default=(), metadata=_c(at_least_one_list))


@dataclass(frozen=True)
class ProbesConfig:
    count: int = field(default=64, metadata=_c(at_least_one))
    radius: float = field(default=0.01, metadata=_c(positive))
    samples: int = field(default=16, metadata=_c(lambda v: v >= 2 or "must be >= 2"))
    horizon: int = field(default=64, metadata=_c(at_least_one))
    access_probes: int = field(default=8, metadata=_c(lambda v: v >= 2 or "must be >= 2"))
    access_horizon: int = field(default=256, metadata=_c(at_least_one))
    access_samples: int = field(default=256, metadata=_c(at_least_one))


@dataclass(frozen=True)
class OutputConfig:
    svg: bool = field(default=False)
    xi_points: int = field(default=48, metadata=_c(at_least_one))


SECTIONS = {
    "system": SystemConfig,
    "pairs": PairsConfig,
    "horizon": HorizonConfig,
    "thresholds": ThresholdsConfig,
    "grid": GridConfig,
    "probes": ProbesConfig,
    "output": OutputConfig,
}


@dataclass(frozen=True)
class RunConfig:
    seed: int = field(default=0, metadata=_c(non_negative))
    output_dir: str = field(default="nds_out")
    experiment: str = field(default="classify", metadata=_c(choices=EXPERIMENTS))
    theorem: str = field(default="example", metadata=_c(choices=THEOREMS))
    preset: str = field(default="counterexample", metadata=_c(choices=PRESETS))
    system: SystemConfig = field(default_factory=SystemConfig)
    pairs: PairsConfig = field(default_factory=PairsConfig)
    horizon: HorizonConfig = field(default_factory=HorizonConfig)
    thresholds: ThresholdsConfig = field(default_factory=ThresholdsConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    probes: ProbesConfig = field(default_factory=ProbesConfig)
    output: OutputConfig = field(default_factory=OutputConfig)


TOP_KEYS = tuple(f.name for f in fields(RunConfig) if f.name not in SECTIONS)


# ---------------------------------------------------------------------------
# suggestions
# ---------------------------------------------------------------------------

def edit_distance(a: str, b: str) -> int:
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def suggest(word, options, max_distance=2):
    scored = sorted((edit_distance(word, o), o) for o in options)
    if scored and scored[0][0] <= max_distance:
        return scored[0][1]
    return None


# ---------------------------------------------------------------------------
# coercion and validation
# ---------------------------------------------------------------------------

def _kind(f):
    t = f.type if isinstance(f.type, str) else getattr(f.type, "__name__", str(f.type))
    return t


def _coerce(value, kind, name):
    """Value of the declared kind or a problem message."""
    if kind == "bool":
        if isinstance(value, bool):
            return value
        return ValueError(f"expected true or false, got {value!r}")
    if kind == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            if isinstance(value, float) and value.is_integer():
                return int(value)
            return ValueError(f"expected an integer, got {value!r}")
        return value
    if kind == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            return ValueError(f"expected a number, got {value!r}")
        if not math.isfinite(value):
            return ValueError("must be finite")
        return float(value)
    if kind == "str":
        if not isinstance(value, str):
            return ValueError(f"expected a string, got {value!r}")
        return value
    if kind == "tuple":
        if not isinstance(value, (list, tuple)):
            return ValueError(f"expected a list, got {value!r}")
        return _freeze(value)
    return value


def _freeze(v):
    if isinstance(v, (list, tuple)):
        return tuple(_freeze(x) for x in v)
    return v


def _validate_section(cls, data, prefix, problems):
    known = {f.name: f for f in fields(cls)}
    values = {}
    for key, raw in data.items():
        path = f"{prefix}{key}"
        if key not in known:
            hint = suggest(key, known)
            problems.append((path, "unknown key" + (f"; did you mean '{hint}'?" if hint else "")))
            continue
        f = known[key]
        if f.name in SECTIONS and prefix == "":
            continue
        v = _coerce(raw, _kind(f), path)
        if isinstance(v, ValueError):
            problems.append((path, str(v)))
            continue
        meta = f.metadata or {}
        choices = meta.get("choices")
        if choices and v not in choices:
            hint = suggest(str(v), choices)
            problems.append((path, f"must be one of {', '.join(choices)}"
                             + (f"; did you mean '{hint}'?" if hint else "")))
            continue
        check = meta.get("check")
        if check is not None:
            try:
                ok = check(v)
            except TypeError:
                ok = "has entries of the wrong type"
            if ok is not True:
                problems.append((path, ok))
                continue
        values[key] = v
    return values


def _semantic_checks(cfg, problems):
    from .maps import parse_map

    s = cfg.system
    for path, text in [("system.map", s.map)] + [(f"system.maps[{i}]", m) for i, m in enumerate(s.maps)]:
        if path == "system.map" and s.kind != "autonomous" and s.kind != "counterexample":
            continue
        if path != "system.map" and s.kind != "explicit":
            continue
        try:
            parse_map(str(text))
        except (ValueError, TypeError) as exc:
            problems.append((path, str(exc)))
    if s.kind == "explicit" and not s.maps:
        problems.append(("system.maps", "an explicit system needs at least one map"))
    if cfg.thresholds.eps_prox > cfg.thresholds.eps_sep:
        problems.append(("thresholds.eps_prox", "must not exceed thresholds.eps_sep"))
    for i, pr in enumerate(cfg.pairs.points):
        if not (isinstance(pr, tuple) and len(pr) == 2):
            problems.append((f"pairs.points[{i}]", "each entry is a pair [x, y]"))


def build_config(data: dict) -> RunConfig:
    """Validate a parsed mapping; raise ValidationError listing every problem."""
    problems = []
    top = {k: v for k, v in data.items() if k not in SECTIONS}
    top_vals = _validate_section(RunConfig, top, "", problems)
    sections = {}
    for name, cls in SECTIONS.items():
        raw = data.get(name, {})
        if not isinstance(raw, dict):
            problems.append((name, "must be a table"))
            raw = {}
        sections[name] = cls(**_validate_section(cls, raw, f"{name}.", problems))
    cfg = RunConfig(**top_vals, **sections)
    _semantic_checks(cfg, problems)
    if problems:
        raise ValidationError(problems)
    return cfg


def parse_config(text: str) -> RunConfig:
    """TOML text -> RunConfig with defaults filled in."""
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        line = getattr(exc, "lineno", None)
        col = getattr(exc, "colno", None)
        msg = getattr(exc, "msg", str(exc))
        if line is None:
            m = re.search(r"line (\d+), column (\d+)", str(exc))
            if m:
                line, col = int(m.group(1)), int(m.group(2))
            msg = re.sub(r"\s*\(at .*\)$", "", str(exc))
        raise ParseError(msg, line, col) from None
    return build_config(data)


def override(cfg: RunConfig, path: str, raw) -> dict:
    """Mapping form of cfg with one dotted key replaced (validated by build_config)."""
    data = to_mapping(cfg)
    if "." in path:
        sec, key = path.split(".", 1)
        data.setdefault(sec, {})[key] = raw
    else:
        data[path] = raw
    return data


def to_mapping(cfg: RunConfig) -> dict:
    out = {}
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        if dataclasses.is_dataclass(v):
            out[f.name] = {g.name: _thaw(getattr(v, g.name)) for g in fields(v)}
        else:
            out[f.name] = _thaw(v)
    return out


def _thaw(v):
    if isinstance(v, tuple):
        return [_thaw(x) for x in v]
    return v


# ---------------------------------------------------------------------------
# TOML echo
# ---------------------------------------------------------------------------

def _toml_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else ("inf" if v > 0 else "-inf")
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    raise TypeError(f"cannot write {v!r} as TOML")


def dump_config(cfg: RunConfig) -> str:
    """Canonical TOML text of the effective configuration (round-trips through parse_config)."""
    data = to_mapping(cfg)
    lines = [f"{k} = {_toml_value(data[k])}" for k in TOP_KEYS]
    for name in SECTIONS:
        lines.append("")
        lines.append(f"[{name}]")
        lines += [f"{k} = {_toml_value(v)}" for k, v in data[name].items()]
    return "\n".join(lines) + "\n"


def field_specs():
    """(dotted key, kind, choices) for every configuration key; used to build CLI flags."""
    out = []
    for f in fields(RunConfig):
        if f.name in SECTIONS:
            for g in fields(SECTIONS[f.name]):
                out.append((f"{f.name}.{g.name}", _kind(g), (g.metadata or {}).get("choices")))
        else:
            out.append((f.name, _kind(f), (f.metadata or {}).get("choices")))
    return out


def with_changes(cfg: RunConfig, **sections) -> RunConfig:
    """Copy with whole fields or sections replaced (for presets)."""
    return replace(cfg, **sections)
