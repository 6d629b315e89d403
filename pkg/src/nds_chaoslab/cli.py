"""Command line entry point: ``nds-chaoslab <command> [options]``.

Settings are layered: defaults, then the preset, then ``--config``, then
``NDS_CHAOSLAB_SEED``, then flags.  Every configuration key has a flag
``--<section>-<key>`` (and ``--<key>`` when the key name is unique).

Exit codes: 0 all graded experiments pass, 1 a failure, 2 a configuration
error, 3 an unmet hypothesis under ``--strict-hypotheses``.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .catalog import build_counterexample, dc1_pair_for_shift
from .config import (
    PRESETS,
    SECTIONS,
    THEOREMS,
    RunConfig,
    build_config,
    dump_config,
    field_specs,
    parse_config,
    tomllib,
)
from .dynamics import (
    Autonomous,
    ConvergentFamily,
    ExplicitList,
    NDSystem,
    ParameterRule,
    iterate_system,
)
from .errors import NDSError, ParseError, ValidationError
from .harness import (
    EXPLORATORY,
    FAIL,
    UNMET,
    Check,
    PairRecord,
    _report,
    check_iterate_consistency,
    random_symbolic_point,
    run_dc2prime_invariance,
    run_dc3_counterexample,
    run_kato_invariance,
    run_liyorke_invariance,
    run_open_question_probe,
    run_sequence_chaos_construction,
)
from .io import kato_rows, write_csv, write_svgs, write_tables, write_text
from .kato import KatoParams, kato_verdict, probe_grid
from .maps import parse_map
from .metrics import classify_pair, default_t_grid, distribution_estimate, li_yorke_test, pair_profile
from .spaces import Space

SEED_ENV = "NDS_CHAOSLAB_SEED"

PRESET_SETTINGS = {
    "counterexample": {"theorem": "example",
                       "system": {"kind": "counterexample", "space": "shift2", "map": "shift"},
                       "horizon": {"n": 5040}},
    "sequence-chaos": {"theorem": "3.4", "system": {"space": "shift1", "map": "shift"},
                       "horizon": {"n": 5040}},
    "logistic-invariance": {"theorem": "3.1",
                            "system": {"kind": "convergent", "family": "logistic", "limit_param": 4.0},
                            "horizon": {"n": 100_000, "k": [2], "pairs": 200}},
    "identity": {"system": {"map": "id"},
                 "pairs": {"points": [[0.2, 0.7], [0.1, 0.15]], "random": 4},
                 "horizon": {"n": 1000}},
    "open-question": {"theorem": "question",
                      "system": {"kind": "convergent", "family": "warped-logistic", "limit_param": 4.0},
                      "horizon": {"n": 10_000, "k": [2, 3], "pairs": 20}},
}


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _flag_names():
    specs = [s for s in field_specs() if s[0] not in ("experiment", "theorem", "preset")]
    leaf = {}
    for key, _, _ in specs:
        leaf.setdefault(key.rsplit(".", 1)[-1], []).append(key)
    out = []
    for key, kind, choices in specs:
        names = ["--" + key.replace(".", "-").replace("_", "-")]
        short = key.rsplit(".", 1)[-1]
        if "." in key and len(leaf[short]) == 1 and short not in SECTIONS:
            names.append("--" + short.replace("_", "-"))
        out.append((key, kind, choices, names))
    return out


def _common_parser():
    p = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    g = p.add_argument_group("configuration")
    g.add_argument("--config", type=Path, help="TOML run configuration")
    g.add_argument("-o", dest="output_dir_short", metavar="DIR", help="output directory")
    g.add_argument("--strict-hypotheses", action="store_true", help="exit 3 when a hypothesis is unmet")
    for key, kind, choices, names in _flag_names():
        g.add_argument(*names, dest="set:" + key, metavar={"tuple": "LIST"}.get(kind, kind.upper()),
                       help=f"{key}" + (f" ({'|'.join(choices)})" if choices else ""))
    return p


def build_parser():
    common = _common_parser()
    ap = argparse.ArgumentParser(prog="nds-chaoslab", allow_abbrev=False, description="Chaos and iteration in non-autonomous systems.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], allow_abbrev=False, help="orbit distance profiles for the configured pairs")
    sub.add_parser("metrics", parents=[common], allow_abbrev=False, help="profiles and distribution estimates")
    sub.add_parser("classify", parents=[common], allow_abbrev=False, help="Li-Yorke and DC verdicts per pair")
    sub.add_parser("kato", parents=[common], allow_abbrev=False, help="sensitivity and accessibility on a probe grid")
    sub.add_parser("iterate-check", parents=[common], allow_abbrev=False, help="bitwise iterate/orbit consistency")
    th = sub.add_parser("theorem", parents=[common], allow_abbrev=False, help="run one invariance experiment")
    th.add_argument("id", choices=THEOREMS)
    pr = sub.add_parser("preset", parents=[common], allow_abbrev=False, help="run a packaged experiment")
    pr.add_argument("name", choices=PRESETS)
    return ap


def _parse_flag(raw, kind):
    if kind == "str":
        return raw
    try:
        return tomllib.loads(f"v = {raw}")["v"]
    except tomllib.TOMLDecodeError:
        if kind == "tuple":
            try:
                return tomllib.loads(f"v = [{raw}]")["v"]
            except tomllib.TOMLDecodeError:
                pass
        return raw  # rejected with a proper message by validation


def _merge(base, extra):
    out = dict(base)
    for k, v in extra.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def resolve_config(args, environ=None) -> RunConfig:
    environ = os.environ if environ is None else environ
    data = {}
    if args.command == "preset":
        data = _merge(PRESET_SETTINGS[args.name], {"experiment": "preset", "preset": args.name})
    if args.config is not None:
        try:
            text = args.config.read_text(encoding="utf-8")
        except OSError as exc:
            raise ValidationError([("config", f"cannot read {args.config}: {exc.strerror}")]) from None
        try:
            file_data = tomllib.loads(text)
        except tomllib.TOMLDecodeError:
            parse_config(text)  # raises ParseError with the position
            raise
        data = _merge(data, file_data)
    if args.command == "preset":
        data["experiment"], data["preset"] = "preset", args.name
        if "theorem" in PRESET_SETTINGS[args.name]:
            data["theorem"] = PRESET_SETTINGS[args.name]["theorem"]
    elif args.command == "theorem":
        data["experiment"], data["theorem"] = "theorem", args.id
    else:
        data["experiment"] = args.command
    if SEED_ENV in environ:
        data["seed"] = _parse_flag(environ[SEED_ENV], "int")
    kinds = {key: kind for key, kind, _ in field_specs()}
    for dest, raw in vars(args).items():
        if not dest.startswith("set:") or raw is None:
            continue
        key = dest[4:]
        value = _parse_flag(raw, kinds[key])
        if "." in key:
            sec, leaf = key.split(".", 1)
            data = _merge(data, {sec: {leaf: value}})
        else:
            data[key] = value
    if args.output_dir_short is not None:
        data["output_dir"] = args.output_dir_short
    return build_config(data)


# ---------------------------------------------------------------------------
# construction from a config
# ---------------------------------------------------------------------------

def build_system(cfg: RunConfig) -> NDSystem:
    s = cfg.system
    space = Space(s.space)
    if s.kind == "autonomous":
        sys_ = NDSystem(space, Autonomous(parse_map(s.map)))
    elif s.kind == "explicit":
        sys_ = NDSystem(space, ExplicitList(tuple(parse_map(m) for m in s.maps), s.tail))
    elif s.kind == "convergent":
        sys_ = NDSystem(space, ConvergentFamily(s.family, s.limit_param, ParameterRule(s.rule, s.scale, s.ratio)))
    else:
        sys_ = build_counterexample(parse_map(s.map), space)
    return iterate_system(sys_, s.iterate) if s.iterate > 1 else sys_


def build_pairs(cfg: RunConfig, space):
    """[(pair_id, x, y)] from explicit points, random draws and the constructed shift pair."""
    pairs = []
    for j, (x, y) in enumerate(cfg.pairs.points):
        if space.symbolic:
            raise ValidationError([("pairs.points", "explicit points are for the interval and the square")])
        pairs.append((f"p{j}", space.point(x), space.point(y)))
    rng = np.random.default_rng(cfg.seed)
    for j in range(cfg.pairs.random):
        if space.symbolic:
            x = random_symbolic_point(rng, space.two_sided)
            y = random_symbolic_point(rng, space.two_sided)
        else:
            x, y = rng.random(space.dim), rng.random(space.dim)
        pairs.append((f"r{j}", space.point(x), space.point(y)))
    if cfg.pairs.dc1_pair:
        if not space.two_sided:
            raise ValidationError([("pairs.dc1_pair", "the constructed pair lives on shift2")])
        z, w = dc1_pair_for_shift(cfg.horizon.n)
        pairs.append(("dc1", z, w))
    if not pairs:
        raise ValidationError([("pairs", "no pairs: set pairs.points, pairs.random or pairs.dc1_pair")])
    return pairs


def kato_params(cfg: RunConfig) -> KatoParams:
    p, t = cfg.probes, cfg.thresholds
    return KatoParams(delta=t.delta, eps=t.epsilon, horizon=p.horizon, samples=p.samples, probes=p.count,
                      radius=p.radius, access_probes=p.access_probes, access_horizon=p.access_horizon,
                      access_samples=p.access_samples)


def _grid(cfg, space):
    return default_t_grid(space.diameter, cfg.grid.count, cfg.grid.t_min)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _pair_records(cfg, level):
    sys_ = build_system(cfg)
    th, h = cfg.thresholds, cfg.horizon
    grid = _grid(cfg, sys_.space)
    cps = list(cfg.grid.checkpoints) or None
    records, checks = [], []
    for pid, x, y in build_pairs(cfg, sys_.space):
        prof = pair_profile(sys_, x, y, h.n)
        est = ver = None
        if level >= 1:
            est = distribution_estimate(prof, grid, h.window, cps)
        if level >= 2:
            ly = li_yorke_test(prof, th.eps_prox, th.eps_sep, h.window)
            ver = classify_pair(est, th.eps_zero, th.one_tol, th.gap, th.dc3_variant, ly)
            flags = ver.flags()
            checks.append(Check(pid, None, ", ".join(f"{k} {v}" for k, v in flags.items())))
        else:
            checks.append(Check(pid, None, f"min {prof.distances.min():.6g}, max {prof.distances.max():.6g}"))
        records.append(PairRecord(pid, sys_.describe(), prof, est, ver))
    return sys_, records, checks


def _params(cfg):
    h, t = cfg.horizon, cfg.thresholds
    return dict(N=h.n, window=h.window, seed=cfg.seed, eps_zero=t.eps_zero, one_tol=t.one_tol, gap=t.gap,
                eps_prox=t.eps_prox, eps_sep=t.eps_sep, dc3_variant=t.dc3_variant)


def run_pairs(cfg, level):
    sys_, records, checks = _pair_records(cfg, level)
    name = ("simulate", "metrics", "classify")[level]
    return [_report(name, sys_.describe(), _params(cfg), checks, EXPLORATORY, records)], {}


def run_identity(cfg):
    """Preset: the identity shows no chaos of any kind."""
    sys_, records, checks = _pair_records(cfg, 2)
    none = all(not any(r.verdict.flags().values()) for r in records)
    kato = kato_verdict(sys_, kato_params(cfg))
    checks.append(Check("no pair verdict is true", none, f"{len(records)} pairs"))
    checks.append(Check("not Kato chaotic", not kato.flag,
                        f"worst probe separation {kato.sensitivity.worst_separation:.6g}"))
    return [_report("identity", sys_.describe(), _params(cfg), checks, records=records)], {}


def run_kato(cfg):
    sys_ = build_system(cfg)
    params = kato_params(cfg)
    res = kato_verdict(sys_, params)
    acc = [r.flag for _, _, r in res.accessibility]
    checks = [
        Check("sensitive", None, f"{res.sensitive}; worst probe {res.sensitivity.worst_probe} separation "
                                 f"{res.sensitivity.worst_separation:.6g} (delta {params.delta})"),
        Check("accessible", None, f"{res.accessible} on {sum(acc)}/{len(acc)} probe pairs tested"),
        Check("kato", None, str(res.flag)),
    ]
    probes = probe_grid(sys_.space, params.probes, params.radius)
    rep = _report("kato", sys_.describe(), dict(vars(params)), checks, EXPLORATORY)
    return [rep], {"kato.csv": (("probe", "center", "radius", "separation", "sensitive"), kato_rows(res, probes))}


def run_theorem(cfg, which):
    h, t = cfg.horizon, cfg.thresholds
    if which == "example":
        return [run_dc3_counterexample(h.n, h.n_identity, seed=cfg.seed, eps_zero=t.eps_zero, one_tol=t.one_tol,
                                       gap=t.gap, eps_prox=t.eps_prox, eps_sep=t.eps_sep)]
    if which == "3.4":
        return [run_sequence_chaos_construction(cfg.pairs.family_size, h.n, cfg.seed)]
    sys_ = build_system(cfg)
    if which == "3.1":
        return [run_liyorke_invariance(sys_, k, h.pairs, h.n, t.eps_prox, t.eps_sep, h.window, t.preserve,
                                       seed=cfg.seed) for k in h.k]
    if which == "3.2":
        return [run_dc2prime_invariance(sys_, k, n_max=h.n_max, eps_zero=t.eps_zero, one_tol=t.one_tol,
                                        window=h.window, seed=cfg.seed) for k in h.k]
    if which == "3.3":
        return [run_kato_invariance(sys_, tuple(h.k), kato_params(cfg))]
    return [run_open_question_probe(sys_, tuple(h.k), h.n, h.pairs, cfg.seed, t.eps_zero, t.one_tol, t.gap,
                                    h.window)]


def execute(cfg: RunConfig):
    """Run the configured experiment; returns (reports, extra tables)."""
    exp = cfg.experiment
    if exp == "preset":
        if cfg.preset == "identity":
            return run_identity(cfg)
        return run_theorem(cfg, cfg.theorem), {}
    if exp in ("simulate", "metrics", "classify"):
        return run_pairs(cfg, {"simulate": 0, "metrics": 1, "classify": 2}[exp])
    if exp == "kato":
        return run_kato(cfg)
    if exp == "iterate-check":
        return [check_iterate_consistency(build_system(cfg), N=cfg.horizon.n, starts=cfg.horizon.pairs,
                                          seed=cfg.seed)], {}
    return run_theorem(cfg, cfg.theorem), {}


def exit_code(reports, strict=False):
    statuses = [r.status for r in reports]
    if FAIL in statuses:
        return 1
    if strict and UNMET in statuses:
        return 3
    return 0


def write_outputs(cfg, reports, extra):
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_text(out / "config.toml", dump_config(cfg))
    write_text(out / "report.txt", "\n".join(r.to_text() for r in reports))
    records = [rec for r in reports for rec in r.records]
    if records:
        write_tables(out, records, cfg.output.xi_points)
        if cfg.output.svg:
            write_svgs(out, records, cfg.output.xi_points)
    for name, (header, rows) in extra.items():
        write_csv(out / name, header, rows)
    return out


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
    except ParseError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        print("configuration error:", file=sys.stderr)
        for key, msg in exc.problems:
            print(f"  {key}: {msg}", file=sys.stderr)
        return 2
    try:
        reports, extra = execute(cfg)
    except ValidationError as exc:
        for key, msg in exc.problems:
            print(f"configuration error: {key}: {msg}", file=sys.stderr)
        return 2
    except (NDSError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    out = write_outputs(cfg, reports, extra)
    for r in reports:
        print(f"{r.theorem}: {r.status}")
    print(f"outputs in {out}")
    return exit_code(reports, args.strict_hypotheses)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
