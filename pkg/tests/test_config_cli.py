import os
import subprocess
import sys
from pathlib import Path

import pytest

from nds_chaoslab import cli
from nds_chaoslab.config import (
    RunConfig,
    build_config,
    dump_config,
    edit_distance,
    override,
    parse_config,
    suggest,
)
from nds_chaoslab.errors import ParseError, ValidationError


def test_defaults():
    cfg = parse_config("")
    assert cfg == RunConfig()
    assert cfg.thresholds.eps_zero == 0.05 and cfg.grid.count == 64 and cfg.thresholds.dc3_variant == "strict"


def test_all_problems_reported():
    with pytest.raises(ValidationError) as info:
        parse_config("[horizon]\nn = -5\nwindow = 2.0\n[thresholds]\nepsilonn = 0.1\n")
    keys = [k for k, _ in info.value.problems]
    assert "horizon.n" in keys and "horizon.window" in keys
    msg = dict(info.value.problems)["thresholds.epsilonn"]
    assert "did you mean 'epsilon'?" in msg


def test_choice_suggestion():
    with pytest.raises(ValidationError) as info:
        build_config({"thresholds": {"dc3_variant": "strikt"}})
    assert "'strict'" in str(info.value)


def test_parse_error_location():
    with pytest.raises(ParseError) as info:
        parse_config("seed = 1\n[horizon\nn = 3\n")
    assert info.value.line == 2 and info.value.column is not None


def test_dump_round_trip():
    cfg = build_config({"seed": 7, "pairs": {"points": [[0.1, 0.2]]}, "grid": {"checkpoints": [24, 120]},
                        "system": {"kind": "explicit", "maps": ["tent:2", "doubling"], "tail": "cycle"}})
    assert parse_config(dump_config(cfg)) == cfg


def test_override_is_validated():
    cfg = RunConfig()
    assert build_config(override(cfg, "horizon.n", 12)).horizon.n == 12
    with pytest.raises(ValidationError):
        build_config(override(cfg, "horizon.n", 0))


def test_edit_distance():
    assert edit_distance("epsilonn", "epsilon") == 1
    assert edit_distance("", "abc") == 3
    assert suggest("epsilonn", ["epsilon", "eps_zero"]) == "epsilon"
    assert suggest("zzzzzz", ["epsilon"]) is None


def run_cli(*argv):
    return cli.main(list(argv))


def test_classify_writes_tables(tmp_path):
    out = tmp_path / "o"
    code = run_cli("classify", "--map", "logistic:4", "--points", "[[0.1, 0.7]]", "--n", "500", "-o", str(out),
                   "--svg", "true")
    assert code == 0
    for name in ("config.toml", "report.txt", "profiles.csv", "xi.csv", "estimates.csv", "verdicts.csv",
                 "p0_estimates.svg", "p0_xi.svg"):
        assert (out / name).exists(), name
    rows = (out / "profiles.csv").read_text().splitlines()
    assert rows[0] == "pair_id,i,d_i" and len(rows) == 501
    assert parse_config((out / "config.toml").read_text()).horizon.n == 500


def test_xi_rows_recomputable(tmp_path):
    out = tmp_path / "o"
    assert run_cli("metrics", "--points", "[[0.2, 0.25]]", "--n", "300", "-o", str(out)) == 0
    d = [float(r.split(",")[2]) for r in (out / "profiles.csv").read_text().splitlines()[1:]]
    for row in (out / "xi.csv").read_text().splitlines()[1:40]:
        _, n, t, xi, delta = row.split(",")
        n, t = int(n), float(t)
        c = sum(1 for v in d[:n] if v < t)
        assert float(xi) == c / n and float(delta) == (n - c) / n


def test_bad_config_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text("[horizon]\nn = -1\n[thresholds]\nepsilonn = 1\n")
    assert run_cli("classify", "--config", str(bad), "-o", str(tmp_path / "x")) == 2
    err = capsys.readouterr().err
    assert "horizon.n" in err and "did you mean 'epsilon'?" in err
    assert not (tmp_path / "x").exists()


def test_parse_error_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text("seed = = 3\n")
    assert run_cli("classify", "--config", str(bad)) == 2
    assert "line 1" in capsys.readouterr().err


def test_unmet_exit_codes(tmp_path):
    args = ["theorem", "3.1", "--kind", "convergent", "--family", "warped-logistic", "--n", "200",
            "--horizon-pairs", "4", "-o", str(tmp_path / "u")]
    assert run_cli(*args) == 0
    assert "status hypothesis-unmet" in (tmp_path / "u" / "report.txt").read_text()
    assert run_cli(*args, "--strict-hypotheses") == 3


def test_flag_overrides_config(tmp_path):
    cfg_file = tmp_path / "c.toml"
    cfg_file.write_text("seed = 4\n[horizon]\nn = 100\n")
    args = cli.build_parser().parse_args(["simulate", "--config", str(cfg_file), "--n", "50"])
    cfg = cli.resolve_config(args, environ={})
    assert cfg.seed == 4 and cfg.horizon.n == 50 and cfg.experiment == "simulate"


def test_seed_env(tmp_path):
    args = cli.build_parser().parse_args(["simulate"])
    assert cli.resolve_config(args, environ={cli.SEED_ENV: "11"}).seed == 11
    args = cli.build_parser().parse_args(["simulate", "--seed", "3"])
    assert cli.resolve_config(args, environ={cli.SEED_ENV: "11"}).seed == 3


def test_seed_changes_random_pairs(tmp_path):
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    for out, seed in ((a, "1"), (b, "1"), (c, "2")):
        assert run_cli("simulate", "--random", "2", "--n", "50", "--seed", seed, "-o", str(out)) == 0
    pa, pb, pc = ((d / "profiles.csv").read_bytes() for d in (a, b, c))
    assert pa == pb and pa != pc


def test_console_script_module(tmp_path):
    env = dict(os.environ, NDS_CHAOSLAB_SEED="5")
    r = subprocess.run([sys.executable, "-m", "nds_chaoslab.cli", "simulate", "--random", "1", "--n", "20",
                        "-o", str(tmp_path / "m")], capture_output=True, text=True, env=env)
    assert r.returncode == 0, r.stderr
    assert "seed = 5" in Path(tmp_path / "m" / "config.toml").read_text()


def test_no_prefix_matching():
    with pytest.raises(SystemExit):
        cli.build_parser().parse_args(["simulate", "--horizon-pair", "4"])
