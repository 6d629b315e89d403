"""Acceptance criteria.

Each test records one line in conftest.CRITERIA, printed in the terminal
summary as ``criterion N: PASS|FAIL detail``, then asserts.
"""
import math
from fractions import Fraction

import numpy as np

from nds_chaoslab import cli
from nds_chaoslab.catalog import (
    BlockSchedule,
    build_counterexample,
    dc1_pair_for_shift,
    full_shift,
    nested_balls,
    sample_E,
    selector_point,
)
from nds_chaoslab.config import PRESETS
from nds_chaoslab.dynamics import (
    ConvergentFamily,
    ExplicitList,
    NDSystem,
    ParameterRule,
    autonomous,
    identity_system,
)
from nds_chaoslab.harness import (
    PASS,
    check_iterate_consistency,
    run_dc2prime_invariance,
    run_dc3_counterexample,
    run_kato_invariance,
    run_liyorke_invariance,
    run_sequence_chaos_construction,
    warped_family,
)
from nds_chaoslab.kato import KatoParams, OpenSetProbe, accessibility_test, probe_grid, sensitivity_test
from nds_chaoslab.maps import Doubling, Logistic, Shift, Tent, apply_map
from nds_chaoslab.metrics import (
    _make_profile,
    delta_n,
    distribution_estimate,
    pair_profile,
    xi_n,
)
from nds_chaoslab.spaces import INTERVAL
from nds_chaoslab.symbolic import constant

from conftest import CRITERIA


def record(num, ok, detail):
    CRITERIA[num] = (bool(ok), detail)
    assert ok, detail


def logistic_family():
    return NDSystem(INTERVAL, ConvergentFamily("logistic", 4.0, ParameterRule("harmonic")))


def _failed(rep):
    return [f"{c.name}: {c.detail}" for c in rep.checks if c.passed is False]


# ---- independent shift-space oracles -------------------------------------------
# Both test pairs are piecewise constant on known runs, so each distance is a
# finite sum of exact geometric series.

INF = None


def _weight(a, b, two_sided):
    """Sum of 2^-(|i|+1) over integers i in [a, b); b = INF for an unbounded run."""
    total = Fraction(0)
    if two_sided and a < 0:
        hi = 0 if b is INF or b > 0 else b
        # |i| runs over 1 - hi .. -a
        total += Fraction(1, 2 ** (1 - hi)) - Fraction(1, 2 ** (1 - a))
        if b is not INF and b <= 0:
            return total
        a = 0
    if not two_sided:
        # positions left of 0 are dropped by the one-sided shift
        if b is not INF and b <= 0:
            return total
        a = max(a, 0)
    if b is INF:
        return total + Fraction(1, 2 ** a)
    if b > a:
        total += Fraction(1, 2 ** a) - Fraction(1, 2 ** b)
    return total


def _runs_distance(runs, c, two_sided):
    """d(sigma^c x, sigma^c y) when x, y differ exactly on the runs [a, b)."""
    return float(sum((_weight(a - c, b if b is INF else b - c, two_sided) for a, b in runs), Fraction(0)))


def _one_sided_profile(runs, times):
    """d(sigma^t x, sigma^t y) for increasing t on the one-sided shift.

    S(t) = sum over differing positions j >= t of 2^-(j+1), kept as an integer
    numerator over 2^L; the distance is 2^t S(t).
    """
    times = list(times)
    L = max([a for a, _ in runs] + [b for _, b in runs if b is not INF] + times) + 1
    def num(a, b):
        return (1 << (L - a)) - (0 if b is INF else 1 << (L - b))
    total = sum(num(a, b) for a, b in runs)
    out, before, r = [], 0, 0
    for t in times:
        while r < len(runs) and runs[r][1] is not INF and runs[r][1] <= t:
            before += num(*runs[r])
            r += 1
        part = num(runs[r][0], t) if r < len(runs) and runs[r][0] < t else 0
        out.append(float(Fraction(total - before - part, 1 << (L - t))))
    return np.array(out)


def _counterexample_offsets(N):
    """Net shift after i maps for i = 0..N-1: +(i+1) on odd i, -i on even i."""
    out, c = [0], 0
    for i in range(1, N):
        c += (i + 1) if i % 2 else -i
        out.append(c)
    return out


# ---- 1 ----------------------------------------------------------------------------

def _preset_profiles():
    z, w = dc1_pair_for_shift(5040)
    E = sample_E(2, 5040, 0, (3, 4, 5, 6))
    A = nested_balls(constant(0, False), 0.5, "harmonic")
    B = nested_balls(constant(1, False), 0.5, "harmonic")
    (x0, p), (x1, _) = (selector_point(BlockSchedule.from_sequence(e), A, B) for e in E)
    rng = np.random.default_rng(1)
    a, b = rng.random(2)
    return {
        "counterexample": pair_profile(build_counterexample(), z, w, 5040),
        "sequence-chaos": pair_profile(full_shift(two_sided=False), x0, x1, 5040, p),
        "logistic-invariance": pair_profile(logistic_family(), [a], [b], 5000),
        "identity": pair_profile(identity_system(INTERVAL), [0.2], [0.7], 1000),
        "open-question": pair_profile(warped_family(), [a], [b], 5000),
    }


def test_criterion_1_complementarity():
    profs = _preset_profiles()
    names = sorted(profs)
    rng = np.random.default_rng(2024)
    bad = 0
    for _ in range(1000):
        prof = profs[names[int(rng.integers(len(names)))]]
        n = int(rng.integers(1, prof.horizon + 1))
        t = float(rng.uniform(0.0, 1.6))
        xi, de = xi_n(prof, t, n), delta_n(prof, t, n)
        brute = sum(1 for v in prof.distances[:n].tolist() if v < t)
        bad += xi + de != 1 or xi != Fraction(brute, n)
    record(1, bad == 0, f"{bad} failures over 1000 (profile, n, t) triples from {len(names)} presets")


# ---- 2 ----------------------------------------------------------------------------

def test_criterion_2_iterate_consistency():
    systems = {
        "counterexample": build_counterexample(),
        "sequence-chaos": full_shift(two_sided=False),
        "logistic-invariance": logistic_family(),
        "identity": identity_system(INTERVAL),
        "open-question": warped_family(),
    }
    failed = []
    for name, sys in systems.items():
        rep = check_iterate_consistency(sys, ks=(1, 2, 3, 4, 5), N=10_000, starts=20)
        if rep.status != PASS:
            failed.append(name)
    record(2, not failed, f"k = 1..5, N = 10^4, 20 starts on {len(systems)} preset systems; "
                          f"mismatching: {failed or 'none'}")


# ---- 3 ----------------------------------------------------------------------------

def test_criterion_3_counterexample():
    rep = run_dc3_counterexample(horizon=5040, n_identity=500, points=50)
    base = rep.records[0]
    est, prof = base.estimate, base.profile
    z, w = dc1_pair_for_shift(5040)

    # independent orbit and distance oracle
    offs = _counterexample_offsets(5040)
    assert all(offs[2 * n] == 0 for n in range(len(offs) // 2))
    # convention check for the oracle: (sigma w)_i = w_(i+1)
    sw = apply_map(Shift(), w)
    assert all(sw.at(i) == w.at(i + 1) for i in range(-10, 130))
    # z = 0^Z and w is 1 exactly on [3!, 5!) and from 7! on
    runs = [(6, 120), (5040, INF)]
    assert all(z.at(j) == 0 and w.at(j) == int(6 <= j < 120 or j >= 5040) for j in range(-40, 5100))
    oracle = np.array([_runs_distance(runs, c, True) for c in offs])
    same_profile = np.array_equal(oracle, prof.distances)

    lo, hi = base.verdict.dc3.witness
    sel = np.nonzero((est.t_grid >= lo) & (est.t_grid <= hi))[0]
    count_ok = True
    for j in sel:
        t = est.t_grid[j]
        for n in est.ns:
            count_ok &= int(est.counts[j, n - 1]) == int(np.count_nonzero(oracle[:n] < t))
        low = Fraction(int(est.counts[j, est.argmin_n[j] - 1]), int(est.argmin_n[j]))
        count_ok &= low <= Fraction(11, 20) and est.phi_upper[j] >= 0.95
    ok = rep.status == PASS and same_profile and count_ok and len(sel) >= 2
    record(3, ok, f"report {rep.status}; J = [{lo:.4g}, {hi:.4g}] with {len(sel)} grid points, "
                  f"max lower {est.phi_lower[sel].max():.4g}, min upper {est.phi_upper[sel].min():.4g}; "
                  f"oracle profile {'matches' if same_profile else 'differs'}"
                  + ("" if rep.status == PASS else "; " + "; ".join(_failed(rep))))


# ---- 4 ----------------------------------------------------------------------------

def test_criterion_4_sequence_arithmetic():
    blocks = (3, 4, 5, 6)
    rep = run_sequence_chaos_construction(count=8, horizon=5040, seed=0, blocks=blocks)
    names = {c.name: c for c in rep.checks}
    counting = all(names[k].passed for k in ("selector membership", "proximity checkpoints",
                                             "separation checkpoints", "checkpoint 4! bound"))
    # recount a few pairs from symbol lookups
    E = sample_E(8, 5040, 0, blocks)
    A = nested_balls(constant(0, False), 0.5, "harmonic")
    B = nested_balls(constant(1, False), 0.5, "harmonic")
    sel = [selector_point(BlockSchedule.from_sequence(e), A, B) for e in E]
    p = sel[0][1]
    # p_1 = 1 and p_(k+1) - p_k = ceil(log2(1/r_k)) + 1 with r_k = 1/(2(k+1))
    want = [1]
    for k in range(1, 5040):
        want.append(want[-1] + 2 + k.bit_length())
    recount_ok = p.tolist() == want
    # run k covers [p_k, p_(k+1)) (from 0 for k = 1) and carries E[.][k-1]; the last run is unbounded
    starts = [0] + want[1:]
    ends = want[1:] + [INF]
    cases = 0
    for i, j in ((0, 1), (2, 5), (3, 7)):
        x, y = sel[i][0], sel[j][0]
        runs = [(a, b) for a, b, u, v in zip(starts, ends, E[i], E[j]) if u != v]
        d = _one_sided_profile(runs, [int(t) for t in p])
        prof = pair_profile(full_shift(two_sided=False), x, y, 5040, p)
        recount_ok &= np.array_equal(d, prof.distances)
        for n in blocks:
            cp = math.factorial(n + 1)
            agree = E[i][math.factorial(n)] == E[j][math.factorial(n)]  # first position of block n is n! + 1
            if agree:
                c = int(np.count_nonzero(d[:cp] < 2.0 / n))
                recount_ok &= Fraction(c, cp) >= 1 - Fraction(1, n + 1)
            else:
                c = int(np.count_nonzero(d[:cp] < 0.5))
                recount_ok &= Fraction(c, cp) <= Fraction(1, n + 1)
            cases += 1
    ok = counting and recount_ok
    record(4, ok, f"{names['proximity checkpoints'].detail}; {names['separation checkpoints'].detail}; "
                  f"independent recount on {cases} (pair, block) cases {'agrees' if recount_ok else 'disagrees'}")


# ---- 5 ----------------------------------------------------------------------------

def test_criterion_5_liyorke_invariance():
    sys = logistic_family()
    parts, ok = [], True
    for k in (2, 3):
        rep = run_liyorke_invariance(sys, k=k, pairs=200, N=100_000, horizon_factor=2, threshold=0.9)
        fwd = {c.name: c for c in rep.checks}["forward preservation"]
        ok &= rep.status == PASS
        parts.append(f"k={k}: {fwd.detail}")
    record(5, ok, "; ".join(parts))


# ---- 6 ----------------------------------------------------------------------------

def test_criterion_6_counting_inequalities():
    cases = {"autonomous logistic(4)": autonomous(INTERVAL, Logistic(4.0)), "logistic(4 - 1/n)": logistic_family()}
    parts, ok = [], True
    for name, sys in cases.items():
        rep = run_dc2prime_invariance(sys, N=2, n_max=10_000)
        graded = [c for c in rep.checks if c.passed is not None and c.name != "hypothesis: uniform convergence"]
        ok &= rep.status == PASS and len(graded) >= 2
        parts.append(f"{name}: {rep.status}" + ("" if rep.status == PASS else " (" + "; ".join(_failed(rep)) + ")"))
    record(6, ok, "n <= 10^4, N = 2; " + "; ".join(parts))


# ---- 7 ----------------------------------------------------------------------------

def test_criterion_7_kato_invariance():
    params = KatoParams(delta=0.25, eps=1e-3)
    cases = {
        "tent(2)": autonomous(INTERVAL, Tent(2.0)),
        "tent/doubling cycle": NDSystem(INTERVAL, ExplicitList((Tent(2.0), Doubling()), "cycle")),
    }
    parts, ok = [], True
    for name, sys in cases.items():
        rep = run_kato_invariance(sys, ks=(2, 3, 4), params=params)
        texts = [c.detail for c in rep.checks if c.name == "base" or c.name.startswith("iterate")]
        all_true = all(t.startswith("kato True") for t in texts)
        ok &= rep.status == PASS and all_true
        parts.append(f"{name}: base and k = 2, 3, 4 {'all Kato' if all_true else 'not all Kato'}")
    record(7, ok, "; ".join(parts))


# ---- 8 ----------------------------------------------------------------------------

def _random_real_system(rng):
    kind = int(rng.integers(4))
    if kind == 0:
        return autonomous(INTERVAL, Tent(float(rng.uniform(0.5, 2.0))))
    if kind == 1:
        return autonomous(INTERVAL, Logistic(float(rng.uniform(2.5, 4.0))))
    if kind == 2:
        return autonomous(INTERVAL, Doubling())
    return identity_system(INTERVAL)


def test_criterion_8_monotonicity():
    rng = np.random.default_rng(8)
    bad_est = 0
    for _ in range(1000):
        N = int(rng.integers(20, 400))
        d = rng.random(N) ** float(rng.uniform(0.2, 5.0))
        if rng.random() < 0.3:
            d[rng.random(N) < rng.random()] = 0.0
        grid = np.sort(rng.uniform(0.0, 1.2, int(rng.integers(2, 20))))
        est = distribution_estimate(_make_profile(0, 0, np.arange(N), d), grid, float(rng.uniform(0.1, 1.0)))
        bad_est += not (np.all(est.phi_lower <= est.phi_upper) and np.all(np.diff(est.phi_lower) >= 0)
                        and np.all(np.diff(est.phi_upper) >= 0))

    bad_sens = 0
    for _ in range(1000):
        sys = _random_real_system(rng)
        probes = probe_grid(INTERVAL, int(rng.integers(1, 4)), float(rng.uniform(0.005, 0.05)))
        d1, d2 = np.sort(rng.uniform(0.01, 0.6, 2))
        N, m = int(rng.integers(1, 16)), int(rng.integers(2, 6))
        s1 = sensitivity_test(sys, float(d1), probes, N, m).flag
        s2 = sensitivity_test(sys, float(d2), probes, N, m).flag
        bad_sens += s2 and not s1

    bad_acc = 0
    for _ in range(1000):
        sys = _random_real_system(rng)
        c = rng.uniform(0.05, 0.95, 2)
        U = OpenSetProbe(INTERVAL.point([c[0]]), 0.02)
        V = OpenSetProbe(INTERVAL.point([c[1]]), 0.02)
        e1, e2 = np.sort(10.0 ** rng.uniform(-4, -0.5, 2))
        N, m = int(rng.integers(1, 24)), int(rng.integers(1, 6))
        a1 = accessibility_test(sys, float(e1), U, V, N, m).flag
        a2 = accessibility_test(sys, float(e2), U, V, N, m).flag
        bad_acc += a1 and not a2

    ok = bad_est == bad_sens == bad_acc == 0
    record(8, ok, f"violations: estimates {bad_est}/1000, sensitivity {bad_sens}/1000, "
                  f"accessibility {bad_acc}/1000")


# ---- 9 ----------------------------------------------------------------------------

def test_criterion_9_determinism(tmp_path):
    differ, total = [], 0
    for name in PRESETS:
        outs = []
        for run in ("a", "b"):
            out = tmp_path / f"{name}-{run}"
            code = cli.main(["preset", name, "--seed", "7", "-o", str(out)])
            assert code in (0, 1, 3)
            outs.append(out)
        files = sorted(p.name for p in outs[0].glob("*.csv"))
        assert files == sorted(p.name for p in outs[1].glob("*.csv"))
        for f in files:
            total += 1
            if (outs[0] / f).read_bytes() != (outs[1] / f).read_bytes():
                differ.append(f"{name}/{f}")
    record(9, not differ and total > 0, f"{total} CSV files over {len(PRESETS)} presets; "
                                        f"differing: {differ or 'none'}")
