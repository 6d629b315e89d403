from fractions import Fraction

import numpy as np
import pytest

from nds_chaoslab.catalog import build_counterexample, dc1_checkpoints, dc1_pair_for_shift, full_shift
from nds_chaoslab.dynamics import Autonomous, NDSystem, identity_system
from nds_chaoslab.errors import EmptyGrid, EmptyInput, HorizonExceeded
from nds_chaoslab.maps import Logistic
from nds_chaoslab.metrics import (
    _make_profile,
    classify_pair,
    count_below,
    default_t_grid,
    delta_n,
    distribution_estimate,
    li_yorke_batch,
    li_yorke_test,
    pair_profile,
    scrambled_scan,
    sequence_distribution_estimate,
    xi_n,
)
from nds_chaoslab.spaces import INTERVAL

LOGISTIC = NDSystem(INTERVAL, Autonomous(Logistic(4.0)))


def profile(d):
    return _make_profile(0, 0, np.arange(len(d)), d)


# ---- profiles -----------------------------------------------------------------

def test_equal_points_profile():
    assert np.all(pair_profile(LOGISTIC, [0.3], [0.3], 50).distances == 0.0)


def test_identity_profile():
    prof = pair_profile(identity_system(INTERVAL), [0.2], [0.45], 30)
    assert np.all(prof.distances == abs(0.2 - 0.45))


def test_logistic_profile_against_loop():
    x, y = 0.3, 0.3 + 1e-9
    want = []
    for _ in range(100):
        want.append(abs(x - y))
        x, y = 4.0 * x * (1.0 - x), 4.0 * y * (1.0 - y)
    prof = pair_profile(LOGISTIC, [0.3], [0.3 + 1e-9], 100)
    assert prof.distances.tolist() == want
    assert prof.distances[:5].max() < 1e-7 and prof.distances.max() > 0.5


def test_subsampled_profile_matches_full():
    full = pair_profile(LOGISTIC, [0.1], [0.7], 200)
    p = np.array([0, 3, 17, 64, 199])
    sub = pair_profile(LOGISTIC, [0.1], [0.7], 200, p)
    assert np.array_equal(sub.distances, full.distances[p])
    assert np.array_equal(full.at_times(p).distances, sub.distances)


# ---- counting -------------------------------------------------------------------

def test_xi_examples():
    assert xi_n(profile([0.0] * 7), 0.1, 7) == 1
    assert xi_n(profile([0.1, 0.5, 0.9]), 0.5, 3) == Fraction(1, 3)
    assert xi_n(profile([0.1, 0.5, 0.9]), 0.0, 3) == 0
    assert delta_n(profile([0.1, 0.5, 0.9]), 0.5, 3) == Fraction(2, 3)
    with pytest.raises(HorizonExceeded):
        xi_n(profile([0.1, 0.5]), 0.5, 3)


def test_distribution_estimate_identity():
    prof = pair_profile(identity_system(INTERVAL), [0.2], [0.5], 100)
    est = distribution_estimate(prof, [0.1, 0.29, 0.31, 0.9])
    assert est.phi_lower.tolist() == est.phi_upper.tolist() == [0.0, 0.0, 1.0, 1.0]


def test_window_bounds():
    d = np.r_[np.zeros(50), np.ones(50)]
    est = distribution_estimate(profile(d), [0.5], window=0.5)
    assert est.ns[0] == 50 and est.ns[-1] == 100
    assert est.phi_upper[0] == 1.0 and est.phi_lower[0] == 0.5
    with pytest.raises(EmptyGrid):
        distribution_estimate(profile(d), [])


def test_sequence_estimate_with_unit_times():
    prof = pair_profile(LOGISTIC, [0.1], [0.7], 300)
    grid = default_t_grid(1.0)
    a = distribution_estimate(prof, grid)
    b = sequence_distribution_estimate(prof, np.arange(300), grid)
    assert np.array_equal(a.phi_lower, b.phi_lower) and np.array_equal(a.phi_upper, b.phi_upper)


def test_default_grid_reaches_past_diameter():
    g = default_t_grid(1.5)
    assert g[0] == 0.01 and g[-1] > 1.5 and np.all(np.diff(g) > 0)


# ---- Li-Yorke -----------------------------------------------------------------------

def test_li_yorke_trivial():
    assert not li_yorke_test(pair_profile(LOGISTIC, [0.3], [0.3], 100)).flag
    assert not li_yorke_test(pair_profile(identity_system(INTERVAL), [0.3], [0.6], 100)).flag


def test_li_yorke_logistic_majority():
    rng = np.random.default_rng(2)
    xs = rng.random((20, 1))
    ys = xs + 1e-6 * rng.random((20, 1))
    res = li_yorke_batch(LOGISTIC, xs, ys, 100_000)
    assert sum(r.flag for r in res) > 10


def test_li_yorke_batch_matches_profiles():
    rng = np.random.default_rng(5)
    xs, ys = rng.random((6, 1)), rng.random((6, 1))
    batch = li_yorke_batch(LOGISTIC, xs, ys, 5000, chunk=777)
    for j in range(6):
        assert batch[j] == li_yorke_test(pair_profile(LOGISTIC, xs[j], ys[j], 5000))


def test_li_yorke_bad_thresholds():
    with pytest.raises(ValueError):
        li_yorke_test(profile([0.1, 0.2]), 0.5, 0.1)


# ---- verdicts -------------------------------------------------------------------------

def test_identity_verdicts_false():
    prof = pair_profile(identity_system(INTERVAL), [0.2], [0.7], 1000)
    v = classify_pair(distribution_estimate(prof, default_t_grid(1.0)), li_yorke=li_yorke_test(prof))
    assert not any(v.flags().values())


def _counterexample_estimate():
    z, w = dc1_pair_for_shift(5040)
    prof = pair_profile(build_counterexample(), z, w, 5040)
    return prof, distribution_estimate(prof, default_t_grid(1.5), checkpoints=dc1_checkpoints(5040))


def test_counterexample_verdicts():
    prof, est = _counterexample_estimate()
    ly = li_yorke_test(prof, start=6)
    strict = classify_pair(est, dc3_variant="strict", li_yorke=ly)
    std = classify_pair(est, dc3_variant="standard", li_yorke=ly)
    assert strict.dc3.verdict and std.dc3.verdict
    assert strict.dc2prime.verdict and not strict.dc1.verdict and strict.li_yorke.verdict
    lo, hi = strict.dc3.witness
    sel = (est.t_grid >= lo) & (est.t_grid <= hi)
    # half the steps return to the start pair, so the lower estimate sits near 1/2
    assert np.all((est.phi_lower[sel] >= 0.5) & (est.phi_lower[sel] <= 0.55 + 1e-12))
    assert np.all(est.phi_upper[sel] >= 0.95)


def test_checkpoint_upper_matches_closed_form():
    z, w = dc1_pair_for_shift(5040)
    prof = pair_profile(full_shift(), z, w, 5040)
    est = distribution_estimate(prof, [0.4], checkpoints=[5040])
    # d_i < 0.4 needs w_i = 0 on i < 5040 outside [6, 120); the gap 120 - 6 is the closed-form count
    want = Fraction(5040 - 114, 5040)
    assert abs(Fraction(est.phi_upper[0]) - want) <= Fraction(1, 5040) + Fraction(16, 5040)


def test_one_tol_monotone():
    rng = np.random.default_rng(8)
    for _ in range(100):
        d = rng.random(400) ** rng.uniform(0.2, 5)
        est = distribution_estimate(profile(d), default_t_grid(1.0, 16))
        for small, large in ((0.01, 0.2), (0.05, 0.5)):
            a, b = classify_pair(est, one_tol=small), classify_pair(est, one_tol=large)
            assert (not a.dc1.verdict) or b.dc1.verdict
            assert (not a.dc2.verdict) or b.dc2.verdict


def test_dc1_implies_dc2prime():
    rng = np.random.default_rng(9)
    for _ in range(200):
        d = np.where(rng.random(300) < rng.random(), 0.0, rng.random(300))
        v = classify_pair(distribution_estimate(profile(d), default_t_grid(1.0, 16)))
        assert not v.dc1.verdict or (v.dc2prime.verdict and v.dc2.verdict)


# ---- scrambled scan -----------------------------------------------------------------

def test_scan_identical_candidates():
    rep = scrambled_scan(LOGISTIC, [[0.3], [0.3]], 200, flag="dc2prime")
    assert rep.clique == () and not rep.matrix().any()


def test_scan_identity_system():
    rep = scrambled_scan(identity_system(INTERVAL), [[0.1], [0.4], [0.8]], 200, flag="dc3")
    assert rep.clique == ()


def test_scan_needs_two():
    with pytest.raises(EmptyInput):
        scrambled_scan(LOGISTIC, [[0.3]], 10)


def test_count_below_is_strict():
    assert count_below(profile([0.5, 0.5, 0.4]), 0.5, 3) == 1
