import numpy as np
import pytest

from nds_chaoslab.catalog import build_counterexample
from nds_chaoslab.dynamics import ExplicitList, NDSystem, autonomous, identity_system, iterate_system
from nds_chaoslab.errors import EmptyInput
from nds_chaoslab.kato import (
    KatoParams,
    OpenSetProbe,
    accessibility_test,
    kato_verdict,
    n_set,
    probe_grid,
    probe_samples,
    sensitivity_test,
)
from nds_chaoslab.maps import Doubling, Tent
from nds_chaoslab.spaces import INTERVAL, SHIFT2, SQUARE

TENT = autonomous(INTERVAL, Tent(2.0))
FAST = KatoParams(probes=16, access_probes=4, access_samples=64)


def test_probe_grid_layout():
    ps = probe_grid(INTERVAL, 4)
    assert [float(p.center[0]) for p in ps] == [0.125, 0.375, 0.625, 0.875]
    assert len(probe_grid(SQUARE, 10)) == 10
    with pytest.raises(EmptyInput):
        probe_grid(INTERVAL, 0)
    with pytest.raises(ValueError):
        OpenSetProbe(0.5, 0.0)


def test_samples_inside_probe():
    U = OpenSetProbe(INTERVAL.point([0.995]), 0.01)
    pts = probe_samples(INTERVAL, U, 32, 3)
    assert len(pts) == 32 and len({float(p[0]) for p in pts}) == 32
    assert np.all(np.abs(pts[:, 0] - 0.995) < 0.01) and np.all(pts <= 1.0)
    assert np.array_equal(pts, probe_samples(INTERVAL, U, 32, 3))


def test_symbolic_samples_stay_in_cylinder():
    U = probe_grid(SHIFT2, 8)[5]
    for s in probe_samples(SHIFT2, U, 6, 0):
        assert s != U.center and SHIFT2.distance(s, U.center) < U.radius


def test_n_set_identity():
    sys = identity_system(INTERVAL)
    U = OpenSetProbe(INTERVAL.point([0.5]), 0.01)
    assert n_set(sys, U, 0.25, 20, 8, "<") == set(range(1, 21))
    assert n_set(sys, U, 0.25, 20, 8, ">") == set()


def test_n_set_doubling_first_hit():
    sys = autonomous(INTERVAL, Doubling())
    U = OpenSetProbe(INTERVAL.point([0.3]), 0.01)
    hits = n_set(sys, U, 0.25, 30, 16, ">")
    # a gap below 0.02 needs at least log2(0.25 / 0.02) > 3 doublings to exceed 0.25
    assert hits and 4 <= min(hits) <= 12


def test_n_set_bad_args():
    U = OpenSetProbe(INTERVAL.point([0.3]), 0.01)
    with pytest.raises(ValueError):
        n_set(TENT, U, 0.25, 5, 1)
    with pytest.raises(ValueError):
        n_set(TENT, U, 0.25, 5, 4, "<=")


def test_tent_sensitive():
    r = sensitivity_test(TENT, 0.25, probe_grid(INTERVAL, 32), 64, 16)
    assert r.flag and r.worst_separation > 0.25


def test_tent_accessible():
    ps = probe_grid(INTERVAL, 4)
    r = accessibility_test(TENT, 1e-3, ps[0], ps[3], 256, 64)
    x, y, n = r.witness
    assert r.flag and r.closest < 1e-3 and 1 <= n <= 256
    assert not np.array_equal(x, y)


def test_tent_kato():
    r = kato_verdict(TENT, FAST)
    assert r.flag and r.sensitive and r.accessible


def test_identity_not_kato():
    r = kato_verdict(identity_system(INTERVAL), FAST)
    assert not r.flag and not r.sensitive
    assert r.sensitivity.worst_separation < 0.02


def test_tent_iterate_kato():
    assert kato_verdict(iterate_system(TENT, 2), FAST).flag


def test_cycle_system_kato():
    sys = NDSystem(INTERVAL, ExplicitList((Tent(2.0), Doubling()), "cycle"))
    assert kato_verdict(sys, FAST).flag


def test_counterexample_sensitive():
    r = sensitivity_test(build_counterexample(), 0.25, probe_grid(SHIFT2, 8), 16, 4)
    assert r.flag
