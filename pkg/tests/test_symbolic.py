from fractions import Fraction

import numpy as np
import pytest

from nds_chaoslab.errors import DomainViolation, NonInvertibleMap
from nds_chaoslab.symbolic import SymbolicPoint, constant, distance, exact_distance, from_blocks, shift

from conftest import random_point


def brute_distance(s, t, L=300):
    """Direct partial sum of the metric series; the remainder is below 2^-L."""
    total = Fraction(0)
    lo = -L if s.two_sided else 0
    for i in range(lo, L):
        if s.at(i) != t.at(i):
            total += Fraction(1, 2 ** (abs(i) + 1))
    return total


def test_canonical_forms_compare_equal():
    a = SymbolicPoint([1, 0, 1, 0], (1, 0))
    b = SymbolicPoint([], (1, 0, 1, 0))
    assert a == b and hash(a) == hash(b)
    c = SymbolicPoint([0, 0, 1], (1,), (0,), -2)
    d = SymbolicPoint([1], (1,), (0, 0), 0)
    assert c == d


def test_reading_symbols():
    p = from_blocks([(0, 3), (1, 2)], (0, 1), left=(1,))
    assert [p.at(i) for i in range(-2, 8)] == [1, 1, 0, 0, 0, 1, 1, 0, 1, 0]
    assert p.symbols(-2, 8).tolist() == [p.at(i) for i in range(-2, 8)]
    with pytest.raises(DomainViolation):
        SymbolicPoint([1], (0,)).at(-1)


def test_shift_round_trip(rng):
    for _ in range(200):
        p = random_point(rng)
        a = int(rng.integers(-40, 40))
        assert shift(shift(p, a), -a) == p
        assert shift(shift(p, a), 3) == shift(p, a + 3)


def test_one_sided_shift_has_no_inverse():
    with pytest.raises(NonInvertibleMap):
        shift(constant(0, False), -1)


def test_one_sided_shift_reads_ahead(rng):
    for _ in range(100):
        p = random_point(rng, two_sided=False)
        a = int(rng.integers(0, 30))
        q = shift(p, a)
        assert [q.at(i) for i in range(40)] == [p.at(i + a) for i in range(40)]


@pytest.mark.parametrize("two_sided", [False, True])
def test_exact_distance_matches_series(rng, two_sided):
    for _ in range(100):
        s, t = random_point(rng, two_sided), random_point(rng, two_sided)
        exact = exact_distance(s, t)
        assert abs(exact - brute_distance(s, t)) <= Fraction(1, 2 ** 298)
        assert distance(s, t) == float(exact)


def test_fast_path_agrees_with_exact():
    # long cores force the bracketing window
    rng = np.random.default_rng(7)
    for _ in range(50):
        core = rng.integers(0, 2, 600)
        s = SymbolicPoint(core, (0,), (1,), -300)
        t = SymbolicPoint(core ^ (rng.random(600) < 0.01), (0,), (1,), -300)
        assert distance(s, t) == float(exact_distance(s, t))


def test_diameters():
    assert distance(constant(0, False), constant(1, False)) == 1.0
    assert distance(constant(0), constant(1)) == 1.5


def test_mixed_sidedness_rejected():
    with pytest.raises(DomainViolation):
        distance(constant(0), constant(0, False))
