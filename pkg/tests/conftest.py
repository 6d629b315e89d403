import numpy as np
import pytest

from nds_chaoslab.symbolic import SymbolicPoint

# criterion number -> (passed, detail), filled by test_acceptance
CRITERIA = {}


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(CRITERIA):
        ok, detail = CRITERIA[num]
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")


def random_point(rng, two_sided=True, max_core=12):
    core = rng.integers(0, 2, int(rng.integers(0, max_core + 1)))
    right = tuple(int(b) for b in rng.integers(0, 2, int(rng.integers(1, 4))))
    if not two_sided:
        return SymbolicPoint(core, right)
    left = tuple(int(b) for b in rng.integers(0, 2, int(rng.integers(1, 4))))
    return SymbolicPoint(core, right, left, int(rng.integers(-15, 16)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
