"""Concrete systems and set constructions.

* the alternating counterexample f_i = F^(i+1) (i odd), F^(-i) (i even);
* factorial block schedules and a finite sampler for a family of 0/1
  sequences in which every two members agree on some block and disagree on
  another;
* nested closed balls and the selector point whose orbit, sampled at times
  p_k, visits a prescribed ball at every step;
* a distributionally chaotic pair for the two-sided shift.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .dynamics import Autonomous, CounterexampleAlternating, NDSystem
from .errors import HorizonTooSmall, NonInvertibleMap, UnsupportedSystem
from .maps import Shift, inverse, is_invertible, is_symbolic_map
from .spaces import INTERVAL, SHIFT1, SHIFT2, space_of
from .symbolic import constant, from_blocks
from .symbolic import shift as _shift


# ---------------------------------------------------------------------------
# counterexample
# ---------------------------------------------------------------------------

def build_counterexample(F=Shift(), space=None) -> NDSystem:
    """f_1 = F^2, f_2 = F^-2, f_3 = F^4, ...; so f_1^(2n-1) = F^(2n) and f_1^(2n) = id."""
    if space is None:
        space = SHIFT2 if is_symbolic_map(F) else INTERVAL
    if not is_invertible(F, space.two_sided if space.symbolic else True):
        raise NonInvertibleMap(f"{F} is not a homeomorphism of {space.kind.value}")
    if not space.symbolic:
        inverse(F)
    return NDSystem(space, CounterexampleAlternating(F), f"counterexample(F={F})")


def full_shift(two_sided=True) -> NDSystem:
    return NDSystem(SHIFT2 if two_sided else SHIFT1, Autonomous(Shift()), "full shift")


# ---------------------------------------------------------------------------
# factorial blocks
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _factorials(upto=20):
    return tuple(math.factorial(n) for n in range(upto + 1))


def block_of(k: int) -> int:
    """n with n! < k <= (n+1)!; k = 1 is put in block 0."""
    if k < 1:
        raise ValueError("positions start at 1")
    f = _factorials()
    n = 0
    while f[n + 1] < k:
        n += 1
    return n


def block_range(n: int):
    """Positions (first, last) of block n, 1-based and inclusive."""
    f = _factorials()
    return (1 if n == 0 else f[n] + 1), f[n + 1]


def block_index_array(K: int) -> np.ndarray:
    """block_of(k) for k = 1..K as an array (entry k-1)."""
    out = np.empty(K, dtype=np.int64)
    n = 0
    while True:
        lo, hi = block_range(n)
        if lo > K:
            break
        out[lo - 1 : min(hi, K)] = n
        n += 1
    return out


@dataclass(frozen=True)
class BlockSchedule:
    """Choice of A_k or B_k for k = 1..horizon, constant on factorial blocks."""

    horizon: int
    selector: tuple  # selector[n] is the bit used on block n

    def __post_init__(self):
        object.__setattr__(self, "selector", tuple(int(b) for b in self.selector))
        need = block_of(self.horizon) + 1
        if len(self.selector) < need:
            raise HorizonTooSmall(f"selector covers {len(self.selector)} blocks, horizon needs {need}")

    @classmethod
    def from_sequence(cls, seq):
        """Schedule from a position sequence (entry k-1 is the bit at position k)."""
        seq = np.asarray(seq)
        K = len(seq)
        nb = block_of(K) + 1
        return cls(K, tuple(int(seq[block_range(n)[0] - 1]) for n in range(nb)))

    @classmethod
    def constant(cls, horizon, bit):
        return cls(horizon, (bit,) * (block_of(horizon) + 1))

    def block(self, k):
        return block_of(k)

    def choice(self, k):
        return self.selector[block_of(k)]

    def choices(self):
        return np.asarray(self.selector, dtype=np.uint8)[block_index_array(self.horizon)]


def sample_E(count: int, horizon: int, seed: int, blocks=None):
    """Finite stand-in for an uncountable family of 0/1 sequences.

    Each sequence has one fair bit per factorial block and has length
    ``horizon`` (entry k-1 is position k).  Any two sequences agree on at least
    one block and disagree on at least one block of ``blocks`` (default: all
    blocks inside the horizon), resampling a sequence until this holds.
    """
    if count < 2:
        raise ValueError("count must be at least 2")
    nb = block_of(horizon) + 1 if horizon >= 1 else 0
    if nb < 2:
        raise HorizonTooSmall("the horizon must span at least two blocks")
    if blocks is None:
        blocks = range(nb)
    blocks = np.asarray(list(blocks), dtype=np.int64)
    if blocks.size < 2 or blocks.max() >= nb or blocks.min() < 0:
        raise HorizonTooSmall(f"pattern blocks {blocks.tolist()} not inside the {nb} blocks of the horizon")
    # a pattern and its complement cannot both appear
    if count > 2 ** (blocks.size - 1):
        raise HorizonTooSmall(
            f"{count} sequences cannot pairwise agree and disagree on {blocks.size} blocks "
            f"(at most {2 ** (blocks.size - 1)})"
        )
    rng = np.random.default_rng(seed)
    taken = set()
    rows = []
    for _ in range(count):
        for _attempt in range(100_000):
            bits = rng.integers(0, 2, nb, dtype=np.uint8)
            key = bits[blocks].tobytes()
            comp = (1 - bits[blocks]).astype(np.uint8).tobytes()
            if key not in taken and comp not in taken:
                break
        else:  # pragma: no cover - capacity checked above
            raise HorizonTooSmall("could not complete the family")
        taken.add(key)
        rows.append(bits)
    idx = block_index_array(horizon)
    out = []
    for bits in rows:
        seq = bits[idx]
        seq.flags.writeable = False
        out.append(seq)
    return out


def agreement_blocks(s, t):
    """Block indices where two sampled sequences agree and where they differ."""
    a = BlockSchedule.from_sequence(s).selector
    b = BlockSchedule.from_sequence(t).selector
    same = [n for n, (u, v) in enumerate(zip(a, b)) if u == v]
    diff = [n for n, (u, v) in enumerate(zip(a, b)) if u != v]
    return same, diff


# ---------------------------------------------------------------------------
# nested balls and the selector point
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NestedSetFamily:
    """Closed balls A_i = B(center, r_i) with r_i strictly decreasing to 0."""

    center: object
    r0: float
    decay: str = "halving"

    def __post_init__(self):
        if not self.r0 > 0:
            raise ValueError("r0 must be positive")
        if self.decay not in ("halving", "harmonic"):
            raise ValueError("decay is 'halving' (r0/2^i) or 'harmonic' (r0/(i+1))")

    @property
    def space(self):
        return space_of(self.center)

    def radius(self, i):
        if self.decay == "halving":
            return self.r0 / 2.0 ** i
        return self.r0 / (i + 1)

    def radii(self, i):
        i = np.asarray(i, dtype=np.float64)
        if self.decay == "halving":
            return self.r0 / np.power(2.0, i)
        return self.r0 / (i + 1.0)

    def contains(self, p, i):
        return self.space.distance(p, self.center) <= self.radius(i)

    def first_exclusion(self, p, limit=10_000):
        """Smallest i with p outside A_i (None for the center itself)."""
        d = self.space.distance(p, self.center)
        if d == 0:
            return None
        for i in range(limit):
            if d > self.radius(i):
                return i
        return None


def nested_balls(center, r0, decay="halving") -> NestedSetFamily:
    space_of(center).point(center)
    return NestedSetFamily(center, float(r0), decay)


def selector_times(A: NestedSetFamily, B: NestedSetFamily, K: int, rule="spaced"):
    """Times p_1 < ... < p_K for the selector construction.

    ``unit`` is p_k = k.  ``spaced`` lets p_{k+1} - p_k = ceil(log2(1/r_k)) + 1,
    which leaves room for the orbit to sit inside a ball of radius r_k.
    """
    ks = np.arange(1, K + 1)
    if rule == "unit":
        return ks.astype(np.int64)
    if rule != "spaced":
        raise ValueError("time rule is 'spaced' or 'unit'")
    r = np.minimum(A.radii(ks), B.radii(ks))
    widths = np.ceil(np.log2(1.0 / r)).astype(np.int64) + 1
    widths = np.maximum(widths, 1)
    p = np.empty(K, dtype=np.int64)
    p[0] = 1
    p[1:] = 1 + np.cumsum(widths[:-1])
    return p


def selector_point(schedule: BlockSchedule, A: NestedSetFamily, B: NestedSetFamily, times="spaced", system=None):
    """Point x_c of the one-sided shift with sigma^(p_k)(x_c) in C_k for k <= horizon.

    C_k is A_k where the schedule reads 0 and B_k where it reads 1.  The word
    holds the symbol of C_k (0 for A, 1 for B) on [p_k, p_{k+1}) and that of
    C_1 before p_1; past the horizon it repeats the last symbol.

    Returns (point, p).
    """
    if system is not None and not (system.space == SHIFT1 and isinstance(system.generator, Autonomous)
                                   and system.generator.map == Shift()):
        raise UnsupportedSystem("selector points are built for the autonomous one-sided full shift only")
    a, b = constant(0, False), constant(1, False)
    if A.center != a or B.center != b:
        raise UnsupportedSystem("A and B must be centered at the all-zeros and all-ones words")
    K = schedule.horizon
    p = selector_times(A, B, K, times)
    c = schedule.choices()
    # runs [0, p_2), [p_2, p_3), ..., [p_K, inf) carry c_1, c_2, ..., c_K
    lengths = np.diff(np.concatenate(([0], p[1:])))
    runs = [(int(sym), int(length)) for sym, length in zip(c[:-1], lengths)]
    point = from_blocks(runs, (int(c[-1]),))
    p.flags.writeable = False
    return point, p


def selector_membership(point, p, schedule, A, B):
    """Per k: True iff sigma^(p_k)(point) lies in C_k (checked by distance)."""
    c = schedule.choices()
    out = np.empty(len(p), dtype=bool)
    for j, (t, bit) in enumerate(zip(p, c)):
        fam = B if bit else A
        out[j] = fam.contains(_shift(point, int(t)), j + 1)
    return out


# ---------------------------------------------------------------------------
# distributionally chaotic pair of the two-sided shift
# ---------------------------------------------------------------------------

def dc1_boundaries(horizon: int):
    """Block boundaries 3!, 5!, 7!, ... that do not exceed the horizon."""
    out = []
    m = 3
    while math.factorial(m) <= horizon:
        out.append(math.factorial(m))
        m += 2
    return out


def dc1_checkpoints(horizon: int):
    """Times at which the pair alternates between nearly-all-close and nearly-all-far."""
    return dc1_boundaries(horizon)[1:]


def dc1_pair_for_shift(horizon: int):
    """(z, w) on the two-sided shift with z = 0^Z and w alternating long runs.

    w is 0 on negative indices, then runs of 0s and 1s switching at 3!, 5!,
    7!, ...: [0, 6) zeros, [6, 120) ones, [120, 5040) zeros, ...  After the
    last boundary inside the horizon the next symbol repeats forever.  Under
    the shift, the fraction of times before a boundary at which the orbits are
    close swings between at most 6/120 and at least 1 - 120/5040 (and closer
    to 0 and 1 for later boundaries).
    """
    if horizon < 120:
        raise HorizonTooSmall("the pair needs a horizon of at least 5! = 120")
    bounds = dc1_boundaries(horizon)
    runs, prev, sym = [], 0, 0
    for b in bounds:
        runs.append((sym, b - prev))
        prev, sym = b, 1 - sym
    w = from_blocks(runs, (sym,), left=(0,))
    return constant(0, True), w
