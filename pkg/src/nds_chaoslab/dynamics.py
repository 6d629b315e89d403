"""Non-autonomous systems, segment compositions, orbits and iterate systems.

Indexing follows the composition convention throughout: maps are f_1, f_2,
..., the segment f_i^n = f_{i+n-1} o ... o f_i (f_i^0 = id), and the orbit
satisfies x_n = f_n(x_{n-1}) = f_1^n(x_0).  The k-th iterate system has n-th
map f_{k(n-1)+1}^k.

Real systems are evaluated through compiled programs (see
:mod:`nds_chaoslab.kernels`); an orbit and a segment composition over the
same range execute the identical operation sequence, so they agree bit for
bit.  Shift-space systems compile to integer offsets and are exact.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .errors import EmptyInput
from .maps import (
    Composite,
    Identity,
    Logistic,
    MapSpec,
    Power,
    Tent,
    Warp,
    apply_map,
    inverse,
    real_ops,
    shift_offset,
)
from .spaces import Space
from .symbolic import SymbolicPoint
from .symbolic import shift as _shift

FAMILIES = ("logistic", "tent", "warped-logistic")


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExplicitList:
    maps: tuple
    tail: str = "repeat-last"

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(self.maps))
        if not self.maps:
            raise EmptyInput("an explicit map list needs at least one map")
        if self.tail not in ("repeat-last", "cycle"):
            raise ValueError("tail rule is 'repeat-last' or 'cycle'")

    finite = True

    def map_at(self, n):
        i = n - 1
        if i < len(self.maps):
            return self.maps[i]
        if self.tail == "cycle":
            return self.maps[i % len(self.maps)]
        return self.maps[-1]

    @property
    def limit(self):
        if self.tail == "repeat-last" or len(set(self.maps)) == 1:
            return self.maps[-1]
        return None

    def describe(self):
        return f"explicit[{', '.join(map(str, self.maps))}; {self.tail}]"


@dataclass(frozen=True)
class Autonomous:
    map: MapSpec
    finite = True

    def map_at(self, n):
        return self.map

    @property
    def limit(self):
        return self.map

    def describe(self):
        return f"autonomous[{self.map}]"


@dataclass(frozen=True)
class ParameterRule:
    """n -> offset(n) with offset(n) -> 0: harmonic scale/n, geometric scale*ratio**n, constant 0."""

    kind: str = "harmonic"
    scale: float = 1.0
    ratio: float = 0.5

    def __post_init__(self):
        if self.kind not in ("harmonic", "geometric", "constant"):
            raise ValueError(f"unknown decay rule {self.kind!r}")
        if self.kind == "geometric" and not 0.0 < self.ratio < 1.0:
            raise ValueError("geometric ratio must lie in (0, 1)")

    def offsets(self, ns):
        ns = np.asarray(ns, dtype=np.float64)
        if self.kind == "harmonic":
            return self.scale / ns
        if self.kind == "geometric":
            return self.scale * np.power(self.ratio, ns)
        return np.zeros_like(ns)


@dataclass(frozen=True)
class ConvergentFamily:
    """f_n drawn from a parametric family whose parameter converges.

    logistic:        f_n = Logistic(limit - offset(n))
    tent:            f_n = Tent(limit - offset(n))
    warped-logistic: f_n = Logistic(limit) o Warp(offset(n)); converges
                     pointwise, not uniformly, to the zero map.
    """

    family: str
    limit_param: float
    rule: ParameterRule = field(default_factory=ParameterRule)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.family == "warped-logistic" and self.rule.kind == "constant":
            raise ValueError("warped-logistic needs a decaying rule (the exponent must stay positive)")

    @property
    def finite(self):
        return self.rule.kind == "constant"

    def params(self, ns):
        off = self.rule.offsets(ns)
        if self.family == "warped-logistic":
            return off
        vals = self.limit_param - off
        hi = 4.0 if self.family == "logistic" else 2.0
        if np.any(vals < 0.0) or np.any(vals > hi):
            raise ValueError(f"{self.family} parameter leaves [0, {hi}] for some n")
        return vals

    def _map(self, value):
        if self.family == "logistic":
            return Logistic(value)
        if self.family == "tent":
            return Tent(value)
        return Composite((Logistic(self.limit_param), Warp(value)))

    def map_at(self, n):
        return self._map(float(self.params(np.array([n]))[0]))

    @property
    def limit(self):
        if self.family == "logistic":
            return Logistic(self.limit_param)
        if self.family == "tent":
            return Tent(self.limit_param)
        return Logistic(0.0)

    def describe(self):
        r = self.rule
        return f"convergent[{self.family}, limit={self.limit_param!r}, {r.kind}(scale={r.scale!r}, ratio={r.ratio!r})]"


@dataclass(frozen=True)
class CounterexampleAlternating:
    """f_i = F^(i+1) for odd i, F^(-i) for even i; f_1^(2n) is the identity."""

    F: MapSpec
    finite = False

    def map_at(self, n):
        return Power(self.F, n + 1) if n % 2 else Power(self.F, -n)

    limit = None

    def describe(self):
        return f"counterexample[F={self.F}]"


@dataclass(frozen=True)
class Iterated:
    base: "NDSystem"
    k: int

    @property
    def finite(self):
        return self.base.finitely_generated

    def map_at(self, n):
        first = self.k * (n - 1) + 1
        return Composite(tuple(self.base.map_at(j) for j in range(first + self.k - 1, first - 1, -1)))

    @property
    def limit(self):
        lim = self.base.limit
        return None if lim is None else Power(lim, self.k)

    def describe(self):
        return f"iterate[{self.k}]({self.base.describe()})"


# ---------------------------------------------------------------------------
# system
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NDSystem:
    space: Space
    generator: object
    label: str = ""

    def __post_init__(self):
        # fail early if the first maps do not act on the space
        for n in (1, 2):
            m = self.generator.map_at(n)
            if self.space.symbolic:
                shift_offset(m, self.space.two_sided)
            else:
                real_ops(m)

    @property
    def finitely_generated(self):
        return bool(self.generator.finite)

    @property
    def limit(self):
        return self.generator.limit

    def map_at(self, n):
        if n < 1:
            raise ValueError("maps are indexed from 1")
        return self.generator.map_at(n)

    def describe(self):
        return self.label or self.generator.describe()

    # -- compiled programs ---------------------------------------------------
    def real_program(self, first, count):
        """(ops, params, ends) for maps f_first .. f_{first+count-1}."""
        g = self.generator
        if isinstance(g, Iterated):
            ops, params, ends = g.base.real_program(g.k * (first - 1) + 1, g.k * count)
            return ops, params, ends[g.k - 1 :: g.k].copy()
        if isinstance(g, ConvergentFamily):
            ns = np.arange(first, first + count)
            vals = g.params(ns)
            if g.family == "warped-logistic":
                ops = np.tile([kernels.OP_WARP, kernels.OP_LOGISTIC], count).astype(np.int64)
                params = np.empty(2 * count)
                params[0::2] = vals
                params[1::2] = g.limit_param
                return ops, params, np.arange(2, 2 * count + 1, 2, dtype=np.int64)
            code = kernels.OP_LOGISTIC if g.family == "logistic" else kernels.OP_TENT
            return np.full(count, code, dtype=np.int64), vals, np.arange(1, count + 1, dtype=np.int64)
        if isinstance(g, Autonomous):
            base = real_ops(g.map)
            ops = np.array([o for o, _ in base] * count, dtype=np.int64)
            params = np.array([v for _, v in base] * count, dtype=np.float64)
            return ops, params, np.arange(1, count + 1, dtype=np.int64) * len(base)
        ops, params, ends = [], [], []
        for n in range(first, first + count):
            for o, v in real_ops(g.map_at(n)):
                ops.append(o)
                params.append(v)
            ends.append(len(ops))
        return (
            np.array(ops, dtype=np.int64),
            np.array(params, dtype=np.float64),
            np.array(ends, dtype=np.int64),
        )

    def shift_offsets(self, first, count):
        """Net shift offsets of maps f_first .. f_{first+count-1}."""
        g = self.generator
        two = self.space.two_sided
        if isinstance(g, Iterated):
            base = g.base.shift_offsets(g.k * (first - 1) + 1, g.k * count)
            return base.reshape(count, g.k).sum(axis=1)
        if isinstance(g, Autonomous):
            return np.full(count, shift_offset(g.map, two), dtype=np.int64)
        if isinstance(g, CounterexampleAlternating):
            step = shift_offset(g.F, two)
            if step and not two:
                shift_offset(inverse(g.F), two)
            ns = np.arange(first, first + count, dtype=np.int64)
            return np.where(ns % 2 == 1, (ns + 1) * step, -ns * step)
        return np.array([shift_offset(g.map_at(n), two) for n in range(first, first + count)], dtype=np.int64)


def autonomous(space, m, label=""):
    return NDSystem(space, Autonomous(m), label)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrbitTrace:
    start: object
    horizon: int
    points: Sequence

    def __len__(self):
        return len(self.points)


def _as_batch(sys, starts):
    arr = np.array(starts, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(-1, sys.space.dim) if sys.space.dim > 1 else arr[:, None]
    for row in arr:
        sys.space.point(row)
    return arr


def compose_segment(sys: NDSystem, i: int, n: int, p):
    """f_i^n(p): f_i first, f_{i+n-1} last; n = 0 gives p."""
    if i < 1 or n < 0:
        raise ValueError("need i >= 1 and n >= 0")
    p = sys.space.point(p)
    if n == 0:
        return p
    if sys.space.symbolic:
        return _shift(p, int(sys.shift_offsets(i, n).sum()))
    ops, params, _ = sys.real_program(i, n)
    out = kernels.run_segment(np.asarray(p)[None, :], ops, params)[0]
    out.flags.writeable = False
    return out


def orbit(sys: NDSystem, start, N: int) -> OrbitTrace:
    """x_0 = start, x_n = f_n(x_{n-1}) for n = 1..N."""
    if N < 1:
        raise ValueError("horizon must be >= 1")
    start = sys.space.point(start)
    if sys.space.symbolic:
        offs = np.concatenate(([0], np.cumsum(sys.shift_offsets(1, N))))
        return OrbitTrace(start, N, tuple(_shift(start, int(o)) for o in offs))
    pts = orbit_batch(sys, np.asarray(start)[None, :], N)[:, 0, :]
    pts.flags.writeable = False
    return OrbitTrace(start, N, pts)


def orbit_batch(sys: NDSystem, starts, N: int, backend=None):
    """Orbits of many real starting points at once: array (N+1, m, dim)."""
    x0 = _as_batch(sys, starts)
    ops, params, ends = sys.real_program(1, N)
    return kernels.run_orbit(x0, ops, params, ends, backend)


def symbolic_orbit_at(sys: NDSystem, start: SymbolicPoint, times):
    """Orbit points f_1^t(start) for the given (nondecreasing or arbitrary) times."""
    times = np.asarray(times, dtype=np.int64)
    top = int(times.max()) if times.size else 0
    offs = np.concatenate(([0], np.cumsum(sys.shift_offsets(1, top)))) if top else np.zeros(1, np.int64)
    return [_shift(start, int(offs[t])) for t in times]


def iterate_system(sys: NDSystem, k: int) -> NDSystem:
    """The k-th iterate system, whose n-th map is f_{k(n-1)+1}^k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    label = f"{sys.describe()} [iterate {k}]" if sys.label else ""
    return NDSystem(sys.space, Iterated(sys, int(k)), label)


def uniform_convergence_gap(sys: NDSystem, limit: MapSpec, n: int, grid) -> float:
    """max over the grid of d(f_n(x), limit(x))."""
    grid = list(grid)
    if not grid:
        raise EmptyInput("grid must be nonempty")
    fn = sys.map_at(n)
    if sys.space.symbolic:
        return max(sys.space.distance(apply_map(fn, p), apply_map(limit, p)) for p in grid)
    x0 = _as_batch(sys, grid)
    a = _apply_real(fn, x0)
    b = _apply_real(limit, x0)
    diff = a - b
    return float(np.max(np.sqrt(np.sum(diff * diff, axis=1))))


def _apply_real(m, x0):
    ops = real_ops(m)
    if not ops:
        return x0.copy()
    return kernels.run_segment(
        x0, np.array([o for o, _ in ops], dtype=np.int64), np.array([v for _, v in ops], dtype=np.float64)
    )


def convergence_gaps(sys: NDSystem, limit: Optional[MapSpec], grid, ns=(10, 100, 1000)):
    """Gaps at several n and whether they decay (used as a hypothesis check)."""
    if limit is None:
        return [float("inf")] * len(ns), False
    gaps = [uniform_convergence_gap(sys, limit, n, grid) for n in ns]
    if gaps[-1] <= 1e-12:
        return gaps, True
    decreasing = all(b < a for a, b in zip(gaps, gaps[1:]))
    return gaps, bool(decreasing and gaps[-1] <= 0.5 * gaps[0])


def default_grid(space: Space, count: int = 101, refine: bool = True):
    """Evenly spaced grid on a real space (count per axis on the square).

    On the interval the grid is refined geometrically towards 0 (10**-j,
    j = 1..300) so that non-uniform convergence near an endpoint shows up.
    """
    xs = np.linspace(0.0, 1.0, count)
    if space.dim == 1:
        if refine:
            xs = np.union1d(xs, 10.0 ** -np.arange(1, 301))
        return xs[:, None]
    gx, gy = np.meshgrid(xs, xs, indexing="ij")
    return np.column_stack([gx.ravel(), gy.ravel()])


def residue_subsequence(seq, n):
    """Largest residue class of an increasing sequence modulo n.

    Returns (r, subsequence, quotients) with subsequence[j] = n*quotients[j] + r.
    Ties go to the smallest residue.
    """
    seq = [int(v) for v in seq]
    if not seq:
        raise EmptyInput("sequence is empty")
    if n < 1:
        raise ValueError("modulus must be positive")
    if any(b <= a for a, b in zip(seq, seq[1:])) or seq[0] < 1:
        raise ValueError("sequence must be strictly increasing positive integers")
    counts = Counter(v % n for v in seq)
    best = max(counts.values())
    r = min(res for res, c in counts.items() if c == best)
    sub = [v for v in seq if v % n == r]
    return r, sub, [v // n for v in sub]


def identity_system(space: Space) -> NDSystem:
    return NDSystem(space, Autonomous(Identity()), "identity")
