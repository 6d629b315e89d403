"""Pair distance profiles, distribution functions and chaos verdicts.

For a profile d_0, d_1, ... the counting functions are

    xi_n(t)    = #{0 <= i < n : d_i <  t} / n
    delta_n(t) = #{0 <= i < n : d_i >= t} / n

so xi_n + delta_n = 1 exactly.  Lower and upper distribution functions are
estimated by the min and max of xi_n over a tail window of n (or over given
checkpoint times for constructed pairs).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import kernels
from .dynamics import NDSystem, _as_batch, symbolic_orbit_at
from .errors import EmptyGrid, EmptyInput, HorizonExceeded

DEFAULT_EPS_ZERO = 0.05
DEFAULT_ONE_TOL = 0.05
DEFAULT_GAP = 0.2


@dataclass(frozen=True)
class PairDistanceProfile:
    """d(f_1^t x, f_1^t y) at the times ``times`` (all of 0..N-1 unless subsampled)."""

    x: object
    y: object
    times: np.ndarray
    distances: np.ndarray

    @property
    def horizon(self):
        return len(self.distances)

    @property
    def subsampled(self):
        return not np.array_equal(self.times, np.arange(len(self.times)))

    def at_times(self, p):
        """Profile restricted to the times p (which must have been computed)."""
        p = np.asarray(p, dtype=np.int64)
        pos = np.searchsorted(self.times, p)
        if np.any(pos >= len(self.times)) or np.any(self.times[np.minimum(pos, len(self.times) - 1)] != p):
            raise HorizonExceeded("requested times are not in the profile")
        return _make_profile(self.x, self.y, p, self.distances[pos])

    def __len__(self):
        return self.horizon


def _make_profile(x, y, times, distances):
    times = np.array(times, dtype=np.int64)
    distances = np.array(distances, dtype=np.float64)
    times.flags.writeable = False
    distances.flags.writeable = False
    return PairDistanceProfile(x, y, times, distances)


def pair_profile(sys: NDSystem, x, y, N: int, p=None, backend=None) -> PairDistanceProfile:
    """Distances along the paired orbits for i = 0..N-1, or at the times p only."""
    if N < 1:
        raise ValueError("horizon must be >= 1")
    space = sys.space
    x, y = space.point(x), space.point(y)
    if p is None:
        times = np.arange(N, dtype=np.int64)
    else:
        times = np.asarray(p, dtype=np.int64)
        if times.size == 0:
            raise EmptyInput("subsample times are empty")
        if np.any(np.diff(times) <= 0) or times[0] < 0:
            raise ValueError("subsample times must be strictly increasing and >= 0")
    if space.symbolic:
        xs = symbolic_orbit_at(sys, x, times)
        ys = symbolic_orbit_at(sys, y, times)
        d = [space.distance(a, b) for a, b in zip(xs, ys)]
        return _make_profile(x, y, times, d)
    top = int(times[-1])
    rows = pair_distance_matrix(sys, [x], [y], top, backend)[:, 0]
    return _make_profile(x, y, times, rows[times])


def pair_distance_matrix(sys: NDSystem, xs, ys, N: int, backend=None):
    """d(f_1^n x_j, f_1^n y_j) for n = 0..N: array (N+1, len(xs)); real spaces only."""
    x0 = _as_batch(sys, xs)
    y0 = _as_batch(sys, ys)
    if N == 0:
        return kernels.run_pair_distances(x0, y0, np.zeros(0, np.int64), np.zeros(0), np.zeros(0, np.int64),
                                          sys.space.metric_code, backend)
    ops, params, ends = sys.real_program(1, N)
    return kernels.run_pair_distances(x0, y0, ops, params, ends, sys.space.metric_code, backend)


# ---------------------------------------------------------------------------
# counting
# ---------------------------------------------------------------------------

def _check_n(profile, n):
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > profile.horizon:
        raise HorizonExceeded(f"n = {n} exceeds the profile horizon {profile.horizon}")


def count_below(profile, t, n):
    """#{0 <= i < n : d_i < t}."""
    _check_n(profile, n)
    return int(np.count_nonzero(profile.distances[:n] < t))


def xi_n(profile, t, n) -> Fraction:
    return Fraction(count_below(profile, t, n), n)


def delta_n(profile, t, n) -> Fraction:
    _check_n(profile, n)
    return Fraction(int(np.count_nonzero(profile.distances[:n] >= t)), n)


def _cumulative_counts(distances, t_grid):
    """counts[j, n-1] = #{i < n : d_i < t_j}."""
    below = distances[None, :] < t_grid[:, None]
    return np.cumsum(below, axis=1, dtype=np.int64)


@dataclass(frozen=True)
class DistributionEstimate:
    t_grid: np.ndarray
    window: float
    ns: np.ndarray  # the n over which min/max are taken
    counts: np.ndarray  # counts[j, n-1] for n = 1..N
    phi_lower: np.ndarray
    phi_upper: np.ndarray
    argmin_n: np.ndarray
    argmax_n: np.ndarray

    @property
    def horizon(self):
        return self.counts.shape[1]

    def xi(self, j, n):
        return Fraction(int(self.counts[j, n - 1]), n)


def _window_ns(N, window):
    if not 0.0 < window <= 1.0:
        raise ValueError("window must lie in (0, 1]")
    lo = max(1, math.ceil((1.0 - window) * N))
    return np.arange(lo, N + 1, dtype=np.int64)


def distribution_estimate(profile, t_grid, window=0.5, checkpoints=None) -> DistributionEstimate:
    """Phi-hat / Phi-hat* as min / max of xi_n over n in [ceil((1-w)N), N] or over checkpoints."""
    t_grid = np.asarray(t_grid, dtype=np.float64).ravel()
    if t_grid.size == 0:
        raise EmptyGrid("t-grid is empty")
    if np.any(np.diff(t_grid) <= 0):
        raise ValueError("t-grid must be strictly increasing")
    N = profile.horizon
    if checkpoints is not None:
        ns = np.asarray(sorted(set(int(c) for c in checkpoints)), dtype=np.int64)
        if ns.size == 0:
            raise EmptyInput("no checkpoints")
        if ns[0] < 1 or ns[-1] > N:
            raise HorizonExceeded(f"checkpoints must lie in [1, {N}]")
    else:
        ns = _window_ns(N, window)
    counts = _cumulative_counts(profile.distances, t_grid)
    xi = counts[:, ns - 1] / ns[None, :]
    lo_idx = np.argmin(xi, axis=1)
    hi_idx = np.argmax(xi, axis=1)
    rows = np.arange(t_grid.size)
    arrays = dict(
        t_grid=t_grid,
        ns=ns,
        counts=counts,
        phi_lower=xi[rows, lo_idx],
        phi_upper=xi[rows, hi_idx],
        argmin_n=ns[lo_idx],
        argmax_n=ns[hi_idx],
    )
    for a in arrays.values():
        a.flags.writeable = False
    return DistributionEstimate(window=float(window), **arrays)


def sequence_distribution_estimate(profile, p, t_grid, window=0.5, checkpoints=None):
    """The same estimator along the times p_1 < p_2 < ... (counts over k = 1..n)."""
    sub = profile if np.array_equal(profile.times, np.asarray(p)) else profile.at_times(p)
    return distribution_estimate(sub, t_grid, window, checkpoints)


def default_t_grid(diameter, count=64, t_min=0.01):
    """Geometric grid from t_min up to the diameter plus one point just above it."""
    g = np.geomspace(t_min, diameter, count - 1)
    return np.append(g, diameter * (1.0 + 2.0 ** -10))


# ---------------------------------------------------------------------------
# Li-Yorke
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LiYorkeResult:
    flag: bool
    tail_min: float
    argmin_time: int
    tail_max: float
    argmax_time: int
    eps_prox: float
    eps_sep: float
    tail_start: int


def li_yorke_test(profile, eps_prox=1e-3, eps_sep=0.5, window=0.5, start=None) -> LiYorkeResult:
    """liminf d = 0 and limsup d > 0, read as tail min < eps_prox and tail max > eps_sep."""
    if not 0 < eps_prox <= eps_sep:
        raise ValueError("need 0 < eps_prox <= eps_sep")
    N = profile.horizon
    if start is None:
        if not 0.0 < window <= 1.0:
            raise ValueError("window must lie in (0, 1]")
        start = min(N - 1, int(math.floor((1.0 - window) * N)))
    if not 0 <= start < N:
        raise HorizonExceeded("tail start outside the profile")
    tail = profile.distances[start:]
    i_min = int(np.argmin(tail))
    i_max = int(np.argmax(tail))
    lo, hi = float(tail[i_min]), float(tail[i_max])
    return LiYorkeResult(
        flag=bool(lo < eps_prox and hi > eps_sep),
        tail_min=lo,
        argmin_time=int(profile.times[start + i_min]),
        tail_max=hi,
        argmax_time=int(profile.times[start + i_max]),
        eps_prox=float(eps_prox),
        eps_sep=float(eps_sep),
        tail_start=int(start),
    )


# ---------------------------------------------------------------------------
# verdicts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Flag:
    verdict: bool
    witness: tuple = ()
    note: str = ""


@dataclass(frozen=True)
class ChaosVerdict:
    li_yorke: Optional[Flag]
    dc1: Flag
    dc2: Flag
    dc2prime: Flag
    dc3: Flag
    thresholds: dict = field(default_factory=dict)
    horizon: int = 0
    window: float = 0.5

    def flags(self):
        out = {"dc1": self.dc1.verdict, "dc2": self.dc2.verdict, "dc2prime": self.dc2prime.verdict, "dc3": self.dc3.verdict}
        if self.li_yorke is not None:
            out = {"li_yorke": self.li_yorke.verdict, **out}
        return out


def _runs(mask):
    """Maximal runs of True as (start, stop) index pairs."""
    runs, start = [], None
    for i, v in enumerate(mask):
        if v and start is None:
            start = i
        elif not v and start is not None:
            runs.append((start, i))
            start = None
    if start is not None:
        runs.append((start, len(mask)))
    return runs


def classify_pair(est: DistributionEstimate, eps_zero=DEFAULT_EPS_ZERO, one_tol=DEFAULT_ONE_TOL,
                  gap=DEFAULT_GAP, dc3_variant="strict", li_yorke: Optional[LiYorkeResult] = None) -> ChaosVerdict:
    """Finite-horizon verdicts.

    DC1   some t has lower <= eps_zero, every t has upper >= 1 - one_tol
    DC2   some t has lower >  eps_zero, every t has upper >= 1 - one_tol
    DC2'  some t has lower <= eps_zero, every t has upper >  eps_zero
    DC3   lower + gap <= upper on two or more consecutive grid points; the
          'strict' variant also needs upper >= 1 - one_tol there, 'standard' not
    """
    if dc3_variant not in ("strict", "standard"):
        raise ValueError("dc3_variant is 'strict' or 'standard'")
    t = est.t_grid
    lo, hi = est.phi_lower, est.phi_upper
    one = 1.0 - one_tol
    zero_ts = t[lo <= eps_zero]
    pos_ts = t[lo > eps_zero]
    upper_one = bool(np.all(hi >= one))
    upper_pos = bool(np.all(hi > eps_zero))

    dc1 = Flag(bool(zero_ts.size and upper_one), (float(zero_ts[0]),) if zero_ts.size else ())
    dc2 = Flag(bool(pos_ts.size and upper_one), (float(pos_ts[0]),) if pos_ts.size else ())
    dc2p = Flag(bool(zero_ts.size and upper_pos), (float(zero_ts[0]),) if zero_ts.size else ())

    mask = lo + gap <= hi
    if dc3_variant == "strict":
        mask &= hi >= one
    runs = [r for r in _runs(mask) if r[1] - r[0] >= 2]
    if runs:
        a, b = max(runs, key=lambda r: (r[1] - r[0], -r[0]))
        dc3 = Flag(True, (float(t[a]), float(t[b - 1])), f"J = [{t[a]!r}, {t[b - 1]!r}]")
    else:
        dc3 = Flag(False)
    ly = None if li_yorke is None else Flag(
        li_yorke.flag, (li_yorke.argmin_time, li_yorke.argmax_time),
        f"tail min {li_yorke.tail_min!r}, tail max {li_yorke.tail_max!r}",
    )
    return ChaosVerdict(
        li_yorke=ly,
        dc1=dc1,
        dc2=dc2,
        dc2prime=dc2p,
        dc3=dc3,
        thresholds=dict(eps_zero=eps_zero, one_tol=one_tol, gap=gap, dc3_variant=dc3_variant),
        horizon=est.horizon,
        window=est.window,
    )


def dc3_interval_values(est, verdict):
    """(max lower, min upper) over the DC3 witness interval, or None."""
    if not verdict.dc3.verdict:
        return None
    a, b = verdict.dc3.witness
    sel = (est.t_grid >= a) & (est.t_grid <= b)
    return float(est.phi_lower[sel].max()), float(est.phi_upper[sel].min())


# ---------------------------------------------------------------------------
# scrambled sets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScrambledReport:
    flag_name: str
    verdicts: dict  # (i, j) with i < j -> ChaosVerdict
    clique: tuple
    uniform_eps: Optional[float]

    def verdict(self, i, j):
        return self.verdicts[(min(i, j), max(i, j))]

    def matrix(self):
        n = max((j for _, j in self.verdicts), default=0) + 1
        m = np.zeros((n, n), dtype=bool)
        for (i, j), v in self.verdicts.items():
            m[i, j] = m[j, i] = getattr(v, self.flag_name).verdict
        return m


def scrambled_scan(sys, candidates, N, t_grid=None, flag="dc1", p=None, window=0.5, checkpoints=None,
                   eps_zero=DEFAULT_EPS_ZERO, one_tol=DEFAULT_ONE_TOL, gap=DEFAULT_GAP, dc3_variant="strict",
                   profiles=None):
    """Classify every pair of candidates and grow a greedy clique of flagged pairs.

    With p given the profiles are sampled at p (distributional chaos in a
    sequence).  ``profiles`` may map (i, j) to an already computed profile.
    ``uniform_eps`` is the largest grid t at which every clique
    pair has lower estimate <= eps_zero, or None when no common t exists.
    """
    candidates = list(candidates)
    if len(candidates) < 2:
        raise EmptyInput("need at least two candidates")
    if t_grid is None:
        t_grid = default_t_grid(sys.space.diameter)
    t_grid = np.asarray(t_grid, dtype=np.float64)
    n = len(candidates)
    verdicts, zero_sets = {}, {}
    profiles = {} if profiles is None else profiles
    orbits = None
    if sys.space.symbolic and len(profiles) < n * (n - 1) // 2:
        times = np.arange(N, dtype=np.int64) if p is None else np.asarray(p, dtype=np.int64)
        orbits = [symbolic_orbit_at(sys, sys.space.point(c), times) for c in candidates]
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) in profiles:
                prof = profiles[(i, j)]
            elif orbits is None:
                prof = pair_profile(sys, candidates[i], candidates[j], N, p)
            else:
                d = [sys.space.distance(a, b) for a, b in zip(orbits[i], orbits[j])]
                prof = _make_profile(candidates[i], candidates[j], times, d)
            est = distribution_estimate(prof, t_grid, window, checkpoints)
            v = classify_pair(est, eps_zero, one_tol, gap, dc3_variant)
            if candidates[i] == candidates[j] if sys.space.symbolic else np.array_equal(candidates[i], candidates[j]):
                v = _all_false(v)
            verdicts[(i, j)] = v
            zero_sets[(i, j)] = est.phi_lower <= eps_zero
    adj = np.zeros((n, n), dtype=bool)
    for (i, j), v in verdicts.items():
        adj[i, j] = adj[j, i] = getattr(v, flag).verdict
    order = sorted(range(n), key=lambda i: (-int(adj[i].sum()), i))
    clique = []
    for i in order:
        if adj[i].any() and all(adj[i, j] for j in clique):
            clique.append(i)
    if len(clique) < 2:
        clique = []
    uniform = None
    if clique:
        common = np.ones(t_grid.size, dtype=bool)
        for a in clique:
            for b in clique:
                if a < b:
                    common &= zero_sets[(a, b)]
        if common.any():
            uniform = float(t_grid[np.nonzero(common)[0][-1]])
    return ScrambledReport(flag, verdicts, tuple(sorted(clique)), uniform)


def _all_false(v):
    off = Flag(False, (), "identical points")
    return ChaosVerdict(None if v.li_yorke is None else off, off, off, off, off, v.thresholds, v.horizon, v.window)


def li_yorke_batch(sys, xs, ys, N, eps_prox=1e-3, eps_sep=0.5, window=0.5, chunk=8192, backend=None):
    """li_yorke_test for many real pairs at once, streaming the orbits in chunks.

    Gives the same results as building each full profile, without holding
    N x pairs distances in memory.
    """
    if not 0 < eps_prox <= eps_sep:
        raise ValueError("need 0 < eps_prox <= eps_sep")
    if sys.space.symbolic:
        return [li_yorke_test(pair_profile(sys, x, y, N), eps_prox, eps_sep, window) for x, y in zip(xs, ys)]
    start = min(N - 1, int(math.floor((1.0 - window) * N)))
    x = _as_batch(sys, xs)
    y = _as_batch(sys, ys)
    m = x.shape[0]
    lo = np.full(m, np.inf)
    hi = np.full(m, -np.inf)
    lo_t = np.zeros(m, dtype=np.int64)
    hi_t = np.zeros(m, dtype=np.int64)
    both = np.concatenate([x, y])
    t0 = 0  # time of both[...] (current state)
    while t0 < N:
        steps = min(chunk, N - t0)
        # states at times t0 .. t0+steps (the last one seeds the next chunk)
        ops, params, ends = sys.real_program(t0 + 1, steps)
        pts = kernels.run_orbit(both, ops, params, ends, backend)
        d = _dist_rows(pts[:-1, :m], pts[:-1, m:], sys.space.metric_code)
        first = max(start - t0, 0)
        if first < steps:
            seg = d[first:]
            i_min = np.argmin(seg, axis=0)
            i_max = np.argmax(seg, axis=0)
            cols = np.arange(m)
            v_min = seg[i_min, cols]
            v_max = seg[i_max, cols]
            upd = v_min < lo
            lo[upd], lo_t[upd] = v_min[upd], (t0 + first + i_min)[upd]
            upd = v_max > hi
            hi[upd], hi_t[upd] = v_max[upd], (t0 + first + i_max)[upd]
        both = pts[-1]
        t0 += steps
    return [
        LiYorkeResult(bool(lo[j] < eps_prox and hi[j] > eps_sep), float(lo[j]), int(lo_t[j]), float(hi[j]),
                      int(hi_t[j]), float(eps_prox), float(eps_sep), int(start))
        for j in range(m)
    ]


def _dist_rows(a, b, metric):
    if metric == kernels.METRIC_ABS:
        return np.abs(a[..., 0] - b[..., 0])
    dx = a[..., 0] - b[..., 0]
    dy = a[..., 1] - b[..., 1]
    return np.sqrt(dx * dx + dy * dy)
