"""Sensitivity, accessibility and Kato's chaos at a finite resolution.

Open sets are replaced by a declared family of balls (probes) and each ball by
a deterministic sample of points.  A negative answer therefore means "not
detected at this resolution".
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.stats import qmc

from .dynamics import NDSystem, orbit_batch, symbolic_orbit_at
from .errors import EmptyInput
from .spaces import Space
from .symbolic import SymbolicPoint


@dataclass(frozen=True)
class OpenSetProbe:
    center: object
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("probe radius must be positive")


@dataclass(frozen=True)
class KatoParams:
    delta: float = 0.25
    eps: float = 1e-3
    horizon: int = 64
    samples: int = 16
    probes: int = 64
    radius: float = 0.01
    access_probes: int = 8
    access_horizon: int = 256
    access_samples: int = 256


# ---------------------------------------------------------------------------
# probes and samples
# ---------------------------------------------------------------------------

CYLINDER_DEPTH = 6
# symbolic distances are exact but slow; accessibility uses fewer samples there
SYMBOLIC_SAMPLE_CAP = 8


def probe_grid(space: Space, count: int = 64, radius: float = 0.01):
    """Deterministic probe family.

    Interval: centers (j + 1/2)/count.  Square: a ceil(sqrt(count)) lattice.
    Shift spaces: cylinder probes; the center carries the binary digits of j
    on positions 0..5 and zeros elsewhere, with radius 2^-6.
    """
    if count < 1:
        raise EmptyInput("need at least one probe")
    if space.symbolic:
        out = []
        for j in range(count):
            bits = [(j >> (CYLINDER_DEPTH - 1 - b)) & 1 for b in range(CYLINDER_DEPTH)]
            c = SymbolicPoint(bits, (0,), (0,) if space.two_sided else None, 0)
            out.append(OpenSetProbe(c, 2.0 ** -CYLINDER_DEPTH))
        return out
    if space.dim == 1:
        return [OpenSetProbe(space.point([(j + 0.5) / count]), radius) for j in range(count)]
    side = int(np.ceil(np.sqrt(count)))
    cs = (np.arange(side) + 0.5) / side
    pts = [(a, b) for a in cs for b in cs][:count]
    return [OpenSetProbe(space.point(p), radius) for p in pts]


def spread_probes(space: Space, count: int, radius: float = 0.01):
    """A few well separated probes (used for the accessibility pairs)."""
    return probe_grid(space, count, radius)


def _halton(d, index):
    rng = np.random.default_rng(index)
    try:
        return qmc.Halton(d, scramble=True, rng=rng)
    except TypeError:  # scipy < 1.15
        return qmc.Halton(d, scramble=True, seed=rng)


def probe_samples(space: Space, probe: OpenSetProbe, m: int, index: int):
    """m distinct points of the ball (intersected with the space).

    Real spaces: a scrambled Halton sequence seeded by the probe index.
    Shift spaces: the center with one symbol flipped at position 7 + j
    (for the default cylinder depth 6).
    """
    if m < 1:
        raise EmptyInput("need at least one sample")
    if space.symbolic:
        c = probe.center
        depth = max(CYLINDER_DEPTH, int(np.ceil(-np.log2(probe.radius))))
        # flips lie right of every index the cylinder constrains
        return [_flip(c, depth + 1 + j) for j in range(m)]
    c = np.asarray(probe.center)
    lo = np.maximum(c - probe.radius, 0.0)
    hi = np.minimum(c + probe.radius, 1.0)
    gen = _halton(space.dim, index)
    pts = []
    while len(pts) < m:
        u = gen.random(max(m, 16))
        cand = lo + u * (hi - lo)
        d = np.sqrt(np.sum((cand - c) ** 2, axis=1))
        for row in cand[d < probe.radius]:
            pts.append(row)
            if len(pts) == m:
                break
    return np.array(pts)


def _flip(c, pos):
    lo = min(c.start, 0)
    core = c.symbols(lo, pos + 1).copy()
    core[pos - lo] ^= 1
    return SymbolicPoint(core, c.right, c.left, lo)


# ---------------------------------------------------------------------------
# orbit helpers
# ---------------------------------------------------------------------------

def _sample_orbits(sys, samples, N):
    """Orbit points for n = 1..N: array (N, m, dim) or list of lists of SymbolicPoint."""
    if sys.space.symbolic:
        times = np.arange(1, N + 1)
        return [symbolic_orbit_at(sys, s, times) for s in samples]
    return orbit_batch(sys, samples, N)[1:]


def _pair_dist_at(sys, orb_a, orb_b, n_idx):
    """Distance matrix between the two sample sets at step n_idx + 1."""
    if sys.space.symbolic:
        return np.array([[sys.space.distance(a[n_idx], b[n_idx]) for b in orb_b] for a in orb_a])
    xa = orb_a[n_idx]
    xb = orb_b[n_idx]
    if sys.space.dim == 1:
        return np.abs(xa[:, 0][:, None] - xb[:, 0][None, :])
    dx = xa[:, 0][:, None] - xb[:, 0][None, :]
    dy = xa[:, 1][:, None] - xb[:, 1][None, :]
    return np.sqrt(dx * dx + dy * dy)


def _coincident(sys, sa, sb):
    if sys.space.symbolic:
        return np.array([[a == b for b in sb] for a in sa])
    return np.all(sa[:, None, :] == sb[None, :, :], axis=2)


# ---------------------------------------------------------------------------
# tests
# ---------------------------------------------------------------------------

def n_set(sys: NDSystem, U: OpenSetProbe, delta: float, N: int, m: int, relation="<", index=0):
    """{1 <= n <= N : some sampled x != y in U have d(f_1^n x, f_1^n y) (relation) delta}."""
    if m < 2:
        raise ValueError("need at least two samples")
    if relation not in ("<", ">"):
        raise ValueError("relation is '<' or '>'")
    samples = probe_samples(sys.space, U, m, index)
    orb = _sample_orbits(sys, samples, N)
    off = np.triu(np.ones((m, m), dtype=bool), 1) & ~_coincident(sys, samples, samples)
    out = set()
    for j in range(N):
        D = _pair_dist_at(sys, orb, orb, j)[off]
        hit = (D < delta) if relation == "<" else (D > delta)
        if hit.any():
            out.add(j + 1)
    return out


@dataclass(frozen=True)
class SensitivityResult:
    flag: bool
    delta: float
    separations: tuple  # per probe: largest separation seen before stopping
    worst_probe: int
    worst_separation: float


def sensitivity_test(sys: NDSystem, delta: float, probes, N: int, m: int) -> SensitivityResult:
    """Every probe holds a sampled pair separated by more than delta within N steps.

    A probe stops at the first step where the separation exceeds delta.
    """
    probes = list(probes)
    if not probes:
        raise EmptyInput("probe grid is empty")
    seps = []
    for idx, U in enumerate(probes):
        samples = probe_samples(sys.space, U, m, idx)
        orb = _sample_orbits(sys, samples, N)
        off = np.triu(np.ones((len(samples),) * 2, dtype=bool), 1)
        best = 0.0
        for j in range(N):
            best = max(best, float(_pair_dist_at(sys, orb, orb, j)[off].max()))
            if best > delta:
                break
        seps.append(best)
    seps = np.array(seps)
    worst = int(np.argmin(seps))
    return SensitivityResult(bool(np.all(seps > delta)), float(delta), tuple(float(s) for s in seps), worst,
                             float(seps[worst]))


@dataclass(frozen=True)
class AccessibilityResult:
    flag: bool
    eps: float
    witness: Optional[tuple]  # (x, y, n)
    closest: float


def accessibility_test(sys: NDSystem, eps: float, U: OpenSetProbe, V: OpenSetProbe, N: int, m: int,
                       index_u=0, index_v=1) -> AccessibilityResult:
    """Some sampled x in U, y in V (x != y) come within eps of each other at some 1 <= n <= N."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    su = probe_samples(sys.space, U, m, index_u)
    sv = probe_samples(sys.space, V, m, index_v)
    ou = _sample_orbits(sys, su, N)
    ov = _sample_orbits(sys, sv, N)
    allowed = ~_coincident(sys, su, sv)
    closest = np.inf
    for j in range(N):
        D = np.where(allowed, _pair_dist_at(sys, ou, ov, j), np.inf)
        a, b = np.unravel_index(int(np.argmin(D)), D.shape)
        closest = min(closest, float(D[a, b]))
        if D[a, b] < eps:
            return AccessibilityResult(True, float(eps), (su[a], sv[b], j + 1), closest)
    return AccessibilityResult(False, float(eps), None, float(closest))


@dataclass(frozen=True)
class KatoResult:
    flag: bool
    sensitivity: SensitivityResult
    accessibility: tuple  # ((i, j, AccessibilityResult), ...)

    @property
    def sensitive(self):
        return self.sensitivity.flag

    @property
    def accessible(self):
        return all(r.flag for _, _, r in self.accessibility)


def kato_verdict(sys: NDSystem, params: KatoParams = KatoParams()) -> KatoResult:
    """Sensitivity on the probe grid and accessibility between every pair of access probes."""
    sens = sensitivity_test(sys, params.delta, probe_grid(sys.space, params.probes, params.radius),
                            params.horizon, params.samples)
    acc_probes = spread_probes(sys.space, params.access_probes, params.radius)
    acc = []
    for i in range(len(acc_probes)):
        for j in range(i + 1, len(acc_probes)):
            m = params.access_samples if not sys.space.symbolic else min(params.access_samples, SYMBOLIC_SAMPLE_CAP)
            r = accessibility_test(sys, params.eps, acc_probes[i], acc_probes[j], params.access_horizon, m, i, j)
            acc.append((i, j, r))
            if not r.flag:
                break
        if acc and not acc[-1][2].flag:
            break
    flag = sens.flag and all(r.flag for _, _, r in acc)
    result = KatoResult(flag, sens, tuple(acc))
    assert not result.flag or (result.sensitive and result.accessible)
    return result
