"""Hot loops for real-valued orbits.

Every map on the interval or the square is compiled to a flat list of
primitive operations (``ops``/``params``); ``ends[j]`` is the index one past
the last operation of map ``j``.  Two interchangeable backends advance a batch
of points through such a program:

* ``numba``  - ``@njit`` kernels, the default when numba imports;
* ``numpy``  - vectorized over points, Python loop over operations.

Set ``NDS_CHAOSLAB_DISABLE_NUMBA=1`` to force the numpy path.  Both backends
perform the same IEEE operations in the same order and agree bit for bit
(checked in the test suite).
"""
from __future__ import annotations

import math
import os

import numpy as np

OP_IDENTITY = 0
OP_LOGISTIC = 1
OP_TENT = 2
OP_DOUBLING = 3
OP_WARP = 4

METRIC_ABS = 0
METRIC_EUCLID = 1

_DISABLE = os.environ.get("NDS_CHAOSLAB_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    if _DISABLE:
        raise ImportError("numba disabled by NDS_CHAOSLAB_DISABLE_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised via the env flag
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


def default_backend():
    return "numba" if HAVE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# numpy backend
# ---------------------------------------------------------------------------

def _op_numpy(x, op, param):
    if op == OP_LOGISTIC:
        return param * x * (1.0 - x)
    if op == OP_TENT:
        return np.where(x < 0.5, param * x, param * (1.0 - x))
    if op == OP_DOUBLING:
        y = 2.0 * x
        y = np.where(y >= 1.0, y - 1.0, y)
        return np.where(y >= 1.0, y - 1.0, y)
    if op == OP_WARP:
        # np.power is not libm pow; numba calls libm, so match it here
        return _libm_pow(x, param).astype(np.float64)
    return x


_libm_pow = np.frompyfunc(math.pow, 2, 1)


def _run_numpy(x, ops, params, lo, hi):
    for j in range(lo, hi):
        x = _op_numpy(x, ops[j], params[j])
    return x


def _dist_numpy(x, y, metric):
    if metric == METRIC_ABS:
        return np.abs(x[:, 0] - y[:, 0])
    dx = x[:, 0] - y[:, 0]
    dy = x[:, 1] - y[:, 1]
    return np.sqrt(dx * dx + dy * dy)


def orbit_numpy(x0, ops, params, ends):
    n_maps = len(ends)
    out = np.empty((n_maps + 1,) + x0.shape)
    x = x0.copy()
    out[0] = x
    lo = 0
    ops_l = ops.tolist()
    par_l = params.tolist()
    for n in range(n_maps):
        hi = int(ends[n])
        x = _run_numpy(x, ops_l, par_l, lo, hi)
        out[n + 1] = x
        lo = hi
    return out


def segment_numpy(x0, ops, params):
    return _run_numpy(x0.copy(), ops.tolist(), params.tolist(), 0, len(ops))


def pair_distances_numpy(x0, y0, ops, params, ends, metric):
    n_maps = len(ends)
    out = np.empty((n_maps + 1, x0.shape[0]))
    x, y = x0.copy(), y0.copy()
    out[0] = _dist_numpy(x, y, metric)
    lo = 0
    ops_l = ops.tolist()
    par_l = params.tolist()
    for n in range(n_maps):
        hi = int(ends[n])
        x = _run_numpy(x, ops_l, par_l, lo, hi)
        y = _run_numpy(y, ops_l, par_l, lo, hi)
        out[n + 1] = _dist_numpy(x, y, metric)
        lo = hi
    return out


# ---------------------------------------------------------------------------
# numba backend
# ---------------------------------------------------------------------------

@njit(cache=True)
def _op_scalar(v, op, param):
    if op == 1:
        return param * v * (1.0 - v)
    if op == 2:
        if v < 0.5:
            return param * v
        return param * (1.0 - v)
    if op == 3:
        y = 2.0 * v
        if y >= 1.0:
            y = y - 1.0
        if y >= 1.0:
            y = y - 1.0
        return y
    if op == 4:
        return v ** param
    return v


@njit(cache=True)
def _dist_row(x, y, i, metric):
    if metric == 0:
        return abs(x[i, 0] - y[i, 0])
    dx = x[i, 0] - y[i, 0]
    dy = x[i, 1] - y[i, 1]
    return np.sqrt(dx * dx + dy * dy)


@njit(cache=True)
def _orbit_nb(x0, ops, params, ends, out):
    m, d = x0.shape
    n_maps = ends.shape[0]
    for i in range(m):
        for c in range(d):
            v = x0[i, c]
            out[0, i, c] = v
            lo = 0
            for n in range(n_maps):
                hi = ends[n]
                for j in range(lo, hi):
                    v = _op_scalar(v, ops[j], params[j])
                out[n + 1, i, c] = v
                lo = hi


@njit(cache=True)
def _segment_nb(x, ops, params):
    m, d = x.shape
    for i in range(m):
        for c in range(d):
            v = x[i, c]
            for j in range(ops.shape[0]):
                v = _op_scalar(v, ops[j], params[j])
            x[i, c] = v


@njit(cache=True)
def _pair_distances_nb(x0, y0, ops, params, ends, metric, out):
    m, d = x0.shape
    n_maps = ends.shape[0]
    x = x0.copy()
    y = y0.copy()
    for i in range(m):
        out[0, i] = _dist_row(x, y, i, metric)
        lo = 0
        for n in range(n_maps):
            hi = ends[n]
            for c in range(d):
                u = x[i, c]
                v = y[i, c]
                for j in range(lo, hi):
                    u = _op_scalar(u, ops[j], params[j])
                    v = _op_scalar(v, ops[j], params[j])
                x[i, c] = u
                y[i, c] = v
            out[n + 1, i] = _dist_row(x, y, i, metric)
            lo = hi


def orbit_numba(x0, ops, params, ends):
    out = np.empty((len(ends) + 1,) + x0.shape)
    _orbit_nb(x0, ops, params, ends, out)
    return out


def segment_numba(x0, ops, params):
    x = x0.copy()
    _segment_nb(x, ops, params)
    return x


def pair_distances_numba(x0, y0, ops, params, ends, metric):
    out = np.empty((len(ends) + 1, x0.shape[0]))
    _pair_distances_nb(x0, y0, ops, params, ends, metric, out)
    return out


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

def _prep(x0, ops, params, ends=None):
    x0 = np.ascontiguousarray(x0, dtype=np.float64)
    if x0.ndim == 1:
        x0 = x0[:, None]
    ops = np.ascontiguousarray(ops, dtype=np.int64)
    params = np.ascontiguousarray(params, dtype=np.float64)
    if ends is None:
        return x0, ops, params
    return x0, ops, params, np.ascontiguousarray(ends, dtype=np.int64)


def _pick(backend):
    backend = backend or default_backend()
    if backend == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is unavailable")
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    return backend


def run_orbit(x0, ops, params, ends, backend=None):
    """Orbit of a batch of points: array of shape (len(ends)+1, m, d)."""
    x0, ops, params, ends = _prep(x0, ops, params, ends)
    if _pick(backend) == "numba":
        return orbit_numba(x0, ops, params, ends)
    return orbit_numpy(x0, ops, params, ends)


def run_segment(x0, ops, params, backend=None):
    """Apply every operation of the program to each point of the batch."""
    x0, ops, params = _prep(x0, ops, params)
    if _pick(backend) == "numba":
        return segment_numba(x0, ops, params)
    return segment_numpy(x0, ops, params)


def run_pair_distances(x0, y0, ops, params, ends, metric, backend=None):
    """Distances between paired orbits: array (len(ends)+1, m); row 0 is d(x0, y0)."""
    x0, ops, params, ends = _prep(x0, ops, params, ends)
    y0 = np.ascontiguousarray(y0, dtype=np.float64)
    if y0.ndim == 1:
        y0 = y0[:, None]
    if _pick(backend) == "numba":
        return pair_distances_numba(x0, y0, ops, params, ends, metric)
    return pair_distances_numpy(x0, y0, ops, params, ends, metric)
