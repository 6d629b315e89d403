"""Eventually periodic binary sequences and the exact shift-space metric.

A ``SymbolicPoint`` stores a sequence ``s`` as a left periodic word, a finite
core and a right periodic word, together with ``start``: the sequence index
of ``core[0]``.  Reading the sequence:

    s[i] = core[i - start]                      start <= i < start + len(core)
    s[i] = right[(i - start - len(core)) % p_R] i >= start + len(core)
    s[i] = left[(i - start) % p_L]              i < start

One-sided points (``left is None``) only have indices ``i >= 0`` and are
always stored with ``start == 0``.

Every constructor canonicalizes: periods are reduced to primitive words, the
core is the shortest window outside of which the sequence is periodic, and a
purely periodic two-sided sequence is anchored at index 0.  Two points are
equal iff their canonical fields are equal.

Shifting only moves ``start`` (two-sided) or slices the core (one-sided), so
``shift(p, a)`` followed by ``shift(., -a)`` returns ``p`` exactly.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd

import numpy as np

from .errors import DomainViolation, NonInvertibleMap

# Words that differ only past this index contribute less than half the
# smallest subnormal double; the rounded distance is 0.0 from there on.
_UNDERFLOW_INDEX = 1080
_FAST_WINDOW = 192


def _primitive(word):
    word = tuple(int(b) for b in word)
    if not word:
        raise ValueError("periodic words must be nonempty")
    if any(b not in (0, 1) for b in word):
        raise ValueError("symbols must be 0 or 1")
    n = len(word)
    for p in range(1, n + 1):
        if n % p == 0 and word[:p] * (n // p) == word:
            return word[:p]
    return word


def _periodic(word, a, b):
    """word repeated periodically, read at indices a..b-1."""
    if len(word) == 1:
        return np.full(b - a, word[0], dtype=np.uint8)
    k = a % len(word)
    reps = -(-(b - a + k) // len(word))
    return np.tile(np.asarray(word, dtype=np.uint8), reps)[k : k + b - a]


def _lcm(a, b):
    return a * b // gcd(a, b)


class SymbolicPoint:
    """Canonical eventually periodic binary sequence (one- or two-sided)."""

    __slots__ = ("left", "core", "right", "start", "_key", "_hash")

    def __init__(self, core=(), right=(0,), left=None, start=0):
        right = _primitive(right)
        left = None if left is None else _primitive(left)
        core_arr = np.asarray(core, dtype=np.uint8).ravel()
        if core_arr.size and core_arr.max() > 1:
            raise ValueError("symbols must be 0 or 1")
        left, core_arr, right, start = _canonicalize(left, core_arr, right, int(start))
        core_arr.flags.writeable = False
        self._set(left, core_arr, right, start)

    def _set(self, left, core, right, start):
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "core", core)
        object.__setattr__(self, "right", right)
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "_key", None)
        object.__setattr__(self, "_hash", None)

    @classmethod
    def _raw(cls, left, core, right, start):
        # trusted constructor for already-canonical fields
        obj = cls.__new__(cls)
        obj._set(left, core, right, start)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("SymbolicPoint is immutable")

    # ---- basic properties -------------------------------------------------
    @property
    def two_sided(self):
        return self.left is not None

    @property
    def end(self):
        """Index of the first symbol of the right periodic tail."""
        return self.start + len(self.core)

    def at(self, i):
        i = int(i)
        rel = i - self.start
        n = len(self.core)
        if 0 <= rel < n:
            return int(self.core[rel])
        if rel >= n:
            return self.right[(rel - n) % len(self.right)]
        if self.left is None:
            raise DomainViolation(f"index {i} is undefined on a one-sided sequence")
        return self.left[rel % len(self.left)]

    def symbols(self, lo, hi):
        """Symbols at indices lo, ..., hi-1 as a uint8 array."""
        lo, hi = int(lo), int(hi)
        if hi <= lo:
            return np.zeros(0, dtype=np.uint8)
        if self.left is None and lo < 0:
            raise DomainViolation("negative index on a one-sided sequence")
        a, b = lo - self.start, hi - self.start
        n = len(self.core)
        if 0 <= a and b <= n:
            return self.core[a:b]
        parts = []
        if a < 0:
            stop = min(b, 0)
            parts.append(_periodic(self.left, a, stop))
            a = stop
        if a < b and a < n:
            stop = min(b, n)
            parts.append(self.core[a:stop])
            a = stop
        if a < b:
            parts.append(_periodic(self.right, a - n, b - n))
        return parts[0] if len(parts) == 1 else np.concatenate(parts)

    # ---- equality ---------------------------------------------------------
    def _cmp_key(self):
        if self._key is None:
            object.__setattr__(
                self, "_key", (self.left, self.right, self.start, len(self.core), self.core.tobytes())
            )
        return self._key

    def __eq__(self, other):
        if not isinstance(other, SymbolicPoint):
            return NotImplemented
        if (self.left, self.right, self.start, len(self.core)) != (
            other.left, other.right, other.start, len(other.core)
        ):
            return False
        return bool(np.array_equal(self.core, other.core))

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash(self._cmp_key()))
        return self._hash

    def __repr__(self):
        core = "".join(map(str, self.core[:24].tolist()))
        if len(self.core) > 24:
            core += f"...({len(self.core)})"
        right = "".join(map(str, self.right))
        if self.left is None:
            return f"SymbolicPoint({core}({right})^inf)"
        left = "".join(map(str, self.left))
        return f"SymbolicPoint(^inf({left}) @{self.start} {core} ({right})^inf)"


def _canonicalize(left, core, right, start):
    """Return canonical (left, core, right, start) for the raw representation."""
    p_r = len(right)
    n = len(core)
    core_list = core.tolist()

    def s(i):
        rel = i - start
        if 0 <= rel < n:
            return core_list[rel]
        if rel >= n:
            return right[(rel - n) % p_r]
        return left[rel % len(left)]

    if left is None:
        if start < 0:
            raise DomainViolation("one-sided sequences start at index 0")
        b = start + n
        while b > 0 and s(b - 1) == s(b - 1 + p_r):
            b -= 1
        new_core = np.array([s(i) for i in range(0, b)], dtype=np.uint8)
        new_right = tuple(s(b + j) for j in range(p_r))
        return None, new_core, new_right, 0

    p_l = len(left)
    floor = start - (p_l + p_r) - 1
    b = start + n
    while b > floor and s(b - 1) == s(b - 1 + p_r):
        b -= 1
    if b <= floor:
        # periodic on the whole line; both periods coincide (Fine-Wilf)
        word = tuple(s(j) for j in range(p_r))
        return word, np.zeros(0, dtype=np.uint8), word, 0
    # if the right-periodic region reaches into the left tail the core is
    # empty and the boundary sits at b
    a = min(start, b)
    while a < b and s(a) == s(a - p_l):
        a += 1
    new_core = np.array([s(i) for i in range(a, b)], dtype=np.uint8)
    new_left = tuple(s(a - p_l + j) for j in range(p_l))
    new_right = tuple(s(b + j) for j in range(p_r))
    return new_left, new_core, new_right, a


# ---- constructors ---------------------------------------------------------

def constant(symbol, two_sided=True):
    return SymbolicPoint((), (symbol,), (symbol,) if two_sided else None, 0)


def from_blocks(blocks, tail, left=None):
    """Sequence made of consecutive runs ``[(symbol, length), ...]`` starting at index 0.

    ``tail`` is the right periodic word after the last run; ``left`` (two-sided
    only) the periodic word before index 0.
    """
    parts = [np.full(int(length), symbol, dtype=np.uint8) for symbol, length in blocks]
    core = np.concatenate(parts) if parts else np.zeros(0, dtype=np.uint8)
    return SymbolicPoint(core, tail, left, 0)


# ---- shift ----------------------------------------------------------------

def shift(p: SymbolicPoint, amount: int) -> SymbolicPoint:
    """Apply sigma^amount, where (sigma s)_i = s_{i+1}."""
    amount = int(amount)
    if amount == 0:
        return p
    if p.two_sided:
        if not len(p.core) and p.left == p.right:
            # purely periodic: anchored at 0, rotate the word instead
            k = amount % len(p.right)
            word = p.right[k:] + p.right[:k]
            return SymbolicPoint._raw(word, p.core, word, 0)
        return SymbolicPoint._raw(p.left, p.core, p.right, p.start - amount)
    if amount < 0:
        raise NonInvertibleMap("the one-sided shift has no inverse")
    n = len(p.core)
    if amount <= n:
        core = p.core[amount:]
        return SymbolicPoint._raw(None, core, p.right, 0)
    k = (amount - n) % len(p.right)
    return SymbolicPoint._raw(None, p.core[n:], p.right[k:] + p.right[:k], 0)


# ---- exact metric ---------------------------------------------------------

def _bits_to_int(bits):
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.size == 0:
        return 0
    pad = (-bits.size) % 8
    return int.from_bytes(np.packbits(bits).tobytes(), "big") >> pad


def _coefficients(s, t, lo, hi):
    """Weights c_m for m in [lo, hi): the metric is sum_m c_m 2^-(m+1)."""
    right = (s.symbols(lo, hi) != t.symbols(lo, hi)).astype(np.uint8)
    if not s.two_sided:
        return right, None
    llo = max(lo, 1)
    left = np.zeros(hi - lo, dtype=np.uint8)
    if hi > llo:
        idx = np.arange(-(hi - 1), -llo + 1)
        diff = (s.symbols(idx[0], idx[-1] + 1) != t.symbols(idx[0], idx[-1] + 1)).astype(np.uint8)
        # diff[j] belongs to index idx[j] = -(hi-1)+j, i.e. m = hi-1-j
        left[llo - lo:] = diff[::-1]
    return right, left


def _periodic_extent(s, t):
    """(M, P): for m >= M the coefficient sequence is P-periodic."""
    m_right = max(s.end, t.end, 0)
    period = _lcm(len(s.right), len(t.right))
    if s.two_sided:
        m_left = max(-s.start, -t.start, 0) + 1
        period = _lcm(period, _lcm(len(s.left), len(t.left)))
        return max(m_right, m_left), period
    return m_right, period


def _exact_value(s, t, m_head, period):
    r_head, l_head = _coefficients(s, t, 0, m_head)
    r_tail, l_tail = _coefficients(s, t, m_head, m_head + period)
    head = _bits_to_int(r_head)
    tail = _bits_to_int(r_tail)
    if l_head is not None:
        head += _bits_to_int(l_head)
        tail += _bits_to_int(l_tail)
    # head / 2^M + 2^-M * tail / (2^P - 1)
    return Fraction(head * ((1 << period) - 1) + tail, ((1 << period) - 1) << m_head)


def distance(s: SymbolicPoint, t: SymbolicPoint) -> float:
    """Exact shift-space distance rounded once to the nearest double.

    One-sided: sum_{i>=0} |s_i - t_i| / 2^(i+1).
    Two-sided: sum_{i in Z} |s_i - t_i| / 2^(|i|+1).
    """
    if s.two_sided != t.two_sided:
        raise DomainViolation("cannot compare one-sided and two-sided sequences")
    if s is t:
        return 0.0
    m_head, period = _periodic_extent(s, t)
    limit = min(m_head + period, _UNDERFLOW_INDEX)
    # locate the first nonzero weight
    m0 = None
    lo, step = 0, 64
    while lo < limit:
        hi = min(lo + step, limit)
        r, l = _coefficients(s, t, lo, hi)
        c = r if l is None else r | l
        nz = np.flatnonzero(c)
        if nz.size:
            m0 = lo + int(nz[0])
            break
        lo, step = hi, step * 4
    if m0 is None:
        return 0.0
    if m_head + period - m0 <= _FAST_WINDOW:
        return float(_exact_value(s, t, m_head, period))
    # bracket the value using a window of _FAST_WINDOW weights after m0
    hi = m0 + _FAST_WINDOW
    r, l = _coefficients(s, t, m0, hi)
    window = _bits_to_int(r) + (0 if l is None else _bits_to_int(l))
    cmax = 1 if l is None else 2
    den = 1 << hi
    lo_val = window / den
    hi_val = (window + cmax) / den
    if lo_val == hi_val:
        return lo_val
    return float(_exact_value(s, t, m_head, period))


def exact_distance(s: SymbolicPoint, t: SymbolicPoint) -> Fraction:
    """The distance as an exact rational (geometric tails in closed form)."""
    if s.two_sided != t.two_sided:
        raise DomainViolation("cannot compare one-sided and two-sided sequences")
    m_head, period = _periodic_extent(s, t)
    return _exact_value(s, t, m_head, period)
