"""Composable descriptions of continuous self-maps.

A map is a frozen dataclass; ``Composite`` applies its members right to left,
``Power`` repeats its base.  Real maps compile to the primitive operation
lists consumed by :mod:`nds_chaoslab.kernels`; shift maps compile to a net
index offset, which is exact, so a power of the shift is a single move.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .errors import DomainViolation, NonInvertibleMap
from .spaces import space_of
from .symbolic import shift as _shift


class MapSpec:
    """Marker base class for map descriptions."""

    def __call__(self, p):
        return apply_map(self, p)


@dataclass(frozen=True)
class Identity(MapSpec):
    def __str__(self):
        return "id"


@dataclass(frozen=True)
class Logistic(MapSpec):
    mu: float

    def __post_init__(self):
        if not 0.0 <= self.mu <= 4.0:
            raise ValueError(f"logistic parameter {self.mu} outside [0, 4]")

    def __str__(self):
        return f"logistic({self.mu!r})"


@dataclass(frozen=True)
class Tent(MapSpec):
    slope: float

    def __post_init__(self):
        if not 0.0 <= self.slope <= 2.0:
            raise ValueError(f"tent slope {self.slope} outside [0, 2]")

    def __str__(self):
        return f"tent({self.slope!r})"


@dataclass(frozen=True)
class Doubling(MapSpec):
    def __str__(self):
        return "doubling"


@dataclass(frozen=True)
class Warp(MapSpec):
    """x -> x**exponent, a homeomorphism of [0, 1] for exponent > 0."""

    exponent: float

    def __post_init__(self):
        if not self.exponent > 0.0:
            raise ValueError("warp exponent must be positive")

    def __str__(self):
        return f"warp({self.exponent!r})"


@dataclass(frozen=True)
class Shift(MapSpec):
    direction: str = "forward"

    def __post_init__(self):
        if self.direction not in ("forward", "backward"):
            raise ValueError("shift direction is 'forward' or 'backward'")

    def __str__(self):
        return "shift" if self.direction == "forward" else "shift^-1"


@dataclass(frozen=True)
class Power(MapSpec):
    base: MapSpec
    exponent: int

    def __post_init__(self):
        object.__setattr__(self, "exponent", int(self.exponent))

    def __str__(self):
        return f"({self.base})^{self.exponent}"


@dataclass(frozen=True)
class Composite(MapSpec):
    """maps[0] o maps[1] o ... o maps[-1]; the last entry acts first."""

    maps: tuple

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(self.maps))

    def __str__(self):
        return " o ".join(str(m) for m in self.maps) or "id"


REAL_KINDS = (Logistic, Tent, Doubling, Warp)


def is_symbolic_map(m):
    if isinstance(m, Shift):
        return True
    if isinstance(m, Power):
        return is_symbolic_map(m.base)
    if isinstance(m, Composite):
        return any(is_symbolic_map(x) for x in m.maps)
    return False


def is_real_map(m):
    if isinstance(m, REAL_KINDS):
        return True
    if isinstance(m, Power):
        return is_real_map(m.base)
    if isinstance(m, Composite):
        return any(is_real_map(x) for x in m.maps)
    return False


@lru_cache(maxsize=4096)
def real_ops(m):
    """Primitive operations of a real map, in application order.

    Powers expand to repeated applications; no shortcut is taken so the
    floating-point operation order is fixed.
    """
    if isinstance(m, Identity):
        return ()
    if isinstance(m, Logistic):
        return ((kernels.OP_LOGISTIC, float(m.mu)),)
    if isinstance(m, Tent):
        return ((kernels.OP_TENT, float(m.slope)),)
    if isinstance(m, Doubling):
        return ((kernels.OP_DOUBLING, 0.0),)
    if isinstance(m, Warp):
        return ((kernels.OP_WARP, float(m.exponent)),)
    if isinstance(m, Shift):
        raise DomainViolation("the shift acts on sequence spaces, not on real points")
    if isinstance(m, Power):
        if m.exponent >= 0:
            return real_ops(m.base) * m.exponent
        return real_ops(inverse(m.base)) * (-m.exponent)
    if isinstance(m, Composite):
        ops = ()
        for part in reversed(m.maps):
            ops = ops + real_ops(part)
        return ops
    raise TypeError(f"not a map: {m!r}")


def inverse(m):
    """Inverse map description; raises NonInvertibleMap for non-homeomorphisms."""
    if isinstance(m, Identity):
        return m
    if isinstance(m, Warp):
        return Warp(1.0 / m.exponent)
    if isinstance(m, Shift):
        return Shift("backward" if m.direction == "forward" else "forward")
    if isinstance(m, Power):
        return Power(inverse(m.base), m.exponent)
    if isinstance(m, Composite):
        return Composite(tuple(inverse(x) for x in reversed(m.maps)))
    raise NonInvertibleMap(f"{m} is not a homeomorphism")


def shift_offset(m, two_sided=True):
    """Net index offset of a shift-space map: m(s) = sigma^offset(s)."""
    if isinstance(m, Identity):
        return 0
    if isinstance(m, Shift):
        if m.direction == "backward":
            if not two_sided:
                raise NonInvertibleMap("backward shift is undefined on the one-sided shift")
            return -1
        return 1
    if isinstance(m, Power):
        base = shift_offset(m.base, two_sided)
        if m.exponent < 0 and base != 0 and not two_sided:
            raise NonInvertibleMap("negative powers of the one-sided shift are undefined")
        return base * m.exponent
    if isinstance(m, Composite):
        return sum(shift_offset(x, two_sided) for x in m.maps)
    if isinstance(m, REAL_KINDS):
        raise DomainViolation(f"{m} acts on real points, not on sequences")
    raise TypeError(f"not a map: {m!r}")


def is_invertible(m, two_sided=True):
    try:
        if is_symbolic_map(m):
            shift_offset(inverse(m), two_sided)
        else:
            inverse(m)
    except NonInvertibleMap:
        return False
    return True


def apply_map(m: MapSpec, p):
    """Image of ``p`` under ``m``; the point type selects the space."""
    space = space_of(p)
    p = space.point(p)
    if space.symbolic:
        return _shift(p, shift_offset(m, space.two_sided))
    ops = real_ops(m)
    if not ops:
        return p
    op = np.array([o for o, _ in ops], dtype=np.int64)
    par = np.array([v for _, v in ops], dtype=np.float64)
    out = kernels.run_segment(np.asarray(p)[None, :], op, par)[0]
    out.flags.writeable = False
    return out


_NAMED = {
    "id": lambda a: Identity(),
    "identity": lambda a: Identity(),
    "logistic": lambda a: Logistic(float(a)),
    "tent": lambda a: Tent(float(a)),
    "doubling": lambda a: Doubling(),
    "warp": lambda a: Warp(float(a)),
    "shift": lambda a: Shift("forward"),
    "shift-back": lambda a: Shift("backward"),
}


def parse_map(text):
    """Parse ``name[:param][^power]``, e.g. ``tent:2``, ``logistic:3.9``, ``shift^2``."""
    text = text.strip()
    power = None
    if "^" in text:
        text, exp = text.split("^", 1)
        power = int(exp)
    name, _, arg = text.partition(":")
    name = name.strip().lower()
    if name not in _NAMED:
        raise ValueError(f"unknown map {name!r}; known: {', '.join(sorted(_NAMED))}")
    if name in ("logistic", "tent", "warp") and not arg:
        raise ValueError(f"map {name!r} needs a parameter, e.g. {name}:2")
    m = _NAMED[name](arg)
    return Power(m, power) if power is not None else m

