"""Compact metric spaces and their points."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import kernels
from .errors import DomainViolation
from .symbolic import SymbolicPoint, constant
from .symbolic import distance as symbolic_distance


class SpaceKind(str, Enum):
    UNIT_INTERVAL = "interval"
    UNIT_SQUARE = "square"
    SHIFT_ONE_SIDED = "shift1"
    SHIFT_TWO_SIDED = "shift2"


@dataclass(frozen=True)
class Space:
    kind: SpaceKind
    alphabet: int = 2

    def __post_init__(self):
        object.__setattr__(self, "kind", SpaceKind(self.kind))
        if self.alphabet != 2:
            raise ValueError("only the binary alphabet is supported")

    @property
    def symbolic(self):
        return self.kind in (SpaceKind.SHIFT_ONE_SIDED, SpaceKind.SHIFT_TWO_SIDED)

    @property
    def two_sided(self):
        return self.kind is SpaceKind.SHIFT_TWO_SIDED

    @property
    def dim(self):
        return {SpaceKind.UNIT_INTERVAL: 1, SpaceKind.UNIT_SQUARE: 2}.get(self.kind, 0)

    @property
    def diameter(self):
        return {
            SpaceKind.UNIT_INTERVAL: 1.0,
            SpaceKind.UNIT_SQUARE: math.sqrt(2.0),
            SpaceKind.SHIFT_ONE_SIDED: 1.0,
            SpaceKind.SHIFT_TWO_SIDED: 1.5,
        }[self.kind]

    @property
    def metric_code(self):
        return kernels.METRIC_ABS if self.kind is SpaceKind.UNIT_INTERVAL else kernels.METRIC_EUCLID

    def point(self, value):
        """Validate ``value`` as a point of this space and return it in canonical form."""
        if self.symbolic:
            if not isinstance(value, SymbolicPoint) or value.two_sided != self.two_sided:
                raise DomainViolation(f"{value!r} is not a point of {self.kind.value}")
            return value
        if isinstance(value, SymbolicPoint):
            raise DomainViolation(f"{value!r} is not a point of {self.kind.value}")
        arr = np.array(value, dtype=np.float64, ndmin=1)
        if arr.shape != (self.dim,):
            raise DomainViolation(f"expected {self.dim} coordinate(s), got shape {arr.shape}")
        if not np.all((arr >= 0.0) & (arr <= 1.0)):
            raise DomainViolation(f"coordinates {arr.tolist()} leave the unit {self.kind.value}")
        arr.flags.writeable = False
        return arr

    def contains(self, value):
        try:
            self.point(value)
        except DomainViolation:
            return False
        return True

    def distance(self, p, q):
        if self.symbolic:
            return symbolic_distance(self.point(p), self.point(q))
        p, q = self.point(p), self.point(q)
        if self.kind is SpaceKind.UNIT_INTERVAL:
            return float(abs(p[0] - q[0]))
        dx = p[0] - q[0]
        dy = p[1] - q[1]
        return float(np.sqrt(dx * dx + dy * dy))

    def origin(self):
        """A fixed reference point (the all-zeros word or the zero vector)."""
        if self.symbolic:
            return constant(0, self.two_sided)
        return self.point(np.zeros(self.dim))


INTERVAL = Space(SpaceKind.UNIT_INTERVAL)
SQUARE = Space(SpaceKind.UNIT_SQUARE)
SHIFT1 = Space(SpaceKind.SHIFT_ONE_SIDED)
SHIFT2 = Space(SpaceKind.SHIFT_TWO_SIDED)


def space_of(p):
    """Infer the space a point lives in."""
    if isinstance(p, SymbolicPoint):
        return SHIFT2 if p.two_sided else SHIFT1
    arr = np.array(p, dtype=np.float64, ndmin=1)
    if arr.shape == (1,):
        return INTERVAL
    if arr.shape == (2,):
        return SQUARE
    raise DomainViolation(f"cannot infer a space for shape {arr.shape}")
