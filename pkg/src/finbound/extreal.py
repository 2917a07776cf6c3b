"""Values in [0, +inf] with saturating arithmetic.

All distances in this package live here: quasi-distances on completions
genuinely take the value +inf (unreachable targets, diverging limits), so
infinity is carried as the IEEE inf sentinel and treated as absorbing,
never as a large finite float.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import total_ordering


@total_ordering
@dataclass(frozen=True)
class ExtendedNonNeg:
    """A nonnegative real number or +inf."""

    value: float

    def __post_init__(self):
        v = float(self.value)
        if math.isnan(v) or v < 0.0:
            raise ValueError(f"not a value in [0, inf]: {self.value!r}")
        object.__setattr__(self, "value", v)

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.value)

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.value)

    def __add__(self, other: "ExtendedNonNeg | float") -> "ExtendedNonNeg":
        return ExtendedNonNeg(self.value + _raw(other))

    __radd__ = __add__

    def __eq__(self, other) -> bool:
        return isinstance(other, (ExtendedNonNeg, int, float)) and \
            self.value == _raw(other)

    def __lt__(self, other) -> bool:
        return self.value < _raw(other)

    def __float__(self) -> float:
        return self.value

    def __repr__(self) -> str:
        return "INF" if self.is_infinite else f"ExtendedNonNeg({self.value!r})"

    def approx_le(self, other: "ExtendedNonNeg | float", tol: float) -> bool:
        """Tolerant comparison; infinity only compares <= infinity."""
        a, b = self.value, _raw(other)
        if math.isinf(a):
            return math.isinf(b)
        if math.isinf(b):
            return True
        return a <= b + tol

    def approx_eq(self, other: "ExtendedNonNeg | float", tol: float) -> bool:
        a, b = self.value, _raw(other)
        if math.isinf(a) or math.isinf(b):
            return math.isinf(a) and math.isinf(b)
        return abs(a - b) <= tol


def _raw(x) -> float:
    return x.value if isinstance(x, ExtendedNonNeg) else float(x)


INF = ExtendedNonNeg(math.inf)
ZERO = ExtendedNonNeg(0.0)
