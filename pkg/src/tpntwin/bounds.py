"""Exact bounds: rationals plus a positive infinity, and closed time intervals."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Union


class _Infinity:
    """Positive infinity, greater than every rational and absorbing under ``+``."""

    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "w"

    def __reduce__(self):
        return (_Infinity, ())

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("tpntwin.INF")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __add__(self, other):
        return self

    __radd__ = __add__


INF = _Infinity()

Bound = Union[Fraction, _Infinity]


def as_bound(value) -> Bound:
    """Coerce ``value`` to an exact bound.

    Accepts ints, rationals, strings such as ``"3/2"`` or ``"0.5"``, and
    :data:`INF` (also spelled ``"w"`` or ``"inf"``). Floats are rejected so
    that no rounding can sneak in.
    """
    if value is INF:
        return INF
    if isinstance(value, bool):
        raise TypeError("booleans are not bounds")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        if value.strip() in ("w", "inf", "oo"):
            return INF
        return Fraction(value.strip())
    raise TypeError(f"not an exact bound: {value!r}")


def format_bound(b: Bound) -> str:
    return "w" if b is INF else str(b)


@dataclass(frozen=True)
class TimeInterval:
    """Closed interval ``[low, high]``; ``high`` may be :data:`INF`."""

    low: Fraction
    high: Bound = INF

    def __post_init__(self):
        low = as_bound(self.low)
        high = as_bound(self.high)
        if low is INF:
            raise ValueError("interval lower endpoint must be finite")
        if low < 0:
            raise ValueError(f"negative interval endpoint {low}")
        if high < low:
            raise ValueError(f"empty interval [{low},{format_bound(high)}]")
        object.__setattr__(self, "low", low)
        object.__setattr__(self, "high", high)

    @classmethod
    def parse(cls, text: str) -> "TimeInterval":
        """Parse ``"[a,b]"`` or ``"[a,w["``."""
        text = text.strip()
        if not text.startswith("[") or "," not in text:
            raise ValueError(f"bad interval {text!r}")
        lo, hi = text[1:-1].split(",")
        if hi.strip() == "w":
            if not text.endswith("["):
                raise ValueError(f"infinite bound must be open: {text!r}")
            return cls(as_bound(lo), INF)
        if not text.endswith("]"):
            raise ValueError(f"only closed intervals are supported: {text!r}")
        return cls(as_bound(lo), as_bound(hi))

    def __str__(self):
        if self.high is INF:
            return f"[{self.low},w["
        return f"[{self.low},{self.high}]"

    def contains(self, value) -> bool:
        return self.low <= value <= self.high


ANY_TIME = TimeInterval(Fraction(0), INF)
