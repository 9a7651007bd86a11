"""Exact extended rationals: Fraction plus the two symbols +inf and -inf."""
import re
from fractions import Fraction


class _Infinity:
    __slots__ = ("sign",)

    def __init__(self, sign):
        self.sign = sign

    def __repr__(self):
        return "INF" if self.sign > 0 else "NEG_INF"

    def __str__(self):
        return "inf" if self.sign > 0 else "-inf"

    def __neg__(self):
        return NEG_INF if self.sign > 0 else INF

    def __eq__(self, other):
        return self is other

    def __hash__(self):
        return hash(("inf", self.sign))

    def __reduce__(self):
        return (_infinity, (self.sign,))

    def _key(self, other):
        return other.sign if isinstance(other, _Infinity) else 0

    def __lt__(self, other):
        return self.sign < self._key(other)

    def __le__(self, other):
        return self.sign <= self._key(other)

    def __gt__(self, other):
        return self.sign > self._key(other)

    def __ge__(self, other):
        return self.sign >= self._key(other)


INF = _Infinity(1)
NEG_INF = _Infinity(-1)


def _infinity(sign):
    return INF if sign > 0 else NEG_INF


def is_inf(x) -> bool:
    return isinstance(x, _Infinity)


_RAT = re.compile(r"^[+-]?\d+(/\d+)?$")


def parse_extended(text: str):
    """Parse an integer, ``p/q``, ``inf`` or ``-inf``."""
    t = text.strip()
    if t in ("inf", "+inf", "∞"):
        return INF
    if t in ("-inf", "-∞"):
        return NEG_INF
    if not _RAT.match(t):
        raise ValueError(f"not a rational literal: {text!r}")
    den = t.split("/")[1] if "/" in t else "1"
    if int(den) == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(t)


def format_rational(x) -> str:
    if is_inf(x):
        return str(x)
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
