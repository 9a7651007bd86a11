"""Left-continuous step functions [0, inf] -> [0, 1] in canonical form.

A step function is stored as a tuple of jumps ``(u, p)`` with strictly
increasing thresholds and strictly increasing levels in (0, 1].  It takes
the value ``max{p : u < s}`` at ``s`` (0 if there is none), so it vanishes
at 0 and is left-continuous everywhere, including at infinity.
"""
from bisect import bisect_left, bisect_right
from fractions import Fraction

from .extnum import INF, is_inf
from .tnorms import TNORMS

ONE = Fraction(1)
ZERO = Fraction(0)


class StepFunction:
    __slots__ = ("jumps", "_us", "_hash")

    def __init__(self, jumps=()):
        jumps = tuple((Fraction(u), Fraction(p)) for u, p in jumps)
        for i, (u, p) in enumerate(jumps):
            if u < 0 or not (0 < p <= 1):
                raise ValueError(f"jump {(u, p)} outside canonical range")
            if i and (u <= jumps[i - 1][0] or p <= jumps[i - 1][1]):
                raise ValueError("jumps are not in canonical form; use sf_normalize")
        self.jumps = jumps
        self._us = tuple(u for u, _ in jumps)
        self._hash = None

    def __eq__(self, other):
        return isinstance(other, StepFunction) and self.jumps == other.jumps

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(("sf", self.jumps))
        return self._hash

    def __repr__(self):
        return f"StepFunction({format_step(self)})"

    @property
    def thresholds(self):
        return self._us

    @property
    def top_level(self):
        return self.jumps[-1][1] if self.jumps else ZERO

    def after(self, t):
        """Value on the interval just to the right of ``t``."""
        i = bisect_right(self._us, t)
        return self.jumps[i - 1][1] if i else ZERO


def sf_eval(phi: StepFunction, t) -> Fraction:
    if is_inf(t):
        if t is not INF:
            raise ValueError("step functions live on [0, inf]")
        return phi.top_level
    i = bisect_left(phi._us, t)
    return phi.jumps[i - 1][1] if i else ZERO


def sf_normalize(raw) -> StepFunction:
    """Canonical form of the pointwise maximum of the given raw jumps."""
    items = []
    for u, p in raw:
        u, p = Fraction(u), Fraction(p)
        if not (0 <= p <= 1):
            raise ValueError(f"level {p} outside [0, 1]")
        if u < 0:
            raise ValueError(f"threshold {u} is negative")
        if p:
            items.append((u, p))
    items.sort()
    out = []
    best = ZERO
    for u, p in items:
        if p <= best:
            continue
        if out and out[-1][0] == u:
            out[-1] = (u, p)
        else:
            out.append((u, p))
        best = p
    sf = StepFunction.__new__(StepFunction)
    sf.jumps = tuple(out)
    sf._us = tuple(u for u, _ in out)
    sf._hash = None
    return sf


BOTTOM = StepFunction(())
UNIT = StepFunction(((0, 1),))


def pi(u, p) -> StepFunction:
    """The single-jump function with threshold ``u`` and level ``p``."""
    return sf_normalize([(u, p)])


def sf_le(phi, psi) -> bool:
    for t in sorted(set(phi._us) | set(psi._us)):
        if phi.after(t) > psi.after(t):
            return False
    return True


def sf_join(fs) -> StepFunction:
    raw = []
    for f in fs:
        raw.extend(f.jumps)
    return sf_normalize(raw)


def sf_meet(fs) -> StepFunction:
    fs = list(fs)
    if not fs:
        return UNIT
    ts = sorted(set().union(*(f._us for f in fs)))
    return sf_normalize([(t, min(f.after(t) for f in fs)) for t in ts])


def sf_convolve(phi, psi, tnorm: str) -> StepFunction:
    tn = TNORMS[tnorm][0]
    return sf_normalize(
        [(u + v, tn(p, q)) for u, p in phi.jumps for v, q in psi.jumps])


def sf_residual(phi, chi, tnorm: str) -> StepFunction:
    """Largest psi with phi (x) psi <= chi."""
    res = TNORMS[tnorm][1]
    if not phi.jumps:
        return UNIT
    breaks = {ZERO}
    for v in chi._us:
        for u in phi._us:
            if v >= u:
                breaks.add(v - u)
    raw = []
    for b in breaks:
        # right limit of chi at u+b is chi.after(u+b)
        g = min(res(p, chi.after(u + b)) for u, p in phi.jumps)
        raw.append((b, g))
    return sf_normalize(raw)


def format_step(phi: StepFunction) -> str:
    from .extnum import format_rational
    return "[" + ",".join(f"({format_rational(u)},{format_rational(p)})"
                          for u, p in phi.jumps) + "]"
