"""The five quantale families with exact order, lattice, tensor and residua.

Every family is a frozen object that doubles as the quantale identifier.
Values are plain Python objects:

=================  ==================================================
family             payload
=================  ==================================================
Bool2              ``bool``
Lawvere            ``Fraction >= 0`` or ``INF``
ExtendedReal       ``Fraction``, ``INF`` or ``NEG_INF``
UnitInterval       ``Fraction`` in [0, 1]
DeltaDist          :class:`~kanopt.stepfun.StepFunction`
=================  ==================================================

The module-level ``q_*`` functions check membership before delegating;
the methods on the family objects skip that check and are meant for
inner loops that already validated their inputs.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

from . import stepfun as sf
from .extnum import INF, NEG_INF, format_rational, is_inf, parse_extended
from .tnorms import TNORMS, canonical_tnorm

ZERO = Fraction(0)
ONE = Fraction(1)


class QuantaleMismatch(TypeError):
    """A value does not belong to the quantale it is used with."""

    def __init__(self, q, value):
        super().__init__(f"quantale mismatch: {value!r} is not an element of {q}")


class NotImplementedForDelta(NotImplementedError):
    pass


class Quantale:
    family = ""
    tnorm = None
    commutative = True
    # order is a chain; lets joins/meets use max/min on a sort key
    linear = True

    bottom = top = unit = None

    def contains(self, v) -> bool:
        raise NotImplementedError

    def coerce(self, v):
        """Convert a loosely typed literal (int, str) to a payload."""
        if isinstance(v, str):
            return self.parse(v)
        if isinstance(v, int) and not isinstance(v, bool):
            v = Fraction(v)
        if not self.contains(v):
            raise QuantaleMismatch(self, v)
        return v

    def check(self, v):
        if not self.contains(v):
            raise QuantaleMismatch(self, v)
        return v

    # lattice
    def le(self, a, b) -> bool:
        raise NotImplementedError

    def join(self, xs):
        out = self.bottom
        for x in xs:
            if self.le(out, x):
                out = x
        return out

    def meet(self, xs):
        out = self.top
        for x in xs:
            if self.le(x, out):
                out = x
        return out

    def join2(self, a, b):
        return b if self.le(a, b) else a

    def meet2(self, a, b):
        return a if self.le(a, b) else b

    def tensor(self, a, b):
        raise NotImplementedError

    def lhom(self, x, z):
        raise NotImplementedError

    def rhom(self, z, y):
        # every family here is commutative
        return self.lhom(y, z)

    def totally_below(self, u, v) -> bool:
        raise NotImplementedError

    def parse(self, text: str):
        raise NotImplementedError

    def format(self, v) -> str:
        return format_rational(v)

    def __str__(self):
        return self.name

    @property
    def name(self) -> str:
        return self.family.lower() if self.tnorm is None else f"{self.family.lower()}:{self.tnorm}"


@dataclass(frozen=True)
class Bool2(Quantale):
    family = "Bool2"
    bottom = False
    top = True
    unit = True

    def contains(self, v):
        return isinstance(v, bool)

    def coerce(self, v):
        if isinstance(v, int) and not isinstance(v, bool) and v in (0, 1):
            return bool(v)
        return super().coerce(v)

    def le(self, a, b):
        return (not a) or b

    def join(self, xs):
        return any(xs)

    def meet(self, xs):
        return all(xs)

    def join2(self, a, b):
        return a or b

    def meet2(self, a, b):
        return a and b

    def tensor(self, a, b):
        return a and b

    def lhom(self, x, z):
        return (not x) or z

    def totally_below(self, u, v):
        return v is True

    def parse(self, text):
        t = text.strip()
        if t in ("T", "true", "1"):
            return True
        if t in ("F", "false", "0"):
            return False
        raise ValueError(f"not a boolean literal: {text!r}")

    def format(self, v):
        return "T" if v else "F"

    @property
    def name(self):
        return "bool"


@dataclass(frozen=True)
class Lawvere(Quantale):
    """[0, inf] with the opposite of the numeric order and addition."""

    family = "Lawvere"
    bottom = INF
    top = ZERO
    unit = ZERO

    def contains(self, v):
        return v is INF or (type(v) is Fraction and v >= 0)

    def le(self, a, b):
        return a >= b

    def join(self, xs):
        return min(xs, default=INF)

    def meet(self, xs):
        return max(xs, default=ZERO)

    def join2(self, a, b):
        return a if a <= b else b

    def meet2(self, a, b):
        return a if a >= b else b

    def tensor(self, a, b):
        if a is INF or b is INF:
            return INF
        return a + b

    def lhom(self, x, z):
        # truncated difference z - x
        if x is INF:
            return ZERO
        if z is INF:
            return INF
        d = z - x
        return d if d > 0 else ZERO

    def totally_below(self, u, v):
        return u > v

    def parse(self, text):
        v = parse_extended(text)
        return self.check(v)


@dataclass(frozen=True)
class ExtendedReal(Quantale):
    """[-inf, inf] with the opposite numeric order; inf absorbs everything."""

    family = "ExtendedReal"
    bottom = INF
    top = NEG_INF
    unit = ZERO

    def contains(self, v):
        return v is INF or v is NEG_INF or type(v) is Fraction

    def le(self, a, b):
        return a >= b

    def join(self, xs):
        return min(xs, default=INF)

    def meet(self, xs):
        return max(xs, default=NEG_INF)

    def join2(self, a, b):
        return a if a <= b else b

    def meet2(self, a, b):
        return a if a >= b else b

    def tensor(self, a, b):
        if a is INF or b is INF:
            return INF
        if a is NEG_INF or b is NEG_INF:
            return NEG_INF
        return a + b

    def lhom(self, x, z):
        if x is INF:
            return NEG_INF
        if x is NEG_INF:
            return NEG_INF if z is NEG_INF else INF
        if is_inf(z):
            return z
        return z - x

    def totally_below(self, u, v):
        return u > v

    def parse(self, text):
        return parse_extended(text)

    @property
    def name(self):
        return "extreal"


@dataclass(frozen=True)
class UnitInterval(Quantale):
    """[0, 1] with the numeric order and a continuous t-norm."""

    tnorm: str = "product"
    family = "Unit"
    bottom = ZERO
    top = ONE
    unit = ONE

    def __post_init__(self):
        object.__setattr__(self, "tnorm", canonical_tnorm(self.tnorm))
        t, r = TNORMS[self.tnorm]
        object.__setattr__(self, "_t", t)
        object.__setattr__(self, "_r", r)

    def contains(self, v):
        return type(v) is Fraction and 0 <= v <= 1

    def le(self, a, b):
        return a <= b

    def join(self, xs):
        return max(xs, default=ZERO)

    def meet(self, xs):
        return min(xs, default=ONE)

    def join2(self, a, b):
        return a if a >= b else b

    def meet2(self, a, b):
        return a if a <= b else b

    def tensor(self, a, b):
        return self._t(a, b)

    def lhom(self, x, z):
        return self._r(x, z)

    def totally_below(self, u, v):
        return u < v

    def parse(self, text):
        return self.check(parse_extended(text))


@dataclass(frozen=True)
class DeltaDist(Quantale):
    """Distance distribution functions under convolution by a t-norm."""

    tnorm: str = "product"
    family = "Delta"
    linear = False
    bottom = sf.BOTTOM
    top = sf.UNIT
    unit = sf.UNIT

    def __post_init__(self):
        object.__setattr__(self, "tnorm", canonical_tnorm(self.tnorm))

    def contains(self, v):
        return isinstance(v, sf.StepFunction)

    def le(self, a, b):
        return sf.sf_le(a, b)

    def join(self, xs):
        return sf.sf_join(xs)

    def meet(self, xs):
        return sf.sf_meet(xs)

    def join2(self, a, b):
        return sf.sf_join((a, b))

    def meet2(self, a, b):
        return sf.sf_meet((a, b))

    def tensor(self, a, b):
        return sf.sf_convolve(a, b, self.tnorm)

    def lhom(self, x, z):
        return sf.sf_residual(x, z, self.tnorm)

    def totally_below(self, u, v):
        raise NotImplementedForDelta("the totally-below relation is not implemented for Delta")

    def parse(self, text):
        return parse_step(text)

    def format(self, v):
        return sf.format_step(v)


# --- module-level API ---------------------------------------------------

def _chk(q, *vals):
    for v in vals:
        if not q.contains(v):
            raise QuantaleMismatch(q, v)


def q_le(q: Quantale, a, b) -> bool:
    _chk(q, a, b)
    return q.le(a, b)


def q_join(q: Quantale, xs):
    xs = list(xs)
    _chk(q, *xs)
    return q.join(xs)


def q_meet(q: Quantale, xs):
    xs = list(xs)
    _chk(q, *xs)
    return q.meet(xs)


def q_tensor(q: Quantale, a, b):
    _chk(q, a, b)
    return q.tensor(a, b)


def q_lhom(q: Quantale, x, z):
    """x -o z: the largest v with x (x) v <= z."""
    _chk(q, x, z)
    return q.lhom(x, z)


def q_rhom(q: Quantale, z, y):
    """z o- y: the largest v with v (x) y <= z."""
    _chk(q, z, y)
    return q.rhom(z, y)


def q_totally_below(q: Quantale, u, v) -> bool:
    _chk(q, u, v)
    return q.totally_below(u, v)


def q_tensor_all(q: Quantale, xs):
    return reduce(q.tensor, xs, q.unit)


def parse_step(text: str) -> sf.StepFunction:
    t = text.strip()
    if not (t.startswith("[") and t.endswith("]")):
        raise ValueError(f"not a step-function literal: {text!r}")
    body = t[1:-1].strip()
    if not body:
        return sf.BOTTOM
    jumps = []
    depth = 0
    cur = ""
    for ch in body:
        if ch == "(":
            depth += 1
            cur = ""
        elif ch == ")":
            depth -= 1
            parts = cur.split(",")
            if len(parts) != 2:
                raise ValueError(f"bad jump {cur!r} in {text!r}")
            u, p = (parse_extended(s) for s in parts)
            if is_inf(u) or is_inf(p):
                raise ValueError(f"jump {cur!r} must be finite")
            jumps.append((u, p))
        elif depth == 1:
            cur += ch
        elif ch not in ", \t":
            raise ValueError(f"unexpected {ch!r} in step literal {text!r}")
    if depth:
        raise ValueError(f"unbalanced parentheses in {text!r}")
    return sf.sf_normalize(jumps)


_FAMILIES = {
    "bool": lambda t: Bool2(), "bool2": lambda t: Bool2(), "2": lambda t: Bool2(),
    "lawvere": lambda t: Lawvere(),
    "extreal": lambda t: ExtendedReal(), "extendedreal": lambda t: ExtendedReal(),
    "unit": lambda t: UnitInterval(t or "product"),
    "unitinterval": lambda t: UnitInterval(t or "product"),
    "delta": lambda t: DeltaDist(t or "product"),
    "deltadist": lambda t: DeltaDist(t or "product"),
}


def quantale_from_name(name: str) -> Quantale:
    """``bool``, ``lawvere``, ``extreal``, ``unit:<tnorm>``, ``delta:<tnorm>``."""
    fam, _, tn = name.strip().lower().partition(":")
    if fam not in _FAMILIES:
        raise ValueError(f"unknown quantale {name!r}")
    if tn and fam in ("bool", "bool2", "2", "lawvere", "extreal", "extendedreal"):
        raise ValueError(f"quantale {fam!r} takes no t-norm")
    return _FAMILIES[fam](tn or None)


ALL_FAMILIES = (
    Bool2(), Lawvere(), ExtendedReal(),
    UnitInterval("product"), UnitInterval("minimum"), UnitInterval("lukasiewicz"),
    DeltaDist("product"), DeltaDist("minimum"), DeltaDist("lukasiewicz"),
)
