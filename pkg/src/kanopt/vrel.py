"""Finite V-relations: dense matrices of quantale values between finite sets."""
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

from .extnum import INF
from .quantale import Bool2, Lawvere, Quantale, QuantaleMismatch


class ShapeMismatch(ValueError):
    pass


class FiniteSet:
    __slots__ = ("name", "elements", "_index")

    def __init__(self, name, elements):
        self.name = str(name)
        self.elements = tuple(elements)
        self._index = {x: i for i, x in enumerate(self.elements)}
        if len(self._index) != len(self.elements):
            raise ValueError(f"duplicate elements in set {name!r}")

    def index(self, x) -> int:
        try:
            return self._index[x]
        except KeyError:
            raise KeyError(f"{x!r} is not an element of {self.name}") from None

    def __contains__(self, x):
        return x in self._index

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __eq__(self, other):
        return isinstance(other, FiniteSet) and self.elements == other.elements

    def __hash__(self):
        return hash(self.elements)

    def __repr__(self):
        return f"FiniteSet({self.name!r}, {list(self.elements)!r})"


def _same(a: FiniteSet, b: FiniteSet, what=""):
    if a.elements != b.elements:
        raise ShapeMismatch(f"shape mismatch{what}: {a.name} vs {b.name}")


class SetMap:
    """A total function between finite sets, stored as an index table."""

    __slots__ = ("source", "target", "idx")

    def __init__(self, source: FiniteSet, target: FiniteSet, idx):
        self.source, self.target = source, target
        self.idx = tuple(idx)
        if len(self.idx) != len(source):
            raise ValueError("map is not total")
        if any(not (0 <= j < len(target)) for j in self.idx):
            raise ValueError("map leaves its target")

    @classmethod
    def from_dict(cls, source, target, table):
        missing = [x for x in source if x not in table]
        if missing:
            raise ValueError(f"map is not total: no image for {missing[0]!r}")
        return cls(source, target, [target.index(table[x]) for x in source])

    def __call__(self, x):
        return self.target.elements[self.idx[self.source.index(x)]]

    def __eq__(self, other):
        return (isinstance(other, SetMap) and self.idx == other.idx
                and self.source == other.source and self.target == other.target)

    def __hash__(self):
        return hash(self.idx)

    def __repr__(self):
        return f"SetMap({dict(zip(self.source, (self.target.elements[j] for j in self.idx)))!r})"


def map_id(A: FiniteSet) -> SetMap:
    return SetMap(A, A, range(len(A)))


def map_compose(f: SetMap, g: SetMap) -> SetMap:
    """Diagrammatic order: first f, then g."""
    _same(f.target, g.source, " in map composition")
    return SetMap(f.source, g.target, [g.idx[i] for i in f.idx])


class VRel:
    """A V-relation ``source -|-> target`` over the quantale ``q``."""

    __slots__ = ("q", "source", "target", "rows")

    def __init__(self, q: Quantale, source: FiniteSet, target: FiniteSet, rows, check=True):
        self.q, self.source, self.target = q, source, target
        self.rows = tuple(tuple(r) for r in rows)
        if check:
            if len(self.rows) != len(source) or any(len(r) != len(target) for r in self.rows):
                raise ShapeMismatch(
                    f"matrix is not {len(source)}x{len(target)} for {source.name} -> {target.name}")
            for r in self.rows:
                for v in r:
                    if not q.contains(v):
                        raise QuantaleMismatch(q, v)

    def __call__(self, x, y):
        return self.rows[self.source.index(x)][self.target.index(y)]

    def __eq__(self, other):
        return (isinstance(other, VRel) and self.q == other.q and self.rows == other.rows
                and self.source == other.source and self.target == other.target)

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return f"VRel({self.q}, {self.source.name}->{self.target.name}, {self.rows!r})"

    @property
    def shape(self):
        return len(self.source), len(self.target)

    def entries(self):
        for r in self.rows:
            yield from r


def rel_const(q, A, B, v) -> VRel:
    return VRel(q, A, B, [[v] * len(B) for _ in A], check=False)


def rel_id(A: FiniteSet, q: Quantale) -> VRel:
    k, bot = q.unit, q.bottom
    n = len(A)
    return VRel(q, A, A, [[k if i == j else bot for j in range(n)] for i in range(n)], check=False)


def _need_same_q(*rels):
    q = rels[0].q
    for r in rels[1:]:
        if r.q != q:
            raise QuantaleMismatch(q, r.q)
    return q


# numpy path for large Lawvere products; exact because integers below 2**50
# are represented exactly in float64 and addition of two stays below 2**53
_NUMPY_THRESHOLD = 200_000
_EXACT_LIMIT = 2 ** 50


def _lawvere_numpy(J, H):
    vals = [v for v in J.entries() if v is not INF] + [v for v in H.entries() if v is not INF]
    scale = 1
    for v in vals:
        scale = lcm(scale, v.denominator)
    if vals and max(vals) * scale >= _EXACT_LIMIT:
        return None

    def arr(R):
        return np.array([[np.inf if v is INF else float(v * scale) for v in r] for r in R.rows],
                        dtype=np.float64).reshape(len(R.source), len(R.target))

    a, b = arr(J), arr(H)
    out = np.full((a.shape[0], b.shape[1]), np.inf)
    for k in range(a.shape[1]):
        np.minimum(out, a[:, k:k + 1] + b[k:k + 1, :], out=out)
    rows = [[INF if np.isinf(v) else Fraction(int(v), scale) for v in r] for r in out.tolist()]
    return rows


def rel_compose(J: VRel, H: VRel) -> VRel:
    """(J;H)(x, z) = join over y of J(x, y) (x) H(y, z)."""
    _same(J.target, H.source, " in composition")
    q = _need_same_q(J, H)
    A, E = J.source, H.target
    nb = len(J.target)
    Hc = list(zip(*H.rows)) if H.rows else [() for _ in E]
    if not nb:
        return rel_const(q, A, E, q.bottom)
    if isinstance(q, Bool2):
        rows = [[any(a and b for a, b in zip(r, c)) for c in Hc] for r in J.rows]
    elif isinstance(q, Lawvere):
        rows = None
        if len(A) * nb * len(E) >= _NUMPY_THRESHOLD:
            rows = _lawvere_numpy(J, H)
        if rows is None:
            rows = []
            for r in J.rows:
                row = []
                for c in Hc:
                    best = INF
                    for a, b in zip(r, c):
                        if a is INF or b is INF:
                            continue
                        s = a + b
                        if best is INF or s < best:
                            best = s
                    row.append(best)
                rows.append(row)
    else:
        t, j = q.tensor, q.join
        rows = [[j([t(a, b) for a, b in zip(r, c)]) for c in Hc] for r in J.rows]
    return VRel(q, A, E, rows, check=False)


def rel_compose_all(*rels) -> VRel:
    out = rels[0]
    for r in rels[1:]:
        out = rel_compose(out, r)
    return out


def rel_reverse(J: VRel) -> VRel:
    cols = list(zip(*J.rows)) if J.rows else [() for _ in J.target]
    return VRel(J.q, J.target, J.source, cols, check=False)


def rel_graph(f: SetMap, side: str, q: Quantale) -> VRel:
    """Companion ``f_*: A -|-> C`` or conjoint ``f^*: C -|-> A``."""
    k, bot = q.unit, q.bottom
    comp = VRel(q, f.source, f.target,
                [[k if j == fi else bot for j in range(len(f.target))] for fi in f.idx], check=False)
    if side == "companion":
        return comp
    if side == "conjoint":
        return rel_reverse(comp)
    raise ValueError(f"side must be companion or conjoint, not {side!r}")


def companion(f, q):
    return rel_graph(f, "companion", q)


def conjoint(f, q):
    return rel_graph(f, "conjoint", q)


def rel_restrict(K: VRel, f: SetMap, g: SetMap) -> VRel:
    """K(f, g)(x, y) = K(fx, gy)."""
    _same(f.target, K.source, " in restriction (left)")
    _same(g.target, K.target, " in restriction (right)")
    rows = [[K.rows[fi][gj] for gj in g.idx] for fi in f.idx]
    return VRel(K.q, f.source, g.source, rows, check=False)


def rel_le(J: VRel, K: VRel) -> bool:
    return rel_le_witness(J, K) is None


def rel_le_witness(J: VRel, K: VRel):
    """First (x, y) with J(x, y) not below K(x, y), else None."""
    _same(J.source, K.source)
    _same(J.target, K.target)
    le = _need_same_q(J, K).le
    for i, (r, s) in enumerate(zip(J.rows, K.rows)):
        for j, (a, b) in enumerate(zip(r, s)):
            if not le(a, b):
                return J.source.elements[i], J.target.elements[j]
    return None


def rel_join(*rels) -> VRel:
    q = _need_same_q(*rels)
    J = rels[0]
    for R in rels[1:]:
        _same(J.source, R.source)
        _same(J.target, R.target)
    rows = [[q.join(vs) for vs in zip(*rs)] for rs in zip(*(R.rows for R in rels))]
    return VRel(q, J.source, J.target, rows, check=False)


def rel_meet(*rels) -> VRel:
    q = _need_same_q(*rels)
    J = rels[0]
    rows = [[q.meet(vs) for vs in zip(*rs)] for rs in zip(*(R.rows for R in rels))]
    return VRel(q, J.source, J.target, rows, check=False)


def rel_residuate(side: str, X: VRel, Y: VRel) -> VRel:
    """Left: (J -o K)(y, z) = meet_x J(x, y) -o K(x, z) for J: A->B, K: A->E.
    Right: (K o- H)(x, y) = meet_z K(x, z) o- H(y, z) for K: A->E, H: B->E.
    """
    q = _need_same_q(X, Y)
    if side == "left":
        _same(X.source, Y.source, " in left residuation")
        Xc, Yc = list(zip(*X.rows)), list(zip(*Y.rows))
        if not X.rows:
            return rel_const(q, X.target, Y.target, q.top)
        rows = [[q.meet([q.lhom(a, b) for a, b in zip(xc, yc)]) for yc in Yc] for xc in Xc]
        return VRel(q, X.target, Y.target, rows, check=False)
    if side == "right":
        _same(X.target, Y.target, " in right residuation")
        rows = [[q.meet([q.rhom(a, b) for a, b in zip(xr, yr)]) for yr in Y.rows] for xr in X.rows]
        return VRel(q, X.source, Y.source, rows, check=False)
    raise ValueError(f"side must be left or right, not {side!r}")


def rel_threshold(J: VRel, v) -> VRel:
    """The boolean relation x J_v y iff v <= J(x, y)."""
    J.q.check(v)
    le = J.q.le
    return VRel(Bool2(), J.source, J.target, [[le(v, a) for a in r] for r in J.rows], check=False)


def rel_from_bool(J: VRel, q: Quantale) -> VRel:
    k, bot = q.unit, q.bottom
    return VRel(q, J.source, J.target, [[k if a else bot for a in r] for r in J.rows], check=False)


@dataclass(frozen=True)
class CellBoundary:
    """A square with ``top: A -|-> B``, ``left: A -> C``, ``right: B -> D``, ``bottom: C -|-> D``."""

    top: VRel
    left: SetMap
    right: SetMap
    bottom: VRel

    def __post_init__(self):
        _need_same_q(self.top, self.bottom)
        _same(self.top.source, self.left.source, " (top/left)")
        _same(self.top.target, self.right.source, " (top/right)")
        _same(self.bottom.source, self.left.target, " (bottom/left)")
        _same(self.bottom.target, self.right.target, " (bottom/right)")


def cell_exists(b: CellBoundary) -> bool:
    return rel_le(b.top, rel_restrict(b.bottom, b.left, b.right))
