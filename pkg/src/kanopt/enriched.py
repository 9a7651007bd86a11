"""V-categories, V-functors, V-profunctors, Kan extensions and Beck-Chevalley.

Maps into a target are given as a sequence of *objects* indexed like the
source carrier: positions of the target carrier when the target is a finite
:class:`VCat`, or quantale values when the target is a
:class:`CanonicalTarget`.  A :class:`~kanopt.vrel.SetMap` is accepted wherever
a map into a finite VCat is expected.
"""
from dataclasses import dataclass
from typing import Optional, Sequence

from .quantale import Quantale
from .vrel import (CellBoundary, FiniteSet, SetMap, ShapeMismatch, VRel, conjoint, companion,
                   rel_compose, rel_compose_all, rel_id, rel_le_witness, rel_restrict)


class InternalInconsistency(AssertionError):
    """Two routes to the same quantity disagreed."""


@dataclass(frozen=True)
class Verdict:
    ok: bool
    witness: object = None

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class VCat:
    carrier: FiniteSet
    hom: VRel

    def __post_init__(self):
        if self.hom.source != self.carrier or self.hom.target != self.carrier:
            raise ShapeMismatch("hom must be an endo-relation on the carrier")

    @property
    def q(self) -> Quantale:
        return self.hom.q

    def __call__(self, i, j):
        return self.hom.rows[i][j]

    def __len__(self):
        return len(self.carrier)


def discrete_vcat(A: FiniteSet, q: Quantale) -> VCat:
    return VCat(A, rel_id(A, q))


@dataclass(frozen=True)
class VFunctor:
    map: SetMap
    source: VCat
    target: VCat


@dataclass(frozen=True)
class VProf:
    rel: VRel
    source: VCat
    target: VCat


@dataclass(frozen=True)
class CanonicalTarget:
    """V regarded as a V-category with hom ``x -o y`` (lhom) or ``x o- y`` (rhom)."""

    q: Quantale
    variance: str = "lhom"

    def __post_init__(self):
        if self.variance not in ("lhom", "rhom"):
            raise ValueError(f"variance must be lhom or rhom, not {self.variance!r}")

    def __call__(self, a, b):
        if self.variance == "lhom":
            return self.q.lhom(a, b)
        return self.q.rhom(a, b)


@dataclass(frozen=True)
class VCatReport:
    unit: bool
    assoc: bool
    witness: object = None

    @property
    def ok(self):
        return self.unit and self.assoc

    def __bool__(self):
        return self.ok


def check_vcat(c: VCat) -> VCatReport:
    q, n = c.q, len(c.carrier)
    rows = c.hom.rows
    el = c.carrier.elements
    unit = True
    witness = None
    for i in range(n):
        if not q.le(q.unit, rows[i][i]):
            unit, witness = False, ("unit", el[i])
            break
    comp = rel_compose(c.hom, c.hom)
    w = rel_le_witness(comp, c.hom)
    assoc = w is None
    if not assoc and witness is None:
        x, z = w
        i, k = c.carrier.index(x), c.carrier.index(z)
        y = next(el[j] for j in range(n)
                 if not q.le(q.tensor(rows[i][j], rows[j][k]), rows[i][k]))
        witness = ("assoc", x, y, z)
    return VCatReport(unit, assoc, witness)


def _objects(f) -> list:
    if isinstance(f, SetMap):
        return list(f.idx)
    if isinstance(f, VFunctor):
        return list(f.map.idx)
    return list(f)


def check_vfunctor(f, source: Optional[VCat] = None, target=None) -> Verdict:
    """A(x, y) <= C(fx, fy); ``target`` may be a VCat or a CanonicalTarget."""
    if isinstance(f, VFunctor):
        source, target = f.source, f.target
    objs = _objects(f)
    if len(objs) != len(source.carrier):
        raise ShapeMismatch("map and source carrier differ in size")
    hom = target if isinstance(target, CanonicalTarget) else target.hom.rows.__getitem__
    le = source.q.le
    el = source.carrier.elements
    for i, a in enumerate(objs):
        for j, b in enumerate(objs):
            c = target(a, b) if isinstance(target, CanonicalTarget) else hom(a)[b]
            if not le(source.hom.rows[i][j], c):
                return Verdict(False, (el[i], el[j]))
    return Verdict(True)


def check_profunctor(J, source: Optional[VCat] = None, target: Optional[VCat] = None) -> Verdict:
    """Bimodule law A;J;B <= J."""
    if isinstance(J, VProf):
        J, source, target = J.rel, J.source, J.target
    source = source or discrete_vcat(J.source, J.q)
    target = target or discrete_vcat(J.target, J.q)
    w = rel_le_witness(rel_compose_all(source.hom, J, target.hom), J)
    return Verdict(w is None, w)


def prof_repair(J: VRel, source: VCat, target: VCat) -> VRel:
    """The least profunctor above J, namely A;J;B (homs reflexive and transitive)."""
    return rel_compose_all(source.hom, J, target.hom)


# --- Kan extensions ------------------------------------------------------

def _unsupported_guard(q: Quantale):
    if not q.commutative:
        raise ValueError("unsupported variance: the inf-form needs a commutative quantale")


def kan_into_canonical(direction: str, d: Sequence, J, variance: str = "lhom") -> tuple:
    """Kan extension of a value map along J into V with the chosen hom.

    ``left``: d lives on J.source, the result on J.target.
    ``right``: d (written e) lives on J.target, the result on J.source.
    """
    if isinstance(J, VProf):
        J = J.rel
    q = J.q
    d = list(d)
    for v in d:
        q.check(v)
    rows = J.rows
    if direction == "left":
        if len(d) != len(J.source):
            raise ShapeMismatch("d must be defined on the source of J")
        cols = range(len(J.target))
        if variance == "lhom":
            return tuple(q.join([q.tensor(d[i], rows[i][j]) for i in range(len(d))]) for j in cols)
        if variance == "rhom":
            _unsupported_guard(q)
            return tuple(q.meet([q.rhom(d[i], rows[i][j]) for i in range(len(d))]) for j in cols)
    elif direction == "right":
        if len(d) != len(J.target):
            raise ShapeMismatch("e must be defined on the target of J")
        if variance == "rhom":
            return tuple(q.join([q.tensor(r[j], d[j]) for j in range(len(d))]) for r in rows)
        if variance == "lhom":
            _unsupported_guard(q)
            return tuple(q.meet([q.lhom(r[j], d[j]) for j in range(len(d))]) for r in rows)
    else:
        raise ValueError(f"direction must be left or right, not {direction!r}")
    raise ValueError(f"unsupported variance {variance!r}")


def _probe_objects(M, *maps):
    if isinstance(M, VCat):
        return list(range(len(M.carrier)))
    q = M.q
    seen = []
    for v in [q.bottom, q.unit, q.top] + [x for m in maps for x in m]:
        if v not in seen:
            seen.append(v)
    return seen


def _hom(M):
    if isinstance(M, VCat):
        rows = M.hom.rows
        return lambda a, b: rows[a][b]
    return M


def _left_profile(q, hom, d, J, y, zs):
    col = [r[y] for r in J.rows]
    return [q.meet([q.lhom(col[i], hom(d[i], z)) for i in range(len(d))]) for z in zs]


def _right_profile(q, hom, e, J, x, zs):
    row = J.rows[x]
    return [q.meet([q.rhom(hom(z, e[j]), row[j]) for j in range(len(e))]) for z in zs]


def kan_finite_search(direction: str, d, J, M: VCat) -> Optional[tuple]:
    """Brute-force Kan extension into a finite V-category, or None."""
    if isinstance(J, VProf):
        J = J.rel
    q = J.q
    d = _objects(d)
    zs = list(range(len(M.carrier)))
    hom = _hom(M)
    out = []
    if direction == "left":
        for y in range(len(J.target)):
            prof = _left_profile(q, hom, d, J, y, zs)
            hits = [m for m in zs if list(M.hom.rows[m]) == prof]
            if not hits:
                return None
            out.append(hits[0])
    elif direction == "right":
        for x in range(len(J.source)):
            prof = _right_profile(q, hom, d, J, x, zs)
            hits = [m for m in zs if [M.hom.rows[z][m] for z in zs] == prof]
            if not hits:
                return None
            out.append(hits[0])
    else:
        raise ValueError(f"direction must be left or right, not {direction!r}")
    return tuple(out)


def kan_verify(direction: str, cand, d, J, M) -> Verdict:
    """Check the defining equation of a Kan extension pointwise.

    For a canonical target the equation is checked on a finite probe set of
    objects and the candidate is compared with the closed form; together
    these are equivalent to the equation for all objects, since V is
    separated.
    """
    if isinstance(J, VProf):
        J = J.rel
    q = J.q
    cand, d = _objects(cand), _objects(d)
    hom = _hom(M)
    zs = _probe_objects(M, cand, d)
    if direction == "left":
        prof = lambda y: _left_profile(q, hom, d, J, y, zs)
        pts = range(len(J.target))
        got = lambda y: [hom(cand[y], z) for z in zs]
    else:
        prof = lambda x: _right_profile(q, hom, d, J, x, zs)
        pts = range(len(J.source))
        got = lambda x: [hom(z, cand[x]) for z in zs]
    if len(cand) != len(pts):
        raise ShapeMismatch("candidate has the wrong domain")
    for p in pts:
        if got(p) != prof(p):
            return Verdict(False, p)
    if isinstance(M, CanonicalTarget):
        var = M.variance
        closed = kan_into_canonical(direction, d, J, var)
        for p, (a, b) in enumerate(zip(cand, closed)):
            if a != b:
                return Verdict(False, p)
    return Verdict(True)


@dataclass(frozen=True)
class BCReport:
    ok: bool
    gaps: tuple
    witness: object = None

    def __bool__(self):
        return self.ok


def bc_check(direction: str, l, d, J, M) -> BCReport:
    """Beck-Chevalley for a Kan extension l of d along J into M.

    The scalar form (k <= gap at every point) and the relation equality
    (d^*;J = l^* on the left, J;e_* = r_* on the right) are both evaluated
    and must agree.
    """
    if isinstance(J, VProf):
        J = J.rel
    q = J.q
    l, d = _objects(l), _objects(d)
    hom = _hom(M)
    zs = _probe_objects(M, l, d)
    rows = J.rows
    gaps, rel_ok = [], True
    if direction == "left":
        for y, ly in enumerate(l):
            gaps.append(q.join([q.tensor(hom(ly, dx), rows[i][y]) for i, dx in enumerate(d)]))
            for z in zs:
                lhs = q.join([q.tensor(hom(z, dx), rows[i][y]) for i, dx in enumerate(d)])
                if lhs != hom(z, ly):
                    rel_ok = False
    elif direction == "right":
        for x, rx in enumerate(l):
            r = rows[x]
            gaps.append(q.join([q.tensor(r[j], hom(ey, rx)) for j, ey in enumerate(d)]))
            for z in zs:
                lhs = q.join([q.tensor(r[j], hom(ey, z)) for j, ey in enumerate(d)])
                if lhs != hom(rx, z):
                    rel_ok = False
    else:
        raise ValueError(f"direction must be left or right, not {direction!r}")
    fails = [p for p, g in enumerate(gaps) if not q.le(q.unit, g)]
    scalar_ok = not fails
    if scalar_ok != rel_ok:
        raise InternalInconsistency("scalar and relational Beck-Chevalley verdicts disagree")
    return BCReport(scalar_ok, tuple(gaps), fails[0] if fails else None)


def cell_bc(side: str, b: CellBoundary) -> bool:
    """Left: f^*;J = K(id, g).  Right: J;g_* = K(f, id)."""
    q = b.top.q
    if side == "left":
        lhs = rel_compose(conjoint(b.left, q), b.top)
        rhs = rel_restrict(b.bottom, _idmap(b.bottom.source), b.right)
    elif side == "right":
        lhs = rel_compose(b.top, companion(b.right, q))
        rhs = rel_restrict(b.bottom, b.left, _idmap(b.bottom.target))
    else:
        raise ValueError(f"side must be left or right, not {side!r}")
    return lhs == rhs


def _idmap(A):
    return SetMap(A, A, range(len(A)))

