"""Powerset and (principal) ultrafilter machinery on finite carriers.

Subsets of a carrier ``A`` are enumerated in ascending bitmask order: the
subset with index ``m`` contains ``A[j]`` exactly when bit ``j`` of ``m`` is
set.  On a finite set every ultrafilter is principal, so ``UA`` is identified
with ``A`` and the ultrafilter extension of a relation is the relation itself;
the defining inf/sup formulas are kept as checks.
"""
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

from .enriched import InternalInconsistency, VCat, check_vcat
from .quantale import Bool2, Quantale
from .vrel import (FiniteSet, SetMap, VRel, map_id, rel_compose, rel_compose_all, rel_le,
                   rel_le_witness, rel_restrict)

POWERSET_CAP = 12


class SizeError(ValueError):
    pass


def _cap(n, cap=None):
    cap = POWERSET_CAP if cap is None else cap
    if n > cap:
        raise SizeError(f"carrier of size {n} exceeds the powerset cap {cap}")


@lru_cache(maxsize=512)
def _powerset_cached(name, elements):
    subs = [frozenset(elements[j] for j in range(len(elements)) if m >> j & 1)
            for m in range(1 << len(elements))]
    return FiniteSet(f"P{name}", subs)


def powerset(A: FiniteSet, cap=None) -> FiniteSet:
    _cap(len(A), cap)
    return _powerset_cached(A.name, A.elements)


def members(m: int):
    """Indices of the elements of the subset with bitmask ``m``."""
    out, j = [], 0
    while m:
        if m & 1:
            out.append(j)
        m >>= 1
        j += 1
    return out


def subset_mask(A: FiniteSet, S) -> int:
    m = 0
    for x in S:
        m |= 1 << A.index(x)
    return m


def powerset_extend(J: VRel, cap=None) -> VRel:
    """(PJ)(S, T) = meet over t in T of the join over s in S of J(s, t)."""
    q = J.q
    n, p = len(J.source), len(J.target)
    PA, PB = powerset(J.source, cap), powerset(J.target, cap)
    bot, top = q.bottom, q.top
    # sup over S of J(s, t), for every S and t, built by adding one element at a time
    sups = [[bot] * p]
    for m in range(1, 1 << n):
        low = (m & -m).bit_length() - 1
        prev, row = sups[m ^ (1 << low)], J.rows[low]
        sups.append([q.join2(a, b) for a, b in zip(prev, row)])
    rows = []
    for m in range(1 << n):
        s = sups[m]
        r = [top]
        for t in range(1, 1 << p):
            low = (t & -t).bit_length() - 1
            r.append(q.meet2(r[t ^ (1 << low)], s[low]))
        rows.append(r)
    return VRel(q, PA, PB, rows, check=False)


def powerset_map(f: SetMap, cap=None) -> SetMap:
    """Direct image Pf: PA -> PC."""
    PA, PC = powerset(f.source, cap), powerset(f.target, cap)
    idx = []
    for m in range(1 << len(f.source)):
        im = 0
        for j in members(m):
            im |= 1 << f.idx[j]
        idx.append(im)
    return SetMap(PA, PC, idx)


def singleton_map(A: FiniteSet, cap=None) -> SetMap:
    return SetMap(A, powerset(A, cap), [1 << i for i in range(len(A))])


def ultra_extend(J: VRel, verify_limit: int = 12) -> VRel:
    """UJ at principal ultrafilters.

    The defining formula inf over S in ix, T in iy of sup J(S x T) is evaluated
    by enumeration whenever |A| + |B| <= verify_limit and must give back J.
    """
    n, p = len(J.source), len(J.target)
    if n + p <= verify_limit:
        q = J.q
        PJsup = [[None] * p for _ in range(n)]
        for x in range(n):
            for y in range(p):
                vals = []
                for S in range(1 << n):
                    if not S >> x & 1:
                        continue
                    ss = members(S)
                    for T in range(1 << p):
                        if T >> y & 1:
                            vals.append(q.join([J.rows[s][t] for s in ss for t in members(T)]))
                PJsup[x][y] = q.meet(vals)
        if tuple(map(tuple, PJsup)) != J.rows:
            raise InternalInconsistency("principal ultrafilter extension differs from J")
    return J


def eps_rel(A: FiniteSet, q: Quantale, cap=None) -> VRel:
    """eps_A(S, x) = k iff x in S."""
    PA = powerset(A, cap)
    k, bot = q.unit, q.bottom
    return VRel(q, PA, A, [[k if m >> i & 1 else bot for i in range(len(A))]
                           for m in range(1 << len(A))], check=False)


# --- monads ----------------------------------------------------------------

class PowersetMonad:
    name = "P"
    normal = False

    def carrier(self, A):
        return powerset(A)

    def rel(self, J):
        return powerset_extend(J)

    def map(self, f):
        return powerset_map(f)

    def unit(self, A):
        return singleton_map(A)


class UltrafilterMonad:
    """The ultrafilter monad on finite sets, where it acts as the identity."""

    name = "U"
    normal = True

    def carrier(self, A):
        return A

    def rel(self, J):
        return J

    def map(self, f):
        return f

    def unit(self, A):
        return map_id(A)


P = PowersetMonad()
U = UltrafilterMonad()


def monad(name):
    return {"P": P, "U": U}[name.upper()]


# --- spaces -----------------------------------------------------------------

@dataclass(frozen=True)
class PSpaceFlags:
    reflexive: bool
    extensional: bool
    transitive: bool
    finite_join_preserving: bool
    witnesses: tuple = ()

    @property
    def category(self):
        return self.reflexive and self.extensional and self.transitive


@dataclass(frozen=True)
class USpaceFlags:
    reflexive: bool
    unitary: bool
    category: bool
    witnesses: tuple = ()


class PSpace:
    """A (P, V)-graph: delta(S, x) for S ranging over subsets in bitmask order."""

    monad = P

    def __init__(self, carrier: FiniteSet, delta: VRel):
        if delta.source != powerset(carrier) or delta.target != carrier:
            raise ValueError("delta must be a relation P(carrier) -|-> carrier")
        self.carrier, self.delta = carrier, delta
        self._flags = None

    @property
    def structure(self):
        return self.delta

    @property
    def q(self):
        return self.delta.q

    @property
    def flags(self) -> PSpaceFlags:
        if self._flags is None:
            self._flags = pspace_axioms(self)
        return self._flags


class USpace:
    """A (U, V)-graph on a finite carrier: alpha(x, y) stands for alpha(ix, y)."""

    monad = U

    def __init__(self, carrier: FiniteSet, alpha: VRel):
        if alpha.source != carrier or alpha.target != carrier:
            raise ValueError("alpha must be an endo-relation on the carrier")
        self.carrier, self.alpha = carrier, alpha
        self._flags = None

    @property
    def structure(self):
        return self.alpha

    @property
    def q(self):
        return self.alpha.q

    @property
    def flags(self) -> USpaceFlags:
        if self._flags is None:
            self._flags = uspace_axioms(self)
        return self._flags


def space_of(monad_, carrier, structure):
    return PSpace(carrier, structure) if monad_ is P else USpace(carrier, structure)


def _subset_meets(q, vals):
    """Meets of all subsets of ``vals`` (including the empty meet)."""
    vals = list(dict.fromkeys(vals))
    if q.linear:
        return vals + [q.top]
    out = {q.top}
    for r in range(1, len(vals) + 1):
        for c in combinations(vals, r):
            out.add(q.meet(c))
    return list(out)


def pspace_axioms(s: PSpace) -> PSpaceFlags:
    q, d = s.q, s.delta.rows
    n = len(s.carrier)
    el = s.carrier.elements
    wit = []
    R = True
    for i in range(n):
        if not q.le(q.unit, d[1 << i][i]):
            R = False
            wit.append(("R", el[i]))
            break
    E = True
    for m in range(1 << n):
        for j in range(n):
            if not m >> j & 1:
                big = m | 1 << j
                bad = next((i for i in range(n) if not q.le(d[m][i], d[big][i])), None)
                if bad is not None:
                    E = False
                    wit.append(("E", m, big, el[bad]))
                    break
        if not E:
            break
    T = True
    for m in range(1 << n):
        row = d[m]
        probes = set(_subset_meets(q, row)) | {q.bottom, q.unit}
        for v in probes:
            Sv = 0
            for i in range(n):
                if q.le(v, row[i]):
                    Sv |= 1 << i
            for i in range(n):
                if not q.le(q.tensor(v, d[Sv][i]), row[i]):
                    T = False
                    wit.append(("T", m, v, el[i]))
                    break
            if not T:
                break
        if not T:
            break
    F = all(v == q.bottom for v in d[0])
    if not F:
        wit.append(("join", 0))
    else:
        for m in range(1, 1 << n):
            low = m & -m
            rest = m ^ low
            if rest and any(d[m][i] != q.join2(d[rest][i], d[low][i]) for i in range(n)):
                F = False
                wit.append(("join", m))
                break
    return PSpaceFlags(R, E, T, F, tuple(wit))


def uspace_axioms(s: USpace) -> USpaceFlags:
    q, a = s.q, s.alpha
    el = s.carrier.elements
    wit = []
    R = all(q.le(q.unit, a.rows[i][i]) for i in range(len(el)))
    if not R:
        wit.append(("R",))
    # right unitarity compares U(alpha) at (ix', iix) with alpha at (mu iix', x);
    # under the principal identification both sides are alpha(x', x)
    unitary = True
    w = rel_le_witness(rel_compose(a, a), a)
    cat = R and w is None
    if w is not None:
        wit.append(("assoc", w))
    return USpaceFlags(R, unitary, cat, tuple(wit))


def to_closure(s: USpace) -> PSpace:
    """delta(S, x) = join over s in S of alpha(is, x)."""
    q, a = s.q, s.alpha.rows
    n = len(s.carrier)
    rows = [[q.bottom] * n]
    for m in range(1, 1 << n):
        low = (m & -m).bit_length() - 1
        rows.append([q.join2(u, v) for u, v in zip(rows[m ^ (1 << low)], a[low])])
    return PSpace(s.carrier, VRel(q, powerset(s.carrier), s.carrier, rows, check=False))


def to_convergence(s: PSpace) -> USpace:
    """alpha(ix, y) = meet over S containing x of delta(S, y)."""
    q, d = s.q, s.delta.rows
    n = len(s.carrier)
    rows = [[q.meet([d[m][y] for m in range(1 << n) if m >> x & 1]) for y in range(n)]
            for x in range(n)]
    if s.flags.extensional and any(rows[x][y] != d[1 << x][y] for x in range(n) for y in range(n)):
        raise InternalInconsistency("extensional delta: alpha(ix, y) differs from delta({x}, y)")
    return USpace(s.carrier, VRel(q, s.carrier, s.carrier, rows, check=False))


def structure_at_units(space) -> VRel:
    """The relation alpha(i, id): A -|-> A."""
    A = space.carrier
    return rel_restrict(space.structure, space.monad.unit(A), map_id(A))


@dataclass(frozen=True)
class ModularVerdict:
    modular: bool
    normalised: bool
    witness: object = None

    def __bool__(self):
        return self.modular


class ModularSpace:
    """A V-category together with a compatible space structure on its carrier."""

    def __init__(self, cat: VCat, space):
        if cat.carrier != space.carrier:
            raise ValueError("category and space live on different carriers")
        self.cat, self.space = cat, space

    @property
    def carrier(self):
        return self.cat.carrier

    @property
    def q(self):
        return self.cat.q

    @property
    def monad(self):
        return self.space.monad

    @property
    def structure(self) -> VRel:
        return self.space.structure

    @property
    def hom(self) -> VRel:
        return self.cat.hom


def modularity_check(m: ModularSpace) -> ModularVerdict:
    """Axiom (M): T(hom) ; structure ; hom <= structure."""
    T = m.monad
    full = rel_compose_all(T.rel(m.hom), m.structure, m.hom)
    w = rel_le_witness(full, m.structure)
    at_units = structure_at_units(m.space)
    reduced = rel_le(m.hom, at_units)
    if m.space.flags.category and check_vcat(m.cat).ok and (w is None) != reduced:
        raise InternalInconsistency("modularity and its reduced form disagree on a category")
    return ModularVerdict(w is None, m.hom == at_units, w)


def normalise(space) -> ModularSpace:
    if not space.flags.category:
        raise ValueError("normalise needs a structure satisfying the category axioms")
    cat = VCat(space.carrier, structure_at_units(space))
    out = ModularSpace(cat, space)
    if not check_vcat(cat).ok or not modularity_check(out).modular:
        raise InternalInconsistency("normalised space fails the monoid or modularity laws")
    return out


@dataclass(frozen=True)
class CocompleteVerdict:
    ok: bool
    generic: tuple = ()
    witness: object = None

    def __bool__(self):
        return self.ok


def cocomplete_check(m: ModularSpace) -> CocompleteVerdict:
    """Look for a generic point for every element of TA."""
    hom = m.hom.rows
    pts = range(len(m.carrier))
    table = []
    for s, row in enumerate(m.structure.rows):
        hit = next((x for x in pts if hom[x] == row), None)
        if hit is None:
            return CocompleteVerdict(False, (), m.structure.source.elements[s])
        table.append(hit)
    T = m.monad
    TA = T.carrier(m.carrier)
    a = SetMap(TA, m.carrier, table)
    # a must be a monoid homomorphism (T hom)(s, s') <= hom(as, as')
    Th = T.rel(m.hom)
    if not rel_le(Th, rel_restrict(m.hom, a, a)):
        raise InternalInconsistency("generic-point map is not a V-functor")
    return CocompleteVerdict(True, tuple(table))


# --- V as a space -------------------------------------------------------------

@dataclass(frozen=True)
class CanonicalSpace:
    """V with the convergence at principal ultrafilters nu(iy, x) = V(y, x)."""

    q: Quantale
    variance: str = "lhom"

    def hom(self, a, b):
        return self.q.lhom(a, b) if self.variance == "lhom" else self.q.rhom(a, b)

    def converge(self, y, x):
        return self.hom(y, x)

    def closure(self, S, x):
        """Point-set distance: the join over s in S of V(s, x), bottom when S is empty."""
        return self.q.join([self.hom(s, x) for s in S])


def canonical_space(q: Quantale, variance: str = "lhom") -> CanonicalSpace:
    if variance not in ("lhom", "rhom"):
        raise ValueError(f"variance must be lhom or rhom, not {variance!r}")
    return CanonicalSpace(q, variance)


# --- Scott topology on a finite lattice ---------------------------------------

@dataclass(frozen=True)
class ScottStructure:
    lattice: VCat
    opens: tuple
    alpha: VRel


def _is_lattice(L: VCat):
    le = L.hom.rows
    n = len(L.carrier)
    if not all(le[i][i] for i in range(n)):
        return False
    for i in range(n):
        for j in range(n):
            if i != j and le[i][j] and le[j][i]:
                return False
            for k in range(n):
                if le[i][j] and le[j][k] and not le[i][k]:
                    return False

    def extreme(cands, better):
        best = [c for c in cands if all(better(c, o) for o in cands)]
        return best[0] if best else None

    for i in range(n):
        for j in range(n):
            ub = [k for k in range(n) if le[i][k] and le[j][k]]
            lb = [k for k in range(n) if le[k][i] and le[k][j]]
            if extreme(ub, lambda c, o: le[c][o]) is None:
                return False
            if extreme(lb, lambda c, o: le[o][c]) is None:
                return False
    return n > 0


def scott_structure(L: VCat) -> ScottStructure:
    if not isinstance(L.q, Bool2) or not _is_lattice(L):
        raise ValueError("not a finite lattice")
    le = L.hom.rows
    n = len(L.carrier)
    down = [m for m in range(1 << n)
            if all(not (m >> j & 1) or all(not le[i][j] or m >> i & 1 for i in range(n))
                   for j in range(n))]
    # open sets of the convergence alpha(ix, y) iff x <= y
    from_alpha = [m for m in range(1 << n)
                  if all(m >> x & 1 for y in members(m) for x in range(n) if le[x][y])]
    if down != from_alpha:
        raise InternalInconsistency("topology of the inf-convergence is not the downsets")
    # Scott condition: every down-directed D with inf D in O meets O
    for O in down:
        for D in range(1, 1 << n):
            ds = members(D)
            directed = all(any(le[c][a] and le[c][b] for c in ds) for a in ds for b in ds)
            if not directed:
                continue
            inf = next(c for c in ds if all(le[c][a] for a in ds))
            if O >> inf & 1 and not (O & D):
                raise InternalInconsistency("a downset violates the Scott condition")
    PL = powerset(L.carrier)
    opens = tuple(PL.elements[m] for m in down)
    return ScottStructure(L, opens, L.hom)


# --- minimax at principal ultrafilters -------------------------------------------

@dataclass(frozen=True)
class MinimaxReport:
    ok: bool
    values: tuple

    def __bool__(self):
        return self.ok


def minimax_check(q: Quantale, f, cap=None) -> MinimaxReport:
    """sup over S in ix of inf f(S) equals inf over S in ix of sup f(S), per point x."""
    f = list(f)
    n = len(f)
    _cap(n, cap)
    vals, ok = [], True
    for x in range(n):
        sets = [members(m) for m in range(1 << n) if m >> x & 1]
        lo = q.join([q.meet([f[i] for i in S]) for S in sets])
        hi = q.meet([q.join([f[i] for i in S]) for S in sets])
        ok = ok and lo == hi == f[x]
        vals.append((lo, hi))
    return MinimaxReport(ok, tuple(vals))
