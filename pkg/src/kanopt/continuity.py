"""Open and closed relations and maps, U-compactness, hemi- and semicontinuity."""
from dataclasses import dataclass

from .enriched import InternalInconsistency, Verdict, discrete_vcat
from .quantale import Bool2
from .topology import (P, U, ModularSpace, PSpace, USpace, eps_rel, members, to_closure)
from .vrel import (VRel, map_id, rel_compose, rel_le_witness, rel_restrict, rel_reverse,
                   rel_threshold)


@dataclass(frozen=True)
class StructuredRel:
    rel: VRel
    source: object
    target: object

    def __post_init__(self):
        if self.rel.source != self.source.carrier or self.rel.target != self.target.carrier:
            raise ValueError("relation endpoints do not match the spaces")
        if self.source.monad is not self.target.monad:
            raise ValueError("kind mismatch between source and target spaces")


def _as_modular(space) -> ModularSpace:
    if isinstance(space, ModularSpace):
        return space
    return ModularSpace(discrete_vcat(space.carrier, space.q), space)


def open_closed_check(monad, side: str, j: StructuredRel) -> Verdict:
    """Open: alpha;J <= TJ;beta.  Closed: TJ;beta <= alpha;J."""
    T = monad
    if j.source.monad is not T:
        raise ValueError("kind mismatch: spaces are not structures for this monad")
    J = j.rel
    left = rel_compose(j.source.structure, J)
    right = rel_compose(T.rel(J), j.target.structure)
    if side == "open":
        w = rel_le_witness(left, right)
    elif side == "closed":
        w = rel_le_witness(right, left)
    else:
        raise ValueError(f"side must be open or closed, not {side!r}")
    ok = w is None
    tgt = j.target.space if isinstance(j.target, ModularSpace) else j.target
    if T is P and is_discrete(J) and tgt.flags.extensional:
        if ok != _discrete_form(side, j):
            raise InternalInconsistency("discrete reduction disagrees with the full axiom")
    return Verdict(ok, w)


def is_discrete(J: VRel) -> bool:
    q = J.q
    return all(v == q.bottom or v == q.unit for v in J.entries())


def _discrete_form(side, j) -> bool:
    """(O') delta(S,x) (x) J(x,y) <= zeta(J_k S, y) and (C') zeta(J_k S, y) <= sup over J_k^-y of delta(S, z)."""
    J = j.rel
    q = J.q
    d, z = j.source.structure.rows, j.target.structure.rows
    n, p = len(J.source), len(J.target)
    Jk = [[J.rows[x][y] == q.unit for y in range(p)] for x in range(n)]
    for S in range(1 << n):
        img = 0
        for x in members(S):
            for y in range(p):
                if Jk[x][y]:
                    img |= 1 << y
        for y in range(p):
            if side == "open":
                for x in range(n):
                    if not q.le(q.tensor(d[S][x], J.rows[x][y]), z[img][y]):
                        return False
            else:
                rhs = q.join([d[S][x] for x in range(n) if Jk[x][y]])
                if not q.le(z[img][y], rhs):
                    return False
    return True


def u_compact_check(j: StructuredRel) -> Verdict:
    """(UJ)(id, i_B) <= alpha;J, at principal ultrafilters J <= alpha;J."""
    if j.source.monad is not U:
        raise ValueError("U-compactness needs a U-space source")
    J = j.rel
    w = rel_le_witness(J, rel_compose(j.source.structure, J))
    ok = w is None
    if isinstance(J.q, Bool2):
        a = j.source.structure.rows
        fibres_ok = True
        for y in range(len(J.target)):
            fib = [x for x in range(len(J.source)) if J.rows[x][y]]
            # every (principal) ultrafilter on the fibre converges inside it
            if not all(any(a[x][x2] for x2 in fib) for x in fib):
                fibres_ok = False
        if fibres_ok != ok:
            raise InternalInconsistency("U-compactness disagrees with fibre compactness")
    return Verdict(ok, w)


def vertical_check(monad, side: str, f, source, target) -> Verdict:
    """Open: gamma(id, f) <= (Tf)^*;alpha.  Closed: gamma(Tf, id) <= alpha;f_*.

    Companions and conjoints are taken in V-profunctors: f_* = C(f, id) and
    (Tf)^* = (TC)(id, Tf).
    """
    T = monad
    A, C = _as_modular(source), _as_modular(target)
    if A.monad is not T or C.monad is not T:
        raise ValueError("kind mismatch: spaces are not structures for this monad")
    TC = T.carrier(C.carrier)
    Tf = T.map(f)
    gamma, alpha = C.structure, A.structure
    if side == "open":
        lhs = rel_restrict(gamma, map_id(TC), f)
        Tf_conj = rel_restrict(T.rel(C.hom), map_id(TC), Tf)
        rhs = rel_compose(Tf_conj, alpha)
    elif side == "closed":
        lhs = rel_restrict(gamma, Tf, map_id(C.carrier))
        f_comp = rel_restrict(C.hom, f, map_id(C.carrier))
        rhs = rel_compose(alpha, f_comp)
    else:
        raise ValueError(f"side must be open or closed, not {side!r}")
    w = rel_le_witness(lhs, rhs)
    return Verdict(w is None, w)


def t_morphism_check(monad, f, source, target) -> Verdict:
    """V-functor on homs plus continuity alpha(s, x) <= gamma(Tf s, fx)."""
    T = monad
    A, C = _as_modular(source), _as_modular(target)
    w = rel_le_witness(A.hom, rel_restrict(C.hom, f, f))
    if w is not None:
        return Verdict(False, ("hom", w))
    w = rel_le_witness(A.structure, rel_restrict(C.structure, T.map(f), f))
    return Verdict(w is None, None if w is None else ("structure", w))


# --- boolean topology helpers ---------------------------------------------------

def closure_of(space, S: int) -> int:
    """Closure of the subset with mask S in a boolean space (P- or U-structure)."""
    n = len(space.carrier)
    if isinstance(space, ModularSpace):
        space = space.space
    if isinstance(space, PSpace):
        row = space.delta.rows[S]
        return sum(1 << x for x in range(n) if row[x])
    a = space.alpha.rows
    return sum(1 << y for y in range(n) if any(a[s][y] for s in members(S)))


def open_sets(space) -> list:
    n = len(space.carrier)
    full = (1 << n) - 1
    return [O for O in range(1 << n) if closure_of(space, full ^ O) == full ^ O]


def closed_sets(space) -> list:
    n = len(space.carrier)
    return [V for V in range(1 << n) if closure_of(space, V) == V]


def is_compact(space, S: int, family_cap: int = 8) -> bool:
    """Finite-intersection-property compactness of the subset S.

    Families of closed sets are enumerated one by one while there are at most
    ``family_cap`` closed sets.  Beyond that the check runs over every value
    an intersection of a family can take, tracking whether some subfamily
    already misses S; the verdict is the same, the cost is polynomial.
    """
    cl = closed_sets(space)
    full = (1 << len(space.carrier)) - 1
    if len(cl) > family_cap:
        # state: (intersection, some subfamily misses S)
        seen = {(full, not S)}
        frontier = list(seen)
        while frontier:
            nxt = []
            for inter, missed in frontier:
                for V in cl:
                    st = (inter & V, missed or not S & inter & V)
                    if st not in seen:
                        seen.add(st)
                        nxt.append(st)
            frontier = nxt
        return all(missed or inter & S for inter, missed in seen)
    for fam in range(1 << len(cl)):
        sets = [cl[i] for i in members(fam)]
        inter = full
        for V in sets:
            inter &= V
        if inter & S:
            continue
        # premise: every subfamily meets S
        fip = True
        for sub in range(1 << len(sets)):
            x = S
            for i in members(sub):
                x &= sets[i]
            if not x:
                fip = False
                break
        if fip:
            return False
    return True


def classical_open_equiv(J: VRel, A, B) -> tuple:
    """Verdicts (a) P-open, (b) J(cl S) in cl(JS), (c) preimages of opens are open."""
    if not isinstance(J.q, Bool2):
        raise ValueError("classical equivalence needs boolean relations")
    n, p = len(J.source), len(J.target)

    def image(S):
        out = 0
        for x in members(S):
            for y in range(p):
                if J.rows[x][y]:
                    out |= 1 << y
        return out

    a = bool(open_closed_check(P, "open", StructuredRel(J, A, B)))
    b = all(image(closure_of(A, S)) & ~closure_of(B, image(S)) == 0 for S in range(1 << n))
    opensA = set(open_sets(A))
    c = True
    for O in open_sets(B):
        pre = sum(1 << x for x in range(n) if any(J.rows[x][y] for y in members(O)))
        if pre not in opensA:
            c = False
            break
    if not (a == b == c):
        raise InternalInconsistency(f"P-open characterisations disagree: {a}, {b}, {c}")
    return a, b, c


def lower_hemicontinuous(J: VRel, A, B) -> bool:
    """{x : Jx meets O} is open for every open O."""
    opensA = set(open_sets(A))
    n = len(J.source)
    return all(sum(1 << x for x in range(n) if any(J.rows[x][y] for y in members(O))) in opensA
               for O in open_sets(B))


def upper_hemicontinuous(J: VRel, A, B) -> bool:
    """{x : Jx inside O} is open for every open O."""
    opensA = set(open_sets(A))
    n, p = len(J.source), len(J.target)
    return all(sum(1 << x for x in range(n)
                   if all(not J.rows[x][y] or O >> y & 1 for y in range(p))) in opensA
               for O in open_sets(B))


@dataclass(frozen=True)
class TransferReport:
    u_open: bool
    u_closed: bool
    u_compact: bool
    p_open: bool
    p_closed: bool
    ok: bool

    def __bool__(self):
        return self.ok


def pu_transfer_check(j: StructuredRel) -> TransferReport:
    """Transfer between U-open/closed and P-open/closed on the induced closures."""
    A, B = j.source, j.target
    if not isinstance(A, USpace) or not isinstance(B, USpace):
        raise ValueError("pu_transfer_check needs U-spaces")
    J = j.rel
    # U acts as the identity on finite relations, so both strictness premises hold
    if rel_compose(J, B.alpha) != rel_compose(U.rel(J), U.rel(B.alpha)):
        raise InternalInconsistency("U failed to be strict on a finite instance")
    uo = bool(open_closed_check(U, "open", j))
    uc = bool(open_closed_check(U, "closed", j))
    ucomp = bool(u_compact_check(j))
    pj = StructuredRel(J, to_closure(A), to_closure(B))
    po = bool(open_closed_check(P, "open", pj))
    pc = bool(open_closed_check(P, "closed", pj))
    ok = (not uo or po) and (not uc or (ucomp and pc))
    # converse of (a): B is unitary at principal ultrafilters
    ok = ok and (not po or uo)
    if A.flags.category:
        ok = ok and (not (ucomp and pc) or uc)
    return TransferReport(uo, uc, ucomp, po, pc, ok)


def semicontinuity_check(f, space, mode: str) -> Verdict:
    """Lower: {f > v} open for each v in the image.  Upper: {f < v} open."""
    n = len(space.carrier)
    opens = set(open_sets(space))
    for v in sorted(set(f)):
        if mode == "lower":
            S = sum(1 << x for x in range(n) if f[x] > v)
        elif mode == "upper":
            S = sum(1 << x for x in range(n) if f[x] < v)
        else:
            raise ValueError(f"mode must be lower or upper, not {mode!r}")
        if S not in opens:
            return Verdict(False, v)
    return Verdict(True)


def continuous_into_reals(f, space) -> bool:
    """Continuity into the extended reals: on a finite image every level set is open."""
    n = len(space.carrier)
    opens = set(open_sets(space))
    return all(sum(1 << x for x in range(n) if f[x] == v) in opens for v in set(f))


def eps_closure(space: USpace) -> VRel:
    """eps ; alpha, the closure structure induced by a convergence."""
    return rel_compose(eps_rel(space.carrier, space.q), space.alpha)


def reverse_structured(j: StructuredRel) -> StructuredRel:
    return StructuredRel(rel_reverse(j.rel), j.target, j.source)


def threshold_fibres(J: VRel):
    """Fibres of J_k: for each y the list of x with k <= J(x, y)."""
    T = rel_threshold(J, J.q.unit)
    return [[x for x in range(len(J.source)) if T.rows[x][y]] for y in range(len(J.target))]
