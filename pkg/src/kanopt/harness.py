"""Seeded instance generation and exact verification of the maximum and
extreme value theorems on finite structures.

Each verifier evaluates the named hypotheses of a theorem on an instance,
skips the instance when one of them fails, and otherwise evaluates the
conclusion.  A failed conclusion under held hypotheses is reported as a
``fail`` and makes the whole campaign fail.
"""
import random
import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import stepfun as sf
from .continuity import (StructuredRel, continuous_into_reals, lower_hemicontinuous,
                         open_closed_check, semicontinuity_check, t_morphism_check,
                         u_compact_check, upper_hemicontinuous, vertical_check, is_compact)
from .enriched import (CanonicalTarget, InternalInconsistency, VCat, bc_check, check_profunctor,
                       kan_finite_search, kan_into_canonical, kan_verify)
from .extnum import INF, NEG_INF
from .quantale import (Bool2, DeltaDist, ExtendedReal, Lawvere, UnitInterval, quantale_from_name)
from .topology import (P, U, ModularSpace, PSpace, USpace, cocomplete_check, eps_rel, members,
                       modularity_check, powerset, structure_at_units)
from .vrel import (FiniteSet, SetMap, VRel, map_id, rel_compose, rel_compose_all, rel_join,
                   rel_meet, rel_restrict, rel_reverse)

F = Fraction

DEFAULT_QUANTALES = ("bool", "lawvere", "unit:product", "unit:minimum", "unit:lukasiewicz")
EVT_QUANTALES = DEFAULT_QUANTALES + ("delta:product", "delta:lukasiewicz")

MAX_VARIANTS = ("right_cocomplete", "right_bc", "left_cocomplete", "left_bc")
SUITES = MAX_VARIANTS + ("evt_closure", "evt_quantale", "berge")


def default_palette(q):
    if isinstance(q, Bool2):
        return [False, True]
    if isinstance(q, Lawvere):
        return [F(0), F(1), F(2), F(3), INF]
    if isinstance(q, ExtendedReal):
        return [NEG_INF, F(0), F(1), F(2), INF]
    if isinstance(q, UnitInterval):
        if q.tnorm == "lukasiewicz":
            return [F(0), F(1, 4), F(1, 2), F(3, 4), F(1)]
        if q.tnorm == "minimum":
            return [F(0), F(1, 3), F(2, 3), F(1)]
        return [F(0), F(1, 4), F(1, 2), F(1)]
    if isinstance(q, DeltaDist):
        return [sf.BOTTOM, sf.UNIT, sf.pi(F(1), F(1, 2)), sf.pi(F(0), F(1, 2)),
                sf.sf_normalize([(F(1, 2), F(1, 2)), (F(1), F(1))])]
    raise ValueError(f"no palette for {q}")


@dataclass(frozen=True)
class GeneratorConfig:
    quantales: tuple = DEFAULT_QUANTALES
    max_size: int = 4
    max_target: int = 4
    trials: int = 1000
    seed: int = 0
    palettes: Optional[dict] = None
    evt_quantales: tuple = EVT_QUANTALES

    def __post_init__(self):
        if not 1 <= self.max_size <= 5 or not 1 <= self.max_target <= 5:
            raise ValueError("sizes must lie between 1 and 5")
        if self.trials < 0:
            raise ValueError("trials must be non-negative")
        for name in ("quantales", "evt_quantales"):
            object.__setattr__(self, name, tuple(quantale_from_name(q) if isinstance(q, str) else q
                                                 for q in getattr(self, name)))

    def palette(self, q):
        if self.palettes and q.name in self.palettes:
            return list(self.palettes[q.name])
        return default_palette(q)


@dataclass
class VerificationReport:
    theorem: str
    hypotheses: dict = field(default_factory=dict)
    conclusion: Optional[bool] = None
    secondary: dict = field(default_factory=dict)
    skip_reason: Optional[str] = None
    witnesses: dict = field(default_factory=dict)
    seed: object = None
    timing: float = 0.0

    @property
    def status(self) -> str:
        if self.skip_reason is not None:
            return "skip"
        if self.conclusion is False or any(v is False for v in self.secondary.values()):
            return "fail"
        return "pass"

    @property
    def ok(self) -> bool:
        return self.status != "fail"

    def as_dict(self) -> dict:
        return {"theorem": self.theorem, "status": self.status,
                "hypotheses": dict(self.hypotheses), "conclusion": self.conclusion,
                "secondary": dict(self.secondary), "skip_reason": self.skip_reason,
                "witnesses": {k: repr(v) for k, v in self.witnesses.items()},
                "seed": self.seed}


def _finish(rep, t0, conclude):
    """Skip on the first failed hypothesis, otherwise evaluate the conclusion."""
    failed = [k for k, v in rep.hypotheses.items() if not v]
    if failed:
        rep.skip_reason = failed[0]
    else:
        conclude()
    rep.timing = time.perf_counter() - t0
    return rep


# --- random building blocks ------------------------------------------------------

def _rng(seed, *tags):
    return random.Random("/".join(str(t) for t in (seed,) + tags))


def _carrier(name, n):
    return FiniteSet(name, [f"{name.lower()}{i}" for i in range(n)])


def rand_rel(rng, q, A, B, pal, bottom_bias=0.3) -> VRel:
    rows = [[q.bottom if rng.random() < bottom_bias else rng.choice(pal) for _ in B] for _ in A]
    return VRel(q, A, B, rows, check=False)


def vcat_closure(R: VRel) -> VRel:
    """Least V-category hom above R: reflexive, then closed under composition."""
    q = R.q
    rows = [[q.join2(v, q.unit) if i == j else v for j, v in enumerate(r)]
            for i, r in enumerate(R.rows)]
    H = VRel(q, R.source, R.target, rows, check=False)
    while True:
        H2 = rel_join(H, rel_compose(H, H))
        if H2 == H:
            return H
        H = H2


def rand_vcat(rng, q, A, pal, discrete_p=0.3) -> VCat:
    if rng.random() < discrete_p:
        return VCat(A, vcat_closure(VRel(q, A, A, [[q.bottom] * len(A) for _ in A], check=False)))
    return VCat(A, vcat_closure(rand_rel(rng, q, A, A, pal, bottom_bias=0.5)))


def minimal_structure(T, cat: VCat) -> VRel:
    """The least modular structure: hom itself (U) or eps;hom (P)."""
    if T is U:
        return cat.hom
    return rel_compose(eps_rel(cat.carrier, cat.q), cat.hom)


def repair_structure(T, cat: VCat, raw: VRel) -> VRel:
    """T(hom);(raw v minimal);hom, the least modular structure above raw."""
    base = rel_join(raw, minimal_structure(T, cat))
    return rel_compose_all(T.rel(cat.hom), base, cat.hom)


def rand_structure(rng, T, cat: VCat, pal) -> VRel:
    if rng.random() < 0.4:
        return minimal_structure(T, cat)
    raw = rand_rel(rng, cat.q, T.carrier(cat.carrier), cat.carrier, pal, bottom_bias=0.6)
    return repair_structure(T, cat, raw)


def pullback_structure(T, M: ModularSpace, f) -> VRel:
    """nu(Tf, f), the initial structure making f a T-morphism."""
    return rel_restrict(M.structure, T.map(f), f)


def make_space(T, carrier, structure):
    return PSpace(carrier, structure) if T is P else USpace(carrier, structure)


def rand_profunctor(rng, q, A: VCat, B: VCat, pal) -> VRel:
    raw = rand_rel(rng, q, A.carrier, B.carrier, pal, bottom_bias=0.5)
    return rel_compose_all(A.hom, raw, B.hom)


# --- targets --------------------------------------------------------------------

@dataclass
class Target:
    space: ModularSpace
    generic: Optional[SetMap] = None   # m: TM -> M when built cocomplete
    values: Optional[tuple] = None     # the elements when M is a subset of V


def value_target(rng, T, q, pal, size, cocomplete: bool) -> Target:
    """A finite subset of V containing top, with hom x -o y."""
    others = [v for v in dict.fromkeys(pal) if v != q.top]
    rng.shuffle(others)
    vals = [q.top] + others[:max(0, size - 1)]
    M = FiniteSet("M", [q.format(v) for v in vals])
    hom = VRel(q, M, M, [[q.lhom(a, b) for b in vals] for a in vals], check=False)
    cat = VCat(M, hom)
    if cocomplete:
        if T is U:
            m = map_id(M)
        else:
            PM = powerset(M)
            # m(S) = inf S; the subset is closed under finite meets since V is linear here
            idx = []
            for S in range(1 << len(vals)):
                inf = q.meet([vals[i] for i in members(S)])
                idx.append(vals.index(inf))
            m = SetMap(PM, M, idx)
        nu = rel_restrict(hom, m, map_id(M))
        return Target(ModularSpace(cat, make_space(T, M, nu)), m, tuple(vals))
    nu = rand_structure(rng, T, cat, pal)
    return Target(ModularSpace(cat, make_space(T, M, nu)), None, tuple(vals))


def random_target(rng, T, q, pal, size) -> Target:
    M = _carrier("M", size)
    cat = rand_vcat(rng, q, M, pal)
    if T is U and rng.random() < 0.5:
        nu = cat.hom
        return Target(ModularSpace(cat, make_space(T, M, nu)), map_id(M))
    return Target(ModularSpace(cat, make_space(T, M, rand_structure(rng, T, cat, pal))))


def gen_target(rng, T, q, pal, cfg, want_cocomplete) -> Target:
    size = rng.randint(1, cfg.max_target)
    if q.linear and rng.random() < 0.75:
        return value_target(rng, T, q, pal, size, want_cocomplete or rng.random() < 0.3)
    return random_target(rng, T, q, pal, size)


# --- instances --------------------------------------------------------------------

@dataclass
class TheoremInstance:
    kind: str
    quantale: object
    monad: object
    source: object
    middle: object
    target: object
    rel: VRel
    f: object
    seed: object
    extra: dict = field(default_factory=dict)


def _rand_map(rng, A, M):
    return SetMap(A, M, [rng.randrange(len(M)) for _ in A])


def _vfunctor_meet(cat: VCat, M: VCat, f) -> VCat:
    """cat ^ M(f, f), a V-category on which f is a V-functor."""
    return VCat(cat.carrier, rel_meet(cat.hom, rel_restrict(M.hom, f, f)))


def gen_instance(cfg: GeneratorConfig, kind: str, trial: int = 0) -> TheoremInstance:
    """Deterministic in (cfg.seed, kind, trial)."""
    rng = _rng(cfg.seed, kind, trial)
    if kind in ("right", "left"):
        return _gen_max(rng, cfg, kind, (cfg.seed, kind, trial))
    if kind == "evt_closure":
        return _gen_evt_closure(rng, cfg, (cfg.seed, kind, trial))
    if kind == "evt_quantale":
        return _gen_evt_quantale(rng, cfg, (cfg.seed, kind, trial))
    if kind == "berge":
        return _gen_berge(rng, cfg, (cfg.seed, kind, trial))
    raise ValueError(f"unknown instance kind {kind!r}")


def _gen_max(rng, cfg, kind, seed):
    q = rng.choice(cfg.quantales)
    pal = cfg.palette(q)
    T = rng.choice((P, U))
    tgt = gen_target(rng, T, q, pal, cfg, want_cocomplete=rng.random() < 0.7)
    M = tgt.space
    A = _carrier("A", rng.randint(1, cfg.max_size))
    B = _carrier("B", rng.randint(1, cfg.max_size))
    # the map lives on B (right extensions) or on A (left extensions)
    dom = B if kind == "right" else A
    f = _rand_map(rng, dom, M.carrier)
    cats = {}
    for X in (A, B):
        cat = rand_vcat(rng, q, X, pal)
        if X is dom:
            cat = _vfunctor_meet(cat, M.cat, f)
        cats[X.name] = cat
    spaces = {}
    for X in (A, B):
        cat = cats[X.name]
        st = rand_structure(rng, T, cat, pal)
        if X is dom and rng.random() < 0.8:
            st = rel_meet(st, pullback_structure(T, M, f))
        spaces[X.name] = ModularSpace(cat, make_space(T, X, st))
    J = rand_profunctor(rng, q, cats["A"], cats["B"], pal)
    return TheoremInstance(kind, q, T, spaces["A"], spaces["B"], tgt, J, f, seed)


# --- the four maximum theorems ----------------------------------------------------

def _kan_crosscheck(direction, found, f, J, tgt: Target):
    """Compare the search inside a subset of an integral V with the closed form in V.

    A right extension exists iff the closed form lands in the subset.  A left
    extension equals the closed form whenever that lands in the subset, and
    otherwise can only sit above it.
    """
    q = J.q
    if tgt.values is None or q.unit != q.top:
        return
    vals = list(tgt.values)
    closed = kan_into_canonical(direction, [vals[i] for i in f.idx], J, "lhom")
    got = None if found is None else tuple(vals[i] for i in found)
    inside = all(v in vals for v in closed)
    if direction == "right" and inside != (found is not None):
        raise InternalInconsistency("Kan extension search disagrees with the closed form")
    if inside and got != closed:
        raise InternalInconsistency("Kan extension differs from the closed form")
    if got is not None and not all(q.le(c, g) for c, g in zip(closed, got)):
        raise InternalInconsistency("Kan extension lies below the closed form")


def verify_max_theorem(variant: str, inst: TheoremInstance) -> VerificationReport:
    if variant not in MAX_VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    direction = variant.split("_")[0]
    if inst.kind != direction:
        raise ValueError(f"variant {variant} needs a {direction} instance, got {inst.kind}")
    t0 = time.perf_counter()
    T, A, B, tgt, J, f = inst.monad, inst.source, inst.middle, inst.target, inst.rel, inst.f
    M = tgt.space
    rep = VerificationReport(variant, seed=inst.seed)
    H = rep.hypotheses
    H["J is a modular relation"] = bool(check_profunctor(J, A.cat, B.cat))
    j = StructuredRel(J, A, B)
    if direction == "right":
        H["J is T-open"] = bool(open_closed_check(T, "open", j))
        H["e is a T-morphism"] = bool(t_morphism_check(T, f, B, M))
    else:
        H["J is T-closed"] = bool(open_closed_check(T, "closed", j))
        H["d is a T-morphism"] = bool(t_morphism_check(T, f, A, M))
    found = kan_finite_search(direction, f, J, M.cat)
    _kan_crosscheck(direction, found, f, J, tgt)
    H["Kan extension exists"] = found is not None
    ext = SetMap(B.carrier if direction == "left" else A.carrier, M.carrier, found) if found else None
    if ext is not None and not kan_verify(direction, ext, f, J, M.cat):
        raise InternalInconsistency("Kan extension search returned a non-extension")
    variant_kind = variant.split("_")[1]
    if variant_kind == "cocomplete":
        cc = cocomplete_check(M)
        H["M is T-cocomplete"] = bool(cc)
        if direction == "left":
            if cc and ext is not None:
                m = SetMap(T.carrier(M.carrier), M.carrier, cc.generic)
                mTl = [m.idx[i] for i in T.map(ext).idx]
                mTd = [m.idx[i] for i in T.map(f).idx]
                H["m.Tl is the Kan extension of m.Td along TJ"] = bool(
                    kan_verify("left", mTl, mTd, T.rel(J), M.cat))
            else:
                H["m.Tl is the Kan extension of m.Td along TJ"] = False
    else:
        if ext is not None:
            H["Kan extension satisfies Beck-Chevalley"] = bool(bc_check(direction, ext, f, J, M.cat))
        else:
            H["Kan extension satisfies Beck-Chevalley"] = False
        if direction == "left":
            dstar = rel_restrict(M.hom, map_id(M.carrier), f)
            H["T(d^*);TJ = T(d^*;J)"] = (rel_compose(T.rel(dstar), T.rel(J))
                                        == T.rel(rel_compose(dstar, J)))
    ext_src = A if direction == "right" else B

    def conclude():
        v = t_morphism_check(T, ext, ext_src, M)
        rep.conclusion = bool(v)
        if not v:
            rep.witnesses["T-morphism"] = v.witness
        if variant == "right_bc":
            estar = rel_restrict(M.hom, f, map_id(M.carrier))
            prem = (bool(vertical_check(T, "closed", f, B, M))
                    and bool(open_closed_check(T, "closed", j))
                    and rel_compose(T.rel(J), T.rel(estar)) == T.rel(rel_compose(J, estar)))
            if prem:
                v2 = vertical_check(T, "closed", ext, A, M)
                rep.secondary["r is T-closed"] = bool(v2)
                if not v2:
                    rep.witnesses["T-closed"] = v2.witness
            else:
                rep.secondary["r is T-closed"] = None
        if variant == "left_bc":
            prem = (bool(vertical_check(T, "open", f, A, M))
                    and bool(open_closed_check(T, "open", j)))
            if prem:
                v2 = vertical_check(T, "open", ext, B, M)
                rep.secondary["l is T-open"] = bool(v2)
                if not v2:
                    rep.witnesses["T-open"] = v2.witness
            else:
                rep.secondary["l is T-open"] = None

    return _finish(rep, t0, conclude)


# --- extreme value theorem for ordered closure spaces ------------------------------

def _moore_closure(n, gens):
    """Closure operator (as a list indexed by mask) of the Moore family generated by gens."""
    full = (1 << n) - 1
    fam = {full}
    for g in gens:
        fam |= {g & V for V in fam} | {g}
    fam = sorted(fam)
    return [min((V for V in fam if V & S == S), key=lambda V: bin(V).count("1")) for S in range(1 << n)]


def closure_space(X: FiniteSet, cl) -> PSpace:
    q = Bool2()
    n = len(X)
    rows = [[bool(cl[S] >> x & 1) for x in range(n)] for S in range(1 << n)]
    return PSpace(X, VRel(q, powerset(X), X, rows, check=False))


def _rand_closure(rng, n, extra=()):
    gens = [rng.randrange(1 << n) for _ in range(rng.randint(0, n + 1))]
    return _moore_closure(n, list(gens) + list(extra))


def _gen_evt_closure(rng, cfg, seed):
    q = Bool2()
    mM = rng.randint(1, cfg.max_target)
    Mset = _carrier("M", mM)
    Msp = closure_space(Mset, _rand_closure(rng, mM))
    M = ModularSpace(VCat(Mset, structure_at_units(Msp)), Msp)
    n = rng.randint(1, cfg.max_size)
    A = _carrier("A", n)
    d = _rand_map(rng, A, Mset)
    closedM = [V for V in range(1 << mM) if Msp.delta.rows[V] == tuple(bool(V >> y & 1) for y in range(mM))]
    pre = [sum(1 << x for x in range(n) if V >> d.idx[x] & 1) for V in closedM]
    Asp = closure_space(A, _rand_closure(rng, n, pre))
    if rng.random() < 0.7:
        catA = VCat(A, structure_at_units(Asp))
    else:
        catA = VCat(A, vcat_closure(VRel(q, A, A, [[False] * n for _ in range(n)], check=False)))
    As = ModularSpace(catA, Asp)
    p = rng.randint(1, cfg.max_size)
    Bset = _carrier("B", p)
    catB = rand_vcat(rng, q, Bset, [False, True])
    J = rand_profunctor(rng, q, catA, catB, [True])
    return TheoremInstance("evt_closure", q, P, As, catB, M, J, d, seed)


def _up_directed(le, pts) -> bool:
    pts = list(dict.fromkeys(pts))
    return bool(pts) and all(any(le(a, c) and le(b, c) for c in pts) for a in pts for b in pts)


def verify_evt_closure(inst: TheoremInstance) -> VerificationReport:
    t0 = time.perf_counter()
    A, catB, M, J, d = inst.source, inst.middle, inst.target, inst.rel, inst.f
    if not isinstance(J.q, Bool2):
        raise ValueError("the ordered closure space theorem needs V = 2")
    rep = VerificationReport("evt_closure", seed=inst.seed)
    H = rep.hypotheses
    H["A is a modular closure space"] = A.space.flags.category and bool(modularity_check(A))
    H["M is a normalised modular closure space"] = (M.space.flags.category
                                                    and modularity_check(M).normalised)
    H["d is monotone and continuous"] = bool(t_morphism_check(P, d, A, M))
    H["J is a modular relation"] = bool(check_profunctor(J, A.cat, catB))
    le = lambda a, b: M.hom.rows[a][b]
    compact, directed = True, True
    for y in range(len(J.target)):
        img = [d.idx[x] for x in range(len(J.source)) if J.rows[x][y]]
        mask = sum(1 << z for z in set(img))
        compact = compact and is_compact(M.space, mask)
        directed = directed and _up_directed(le, img)
    H["each d(J^-y) is compact"] = compact
    H["each d(J^-y) is up-directed"] = directed
    found = kan_finite_search("left", d, J, M.cat)
    H["Kan extension exists"] = found is not None

    def conclude():
        bc = bc_check("left", found, d, J, M.cat)
        rep.conclusion = bool(bc)
        if not bc:
            rep.witnesses["Beck-Chevalley"] = bc.witness
        # independent route: every l(y) is attained by some d(x) with x in J^-y
        attained = all(any(le(ly, d.idx[x]) for x in range(len(J.source)) if J.rows[x][y])
                       for y, ly in enumerate(found))
        if attained != bool(bc):
            raise InternalInconsistency("Beck-Chevalley disagrees with attained maxima")

    return _finish(rep, t0, conclude)


# --- extreme value theorem for V-valued pseudotopological spaces -------------------

def _gen_evt_quantale(rng, cfg, seed):
    q = rng.choice(cfg.evt_quantales)
    pal = cfg.palette(q)
    n = rng.randint(1, cfg.max_size)
    A = _carrier("A", n)
    d = [rng.choice(pal) for _ in range(n)]
    V = CanonicalTarget(q, "lhom")
    pull = VRel(q, A, A, [[V(a, b) for b in d] for a in d], check=False)
    if rng.random() < 0.5:
        homA = vcat_closure(VRel(q, A, A, [[q.bottom] * n for _ in range(n)], check=False))
    else:
        homA = vcat_closure(rand_rel(rng, q, A, A, pal, bottom_bias=0.6))
    catA = VCat(A, rel_meet(homA, pull))
    alpha = rel_meet(rand_structure(rng, U, catA, pal), pull)
    As = ModularSpace(catA, USpace(A, alpha))
    p = rng.randint(1, cfg.max_size)
    Bset = _carrier("B", p)
    catB = rand_vcat(rng, q, Bset, pal, discrete_p=0.6)
    raw = VRel(q, A, Bset, [[q.unit if rng.random() < 0.4 else q.bottom for _ in range(p)]
                            for _ in range(n)], check=False)
    J = rel_compose_all(catA.hom, raw, catB.hom)
    return TheoremInstance("evt_quantale", q, U, As, catB, V, J, tuple(d), seed)


def verify_evt_quantale(inst: TheoremInstance) -> VerificationReport:
    t0 = time.perf_counter()
    A, catB, V, J, d = inst.source, inst.middle, inst.target, inst.rel, list(inst.f)
    q = J.q
    rep = VerificationReport("evt_quantale", seed=inst.seed)
    H = rep.hypotheses
    n, p = len(J.source), len(J.target)
    H["A is a modular U-space"] = bool(modularity_check(A)) and A.space.flags.reflexive
    H["J is a V-profunctor"] = bool(check_profunctor(J, A.cat, catB))
    cont = all(q.le(A.structure.rows[x][y], V(d[x], d[y])) for x in range(n) for y in range(n))
    func = all(q.le(A.hom.rows[x][y], V(d[x], d[y])) for x in range(n) for y in range(n))
    H["d is a continuous V-functor"] = cont and func
    H["(a) J is discrete"] = all(v == q.bottom or v == q.unit for v in J.entries())
    H["(b) J is U-compact"] = bool(u_compact_check(StructuredRel(J, A, _discrete_uspace(catB))))
    fib = [[d[x] for x in range(n) if J.rows[x][y] == q.unit] for y in range(p)]
    H["(c) each d(J_k^-y) is up-directed"] = all(_up_directed(q.le, D) for D in fib)
    cond_d = True
    for D in fib:
        if D:
            top = q.join(D)
            cond_d = cond_d and q.le(q.unit, q.join([q.lhom(top, z) for z in D]))
    H["(d) k <= sup_z (sup d(J_k^-y) -o z)"] = cond_d
    l = kan_into_canonical("left", d, J, "lhom")

    def conclude():
        for y in range(p):
            if l[y] != q.join(fib[y]):
                raise InternalInconsistency("discrete Kan extension is not the fibre supremum")
        bc = bc_check("left", l, d, J, V)
        rep.conclusion = bool(bc)
        if not bc:
            rep.witnesses["Beck-Chevalley"] = (bc.witness, bc.gaps)

    return _finish(rep, t0, conclude)


def _discrete_uspace(cat: VCat) -> USpace:
    return USpace(cat.carrier, cat.hom)


# --- Berge ---------------------------------------------------------------------

def _preorder_closure(rng, n):
    q = Bool2()
    X = FiniteSet("X", range(n))
    R = rand_rel(rng, q, X, X, [True], bottom_bias=0.75)
    return vcat_closure(R).rows


def topology(X: FiniteSet, preorder) -> USpace:
    """Finite topology as a convergence: ix converges to y iff y is in the closure of x."""
    return USpace(X, VRel(Bool2(), X, X, preorder, check=False))


def _components(rows):
    n = len(rows)
    comp = list(range(n))

    def find(i):
        while comp[i] != i:
            comp[i] = comp[comp[i]]
            i = comp[i]
        return i
    for i in range(n):
        for j in range(n):
            if rows[i][j]:
                comp[find(i)] = find(j)
    return [find(i) for i in range(n)]


def _monotone(rows_a, rows_b, f):
    n = len(rows_a)
    return all(not rows_a[i][j] or rows_b[f[i]][f[j]] for i in range(n) for j in range(n))


def _gen_berge(rng, cfg, seed):
    n, p = rng.randint(1, cfg.max_size), rng.randint(1, cfg.max_size)
    A, B = _carrier("A", n), _carrier("B", p)
    ra, rb = _preorder_closure(rng, n), _preorder_closure(rng, p)
    Asp, Bsp = topology(A, ra), topology(B, rb)
    rel = [[False] * p for _ in range(n)]
    mode = rng.random()
    if mode < 0.25:
        rel = [[rng.random() < 0.4 for _ in range(p)] for _ in range(n)]
    else:
        # unions of graphs of continuous maps and constant relations are hemicontinuous
        for _ in range(rng.randint(1, 3)):
            if rng.random() < 0.6:
                for _try in range(20):
                    f = [rng.randrange(p) for _ in range(n)]
                    if _monotone(ra, rb, f):
                        break
                else:
                    f = [rng.randrange(p)] * n
                for x in range(n):
                    rel[x][f[x]] = True
            else:
                C = [y for y in range(p) if rng.random() < 0.5] or [rng.randrange(p)]
                for x in range(n):
                    for y in C:
                        rel[x][y] = True
    J = VRel(Bool2(), A, B, rel, check=False)
    comps = _components(rb)
    vals = [F(-2), F(0), F(1), F(5, 2), INF, NEG_INF]
    if rng.random() < 0.8:
        table = {c: rng.choice(vals) for c in set(comps)}
        e = tuple(table[c] for c in comps)
    else:
        e = tuple(rng.choice(vals) for _ in range(p))
    return TheoremInstance("berge", Bool2(), U, Asp, Bsp, None, J, e, seed)


def berge_classical(inst: TheoremInstance) -> VerificationReport:
    t0 = time.perf_counter()
    A, B, J, e = inst.source, inst.middle, inst.rel, list(inst.f)
    rep = VerificationReport("berge", seed=inst.seed)
    H = rep.hypotheses
    j = StructuredRel(J, A, B)
    lower = bool(open_closed_check(U, "open", j))
    upper = bool(open_closed_check(U, "closed", StructuredRel(rel_reverse(J), B, A)))
    if lower != lower_hemicontinuous(J, A, B) or upper != upper_hemicontinuous(J, A, B):
        raise InternalInconsistency("U-open/U-closed disagree with classical hemicontinuity")
    n, p = len(J.source), len(J.target)
    H["A and B are topological"] = A.flags.category and B.flags.category
    H["J is lower hemicontinuous"] = lower
    H["J is upper hemicontinuous"] = upper
    H["Jx is non-empty"] = all(any(r) for r in J.rows)
    cont_e = (bool(semicontinuity_check(e, B, "lower")) and bool(semicontinuity_check(e, B, "upper")))
    if cont_e != continuous_into_reals(e, B):
        raise InternalInconsistency("semicontinuity verdicts disagree with continuity")
    H["e is continuous"] = cont_e

    def conclude():
        m = [max(e[y] for y in range(p) if J.rows[x][y]) for x in range(n)]
        lo, up = semicontinuity_check(m, A, "lower"), semicontinuity_check(m, A, "upper")
        rep.conclusion = bool(lo) and bool(up)
        if continuous_into_reals(m, A) != rep.conclusion:
            raise InternalInconsistency("semicontinuity verdicts disagree with continuity")
        if not rep.conclusion:
            rep.witnesses["m"] = m

    return _finish(rep, t0, conclude)


# --- Delta condition (d) -----------------------------------------------------------

def staircase(i, n=8) -> sf.StepFunction:
    """A step function below t -> min(t, i) sharing its value i beyond i."""
    i = F(i)
    return sf.StepFunction([(i * j / n, i * j / n) for j in range(1, n + 1)])


@dataclass
class DeltaProbeReport:
    tnorm: str
    value: sf.StepFunction
    equals_unit: bool
    staircase: dict = field(default_factory=dict)
    ok: bool = True

    def __bool__(self):
        return self.ok


def delta_condition_d_probe(phis, tnorm: str, indices=(F(1, 10), F(1, 4), F(49, 100))):
    q = DeltaDist(tnorm)
    phis = list(phis)
    if not _up_directed(q.le, phis):
        raise ValueError("the family is not up-directed")
    sigma = q.join(phis)
    value = q.join([q.lhom(sigma, phi) for phi in phis])
    eq = value == q.unit
    rep = DeltaProbeReport(q.tnorm, value, eq)
    # a finite up-directed family contains its supremum, so the identity holds for every t-norm
    if not eq:
        raise InternalInconsistency("finite up-directed family violates the residual identity")
    if q.tnorm == "minimum":
        half = staircase(F(1, 2))
        for i in indices:
            chi = q.lhom(half, staircase(i))
            at_inf = sf.sf_eval(chi, INF)
            adj = q.le(q.tensor(half, chi), staircase(i))
            rep.staircase[i] = at_inf
            rep.ok = rep.ok and at_inf <= i and at_inf < 1 and adj
    return rep


# --- built-in counterexamples --------------------------------------------------------

@dataclass
class RegressionReport:
    values: dict
    checks: dict

    @property
    def ok(self):
        return all(self.checks.values())

    def __bool__(self):
        return self.ok


def sierpinski_instance():
    """The Lawvere-valued Sierpinski counterexample to dropping discreteness."""
    q = Lawvere()
    S = FiniteSet("Sierpinski", ["bot", "top"])
    star = FiniteSet("Star", ["*"])
    hom = VRel(q, S, S, [[F(0), F(0)], [INF, F(0)]])
    A = ModularSpace(VCat(S, hom), USpace(S, hom))
    catB = VCat(star, VRel(q, star, star, [[F(0)]]))
    J = VRel(q, S, star, [[F(0)], [F(1)]])
    d = (F(2), F(0))
    return TheoremInstance("evt_quantale", q, U, A, catB, CanonicalTarget(q, "lhom"), J, d,
                           "sierpinski")


def regression_counterexamples() -> RegressionReport:
    inst = sierpinski_instance()
    q, J, d = inst.quantale, inst.rel, list(inst.f)
    A = inst.source
    l = kan_into_canonical("left", d, J, "lhom")
    bc = bc_check("left", l, d, J, inst.target)
    # the displayed maximum of truncated differences, evaluated numerically
    shown = max((d[x] - l[0] if d[x] > l[0] else F(0)) + J.rows[x][0] for x in range(2))
    V = inst.target
    cont = all(q.le(A.structure.rows[x][y], V(d[x], d[y])) for x in range(2) for y in range(2))
    nonexp = all(q.le(A.hom.rows[x][y], V(d[x], d[y])) for x in range(2) for y in range(2))
    ucomp = bool(u_compact_check(StructuredRel(J, A, _discrete_uspace(inst.middle))))
    evt = verify_evt_quantale(inst)
    values = {"l(*)": l[0], "gap": bc.gaps[0], "displayed": shown}
    checks = {
        "l(*) = 1": l[0] == 1,
        "Beck-Chevalley gap = 1": bc.gaps[0] == 1 and not bc.ok,
        "displayed quantity = 1": shown == 1,
        "J is U-compact": ucomp,
        "d is continuous": cont,
        "d is non-expansive": nonexp,
        "theorem skips on discreteness only": evt.skip_reason == "(a) J is discrete"
        and all(v for k, v in evt.hypotheses.items() if k != "(a) J is discrete"),
    }
    probe = delta_condition_d_probe([sf.UNIT], "minimum")
    for i, v in probe.staircase.items():
        values[f"residual at inf, i={i}"] = v
        checks[f"residual at inf <= {i}"] = v <= i and v < 1
    return RegressionReport(values, checks)


# --- campaigns ---------------------------------------------------------------------

@dataclass
class SuiteSummary:
    name: str
    passed: int = 0
    skipped: int = 0
    failed: int = 0
    skip_reasons: Counter = field(default_factory=Counter)
    hypothesis_failures: Counter = field(default_factory=Counter)
    failing_seeds: list = field(default_factory=list)
    witnesses: list = field(default_factory=list)

    @property
    def total(self):
        return self.passed + self.skipped + self.failed

    @property
    def non_skip_rate(self):
        return (self.passed + self.failed) / self.total if self.total else 0.0

    def add(self, rep: VerificationReport):
        s = rep.status
        if s == "pass":
            self.passed += 1
        elif s == "skip":
            self.skipped += 1
            self.skip_reasons[rep.skip_reason] += 1
        else:
            self.failed += 1
            self.failing_seeds.append(rep.seed)
            self.witnesses.append(rep.as_dict())
        for k, v in rep.hypotheses.items():
            if not v:
                self.hypothesis_failures[k] += 1

    def merge(self, other: "SuiteSummary"):
        self.passed += other.passed
        self.skipped += other.skipped
        self.failed += other.failed
        self.skip_reasons.update(other.skip_reasons)
        self.hypothesis_failures.update(other.hypothesis_failures)
        self.failing_seeds += other.failing_seeds
        self.witnesses += other.witnesses

    def as_dict(self):
        return {"suite": self.name, "total": self.total, "pass": self.passed,
                "skip": self.skipped, "fail": self.failed,
                "non_skip_rate": round(self.non_skip_rate, 6),
                "skip_reasons": dict(sorted(self.skip_reasons.items())),
                "hypothesis_failures": dict(sorted(self.hypothesis_failures.items())),
                "failing_seeds": [list(s) if isinstance(s, tuple) else s
                                  for s in self.failing_seeds],
                "witnesses": self.witnesses}


@dataclass
class CampaignReport:
    seed: int
    trials: int
    suites: dict = field(default_factory=dict)
    min_non_skip: float = 0.01

    @property
    def ok(self):
        return all(s.failed == 0 for s in self.suites.values())

    @property
    def meaningful(self):
        return all(s.non_skip_rate >= self.min_non_skip for s in self.suites.values() if s.total)

    def as_dict(self):
        return {"seed": self.seed, "trials": self.trials, "ok": self.ok,
                "meaningful": self.meaningful,
                "suites": [self.suites[k].as_dict() for k in self.suites]}


def run_suite(cfg: GeneratorConfig, suite: str, start: int = 0, stop: Optional[int] = None):
    stop = cfg.trials if stop is None else stop
    summary = SuiteSummary(suite)
    for t in range(start, stop):
        summary.add(run_trial(cfg, suite, t))
    return summary


def run_trial(cfg: GeneratorConfig, suite: str, trial: int) -> VerificationReport:
    if suite in MAX_VARIANTS:
        inst = gen_instance(cfg, suite.split("_")[0], trial)
        return verify_max_theorem(suite, inst)
    if suite == "evt_closure":
        return verify_evt_closure(gen_instance(cfg, "evt_closure", trial))
    if suite == "evt_quantale":
        return verify_evt_quantale(gen_instance(cfg, "evt_quantale", trial))
    if suite == "berge":
        return berge_classical(gen_instance(cfg, "berge", trial))
    raise ValueError(f"unknown suite {suite!r}")


def fuzz_campaign(cfg: GeneratorConfig, suites=SUITES) -> CampaignReport:
    if isinstance(suites, str):
        suites = SUITES if suites == "all" else tuple(s.strip() for s in suites.split(","))
    rep = CampaignReport(cfg.seed, cfg.trials)
    for s in suites:
        if s not in SUITES:
            raise ValueError(f"unknown suite {s!r}")
        rep.suites[s] = run_suite(cfg, s)
    return rep
