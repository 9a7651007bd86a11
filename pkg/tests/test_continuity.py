import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kanopt.continuity import (StructuredRel, classical_open_equiv, closed_sets, closure_of,
                               continuous_into_reals, eps_closure, is_compact,
                               lower_hemicontinuous, open_closed_check, open_sets,
                               pu_transfer_check, semicontinuity_check, t_morphism_check,
                               threshold_fibres, u_compact_check, upper_hemicontinuous,
                               vertical_check)
from kanopt.extnum import INF, NEG_INF
from kanopt.harness import (_moore_closure, _rand_closure, closure_space, default_palette,
                            make_space, rand_rel, rand_structure, rand_vcat, topology, vcat_closure)
from kanopt.quantale import Bool2, Lawvere, UnitInterval
from kanopt.topology import P, U, ModularSpace, USpace, members, to_closure
from kanopt.vrel import FiniteSet, SetMap, VRel, companion, map_id

BOOL = Bool2()
LAW = Lawvere()
seeds = st.integers(0, 10 ** 9)


def fset(name, n):
    return FiniteSet(name, [f"{name}{i}" for i in range(n)])


def rand_preorder(rng, n):
    X = fset("x", n)
    return [list(r) for r in vcat_closure(rand_rel(rng, BOOL, X, X, [True], 0.7)).rows]


def upset(order, S):
    n = len(order)
    return sum(1 << y for y in range(n) if any(order[s][y] for s in members(S)))


def alexandrov(order):
    """Closed sets are the up-sets of the preorder; computed without the library."""
    n = len(order)
    closed = [V for V in range(1 << n) if upset(order, V) == V]
    full = (1 << n) - 1
    return closed, [full ^ V for V in closed]


# --- topology basics --------------------------------------------------------------

def test_sierpinski_open_sets():
    X = FiniteSet("S", ["bot", "top"])
    sp = topology(X, [[True, True], [False, True]])
    assert sorted(open_sets(sp)) == [0, 1, 3]
    assert sorted(closed_sets(sp)) == [0, 2, 3]
    assert closure_of(sp, 1) == 3


@settings(max_examples=60, deadline=None)
@given(seed=seeds, n=st.integers(1, 5))
def test_open_and_closed_sets_match_alexandrov(seed, n):
    order = rand_preorder(random.Random(seed), n)
    X = fset("x", n)
    closed, opens = alexandrov(order)
    for sp in (topology(X, order), closure_space(X, [upset(order, S) for S in range(1 << n)])):
        assert sorted(closed_sets(sp)) == sorted(closed)
        assert sorted(open_sets(sp)) == sorted(opens)


# --- compactness ---------------------------------------------------------------------

def _fip_by_families(closed, S, full):
    for fam in range(1 << len(closed)):
        sets = [closed[i] for i in members(fam)]
        inter = full
        for V in sets:
            inter &= V
        subs_meet = all(_meet_all(S, [sets[i] for i in members(sub)]) for sub in range(1 << len(sets)))
        if subs_meet and not inter & S:
            return False
    return True


def _meet_all(S, sets):
    for V in sets:
        S &= V
    return S


@settings(max_examples=40, deadline=None)
@given(seed=seeds, n=st.integers(1, 4))
def test_compactness_routes_agree(seed, n):
    rng = random.Random(seed)
    X = fset("x", n)
    sp = closure_space(X, _rand_closure(rng, n))
    closed = closed_sets(sp)
    full = (1 << n) - 1
    for S in range(1 << n):
        direct = is_compact(sp, S, family_cap=99)
        reach = is_compact(sp, S, family_cap=0)
        if len(closed) <= 10:
            assert direct == _fip_by_families(closed, S, full)
        assert direct == reach
        # with finitely many closed sets every subset is compact
        assert reach


def _or(bits):
    out = 0
    for b in bits:
        out |= b
    return out


# --- open and closed relations ---------------------------------------------------------

@settings(max_examples=80, deadline=None)
@given(seed=seeds, n=st.integers(1, 4), m=st.integers(1, 4))
def test_companion_open_iff_continuous_closed_iff_closed_map(seed, n, m):
    rng = random.Random(seed)
    oa, ob = rand_preorder(rng, n), rand_preorder(rng, m)
    A, B = fset("a", n), fset("b", m)
    SA = closure_space(A, [upset(oa, S) for S in range(1 << n)])
    SB = closure_space(B, [upset(ob, S) for S in range(1 << m)])
    f = SetMap(A, B, [rng.randrange(m) for _ in range(n)])
    j = StructuredRel(companion(f, BOOL), SA, SB)
    closedA, opensA = alexandrov(oa)
    closedB, opensB = alexandrov(ob)
    pre = lambda O: sum(1 << x for x in range(n) if O >> f.idx[x] & 1)
    img = lambda V: _or(1 << f.idx[x] for x in members(V))
    continuous = all(pre(O) in opensA for O in opensB)
    closed_map = all(img(V) in closedB for V in closedA)
    assert bool(open_closed_check(P, "open", j)) == continuous
    assert bool(open_closed_check(P, "closed", j)) == closed_map
    assert bool(t_morphism_check(P, f, SA, SB)) == continuous


def test_open_closed_check_rejects_bad_side():
    X = fset("x", 1)
    sp = topology(X, [[True]])
    j = StructuredRel(VRel(BOOL, X, X, [[True]]), sp, sp)
    with pytest.raises(ValueError):
        open_closed_check(U, "sideways", j)
    with pytest.raises(ValueError):
        open_closed_check(P, "open", j)


def test_structured_rel_endpoint_mismatch():
    X, Y = fset("x", 1), fset("y", 2)
    with pytest.raises(ValueError):
        StructuredRel(VRel(BOOL, X, X, [[True]]), topology(X, [[True]]),
                      topology(Y, [[True, False], [False, True]]))


@settings(max_examples=60, deadline=None)
@given(seed=seeds, n=st.integers(1, 5), m=st.integers(1, 5))
def test_classical_verdicts_agree_with_direct_image_check(seed, n, m):
    rng = random.Random(seed)
    A, B = fset("a", n), fset("b", m)
    ca, cb = _rand_closure(rng, n), _rand_closure(rng, m)
    SA, SB = closure_space(A, ca), closure_space(B, cb)
    J = VRel(BOOL, A, B, [[rng.random() < 0.35 for _ in range(m)] for _ in range(n)])
    a, b, c = classical_open_equiv(J, SA, SB)

    def img(S):
        out = 0
        for x in members(S):
            for y in range(m):
                if J.rows[x][y]:
                    out |= 1 << y
        return out
    want = all(img(ca[S]) & ~cb[img(S)] == 0 for S in range(1 << n))
    assert a == b == c == want
    assert lower_hemicontinuous(J, SA, SB) == c


def test_classical_needs_boolean():
    X = fset("x", 1)
    with pytest.raises(ValueError):
        classical_open_equiv(VRel(LAW, X, X, [[F(0)]]), None, None)


def test_hemicontinuity_examples():
    # A = Sierpinski (open point a0), B discrete on two points
    A, B = fset("a", 2), fset("b", 2)
    SA = topology(A, [[True, True], [False, True]])
    SB = topology(B, [[True, False], [False, True]])
    # a1 is a limit of a0; gaining b1 at the limit breaks lower hemicontinuity
    J = VRel(BOOL, A, B, [[True, True], [True, False]])
    assert lower_hemicontinuous(J, SA, SB)
    assert not upper_hemicontinuous(J, SA, SB)
    K = VRel(BOOL, A, B, [[True, False], [True, True]])
    assert not lower_hemicontinuous(K, SA, SB)
    assert upper_hemicontinuous(K, SA, SB)
    assert bool(open_closed_check(U, "open", StructuredRel(J, SA, SB))) is True
    assert bool(open_closed_check(U, "open", StructuredRel(K, SA, SB))) is False


# --- U-compactness ---------------------------------------------------------------------

def test_u_compact_examples():
    X, Y = fset("x", 2), fset("y", 1)
    J = VRel(LAW, X, Y, [[F(0)], [F(1)]])
    refl = USpace(X, VRel(LAW, X, X, [[F(0), F(0)], [INF, F(0)]]))
    B = USpace(Y, VRel(LAW, Y, Y, [[F(0)]]))
    assert u_compact_check(StructuredRel(J, refl, B))
    lame = USpace(X, VRel(LAW, X, X, [[F(2), INF], [INF, F(2)]]))
    v = u_compact_check(StructuredRel(J, lame, B))
    assert not v and v.witness is not None


@settings(max_examples=40, deadline=None)
@given(seed=seeds, n=st.integers(1, 4), m=st.integers(1, 3))
def test_boolean_u_compactness_is_fibrewise(seed, n, m):
    rng = random.Random(seed)
    A, B = fset("a", n), fset("b", m)
    alpha = VRel(BOOL, A, A, [[rng.random() < 0.5 for _ in range(n)] for _ in range(n)])
    J = VRel(BOOL, A, B, [[rng.random() < 0.5 for _ in range(m)] for _ in range(n)])
    SB = USpace(B, VRel(BOOL, B, B, [[i == k for k in range(m)] for i in range(m)]))
    got = bool(u_compact_check(StructuredRel(J, USpace(A, alpha), SB)))
    want = all(any(alpha.rows[x][z] and J.rows[z][y] for z in range(n))
               for x in range(n) for y in range(m) if J.rows[x][y])
    assert got == want


# --- vertical morphisms ----------------------------------------------------------------

@pytest.mark.parametrize("q", [BOOL, LAW, UnitInterval("lukasiewicz")], ids=str)
@pytest.mark.parametrize("T", [P, U], ids=["P", "U"])
def test_identity_is_open_closed_morphism(q, T):
    rng = random.Random(5)
    pal = default_palette(q)
    for _ in range(15):
        X = fset("x", rng.randint(1, 3))
        cat = rand_vcat(rng, q, X, pal)
        M = ModularSpace(cat, make_space(T, X, rand_structure(rng, T, cat, pal)))
        ident = map_id(X)
        assert t_morphism_check(T, ident, M, M)
        assert vertical_check(T, "open", ident, M, M)
        assert vertical_check(T, "closed", ident, M, M)


def test_vertical_check_rejects_bad_side():
    X = fset("x", 1)
    sp = topology(X, [[True]])
    with pytest.raises(ValueError):
        vertical_check(U, "diagonal", map_id(X), sp, sp)


# --- transfer between U and P ----------------------------------------------------------

@pytest.mark.parametrize("q", [BOOL, LAW, UnitInterval("product")], ids=str)
@settings(max_examples=25, deadline=None)
@given(seed=seeds, n=st.integers(1, 3), m=st.integers(1, 3))
def test_pu_transfer(q, seed, n, m):
    rng = random.Random(seed)
    pal = default_palette(q)
    A, B = fset("a", n), fset("b", m)
    SA = USpace(A, vcat_closure(rand_rel(rng, q, A, A, pal, 0.5)))
    SB = USpace(B, vcat_closure(rand_rel(rng, q, B, B, pal, 0.5)))
    rep = pu_transfer_check(StructuredRel(rand_rel(rng, q, A, B, pal), SA, SB))
    assert rep.ok
    assert rep.u_open == rep.p_open


@pytest.mark.parametrize("q", [BOOL, LAW, UnitInterval("minimum")], ids=str)
def test_eps_closure_is_induced_closure(q):
    rng = random.Random(9)
    for _ in range(20):
        X = fset("x", rng.randint(1, 4))
        sp = USpace(X, rand_rel(rng, q, X, X, default_palette(q)))
        assert eps_closure(sp) == to_closure(sp).delta


# --- semicontinuity -------------------------------------------------------------------

def _semicontinuous_by_cuts(f, opens, n, mode):
    """Check every real cut: the integer and half-integer points around the values."""
    cuts = set()
    for v in f:
        if v not in (INF, NEG_INF):
            cuts |= {v - F(1, 2), v, v + F(1, 2)}
    cuts |= {F(-10 ** 6), F(10 ** 6)}
    for t in cuts:
        if mode == "lower":
            S = sum(1 << x for x in range(n) if f[x] > t)
        else:
            S = sum(1 << x for x in range(n) if f[x] < t)
        if S not in opens:
            return False
    return True


def test_semicontinuity_on_sierpinski():
    X = FiniteSet("S", ["open", "closed"])
    sp = topology(X, [[True, True], [False, True]])
    # indicator of the open point
    assert semicontinuity_check([F(1), F(0)], sp, "lower")
    assert not semicontinuity_check([F(1), F(0)], sp, "upper")
    assert not continuous_into_reals([F(1), F(0)], sp)
    assert continuous_into_reals([INF, INF], sp)
    with pytest.raises(ValueError):
        semicontinuity_check([F(0), F(0)], sp, "middle")


@settings(max_examples=60, deadline=None)
@given(seed=seeds, n=st.integers(1, 5))
def test_semicontinuity_matches_cut_oracle(seed, n):
    rng = random.Random(seed)
    order = rand_preorder(rng, n)
    sp = topology(fset("x", n), order)
    _, opens = alexandrov(order)
    opens = set(opens)
    f = [rng.choice([F(-1), F(0), F(1, 2), F(3), INF, NEG_INF]) for _ in range(n)]
    lo = bool(semicontinuity_check(f, sp, "lower"))
    up = bool(semicontinuity_check(f, sp, "upper"))
    assert lo == _semicontinuous_by_cuts(f, opens, n, "lower")
    assert up == _semicontinuous_by_cuts(f, opens, n, "upper")
    assert continuous_into_reals(f, sp) == (lo and up)


def test_threshold_fibres():
    A, B = fset("a", 3), fset("b", 2)
    J = VRel(LAW, A, B, [[F(0), F(1)], [INF, F(0)], [F(0), F(0)]])
    assert threshold_fibres(J) == [[0, 2], [1, 2]]


def test_moore_closure_is_a_closure_operator():
    rng = random.Random(11)
    for _ in range(50):
        n = rng.randint(1, 4)
        cl = _moore_closure(n, [rng.randrange(1 << n) for _ in range(3)])
        for S in range(1 << n):
            assert S & ~cl[S] == 0 and cl[cl[S]] == cl[S]
            for T in range(1 << n):
                if S & ~T == 0:
                    assert cl[S] & ~cl[T] == 0
