import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kanopt.extnum import INF
from kanopt.quantale import Bool2, Lawvere, QuantaleMismatch, UnitInterval
from kanopt.vrel import (CellBoundary, FiniteSet, SetMap, ShapeMismatch, VRel, cell_exists,
                         companion, conjoint, map_compose, map_id, rel_compose, rel_from_bool,
                         rel_graph, rel_id, rel_le, rel_reverse, rel_residuate, rel_restrict,
                         rel_threshold)
from oracles import ALL_QUANTALES, rand_value

ids = [q.name for q in ALL_QUANTALES]
LAW = Lawvere()


def fset(name, n):
    return FiniteSet(name, [f"{name}{i}" for i in range(n)])


def rand_rel(rng, q, A, B):
    return VRel(q, A, B, [[rand_value(rng, q) for _ in B] for _ in A])


def rand_map(rng, A, B):
    return SetMap(A, B, [rng.randrange(len(B)) for _ in A])


def naive_compose(J, H):
    q = J.q
    return [[q.join([q.tensor(J.rows[x][y], H.rows[y][z]) for y in range(len(J.target))])
             for z in range(len(H.target))] for x in range(len(J.source))]


seeds = st.integers(0, 10 ** 9)
sizes = st.integers(0, 4)


# --- composition ----------------------------------------------------------------

def test_lawvere_composition_example():
    A, B, E = fset("a", 1), fset("b", 2), fset("e", 1)
    J = VRel(LAW, A, B, [[F(1), F(3)]])
    H = VRel(LAW, B, E, [[F(4)], [F(1)]])
    assert rel_compose(J, H).rows == ((F(4),),)


def test_boolean_composition_is_relational():
    q = Bool2()
    A, B, E = FiniteSet("A", [1, 2]), FiniteSet("B", ["a"]), FiniteSet("E", ["e"])
    J = VRel(q, A, B, [[True], [False]])
    H = VRel(q, B, E, [[True]])
    assert rel_compose(J, H).rows == ((True,), (False,))


def test_identity_entries():
    A = FiniteSet("A", ["a", "b"])
    assert rel_id(A, LAW).rows == ((0, INF), (INF, 0))
    assert rel_id(A, Bool2()).rows == ((True, False), (False, True))
    assert rel_id(FiniteSet("E", []), LAW).rows == ()


def test_empty_middle_gives_bottom():
    A, E = fset("a", 2), fset("e", 3)
    J = VRel(LAW, A, FiniteSet("0", []), [[], []])
    H = VRel(LAW, FiniteSet("0", []), E, [])
    assert rel_compose(J, H).rows == ((INF,) * 3,) * 2


def test_shape_and_quantale_mismatch():
    A, B = fset("a", 2), fset("b", 2)
    with pytest.raises(ShapeMismatch):
        rel_compose(rel_id(A, LAW), rel_id(fset("c", 3), LAW))
    with pytest.raises(QuantaleMismatch):
        rel_compose(rel_id(A, LAW), VRel(Bool2(), A, B, [[True, True]] * 2))
    with pytest.raises(ShapeMismatch):
        VRel(LAW, A, B, [[F(0)]])


@pytest.mark.parametrize("q", ALL_QUANTALES, ids=ids)
@settings(max_examples=25, deadline=None)
@given(seed=seeds, n=sizes, m=sizes, k=sizes, p=sizes)
def test_composition_laws(q, seed, n, m, k, p):
    rng = random.Random(seed)
    A, B, C, D = fset("a", n), fset("b", m), fset("c", k), fset("d", p)
    J, H, K = rand_rel(rng, q, A, B), rand_rel(rng, q, B, C), rand_rel(rng, q, C, D)
    assert rel_compose(J, H).rows == tuple(map(tuple, naive_compose(J, H)))
    assert rel_compose(rel_compose(J, H), K) == rel_compose(J, rel_compose(H, K))
    assert rel_compose(J, rel_id(B, q)) == J == rel_compose(rel_id(A, q), J)


def test_large_lawvere_matches_naive_rows():
    rng = random.Random(3)
    A = fset("x", 96)
    J = VRel(LAW, A, A, [[F(rng.randint(0, 9)) for _ in A] for _ in A])
    H = VRel(LAW, A, A, [[F(rng.randint(0, 9)) if rng.random() < .9 else INF for _ in A] for _ in A])
    got = rel_compose(J, H)
    for x in range(0, 96, 11):
        for z in range(96):
            want = min(J.rows[x][y] + H.rows[y][z] if H.rows[y][z] is not INF else INF
                       for y in range(96))
            assert got.rows[x][z] == want


# --- companions, conjoints, restriction --------------------------------------------

@settings(max_examples=40)
@given(seed=seeds, n=sizes, m=st.integers(1, 4), k=st.integers(1, 4))
def test_graphs_are_functorial(seed, n, m, k):
    rng = random.Random(seed)
    q = UnitInterval()
    A, B, C = fset("a", n), fset("b", m), fset("c", k)
    f, g = rand_map(rng, A, B), rand_map(rng, B, C)
    gf = map_compose(f, g)
    assert companion(gf, q) == rel_compose(companion(f, q), companion(g, q))
    assert conjoint(gf, q) == rel_compose(conjoint(g, q), conjoint(f, q))
    assert companion(map_id(A), q) == rel_id(A, q)
    assert rel_reverse(companion(f, q)) == conjoint(f, q)
    K = rand_rel(rng, q, B, C)
    assert rel_restrict(K, map_id(B), map_id(C)) == K
    h, j = rand_map(rng, A, B), rand_map(rng, A, C)
    assert rel_restrict(rel_restrict(K, map_id(B), map_id(C)), h, j).rows == tuple(
        tuple(K.rows[h.idx[x]][j.idx[y]] for y in range(n)) for x in range(n))
    assert rel_restrict(rel_id(B, q), f, map_id(B)) == companion(f, q)


def test_constant_map_conjoint():
    A, C = fset("a", 3), FiniteSet("C", ["c", "d"])
    f = SetMap.from_dict(A, C, {x: "c" for x in A})
    fs = conjoint(f, LAW)
    assert all(fs("c", x) == 0 for x in A)
    with pytest.raises(ValueError):
        rel_graph(f, "sideways", LAW)


def test_restriction_composes():
    rng = random.Random(1)
    q = LAW
    A, B, C, D = fset("a", 3), fset("b", 2), fset("c", 4), fset("d", 3)
    K = rand_rel(rng, q, C, D)
    f, g = rand_map(rng, B, C), rand_map(rng, B, D)
    h, k = rand_map(rng, A, B), rand_map(rng, A, B)
    assert rel_restrict(rel_restrict(K, f, g), h, k) == rel_restrict(K, map_compose(h, f),
                                                                      map_compose(k, g))


# --- cells ---------------------------------------------------------------------

def test_identity_and_companion_cells():
    rng = random.Random(2)
    q = UnitInterval("lukasiewicz")
    A, C = fset("a", 3), fset("c", 2)
    J = rand_rel(rng, q, A, A)
    assert cell_exists(CellBoundary(J, map_id(A), map_id(A), J))
    f = rand_map(rng, A, C)
    # the four cells defining the companion and the conjoint
    assert cell_exists(CellBoundary(companion(f, q), f, map_id(C), rel_id(C, q)))
    assert cell_exists(CellBoundary(rel_id(A, q), map_id(A), f, companion(f, q)))
    assert cell_exists(CellBoundary(conjoint(f, q), map_id(C), f, rel_id(C, q)))
    assert cell_exists(CellBoundary(rel_id(A, q), f, map_id(A), conjoint(f, q)))


def test_strict_cell_fails():
    q = Bool2()
    A = fset("a", 1)
    assert not cell_exists(CellBoundary(rel_id(A, q), map_id(A), map_id(A),
                                        VRel(q, A, A, [[False]])))


@pytest.mark.parametrize("q", ALL_QUANTALES[:6], ids=ids[:6])
@settings(max_examples=25, deadline=None)
@given(seed=seeds)
def test_horizontal_cell_criterion(q, seed):
    rng = random.Random(seed)
    A, B, C, D = fset("a", 3), fset("b", 2), fset("c", 3), fset("d", 2)
    f, g = rand_map(rng, A, C), rand_map(rng, B, D)
    K = rand_rel(rng, q, C, D)
    # bias toward existing cells by sometimes pulling K back
    J = rel_restrict(K, f, g) if rng.random() < 0.4 else rand_rel(rng, q, A, B)
    b = CellBoundary(J, f, g, K)
    a = cell_exists(b)
    assert a == rel_le(rel_compose(J, companion(g, q)), rel_restrict(K, f, map_id(D)))
    assert a == rel_le(rel_compose(conjoint(f, q), J), rel_restrict(K, map_id(C), g))


# --- residuation -----------------------------------------------------------------

@pytest.mark.parametrize("q", ALL_QUANTALES, ids=ids)
@settings(max_examples=20, deadline=None)
@given(seed=seeds, n=sizes, m=sizes, k=sizes)
def test_relational_residuation(q, seed, n, m, k):
    rng = random.Random(seed)
    A, B, E = fset("a", n), fset("b", m), fset("e", k)
    J, H, K = rand_rel(rng, q, A, B), rand_rel(rng, q, B, E), rand_rel(rng, q, A, E)
    # J o H <= K  iff  H <= J -o K  iff  J <= K o- H
    lhs = rel_le(rel_compose(J, H), K)
    assert lhs == rel_le(H, rel_residuate("left", J, K))
    assert lhs == rel_le(J, rel_residuate("right", K, H))
    assert rel_le(H, rel_residuate("left", J, rel_compose(J, H)))
    assert rel_residuate("left", rel_id(A, q), K) == K


def test_residuation_enumerated_on_product_unit_interval():
    rng = random.Random(4)
    q = UnitInterval("product")
    pool = [F(i, 4) for i in range(5)]
    A, B, E = fset("a", 2), fset("b", 1), fset("e", 2)
    for _ in range(30):
        J, K = rand_rel(rng, q, A, B), rand_rel(rng, q, A, E)
        R = rel_residuate("left", J, K)
        # every H on the pool: H <= J -o K iff J o H <= K
        for h0 in pool:
            for h1 in pool:
                H = VRel(q, B, E, [[h0, h1]])
                assert rel_le(H, R) == rel_le(rel_compose(J, H), K)


# --- reverse, threshold, boolean embedding ---------------------------------------

@given(seed=seeds, n=sizes, m=sizes)
def test_reverse_is_involutive(seed, n, m):
    rng = random.Random(seed)
    J = rand_rel(rng, LAW, fset("a", n), fset("b", m))
    assert rel_reverse(rel_reverse(J)) == J
    A = fset("a", n)
    assert rel_reverse(rel_id(A, LAW)) == rel_id(A, LAW)


def test_threshold_examples():
    A, B = fset("a", 1), fset("b", 2)
    J = VRel(LAW, A, B, [[F(1), F(3)]])
    assert rel_threshold(J, F(2)).rows == ((True, False),)
    assert all(rel_threshold(J, INF).entries())
    f = SetMap(B, A, [0, 0])
    assert rel_threshold(companion(f, LAW), F(0)) == companion(f, Bool2())


@given(seed=seeds, n=sizes, m=sizes)
def test_boolean_round_trip(seed, n, m):
    rng = random.Random(seed)
    q = UnitInterval()
    A, B = fset("a", n), fset("b", m)
    J = rand_rel(rng, Bool2(), A, B)
    V = rel_from_bool(J, q)
    assert rel_threshold(V, q.unit) == J
    assert set(V.entries()) <= {q.unit, q.bottom}


def test_boolean_embedding_of_total_and_empty():
    A, B = fset("a", 2), fset("b", 2)
    tot = VRel(Bool2(), A, B, [[True] * 2] * 2)
    emp = VRel(Bool2(), A, B, [[False] * 2] * 2)
    assert set(rel_from_bool(tot, LAW).entries()) == {0}
    assert set(rel_from_bool(emp, LAW).entries()) == {INF}
