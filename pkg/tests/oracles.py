"""Brute-force reference computations used to freeze expected values.

Nothing here calls the closed forms under test; each oracle works from the
defining sup/inf by enumeration over a grid or over all candidates.
"""
from fractions import Fraction
from math import lcm

from hypothesis import strategies as st

from kanopt.extnum import INF, NEG_INF
from kanopt.quantale import Bool2, DeltaDist, ExtendedReal, Lawvere, UnitInterval
from kanopt.stepfun import StepFunction, sf_eval, sf_normalize
from kanopt.tnorms import TNORMS

# --- value strategies -------------------------------------------------------

small_frac = st.builds(Fraction, st.integers(0, 24), st.integers(1, 6))
unit_frac = st.builds(lambda a, b: Fraction(min(a, b), max(a, b, 1)),
                      st.integers(0, 12), st.integers(1, 12))


def values(q):
    if isinstance(q, Bool2):
        return st.booleans()
    if isinstance(q, Lawvere):
        return st.one_of(small_frac, st.just(INF))
    if isinstance(q, ExtendedReal):
        return st.one_of(small_frac, small_frac.map(lambda x: -x), st.just(INF), st.just(NEG_INF))
    if isinstance(q, UnitInterval):
        return unit_frac
    return step_functions()


def step_functions(max_jumps=4):
    jump = st.tuples(st.builds(Fraction, st.integers(0, 8), st.integers(1, 4)),
                     unit_frac.filter(bool))
    return st.lists(jump, max_size=max_jumps).map(sf_normalize)


def rand_value(rng, q):
    """Seeded counterpart of ``values`` for loops too long for hypothesis."""
    if isinstance(q, Bool2):
        return rng.random() < 0.5
    if isinstance(q, Lawvere):
        return INF if rng.random() < 0.1 else Fraction(rng.randint(0, 24), rng.randint(1, 6))
    if isinstance(q, ExtendedReal):
        r = rng.random()
        if r < 0.08:
            return INF
        if r < 0.16:
            return NEG_INF
        return Fraction(rng.randint(-24, 24), rng.randint(1, 6))
    if isinstance(q, UnitInterval):
        b = rng.randint(1, 12)
        return Fraction(rng.randint(0, b), b)
    return rand_step(rng)


def rand_step(rng, max_jumps=4):
    k = rng.randint(0, max_jumps)
    raw = []
    for _ in range(k):
        b = rng.randint(1, 12)
        raw.append((Fraction(rng.randint(0, 8), rng.randint(1, 4)), Fraction(rng.randint(1, b), b)))
    return sf_normalize(raw)


# --- scalar residual oracle ---------------------------------------------------

def residual_by_search(q, x, z, candidates):
    """sup{v in candidates : x (x) v <= z}, the defining formula restricted to a pool."""
    return q.join([v for v in candidates if q.le(q.tensor(x, v), z)])


# --- Delta oracles on a dense grid ------------------------------------------

def _grid(*phis):
    den = 1
    top = Fraction(0)
    for p in phis:
        for u, _ in p.jumps:
            den = lcm(den, u.denominator)
            top = max(top, u)
    return Fraction(1, den), top


def _cells(h, top, extra):
    """Midpoints of the cells of width h covering [0, top + extra]."""
    n = int((top + extra) / h) + 2
    return [(k + Fraction(1, 2)) * h for k in range(n)]


def _from_cells(h, mids, vals, at_inf):
    raw = [(m - h / 2, v) for m, v in zip(mids, vals)]
    raw.append((mids[-1] + h / 2, at_inf))
    return sf_normalize(raw)


def convolve_oracle(phi, psi, tnorm):
    t = TNORMS[tnorm][0]
    h, top = _grid(phi, psi)
    top = 2 * top
    fine = h / 4
    mids = _cells(h, top, h)
    out = []
    for m in mids:
        best = Fraction(0)
        r = Fraction(0)
        while r <= m:
            best = max(best, t(sf_eval(phi, r), sf_eval(psi, m - r)))
            r += fine
        out.append(best)
    return _from_cells(h, mids, out, t(sf_eval(phi, INF), sf_eval(psi, INF)))


def residual_oracle(phi, chi, tnorm):
    """Largest left-continuous psi below s -> inf_r res(phi(r), chi(r + s))."""
    res = TNORMS[tnorm][1]
    h, top = _grid(phi, chi)
    fine = h / 4
    mids = _cells(h, top, h)
    horizon = top + 2 * h
    # every r and r + m sampled below is a multiple of fine: tabulate once
    steps = int(horizon / fine)
    span = steps + int(mids[-1] / fine) + 1
    phis = [sf_eval(phi, j * fine) for j in range(steps + 1)]
    chis = [sf_eval(chi, j * fine) for j in range(span + 1)]
    at_inf = res(sf_eval(phi, INF), sf_eval(chi, INF))
    vals = []
    for m in mids:
        k = int(m / fine)
        g = min(min(res(phis[j], chis[j + k]) for j in range(steps + 1)), at_inf, Fraction(1))
        vals.append(g)
    return _from_cells(h, mids, vals, vals[-1])


def pointwise_max_oracle(fs):
    h, top = _grid(*fs)
    mids = _cells(h, top, h)
    vals = [max((sf_eval(f, m) for f in fs), default=Fraction(0)) for m in mids]
    return _from_cells(h, mids, vals, max((sf_eval(f, INF) for f in fs), default=Fraction(0)))


def agree_on_grid(a: StepFunction, b: StepFunction) -> bool:
    h, top = _grid(a, b)
    mids = _cells(h, top, h)
    pts = mids + [m + h / 2 for m in mids]
    return all(sf_eval(a, t) == sf_eval(b, t) for t in pts) and sf_eval(a, INF) == sf_eval(b, INF)


ALL_QUANTALES = (Bool2(), Lawvere(), ExtendedReal(), UnitInterval("product"),
                 UnitInterval("minimum"), UnitInterval("lukasiewicz"), DeltaDist("product"),
                 DeltaDist("minimum"), DeltaDist("lukasiewicz"))
