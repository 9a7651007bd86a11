import json
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kanopt import stepfun as sf
from kanopt.continuity import StructuredRel, open_closed_check, upper_hemicontinuous
from kanopt.enriched import check_profunctor, check_vcat
from kanopt.extnum import INF
from kanopt.harness import (MAX_VARIANTS, SUITES, GeneratorConfig, SuiteSummary,
                            TheoremInstance, VerificationReport, berge_classical,
                            default_palette, delta_condition_d_probe, fuzz_campaign, gen_instance,
                            rand_profunctor, rand_vcat, regression_counterexamples, run_suite,
                            run_trial, sierpinski_instance, staircase, topology,
                            value_target, verify_evt_quantale, verify_max_theorem)
from kanopt.quantale import Bool2, DeltaDist, Lawvere, UnitInterval
from kanopt.topology import P, U, cocomplete_check, modularity_check
from kanopt.vrel import FiniteSet, VRel
from oracles import residual_oracle

seeds = st.integers(0, 10 ** 6)


def fset(name, n):
    return FiniteSet(name, [f"{name}{i}" for i in range(n)])


# --- built-in counterexamples ------------------------------------------------------

def test_counterexample_values_are_exact():
    rep = regression_counterexamples()
    assert rep.ok, {k: v for k, v in rep.checks.items() if not v}
    assert rep.values["l(*)"] == 1
    assert rep.values["gap"] == 1
    assert rep.values["displayed"] == 1


def test_sierpinski_skips_only_on_discreteness():
    rep = verify_evt_quantale(sierpinski_instance())
    assert rep.status == "skip"
    assert rep.skip_reason == "(a) J is discrete"
    others = {k: v for k, v in rep.hypotheses.items() if k != "(a) J is discrete"}
    assert all(others.values())


@pytest.mark.parametrize("i", [F(1, 10), F(1, 4), F(49, 100)])
def test_staircase_residual_matches_grid_oracle(i):
    q = DeltaDist("minimum")
    half, target = staircase(F(1, 2)), staircase(i)
    got = q.lhom(half, target)
    want = residual_oracle(half, target, "minimum")
    assert sf.sf_eval(got, INF) == sf.sf_eval(want, INF)
    assert sf.sf_eval(got, INF) <= i < 1


def test_staircase_shape():
    s = staircase(F(1, 2), n=4)
    assert s.jumps == ((F(1, 8), F(1, 8)), (F(1, 4), F(1, 4)), (F(3, 8), F(3, 8)),
                       (F(1, 2), F(1, 2)))
    # stays below t -> min(t, 1/2)
    assert all(sf.sf_eval(s, F(k, 16)) <= min(F(k, 16), F(1, 2)) for k in range(20))


def test_delta_probe_finite_families():
    for tn in ("product", "minimum", "lukasiewicz"):
        rep = delta_condition_d_probe([sf.BOTTOM, sf.pi(1, F(1, 2)), sf.UNIT], tn)
        assert rep.equals_unit and rep.ok
    with pytest.raises(ValueError):
        delta_condition_d_probe([sf.pi(1, F(1, 2)), sf.pi(0, F(1, 4))], "product")


def test_berge_needs_lower_hemicontinuity():
    # a1 is a limit of a0 and gains the better point b1 there
    A, B = fset("a", 2), fset("b", 2)
    SA = topology(A, [[True, True], [False, True]])
    SB = topology(B, [[True, False], [False, True]])
    J = VRel(Bool2(), A, B, [[True, False], [True, True]])
    assert upper_hemicontinuous(J, SA, SB)
    inst = TheoremInstance("berge", Bool2(), U, SA, SB, None, J, (F(0), F(1)), "hand")
    rep = berge_classical(inst)
    assert rep.skip_reason == "J is lower hemicontinuous"
    assert not open_closed_check(U, "open", StructuredRel(J, SA, SB))


def test_berge_constant_relation_passes():
    A, B = fset("a", 2), fset("b", 2)
    SA = topology(A, [[True, True], [False, True]])
    SB = topology(B, [[True, False], [False, True]])
    J = VRel(Bool2(), A, B, [[True, True], [True, True]])
    rep = berge_classical(TheoremInstance("berge", Bool2(), U, SA, SB, None, J, (F(0), F(1)), 0))
    assert rep.status == "pass" and rep.conclusion


# --- generators --------------------------------------------------------------------

@pytest.mark.parametrize("q", [Bool2(), Lawvere(), UnitInterval("lukasiewicz")], ids=str)
@settings(max_examples=20, deadline=None)
@given(seed=seeds, n=st.integers(1, 4), m=st.integers(1, 4))
def test_random_categories_and_profunctors_are_well_formed(q, seed, n, m):
    rng = random.Random(seed)
    pal = default_palette(q)
    A, B = rand_vcat(rng, q, fset("a", n), pal), rand_vcat(rng, q, fset("b", m), pal)
    assert check_vcat(A) and check_vcat(B)
    assert check_profunctor(rand_profunctor(rng, q, A, B, pal), A, B)


@pytest.mark.parametrize("q", [Bool2(), Lawvere(), UnitInterval("product")], ids=str)
@pytest.mark.parametrize("T", [P, U], ids=["P", "U"])
def test_cocomplete_value_targets(q, T):
    rng = random.Random(4)
    for size in range(1, 5):
        tgt = value_target(rng, T, q, default_palette(q), size, cocomplete=True)
        assert modularity_check(tgt.space)
        cc = cocomplete_check(tgt.space)
        assert cc and tuple(cc.generic) == tuple(tgt.generic.idx)


def test_instances_are_deterministic():
    cfg = GeneratorConfig(seed=3)
    for kind, suite in (("right", "right_bc"), ("left", "left_cocomplete")):
        a = verify_max_theorem(suite, gen_instance(cfg, kind, 17)).as_dict()
        b = verify_max_theorem(suite, gen_instance(cfg, kind, 17)).as_dict()
        assert a == b
    for s in SUITES:
        assert run_trial(cfg, s, 5).as_dict() == run_trial(cfg, s, 5).as_dict()


def test_variant_and_kind_must_match():
    inst = gen_instance(GeneratorConfig(), "right", 0)
    with pytest.raises(ValueError):
        verify_max_theorem("left_bc", inst)
    with pytest.raises(ValueError):
        verify_max_theorem("sideways", inst)
    with pytest.raises(ValueError):
        gen_instance(GeneratorConfig(), "nope")


def test_config_validation():
    with pytest.raises(ValueError):
        GeneratorConfig(max_size=0)
    with pytest.raises(ValueError):
        GeneratorConfig(trials=-1)
    cfg = GeneratorConfig(quantales=("lawvere",))
    assert cfg.quantales == (Lawvere(),)
    cfg = GeneratorConfig(palettes={"lawvere": [F(0), INF]})
    assert cfg.palette(Lawvere()) == [F(0), INF]


# --- reports and campaigns ---------------------------------------------------------

def test_report_status():
    r = VerificationReport("x", hypotheses={"h": True}, conclusion=True)
    assert r.status == "pass" and r.ok
    r = VerificationReport("x", hypotheses={"h": False}, skip_reason="h")
    assert r.status == "skip" and r.ok
    r = VerificationReport("x", conclusion=True, secondary={"s": False})
    assert r.status == "fail" and not r.ok
    r = VerificationReport("x", conclusion=True, secondary={"s": None})
    assert r.status == "pass"


def test_summary_merge_matches_single_run():
    cfg = GeneratorConfig(seed=2, trials=40)
    for s in ("right_cocomplete", "evt_closure", "berge"):
        whole = run_suite(cfg, s)
        a, b = run_suite(cfg, s, 0, 15), run_suite(cfg, s, 15, 40)
        a.merge(b)
        assert a.as_dict() == whole.as_dict()


def test_summary_merge_is_associative():
    cfg = GeneratorConfig(seed=5, trials=30)

    def part(k):
        return run_suite(cfg, "left_bc", k, k + 10)

    ab_c = part(0)
    ab_c.merge(part(10))
    ab_c.merge(part(20))
    bc = part(10)
    bc.merge(part(20))
    a_bc = part(0)
    a_bc.merge(bc)
    assert ab_c.as_dict() == a_bc.as_dict()


def test_small_campaign_has_no_failures():
    rep = fuzz_campaign(GeneratorConfig(seed=11, trials=60), "all")
    assert rep.ok
    assert set(rep.suites) == set(SUITES)
    assert all(s.total == 60 for s in rep.suites.values())
    text = json.dumps(rep.as_dict(), sort_keys=True)
    again = json.dumps(fuzz_campaign(GeneratorConfig(seed=11, trials=60), "all").as_dict(),
                       sort_keys=True)
    assert text == again


def test_campaign_suite_selection():
    rep = fuzz_campaign(GeneratorConfig(trials=3), "berge, evt_closure")
    assert list(rep.suites) == ["berge", "evt_closure"]
    with pytest.raises(ValueError):
        fuzz_campaign(GeneratorConfig(trials=1), "nonsense")


def test_every_max_variant_reaches_its_conclusion():
    cfg = GeneratorConfig(seed=1, trials=200)
    for v in MAX_VARIANTS:
        s = run_suite(cfg, v)
        assert s.failed == 0
        assert s.passed > 0
