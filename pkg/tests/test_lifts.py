from fractions import Fraction

import pytest

from simplelat.genus import parse_genus_symbol
from simplelat.lifts import (
    CASES,
    case_lift,
    coefficient_formula_check,
    constant_term,
    find_gamma,
    gamma1_lift,
    principal_part,
    verify_modularity,
)
from simplelat.qseries import EtaQuotientSpec
from simplelat.search import product_weight


@pytest.fixture(scope="module")
def level3():
    return case_lift("level3", 20)


@pytest.fixture(scope="module")
def level2():
    return case_lift("level2", 20)


def _neg_index(D, g):
    return int(D.index(D.neg(D.element(g)[None, :]))[0])


def test_level3_principal_part_and_constant(level3):
    F = level3
    D = F.D
    g = F.meta["gamma"]
    assert principal_part(F).terms == {(g, Fraction(-1, 3)): 1, (_neg_index(D, g), Fraction(-1, 3)): 1}
    assert D.q_value(D.element(g)) == Fraction(2, 3)
    assert constant_term(F) == 2
    assert F.is_integral() and F.support_ok()


def test_level2_principal_part_and_constant(level2):
    F = level2
    g = F.meta["gamma"]
    assert principal_part(F).terms == {(g, Fraction(-1, 2)): 1}
    assert F.D.q_value(F.D.element(g)) == Fraction(1, 2)
    assert constant_term(F) == 4
    assert F.is_integral() and F.support_ok()


@pytest.mark.parametrize("name", ["level3", "level2"])
def test_coefficient_formula(name, level3, level2):
    F = level3 if name == "level3" else level2
    res = coefficient_formula_check(F, name, order=10)
    assert res["passed"], res["mismatches"]
    assert res["checked"] > 1000


@pytest.mark.parametrize("name", ["level3", "level2"])
def test_components_symmetric_under_negation(name, level3, level2):
    # rho(-I) = e(-r/4) Z and the weight make c(-g, m) = c(g, m) in both cases
    F = level3 if name == "level3" else level2
    for g, s in F.components.items():
        assert s == F.components[_neg_index(F.D, g)]


def test_weight_cross_check(level3):
    # the weight of the product equals c(0, 0)/2
    pp = principal_part(level3).as_principal_part(level3.D)
    assert product_weight(parse_genus_symbol(CASES["level3"].genus), pp) == Fraction(constant_term(level3), 2)


def test_other_gamma_gives_an_isomorphic_form(level3):
    D = level3.D
    norms = D.norm_numerators(D.elements())
    others = [g for g in range(D.order) if norms[g] == 2 and g != level3.meta["gamma"]]
    F = case_lift("level3", 4, gamma=others[-1])
    assert len(principal_part(F)) == 2 and constant_term(F) == 2
    assert coefficient_formula_check(F, "level3", order=4)["passed"]


@pytest.mark.parametrize("name", ["level3", "level2"])
def test_modularity_passes(name, level3, level2):
    F = level3 if name == "level3" else level2
    res = verify_modularity(F)
    assert res["status"] == "pass", res["points"]
    assert len(res["points"]) == 5


def test_modularity_detects_a_corrupted_coefficient(level2):
    bad = level2.copy_with(level2.meta["gamma"], Fraction(1, 2), 1)
    assert verify_modularity(bad)["status"] == "fail"


def test_character_mismatch_rejected():
    D = parse_genus_symbol("II_(2,4)(3^+5)").form
    wrong = find_gamma(D, Fraction(1, 3))
    with pytest.raises(ValueError):
        gamma1_lift(CASES["level3"].spec, 3, wrong, D, -2, 3)


def test_unsupported_level_rejected():
    D = parse_genus_symbol("II_(2,6)(5^+1)").form
    with pytest.raises(ValueError):
        gamma1_lift(EtaQuotientSpec(5, {1: 1, 5: -1}), 5, 1, D, -4, 3)


def test_json_has_components(level2):
    out = level2.to_json()
    assert out["weight"] == -2
    key = ",".join(str(int(v)) for v in level2.D.element(level2.meta["gamma"]))
    assert out["components"][key].startswith("1*q^(-1/2) + 28*q^(1/2)")
