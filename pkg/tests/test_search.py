from fractions import Fraction

import numpy as np
import pytest

from simplelat.eisenstein import ProviderUnavailable
from simplelat.genus import parse_genus_symbol
from simplelat.search import PrincipalPart, obstruction_check, product_weight, search_singular

L3 = parse_genus_symbol("II_(2,4)(3^+5)")


def test_level3_unique_candidate():
    rep = search_singular(L3)
    assert rep.complete
    assert len(rep.candidates) == 1
    cand = rep.candidates[0]
    assert cand.weight == 1
    pp = cand.representative
    D = pp.D
    # e(-tau/3) e_gamma + e(-tau/3) e_-gamma with Q(gamma) = 2/3
    assert len(pp) == 2
    (g1, m1), (g2, m2) = pp.terms
    assert m1 == m2 == Fraction(-1, 3)
    assert D.q_value(D.element(g1)) == Fraction(2, 3)
    assert np.array_equal(D.neg(D.element(g1)) % D.moduli, D.element(g2))
    assert product_weight(L3, pp) == 1
    assert ("0", Fraction(-2)) in rep.neutral_terms


def test_level1_26():
    rep = search_singular(parse_genus_symbol("II_(2,26)()"))
    assert len(rep.candidates) == 1
    assert rep.candidates[0].weight == 12
    assert rep.candidates[0].representative.terms == {(0, Fraction(-1)): 1}


@pytest.mark.parametrize("text", ["II_(2,10)()", "II_(2,18)()"])
def test_level1_without_singular_products(text):
    rep = search_singular(parse_genus_symbol(text))
    assert rep.candidates == [] and rep.complete


def test_level6_is_partial():
    rep = search_singular(parse_genus_symbol("II_(2,4)(2_II^+4 3^+1)"))
    assert not rep.complete
    assert rep.candidates == []  # every q(0, m) < -9 makes gamma = 0 terms too heavy


def test_unavailable_provider():
    with pytest.raises(ProviderUnavailable):
        search_singular(parse_genus_symbol("II_(2,8)(7^+1)"))


def test_weight_is_additive():
    D = L3.form
    rep = search_singular(L3)
    pp = rep.candidates[0].representative
    doubled = PrincipalPart(D, {k: 2 * c for k, c in pp.terms.items()})
    assert product_weight(L3, doubled) == 2 * product_weight(L3, pp)


def test_principal_part_validation():
    D = L3.form
    g = next(i for i in range(D.order) if D.q_value(D.element(i)) == Fraction(2, 3))
    ng = int(D.index(D.neg(D.element(g))))
    with pytest.raises(ValueError):
        PrincipalPart(D, {(g, Fraction(-1, 3)): 1})  # not symmetric
    with pytest.raises(ValueError):
        PrincipalPart(D, {(g, Fraction(-2, 3)): 1, (ng, Fraction(-2, 3)): 1})  # wrong class mod 1
    with pytest.raises(ValueError):
        PrincipalPart(D, {(0, Fraction(0)): 1})
    with pytest.raises(ValueError):
        PrincipalPart(D, {(0, Fraction(-1)): -1})


def test_obstruction_vacuous_on_simple_lattices():
    assert obstruction_check(L3)["status"] == "ok"
    assert obstruction_check(parse_genus_symbol("II_(2,8)(47^+1)"))["status"] == "unavailable"


def test_m_floor_must_be_negative():
    with pytest.raises(ValueError):
        search_singular(L3, 0)
