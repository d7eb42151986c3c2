from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from simplelat.classify import EXPECTED_SIMPLE
from simplelat.cyclotomic import Cyc
from simplelat.genus import (
    GenusSymbol,
    JordanComponent,
    LatticeDiscriminant,
    exists_even_lattice,
    format_genus_symbol,
    parse_genus_symbol,
    realize,
    satisfies_milgram,
)

SMALL_PRIMES = [2, 3, 5, 7, 11, 13]


@st.composite
def components(draw, max_order=1000):
    primes = sorted(draw(st.sets(st.sampled_from(SMALL_PRIMES), max_size=3)))
    out = []
    order = 1
    for p in primes:
        rank = draw(st.integers(1, 4))
        if p == 2:
            rank = 2 * ((rank + 1) // 2)
        if order * p**rank > max_order:
            continue
        order *= p**rank
        out.append(JordanComponent(p, rank, draw(st.sampled_from([1, -1]))))
    return tuple(out)


@pytest.mark.parametrize("text", EXPECTED_SIMPLE)
def test_parse_format_round_trip(text):
    assert format_genus_symbol(parse_genus_symbol(text)) == text


@pytest.mark.parametrize(
    "text",
    [
        "II_(2,4)(3^+5",  # unbalanced
        "II_(2,5)(3^+1)",  # odd signature difference
        "II_(2,4)(2^+2)",  # odd 2-adic type
        "II_(2,4)(4^+1)",  # not prime
        "II_(2,4)(3^+1 3^+1)",  # repeated prime
        "II_(2,4)(5^+1 3^+1)",  # order
        "II_(2,4)(2_II^+3)",  # odd rank at 2
        "II_(2,4)(3^*1)",
    ],
)
def test_parse_rejects(text):
    with pytest.raises(ValueError):
        parse_genus_symbol(text)


def test_unicode_minus_accepted():
    assert parse_genus_symbol("II_(2,6)(2_II^−6)") == parse_genus_symbol("II_(2,6)(2_II^-6)")


@given(components())
def test_realized_form_reproduces_symbol_and_milgram(comps):
    D = realize(comps)
    assert tuple(sorted(D.components)) == tuple(sorted(comps))
    # Milgram pin: G(1) = sqrt|D| e(sig/8), sig from the symbol
    assert D.gauss_sum(1) == Cyc.sqrt(D.order) * Cyc.root(Fraction(D.signature_mod8(), 8))


@given(components(max_order=400), st.integers(-6, 6))
def test_gauss_sum_matches_bruteforce(comps, n):
    D = realize(comps)
    assert D.gauss_sum(n) == D.gauss_sum_bruteforce(n)
    assert np.array_equal(D.norm_counts(), D.norm_counts_bruteforce())


@given(components(max_order=400), st.integers(-6, 6))
def test_gauss_unit_closed_form(comps, n):
    D = realize(comps)
    order_n = int(np.prod([c.order for c in comps if n % c.p == 0])) if comps else 1
    u = sum(c.gauss_unit(n) for c in comps) % 8
    assert D.gauss_sum(n) == Cyc.sqrt(D.order * order_n) * Cyc.root(Fraction(u, 8))


@pytest.mark.parametrize("text", EXPECTED_SIMPLE)
def test_table_symbols_satisfy_milgram_and_exist(text):
    sym = parse_genus_symbol(text)
    assert satisfies_milgram(sym)
    assert exists_even_lattice(sym)


def test_existence_conditions():
    assert not exists_even_lattice(GenusSymbol((2, 4), (JordanComponent(3, 7, 1),)))  # rank too large
    assert not satisfies_milgram(parse_genus_symbol("II_(2,4)(3^-5)"))
    # full p-rank requires the rescaled lattice to exist: 3^+6 in (2,4) rescales to II_(2,4)
    assert exists_even_lattice(parse_genus_symbol("II_(2,4)(3^-6)")) == exists_even_lattice(GenusSymbol((2, 4), ()))


def test_bilinear_form_nondegenerate_and_symmetric():
    D = parse_genus_symbol("II_(2,4)(2_II^+4 3^+1)").form
    X = D.elements()
    E = D.bilinear_numerators(X, X)
    assert np.array_equal(E, E.T)
    # radical is trivial
    assert sum(1 for i in range(D.order) if not np.any(E[i] % D.level)) == 1


def test_lattice_discriminant_of_a2():
    L = LatticeDiscriminant([[2, -1], [-1, 2]])
    assert [str(c) for c in L.form.components] == ["3^-1"]
    assert L.index_of_dual([1, 0]) != L.index_of_dual([0, 0])
    assert L.index_of_dual([2, -1]) == L.index_of_dual([0, 0])  # a lattice vector


def test_torsion_subgroups():
    D = parse_genus_symbol("II_(2,4)(2_II^+4 3^+1)").form
    assert D.torsion_subgroup(2).order == 16
    assert D.torsion_subgroup(3).order == 3
    assert int(D.two_torsion_mask().sum()) == 16
