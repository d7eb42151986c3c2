from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from simplelat.cyclotomic import Cyc, CycMatrix
from simplelat.genus import parse_genus_symbol, realize
from simplelat.weilrep import WeilRep, alpha_from_traces, alpha_invariant, parse_word, sl2_word, word_matrix

from .test_genus import components

sl2 = st.lists(st.tuples(st.sampled_from("ST"), st.integers(-4, 4)), max_size=8).map(
    lambda w: word_matrix(1, [(g, 1 if g == "S" else n) for g, n in w])
)


@given(sl2)
def test_sl2_word_round_trip(M):
    sign, word = sl2_word(M)
    assert np.array_equal(word_matrix(sign, word), M)


def test_sl2_word_rejects_non_unimodular():
    with pytest.raises(ValueError):
        sl2_word([[2, 0], [0, 1]])


def test_parse_word():
    assert parse_word("S T^-1 S^-1") == [("S", 1), ("T", -1), ("S", 1), ("S", 1), ("S", 1)]
    with pytest.raises(ValueError):
        parse_word("SX")


@given(components(max_order=60), st.booleans())
def test_weil_relations(comps, dual):
    D = realize(comps)
    # r is pinned by Milgram for a genuine representation
    rho = WeilRep(D, D.signature_mod8(), dual=dual)
    S, T = rho.rho_S(), rho.rho_T()
    I = CycMatrix.identity(rho.size)
    S2 = S @ S
    assert S2 @ S2 == I
    ST = S @ T
    assert ST @ ST @ ST == S2
    assert S2 == rho.rho_minus_identity()
    # unitarity
    assert S @ S.conj_transpose() == I


@given(components(max_order=40), sl2, sl2)
def test_homomorphism(comps, A, B):
    D = realize(comps)
    rho = WeilRep(D, D.signature_mod8())
    assert rho.rho_matrix(A) @ rho.rho_matrix(B) == rho.rho_matrix(A @ B)


def test_dual_is_conjugate():
    D = parse_genus_symbol("II_(2,4)(3^+1)").form
    rho, dual = WeilRep(D, 2), WeilRep(D, 2, dual=True)
    assert np.allclose(dual.rho_S().to_complex(), rho.rho_S().to_complex().conj())


def test_gamma1_diagonal_action():
    D = parse_genus_symbol("II_(2,4)(3^+5)").form
    rho = WeilRep(D, -2, dual=True)
    with pytest.raises(ValueError):
        rho.rho_gamma1([[2, 1], [3, 2]])  # a = 2 is not 1 mod 3
    M = [[-2, 1], [-9, 4]]
    exps = rho.rho_gamma1(M)
    full = rho.rho_matrix(M).to_complex()
    assert np.allclose(full, np.diag(np.exp(2j * np.pi * exps / D.level)))


def test_alpha_from_traces_of_a_diagonal_matrix():
    # eigenvalues e(0), e(1/4), e(1/4), e(3/4)
    X = CycMatrix.from_entries([[Cyc.root(Fraction(b)) if i == j else Cyc.zero() for j in range(4)] for i, b in enumerate([0, Fraction(1, 4), Fraction(1, 4), Fraction(3, 4)])])
    assert alpha_invariant(X) == Fraction(5, 4)
    traces = [Cyc.rational(4)]
    Y = X
    for _ in range(3):
        traces.append(Y.trace())
        Y = Y @ X
    assert alpha_from_traces(traces, 4) == (Fraction(5, 4), [1, 2, 0, 1])
