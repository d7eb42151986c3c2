import math
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from simplelat.classify import EXPECTED_SIMPLE
from simplelat.dimensions import dim_oracle, dim_report, invariants, is_simple
from simplelat.genus import GenusSymbol, parse_genus_symbol, realize

from .test_genus import components


def _symbol_with_signature(comps):
    """Signature (2, n) with n >= 4 and 2 - n = sig mod 8."""
    sig = realize(comps).signature_mod8()
    n = (2 - sig) % 8
    n += 8 if n < 4 else 0
    return GenusSymbol((2, n), comps)


@pytest.mark.parametrize("text", EXPECTED_SIMPLE)
def test_closed_form_equals_oracle_on_table(text):
    sym = parse_genus_symbol(text)
    n = sym.signature[1]
    for k in (1 + n // 2, n // 2 - 1):
        closed = invariants(sym, k)
        oracle = dim_oracle(sym.form, sym.signature, k)
        assert closed.invariants() == oracle.invariants()
        if k >= 2:
            assert (closed.dim_M, closed.dim_S) == (oracle.dim_M, oracle.dim_S)


@settings(max_examples=50)
@given(components(max_order=1000), st.integers(2, 12))
def test_closed_form_equals_oracle_on_random_forms(comps, k):
    sym = _symbol_with_signature(comps)
    closed = invariants(sym, k)
    oracle = dim_oracle(sym.form, sym.signature, k)
    assert closed.invariants() == oracle.invariants()
    assert (closed.dim_M, closed.dim_S) == (oracle.dim_M, oracle.dim_S)


@given(components(max_order=1000), st.integers(-4, 20))
def test_alpha3_alpha4_depend_only_on_parity(comps, k):
    sym = _symbol_with_signature(comps)
    a, b = invariants(sym, k), invariants(sym, k + 2)
    assert (a.alpha3, a.alpha4, a.d) == (b.alpha3, b.alpha4, b.d)


@given(components(max_order=1000), st.integers(2, 20))
def test_alpha_bounds(comps, k):
    sym = _symbol_with_signature(comps)
    rep = invariants(sym, k)
    o2 = math.prod(c.order for c in comps if c.p == 2)
    o3 = math.prod(c.order for c in comps if c.p == 3)
    assert abs(rep.alpha1 - rep.d / 4) <= math.sqrt(o2) / 4 + 1e-12
    assert abs(rep.alpha2 - rep.d / 3) <= (1 + math.sqrt(o3)) / (3 * math.sqrt(3)) + 1e-12


def test_trivial_form_matches_classical_dimensions():
    # M_k(SL2(Z)) for the dual Weil representation of a unimodular lattice of r = -8
    def classical(k):
        if k % 2 or k < 4:
            return None
        return k // 12 + (0 if k % 12 == 2 else 1)

    sym = parse_genus_symbol("II_(2,10)()")
    for k in (4, 6, 8, 10, 12, 14, 24, 26):
        rep = dim_report(sym, k)
        assert rep.dim_M == classical(k)
        assert rep.dim_S == classical(k) - 1
    assert invariants(sym, 6).d == 1


def test_simplicity_examples():
    assert is_simple(parse_genus_symbol("II_(2,10)(2_II^+2)"))
    assert is_simple(parse_genus_symbol("II_(2,8)(7^+1)"))
    assert not is_simple(GenusSymbol((2, 34), ()))


def test_weight_two_and_below():
    sym = parse_genus_symbol("II_(2,6)(2_II^-2)")
    rep = dim_report(sym, 2)
    assert rep.dim_M is not None and rep.dim_S is None
    with pytest.raises(ValueError):
        dim_report(sym, 1)
    low = invariants(sym, 1)
    assert low.dim_M is None and low.alpha1 == dim_oracle(sym.form, sym.signature, 1).alpha1


def test_oracle_scale_guard():
    with pytest.raises(ValueError):
        dim_oracle(parse_genus_symbol("II_(2,4)(3^+7)").form, (2, 4), 3)


def test_milgram_violation_rejected():
    with pytest.raises(ValueError):
        invariants(parse_genus_symbol("II_(2,4)(2_II^+4 3^+1 5^+2 7^+1)"), 3)


def test_closed_form_beyond_oracle_scale_is_integral():
    # |D| = 16 * 3 * 25 * 7 = 8400
    rep = dim_report(parse_genus_symbol("II_(2,10)(2_II^+4 3^+1 5^+2 7^+1)"), 6)
    assert isinstance(rep.dim_S, int) and rep.dim_S >= 0
