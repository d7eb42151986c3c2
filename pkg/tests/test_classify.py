import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from simplelat.classify import (
    EXPECTED_SIMPLE,
    SearchFrontier,
    classify_simple,
    enumerate_candidates,
    tail_weight,
)
from simplelat.dimensions import dim_report
from simplelat.genus import GenusSymbol, exists_even_lattice, format_genus_symbol, parse_genus_symbol, symbol_signature_mod8

from .test_genus import components

FRONTIER = SearchFrontier()


def _expected(levels):
    return sorted(s for s in EXPECTED_SIMPLE if parse_genus_symbol(s).level in levels)


def test_small_levels():
    res = classify_simple(levels=[1, 2, 3])
    assert sorted(res.symbols()) == _expected({1, 2, 3})
    assert all(dim == 0 for *_, dim in res.simple)


def test_threads_do_not_change_output():
    a = classify_simple(levels=[5, 7])
    b = classify_simple(levels=[5, 7], threads=2)
    assert a.simple == b.simple == sorted(a.simple, key=lambda h: (h[0], h[2], h[1]))
    assert sorted(a.symbols()) == _expected({5, 7})


def test_candidates_are_valid_and_inside_frontier():
    for n in (4, 6, 8, 12):
        level_bound, order_bound = FRONTIER.bounds(n)
        seen = set()
        for sym in enumerate_candidates(FRONTIER, n):
            assert sym.signature == (2, n)
            assert exists_even_lattice(sym)
            assert sym.order < order_bound or (level_bound is not None and sym.level < level_bound)
            s = format_genus_symbol(sym)
            assert s not in seen
            seen.add(s)


def _outside(sym: GenusSymbol) -> bool:
    level_bound, order_bound = FRONTIER.bounds(sym.signature[1])
    if level_bound is None:
        return sym.order >= order_bound
    return sym.order >= order_bound and sym.level >= level_bound


@given(components(max_order=10**5), st.integers(0, 3))
def test_outside_the_frontier_nothing_is_simple(comps, shift):
    n = (2 - symbol_signature_mod8(comps)) % 8 + 8 * shift
    assume(n >= 4)
    sym = GenusSymbol((2, n), comps)
    assume(exists_even_lattice(sym) and _outside(sym))
    assert dim_report(sym, 1 + n // 2).dim_S > 0


@pytest.mark.parametrize(
    "text",
    [
        "II_(2,4)(2_II^+2 3^+1 5^+1 7^+1 11^-1)",
        "II_(2,4)(3^+1 1109^-1)",
        "II_(2,6)(2_II^+2 37^+1)",
        "II_(2,6)(3^+2 41^+1)",
        "II_(2,8)(47^+1)",
        "II_(2,10)(7^-2)",
        "II_(2,10)(2_II^+6)",
        "II_(2,18)(5^-3)",
    ],
)
def test_outside_the_frontier_spot_checks(text):
    sym = parse_genus_symbol(text)
    assert exists_even_lattice(sym) and _outside(sym)
    assert dim_report(sym, 1 + sym.signature[1] // 2).dim_S > 0


def test_tail_weight_certificate():
    res = classify_simple(SearchFrontier(n_max=34), levels=[1, 2, 3])
    assert res.certificate and all(c["tail_certified"] for c in res.certificate)
    assert not res.notes
    # the bound is a genuine threshold: beyond it S_k is non-zero
    for entry in res.certificate[:6]:
        comps = () if entry["discriminant"] == "trivial" else parse_genus_symbol(f"II_(2,2)({entry['discriminant']})").components
        K = tail_weight(comps)
        for n in range(4, 80, 2):
            k = 1 + n // 2
            sym = GenusSymbol((2, n), comps)
            if k > K and exists_even_lattice(sym):
                assert dim_report(sym, k).dim_S > 0


def test_manifest_shape():
    m = classify_simple(levels=[5]).manifest()
    assert m["simple_count"] == 1
    assert set(m) >= {"frontier", "examined", "certificate", "seconds"}
