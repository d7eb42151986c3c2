import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st
from sympy import divisors

from simplelat.eisenstein import (
    ProviderUnavailable,
    divisor_sum_bounds,
    level3_table,
    provider_for,
    q_level1,
    q_level3_2_4,
    q_level3_nonzero,
    q_level3_zero,
    q_level6_zero,
    zeta_bracket,
)
from simplelat.genus import kronecker, parse_genus_symbol


def psi(d):
    return kronecker(d, 3)


def test_level3_table():
    t = level3_table(12)
    assert t["q_gamma"] == [-2, -6, -18, -26, -48, -54, -100, -102, -162, -144, -240, -234]
    assert t["q_zero"] == [-36, 0, -180, -468]


def test_level1_matches_classical_eisenstein_series():
    # 2 E_k with E_6 = 1 - 504 sum sigma_5, E_10 = 1 - 264 sum sigma_9, E_14 = 1 - 24 sum sigma_13
    for k, c in ((6, -1008), (10, -528), (14, -48)):
        for m in (1, 2, 6, 12):
            assert q_level1(k, m) == c * sum(d ** (k - 1) for d in divisors(m))


def test_level6_odd_branch_independent_form():
    # for odd m the four-term sum collapses to -54 sum psi(m/d) d^2 - 6 sum psi(d) d^2
    for m in range(1, 120, 2):
        want = -sum(54 * psi(m // d) * d * d + 6 * psi(d) * d * d for d in divisors(m))
        assert q_level6_zero(m) == want
    assert q_level6_zero(1) == -60


def test_level6_values_and_bound():
    assert [q_level6_zero(m) for m in range(1, 7)] == [-60, -48, -492, -420, -1152, -480]
    for m in range(1, 200):
        assert q_level6_zero(m) < -9


def test_level3_properties_up_to_50():
    for t in range(2, 151):
        assert q_level3_nonzero(Fraction(t, 3)) < -2
    for m in range(1, 51):
        v = q_level3_zero(m)
        if m % 3 == 2:
            assert v == 0
        else:
            assert v < -4


def test_level3_congruence_enforced():
    with pytest.raises(ValueError):
        q_level3_2_4(Fraction(2, 3), False, Fraction(2, 3))
    assert q_level3_2_4(Fraction(2, 3), False, Fraction(1, 3)) == -2
    with pytest.raises(ValueError):
        q_level3_zero(Fraction(1, 3))


@pytest.mark.parametrize("k", [2, 3, 4, 5, 8])
def test_zeta_bracket_is_certified(k):
    import mpmath

    mpmath.mp.dps = 40
    lo, hi = zeta_bracket(k)
    z = mpmath.zeta(k)
    assert mpmath.mpf(lo.numerator) / lo.denominator <= z <= mpmath.mpf(hi.numerator) / hi.denominator
    assert lo > 1


def test_divisor_sum_bracket_random_instances():
    rng = random.Random(12345)
    for _ in range(1000):
        k = rng.choice([2, 3, 4])
        m = rng.randint(1, 2000)
        total = 0
        for d in divisors(m):
            a = 1 if d == m else rng.choice([-1, 0, 1])
            total += a * d**k
        lo, hi = divisor_sum_bounds(k, m)
        assert lo <= total <= hi


def test_divisor_sum_needs_k_at_least_2():
    with pytest.raises(ValueError):
        divisor_sum_bounds(1, 5)


@given(st.integers(1, 60))
def test_magnitude_floor_is_a_lower_bound(m):
    P = provider_for(parse_genus_symbol("II_(2,4)(3^+5)"))
    for cls in P.classes():
        for e in P.exponents(cls, Fraction(-m)):
            q = P.q(cls, -e)
            if q:
                assert abs(q) >= P.magnitude_floor(cls, -e)


def test_unavailable_provider():
    with pytest.raises(ProviderUnavailable):
        provider_for(parse_genus_symbol("II_(2,8)(7^+1)"))
    P = provider_for(parse_genus_symbol("II_(2,4)(2_II^+4 3^+1)"))
    assert P.partial
