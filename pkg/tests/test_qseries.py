from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from simplelat.qseries import (
    EtaQuotientSpec,
    QSeries,
    eta_quotient,
    eta_quotient_at_zero,
    euler_power,
    format_qseries,
    parse_qseries,
)


def _partitions(n):
    p = [1] + [0] * n
    for k in range(1, n + 1):
        for m in range(k, n + 1):
            p[m] += p[m - k]
    return p


def test_euler_inverse_counts_partitions():
    assert euler_power(-1, 30) == _partitions(29)


def test_euler_power_pentagonal_and_jacobi():
    # prod (1 - q^n) = sum (-1)^k q^(k(3k-1)/2);  prod (1 - q^n)^3 = sum (-1)^k (2k+1) q^(k(k+1)/2)
    e1 = euler_power(1, 40)
    want = [0] * 40
    for k in range(-6, 7):
        g = k * (3 * k - 1) // 2
        if g < 40:
            want[g] += (-1) ** (k % 2)
    assert e1 == want
    e3 = euler_power(3, 40)
    want = [0] * 40
    for k in range(10):
        t = k * (k + 1) // 2
        if t < 40:
            want[t] += (-1) ** k * (2 * k + 1)
    assert e3 == want


@given(st.integers(-6, 6), st.integers(-6, 6))
def test_euler_power_is_a_homomorphism(a, b):
    n = 25
    A = QSeries.from_list(euler_power(a, n), order=n)
    B = QSeries.from_list(euler_power(b, n), order=n)
    assert A * B == QSeries.from_list(euler_power(a + b, n), order=n)


def test_cache_dir_round_trip(tmp_path, monkeypatch):
    monkeypatch.setenv("SIMPLELAT_CACHE_DIR", str(tmp_path))
    first = euler_power(5, 50)
    assert any(tmp_path.iterdir())
    assert euler_power(5, 50) == first


def test_eta_quotients_on_the_rays():
    # eta^3/eta(3 tau) and eta^8/eta(2 tau)^4, exact leading coefficients
    s = eta_quotient(EtaQuotientSpec(9, {1: 3, 3: -1}), 6)
    assert [s.coefficient(m) for m in range(6)] == [1, -3, 0, 6, -3, 0]
    s = eta_quotient(EtaQuotientSpec(4, {1: 8, 2: -4}), 5)
    assert [s.coefficient(m) for m in range(5)] == [1, -8, 24, -32, 24]


def test_eta_quotient_leading_exponent_and_weight():
    spec = EtaQuotientSpec(3, {1: 1, 3: -3})
    assert spec.weight == -1
    s = eta_quotient(spec, 3)
    assert s.valuation() == spec.leading_exponent == Fraction(-1, 3)
    assert s.coefficient(Fraction(-1, 3)) == 1


def test_integrality_hypotheses_enforced():
    with pytest.raises(ValueError):
        EtaQuotientSpec(3, {1: 1})
    with pytest.raises(ValueError):
        EtaQuotientSpec(3, {2: 24})


def test_at_zero_prefactor():
    # eta(tau)/eta(3 tau)^3 at the cusp 0: (-i)^(-1) 3^(3/2) = 3 sqrt(3) i
    c, g = eta_quotient_at_zero(EtaQuotientSpec(3, {1: 1, 3: -3}), 2)
    assert abs(c.to_complex() - 3j * 3**0.5) < 1e-12
    assert g.valuation() == 0


@given(st.lists(st.integers(-9, 9), min_size=1, max_size=12), st.integers(0, 3))
def test_format_parse_round_trip(values, start):
    s = QSeries.from_list(values, Fraction(start, 3), Fraction(1, 3))
    assert parse_qseries(format_qseries(s)) == s


@given(st.lists(st.integers(-5, 5), min_size=1, max_size=10))
def test_inverse(values):
    values = [1] + values
    s = QSeries.from_list(values)
    assert (s * s.inverse()).same_terms(QSeries.one(s.truncation))


def test_twist_multiplies_by_roots_of_unity():
    s = QSeries.from_list([1, 1, 1], 0, Fraction(1, 3))
    t = s.twist(1)
    assert abs(complex(t.coefficient(Fraction(1, 3)).to_complex()) - complex(-0.5, 3**0.5 / 2)) < 1e-12
