"""Coefficients q(gamma, m) of vector-valued Eisenstein series (constant term 2 at e_0).

Only closed forms for specific lattices are provided: level 1, the level-3
lattice with discriminant form 3^+5, and the gamma = 0 branch of the level-6
lattice 2_II^+4 3^+1.  Other lattices raise ``ProviderUnavailable``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from sympy import bernoulli, divisors

from .genus import GenusSymbol, format_genus_symbol, kronecker, parse_genus_symbol


class ProviderUnavailable(LookupError):
    pass


def _chi3(d: int) -> int:
    return kronecker(d, 3)


def _kron2_sq(d: int) -> int:
    """(d/2)^2: 1 for odd d, 0 for even d."""
    return d % 2


def _divisor_sum(m: int, term: Callable[[int], int]) -> int:
    return sum(term(d) for d in divisors(m))


def q_level1(k: int, m: int) -> Fraction:
    """-(4k/B_k) sigma_{k-1}(m): the level-1 Eisenstein series scaled to constant term 2."""
    if k < 4 or k % 2:
        raise ValueError("level-1 Eisenstein series need even k >= 4")
    if m < 1 or int(m) != m:
        raise ValueError("m must be a positive integer")
    B = Fraction(str(bernoulli(k)))
    return -Fraction(4 * k) / B * _divisor_sum(int(m), lambda d: d ** (k - 1))


def _as_fraction(m) -> Fraction:
    return m if isinstance(m, Fraction) else Fraction(m)


def q_level3_nonzero(m) -> int:
    """-2 sum_{d | 3m} chi(3m/d) d^2 for gamma != 0 (3m a positive integer)."""
    m = _as_fraction(m)
    t = 3 * m
    if t <= 0 or t.denominator != 1:
        raise ValueError("3m must be a positive integer")
    t = int(t)
    return -2 * _divisor_sum(t, lambda d: _chi3(t // d) * d * d)


def q_level3_zero(m) -> int:
    """-18 sum_{d|m} chi(m/d) d^2 - 18 sum_{d|m} chi(d) d^2 for gamma = 0."""
    m = _as_fraction(m)
    if m <= 0 or m.denominator != 1:
        raise ValueError("for gamma = 0, m must be a positive integer")
    m = int(m)
    return -18 * _divisor_sum(m, lambda d: _chi3(m // d) * d * d) - 18 * _divisor_sum(m, lambda d: _chi3(d) * d * d)


def q_level3_2_4(q_gamma: Fraction, is_zero: bool, m) -> int:
    """q(gamma, m) on the lattice II_(2,4)(3^+5); requires m = -Q(gamma) mod 1."""
    m = _as_fraction(m)
    if (m + Fraction(q_gamma)).denominator != 1:
        raise ValueError(f"m = {m} violates m = -Q(gamma) mod 1 for Q(gamma) = {q_gamma}")
    return q_level3_zero(m) if is_zero else q_level3_nonzero(m)


def q_level6_zero(m: int) -> int:
    """q(0, m) on II_(2,4)(2_II^+4 3^+1), the four-term divisor sum."""
    if m < 1 or int(m) != m:
        raise ValueError("m must be a positive integer")
    m = int(m)

    def term(d: int) -> int:
        e = m // d
        sgn = -1 if d % 2 else 1
        chi12 = _kron2_sq(e) * _chi3(e)
        return (36 * chi12 - 18 * _chi3(e) * sgn + 4 * _kron2_sq(e) * _chi3(d) - 2 * _chi3(d) * sgn) * d * d

    return -_divisor_sum(m, term)


# ---------------------------------------------------------------------------
# divisor-sum estimate
# ---------------------------------------------------------------------------

# rational brackets lo < zeta(k) < hi
_ZETA_BRACKETS = {
    2: (Fraction(16449340668, 10**10), Fraction(16449340669, 10**10)),
    3: (Fraction(12020569031, 10**10), Fraction(12020569032, 10**10)),
    4: (Fraction(10823232337, 10**10), Fraction(10823232338, 10**10)),
}


def zeta_bracket(k: int) -> tuple[Fraction, Fraction]:
    """Certified rational lo <= zeta(k) <= hi for integer k >= 2."""
    if k < 2:
        raise ValueError("zeta(k) diverges for k < 2")
    if k in _ZETA_BRACKETS:
        return _ZETA_BRACKETS[k]
    # 1 + 2^-k < zeta(k) < 1 + 2^-k + int_2^oo x^-k dx
    lo = 1 + Fraction(1, 2**k)
    return lo, lo + Fraction(2, 2**k * (k - 1))


def divisor_sum_bounds(k: int, m: int) -> tuple[Fraction, Fraction]:
    """Rational (lower, upper) with lower <= sum_{d|m} a_d d^k <= upper whenever
    a_d in {-1, 0, 1} and a_m = 1."""
    if k < 2:
        raise ValueError("the estimate needs k >= 2")
    lo, hi = zeta_bracket(k)
    return Fraction(m) ** k * (2 - hi), Fraction(m) ** k * hi


# ---------------------------------------------------------------------------
# providers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ElementClass:
    """Elements of D that look alike to the Eisenstein series and to O(D).

    ``orbits`` is the number of {g, -g} pairs (or fixed points) in the class,
    ``orbit_size`` is 1 when g = -g and 2 otherwise.
    """

    key: str
    norm: Fraction
    is_zero: bool
    orbits: int
    orbit_size: int


class EisensteinProvider:
    symbol: GenusSymbol
    weight: int
    level: int
    searchable_classes: tuple[str, ...]
    partial: bool = False

    def classes(self) -> Sequence[ElementClass]:
        raise NotImplementedError

    def q(self, cls: ElementClass, m: Fraction) -> Fraction:
        raise NotImplementedError

    def magnitude_floor(self, cls: ElementClass, m: Fraction) -> Fraction:
        """Certified lower bound on |q(cls, m')| for every non-neutral m' >= m."""
        raise NotImplementedError

    @staticmethod
    def first_exponent(cls: ElementClass) -> Fraction:
        """The largest m < 0 with m = Q(gamma) mod 1."""
        return -((1 - cls.norm) % 1) if cls.norm % 1 else Fraction(-1)

    def exponents(self, cls: ElementClass, m_floor: Fraction) -> list[Fraction]:
        """Exponents m < 0 with m = Q(gamma) mod 1 and m >= m_floor."""
        out = []
        m = self.first_exponent(cls)
        while m >= m_floor:
            out.append(m)
            m -= 1
        return out


def _class_counts(sym: GenusSymbol) -> list[ElementClass]:
    """Classes of odd-order D by norm (nonzero elements), plus {0}."""
    D = sym.form
    counts = D.norm_counts()
    N = D.level
    out = [ElementClass("0", Fraction(0), True, 1, 1)]
    for j in range(N):
        c = int(counts[j]) - (1 if j == 0 else 0)
        if c:
            if c % 2:
                raise AssertionError("odd-order forms pair g with -g")
            out.append(ElementClass(f"Q={Fraction(j, N)}", Fraction(j, N), False, c // 2, 2))
    return out


class Level1Provider(EisensteinProvider):
    def __init__(self, n: int):
        self.symbol = GenusSymbol((2, n), ())
        self.weight = 1 + n // 2
        self.level = 1
        self.searchable_classes = ("0",)

    def classes(self):
        return [ElementClass("0", Fraction(0), True, 1, 1)]

    def q(self, cls, m):
        return q_level1(self.weight, int(m))

    def magnitude_floor(self, cls, m):
        # |q| = (4k/|B_k|) sigma_{k-1}(m') >= (4k/|B_k|) m'^{k-1}
        m = max(int(-(-Fraction(m) // 1)), 1)
        return abs(q_level1(self.weight, 1)) * Fraction(m) ** (self.weight - 1)


class Level3Provider(EisensteinProvider):
    """II_(2,4)(3^+5)."""

    def __init__(self):
        self.symbol = parse_genus_symbol("II_(2,4)(3^+5)")
        self.weight = 3
        self.level = 3
        self._classes = _class_counts(self.symbol)
        self.searchable_classes = tuple(c.key for c in self._classes)

    def classes(self):
        return self._classes

    def q(self, cls, m):
        return Fraction(q_level3_2_4(cls.norm, cls.is_zero, m))

    def magnitude_floor(self, cls, m):
        m = Fraction(m)
        lo = 2 - zeta_bracket(2)[1]
        if cls.is_zero:
            # m' = 0 mod 3: 18 m'^2 (2 - zeta(2));  m' = 1 mod 3: 36 m'^2 (2 - zeta(2))
            return 18 * m * m * lo
        return 2 * (3 * m) ** 2 * lo


class Level6ZeroProvider(EisensteinProvider):
    """gamma = 0 branch of II_(2,4)(2_II^+4 3^+1); other classes are not provided."""

    def __init__(self):
        self.symbol = parse_genus_symbol("II_(2,4)(2_II^+4 3^+1)")
        self.weight = 3
        self.level = 6
        self.searchable_classes = ("0",)
        self.partial = True

    def classes(self):
        return [ElementClass("0", Fraction(0), True, 1, 1)]

    def q(self, cls, m):
        if not cls.is_zero:
            raise ProviderUnavailable("level-6 coefficients for gamma != 0 are not available")
        return Fraction(q_level6_zero(int(m)))

    def magnitude_floor(self, cls, m):
        # odd m': |q| > 9 m'^2 ; even m': |q| > 3 m'^2  (divisor-sum estimate)
        m = Fraction(m)
        lo, hi = zeta_bracket(2)
        odd = 54 * (2 - hi) - 6 * hi
        even = 18 * (2 - hi) - 2 * hi
        return min(odd, even) * m * m


def provider_for(sym: GenusSymbol) -> EisensteinProvider:
    s = format_genus_symbol(sym)
    if not sym.components and sym.signature[0] == 2 and sym.signature[1] in (10, 18, 26):
        return Level1Provider(sym.signature[1])
    if s == "II_(2,4)(3^+5)":
        return Level3Provider()
    if s == "II_(2,4)(2_II^+4 3^+1)":
        return Level6ZeroProvider()
    raise ProviderUnavailable(f"no Eisenstein coefficients are available for {s}")


def level3_table(count: int = 12) -> dict[str, list[int]]:
    """The table of q(gamma, m) for m = 1/3, 2/3, ... and q(0, m) for m = 1, 2, ..."""
    return {
        "m": [str(Fraction(t, 3)) for t in range(1, count + 1)],
        "q_gamma": [q_level3_nonzero(Fraction(t, 3)) for t in range(1, count + 1)],
        "q_zero": [q_level3_zero(m) for m in range(1, count // 3 + 1)],
    }
