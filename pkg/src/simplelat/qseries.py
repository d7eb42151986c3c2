"""Truncated formal series in fractional powers of q, and eta quotients."""

from __future__ import annotations

import json
import math
import os
import re
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from numbers import Integral, Rational
from typing import Callable, Mapping

import numpy as np

from . import _kernels
from .cyclotomic import Cyc, field as cyc_field


def _is_zero(c) -> bool:
    return (not c) if not isinstance(c, Cyc) else c.is_zero()


def _simplify(c):
    """Demote rational cyclotomic scalars to Fraction/int."""
    if isinstance(c, Cyc) and c.is_rational():
        c = c.to_fraction()
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c.numerator)
    return c


class QSeries:
    """sum_e coeffs[e] q^(e/den) + O(q^(order/den)).

    Keys and ``order`` are integer numerators over the common ``den``.
    Instances are immutable.
    """

    __slots__ = ("den", "coeffs", "order")

    def __init__(self, coeffs: Mapping[int, object], den: int, order: int):
        if den < 1:
            raise ValueError("denominator must be positive")
        self.den = int(den)
        self.order = int(order)
        self.coeffs = {int(e): _simplify(c) for e, c in coeffs.items() if e < order and not _is_zero(c)}

    # -- construction -----------------------------------------------------
    @classmethod
    def from_list(cls, values, start: Fraction | int = 0, step: Fraction | int = 1, order=None) -> "QSeries":
        """Coefficients at start, start+step, ...; exact up to ``order`` (default: next slot)."""
        start, step = Fraction(start), Fraction(step)
        den = lcm(start.denominator, step.denominator)
        if order is not None:
            den = lcm(den, Fraction(order).denominator)
        base, inc = int(start * den), int(step * den)
        coeffs = {base + i * inc: v for i, v in enumerate(values)}
        top = base + len(values) * inc if order is None else int(Fraction(order) * den)
        return cls(coeffs, den, top)

    @classmethod
    def one(cls, order: Fraction | int, den: int = 1) -> "QSeries":
        order = Fraction(order)
        den = lcm(den, order.denominator)
        return cls({0: 1}, den, int(order * den))

    @classmethod
    def monomial(cls, c, exponent, order) -> "QSeries":
        exponent, order = Fraction(exponent), Fraction(order)
        den = lcm(exponent.denominator, order.denominator)
        return cls({int(exponent * den): c}, den, int(order * den))

    # -- basic queries ----------------------------------------------------
    @property
    def truncation(self) -> Fraction:
        return Fraction(self.order, self.den)

    def valuation(self) -> Fraction | None:
        if not self.coeffs:
            return None
        return Fraction(min(self.coeffs), self.den)

    def exponents(self) -> list[Fraction]:
        return [Fraction(e, self.den) for e in sorted(self.coeffs)]

    def items(self):
        for e in sorted(self.coeffs):
            yield Fraction(e, self.den), self.coeffs[e]

    def coefficient(self, m) -> object:
        m = Fraction(m)
        if m >= self.truncation:
            raise ValueError(f"coefficient at q^{m} is beyond the truncation order {self.truncation}")
        if (m * self.den).denominator != 1:
            return 0
        return self.coeffs.get(int(m * self.den), 0)

    def __getitem__(self, m):
        return self.coefficient(m)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self.coeffs.values())

    # -- denominators -----------------------------------------------------
    def with_den(self, den: int) -> "QSeries":
        if den % self.den:
            raise ValueError("new denominator must be a multiple of the old one")
        s = den // self.den
        return QSeries({e * s: c for e, c in self.coeffs.items()}, den, self.order * s)

    def _aligned(self, other: "QSeries"):
        den = lcm(self.den, other.den)
        return self.with_den(den), other.with_den(den)

    def normalized(self) -> "QSeries":
        """Same series over the smallest admissible denominator."""
        g = reduce(gcd, self.coeffs, self.order)
        g = gcd(g, self.den)
        if g <= 1:
            return self
        return QSeries({e // g: c for e, c in self.coeffs.items()}, self.den // g, self.order // g)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, QSeries):
            if isinstance(other, (Integral, Rational, Cyc)):
                other = QSeries({0: other}, self.den, self.order)
            else:
                return NotImplemented
        a, b = self._aligned(other)
        order = min(a.order, b.order)
        out = dict(a.coeffs)
        for e, c in b.coeffs.items():
            out[e] = out[e] + c if e in out else c
        return QSeries(out, a.den, order)

    __radd__ = __add__

    def __neg__(self):
        return QSeries({e: -c for e, c in self.coeffs.items()}, self.den, self.order)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "QSeries":
        if _is_zero(c):
            return QSeries({}, self.den, self.order)
        return QSeries({e: v * c for e, v in self.coeffs.items()}, self.den, self.order)

    def __mul__(self, other):
        if not isinstance(other, QSeries):
            return self.scale(other)
        a, b = self._aligned(other)
        va = min(a.coeffs) if a.coeffs else a.order
        vb = min(b.coeffs) if b.coeffs else b.order
        order = min(va + b.order, vb + a.order)
        if not a.coeffs or not b.coeffs:
            return QSeries({}, a.den, order)
        if a.is_integral() and b.is_integral():
            return QSeries(_dense_mul(a, b, va, vb, order), a.den, order)
        out: dict[int, object] = {}
        for e1, c1 in a.coeffs.items():
            if e1 + vb >= order:
                continue
            for e2, c2 in b.coeffs.items():
                e = e1 + e2
                if e >= order:
                    continue
                p = c1 * c2
                out[e] = out[e] + p if e in out else p
        return QSeries(out, a.den, order)

    __rmul__ = __mul__

    def inverse(self) -> "QSeries":
        if not self.coeffs:
            raise ZeroDivisionError("series has no invertible leading coefficient")
        v = min(self.coeffs)
        lead = self.coeffs[v]
        inv_lead = lead.inverse() if isinstance(lead, Cyc) else Fraction(1) / Fraction(lead)
        n = self.order - v  # relative precision
        h = {e - v: c * inv_lead for e, c in self.coeffs.items() if e != v}
        u = [Fraction(0)] * n if not any(isinstance(c, Cyc) for c in h.values()) else [0] * n
        u[0] = 1
        hk = sorted(h.items())
        for m in range(1, n):
            acc = 0
            for k, c in hk:
                if k > m:
                    break
                acc = acc - c * u[m - k]
            u[m] = acc
        coeffs = {i - v: u[i] * inv_lead for i in range(n) if not _is_zero(u[i])}
        return QSeries(coeffs, self.den, n - v)

    def __pow__(self, e: int) -> "QSeries":
        if e < 0:
            return self.inverse() ** (-e)
        if e == 0:
            v = min(self.coeffs) if self.coeffs else 0
            return QSeries({0: 1}, self.den, self.order - v)
        out = None
        base = self
        while e:
            if e & 1:
                out = base if out is None else out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def shift(self, exponent) -> "QSeries":
        """Multiply by q^exponent."""
        exponent = Fraction(exponent)
        den = lcm(self.den, exponent.denominator)
        a = self.with_den(den)
        k = int(exponent * den)
        return QSeries({e + k: c for e, c in a.coeffs.items()}, den, a.order + k)

    def truncate(self, order) -> "QSeries":
        order = Fraction(order)
        den = lcm(self.den, order.denominator)
        a = self.with_den(den)
        return QSeries(a.coeffs, den, min(a.order, int(order * den)))

    def substitute_power(self, delta: Fraction | int) -> "QSeries":
        """q -> q^delta for a positive rational delta."""
        delta = Fraction(delta)
        if delta <= 0:
            raise ValueError("delta must be positive")
        den = self.den * delta.denominator
        s = delta.numerator
        return QSeries({e * s: c for e, c in self.coeffs.items()}, den, self.order * s).normalized()

    def map_coefficients(self, fn: Callable[[Fraction, object], object]) -> "QSeries":
        return QSeries({e: fn(Fraction(e, self.den), c) for e, c in self.coeffs.items()}, self.den, self.order)

    def twist(self, t: int = 1) -> "QSeries":
        """Coefficient at q^m multiplied by e(t*m); this is f(tau + t)."""
        return self.map_coefficients(lambda m, c: c * Cyc.root(t * m))

    def split_by_exponent_class(self, N: int) -> dict[int, "QSeries"]:
        den = lcm(self.den, N)
        a = self.with_den(den)
        step = den // N
        parts: dict[int, dict[int, object]] = {j: {} for j in range(N)}
        for e, c in a.coeffs.items():
            if e % step:
                raise ValueError(f"exponent {Fraction(e, den)} is not in (1/{N})Z")
            parts[(e // step) % N][e] = c
        return {j: QSeries(p, den, a.order) for j, p in parts.items()}

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        a, b = self._aligned(other)
        if a.order != b.order or set(a.coeffs) != set(b.coeffs):
            return False
        return all(a.coeffs[e] == b.coeffs[e] for e in a.coeffs)

    def same_terms(self, other: "QSeries") -> bool:
        """Equality of coefficients up to the smaller truncation."""
        order = min(self.truncation, other.truncation)
        return self.truncate(order) == other.truncate(order)

    # -- numerics ---------------------------------------------------------
    def evaluate(self, tau, dps: int = 30):
        import mpmath

        with mpmath.workdps(dps):
            tau = mpmath.mpc(tau)
            acc = mpmath.mpc(0)
            for m, c in self.items():
                cv = c.to_mpc(dps) if isinstance(c, Cyc) else mpmath.mpf(c.numerator) / c.denominator if isinstance(c, Fraction) else mpmath.mpf(c)
                acc += cv * mpmath.exp(2j * mpmath.pi * tau * mpmath.mpf(m.numerator) / m.denominator)
            return acc

    # -- text -------------------------------------------------------------
    def __str__(self):
        return format_qseries(self)

    def __repr__(self):
        return f"QSeries({format_qseries(self)})"


def _dense_mul(a: QSeries, b: QSeries, va: int, vb: int, order: int) -> dict[int, int]:
    n = order - va - vb
    da = _dense(a, va, n)
    db = _dense(b, vb, n)
    bound = int(np.abs(da).max()) * int(np.abs(db).max()) * n if da.dtype != object and db.dtype != object else None
    if bound is not None and bound < _kernels.INT64_LIMIT:
        prod = np.convolve(da, db)[:n]
    else:
        prod = np.convolve(da.astype(object), db.astype(object))[:n]
    return {int(i) + va + vb: int(prod[i]) for i in np.nonzero(prod)[0]}


def _dense(s: QSeries, v: int, n: int) -> np.ndarray:
    big = any(abs(c) >= _kernels.INT64_LIMIT for c in s.coeffs.values())
    arr = np.zeros(n, dtype=object if big else np.int64)
    for e, c in s.coeffs.items():
        if e - v < n:
            arr[e - v] = c
    return arr


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------

def _format_scalar(c) -> str:
    if isinstance(c, Cyc):
        body = ",".join(str(int(x)) for x in c.num)
        return f"{{{c.F.M}:{c.den}:{body}}}"
    if isinstance(c, Fraction):
        return f"({c.numerator}/{c.denominator})"
    return str(c)


def format_qseries(s: QSeries) -> str:
    """Render as ``c*q^(e/b) + ... + O(q^(t/b))`` with b the series denominator."""
    parts = []
    for e in sorted(s.coeffs):
        c = s.coeffs[e]
        neg = isinstance(c, (int, Fraction)) and c < 0
        txt = _format_scalar(-c if neg else c)
        term = f"{txt}*q^({e}/{s.den})"
        if not parts:
            parts.append(("-" if neg else "") + term)
        else:
            parts.append((" - " if neg else " + ") + term)
    tail = f"O(q^({s.order}/{s.den}))"
    return "".join(parts) + (" + " if parts else "") + tail


_TERM = re.compile(
    r"\s*([+-])?\s*(\{[^}]*\}|\(-?\d+/\d+\)|\d+)\*q\^\((-?\d+)/(\d+)\)\s*"
)
_TAIL = re.compile(r"\s*\+?\s*O\(q\^\((-?\d+)/(\d+)\)\)\s*$")


def _parse_scalar(tok: str):
    if tok.startswith("{"):
        M, den, body = tok[1:-1].split(":")
        F = cyc_field(int(M))
        num = np.array([int(x) for x in body.split(",")], dtype=object)
        if num.shape[0] != F.phi:
            raise ValueError("cyclotomic coefficient has the wrong length")
        return Cyc(F, num, int(den))
    if tok.startswith("("):
        a, b = tok[1:-1].split("/")
        return Fraction(int(a), int(b))
    return int(tok)


def parse_qseries(text: str) -> QSeries:
    m = _TAIL.search(text)
    if not m:
        raise ValueError("missing truncation term O(q^(t/b))")
    order, den = int(m.group(1)), int(m.group(2))
    body = text[: m.start()]
    coeffs = {}
    pos = 0
    while pos < len(body) and body[pos:].strip():
        t = _TERM.match(body, pos)
        if not t:
            raise ValueError(f"cannot parse q-series term at: {body[pos:pos + 30]!r}")
        sign, tok, e, b = t.groups()
        if int(b) != den:
            raise ValueError("all exponents must share the series denominator")
        c = _parse_scalar(tok)
        if sign == "-":
            c = -c
        coeffs[int(e)] = c
        pos = t.end()
    return QSeries(coeffs, den, order)


# ---------------------------------------------------------------------------
# eta products
# ---------------------------------------------------------------------------

def _pentagonal(n: int):
    """Sorted positive exponents and signs of prod(1 - q^k) - 1 below n."""
    idx, val = [], []
    k = 1
    while True:
        a = k * (3 * k - 1) // 2
        if a >= n:
            break
        s = -1 if k % 2 else 1
        idx.append(a)
        val.append(s)
        b = k * (3 * k + 1) // 2
        if b < n:
            idx.append(b)
            val.append(s)
        k += 1
    order = np.argsort(idx)
    return np.asarray(idx, dtype=np.int64)[order], np.asarray(val, dtype=np.int64)[order]


def _cache_dir() -> str | None:
    d = os.environ.get("SIMPLELAT_CACHE_DIR")
    if d:
        os.makedirs(d, exist_ok=True)
    return d


def euler_power(r: int, n: int) -> list[int]:
    """Coefficients of prod_{k>=1}(1 - q^k)^r below q^n, exact integers."""
    if n <= 0:
        return []
    cache = _cache_dir()
    path = os.path.join(cache, f"euler_pow_{r}.json") if cache else None
    if path and os.path.exists(path):
        with open(path) as fh:
            stored = json.load(fh)
        if len(stored) >= n:
            return [int(x) for x in stored[:n]]
    if r == 0:
        out = [1] + [0] * (n - 1)
    else:
        p_idx, p_val = _pentagonal(n)
        # |coeff| <= exp(pi sqrt(2|r|n/3)) (saddle-point bound on |r|-coloured partitions)
        log2_bound = math.pi * math.sqrt(2 * abs(r) * n / 3) / math.log(2)
        log2_work = log2_bound + math.log2((abs(r) + 2) * 2.0 * n ** 1.5 + 1)
        if log2_work < 61:
            out = [int(x) for x in _kernels.series_pow(p_idx, p_val, r, n)]
        else:
            out = [int(x) for x in _kernels.series_pow_numpy(p_idx, p_val.astype(object), r, n)]
    if path:
        with open(path, "w") as fh:
            json.dump(out, fh)
    return out


def eta_expansion(truncation) -> QSeries:
    """q^(1/24) prod (1 - q^n), exact below q^truncation."""
    truncation = Fraction(truncation)
    if truncation <= Fraction(1, 24):
        raise ValueError("truncation must exceed 1/24")
    n = math.ceil(truncation - Fraction(1, 24))
    return QSeries.from_list(euler_power(1, n), 0, 1, order=truncation - Fraction(1, 24)).shift(Fraction(1, 24))


@dataclass(frozen=True)
class EtaQuotientSpec:
    """prod_{delta | N} eta(delta tau)^r_delta."""

    level: int
    exponents: Mapping[int, int] = dc_field(default_factory=dict)

    def __post_init__(self):
        ex = {int(d): int(r) for d, r in dict(self.exponents).items() if r}
        object.__setattr__(self, "exponents", ex)
        N = self.level
        for d in ex:
            if d < 1 or N % d:
                raise ValueError(f"{d} does not divide the level {N}")
        s1 = Fraction(N, 24) * sum(d * r for d, r in ex.items())
        s2 = Fraction(N, 24) * sum(Fraction(r, d) for d, r in ex.items())
        if s1.denominator != 1 or s2.denominator != 1 or sum(ex.values()) % 2:
            raise ValueError("eta quotient violates the integrality hypotheses for a Gamma_1(N) form")

    @property
    def weight(self) -> int:
        return sum(self.exponents.values()) // 2

    @property
    def leading_exponent(self) -> Fraction:
        return Fraction(sum(d * r for d, r in self.exponents.items()), 24)

    @property
    def character_exponent(self) -> Fraction:
        """chi(M) = e(b * x) on Gamma_1(N); returns x mod 1 in [0, 1)."""
        return self.leading_exponent % 1

    @property
    def leading_exponent_at_zero(self) -> Fraction:
        return Fraction(sum(Fraction(r, d) for d, r in self.exponents.items()), 24)


def eta_quotient(spec: EtaQuotientSpec, truncation) -> QSeries:
    """Expansion of prod eta(delta tau)^r_delta, exact below q^truncation."""
    truncation = Fraction(truncation)
    v = spec.leading_exponent
    n = max(0, math.ceil(truncation - v))
    acc = QSeries({0: 1}, 1, n)
    for d, r in sorted(spec.exponents.items()):
        part = QSeries.from_list(euler_power(r, -(-n // d)), 0, 1, order=-(-n // d)).substitute_power(d).truncate(n)
        acc = acc * part
    return acc.truncate(truncation - v).shift(v)


def eta_quotient_at_zero(spec: EtaQuotientSpec, truncation) -> tuple[Cyc, QSeries]:
    """(c, g) with f|_k S = c * g, where g = prod eta(tau/delta)^r_delta.

    Uses eta(-1/tau) = sqrt(-i tau) eta(tau): c = (-i)^k prod delta^(-r_delta/2).
    """
    truncation = Fraction(truncation)
    k = spec.weight
    num = Fraction(1)
    for d, r in spec.exponents.items():
        num *= Fraction(d) ** (-r)
    # sqrt(a/b) = sqrt(a*b)/b
    root = Cyc.sqrt(num.numerator * num.denominator) * Fraction(1, num.denominator)
    prefactor = Cyc.root(Fraction(-k, 4)) * root
    v = spec.leading_exponent_at_zero
    L = reduce(lcm, spec.exponents.keys(), 1)
    n = max(0, math.ceil((truncation - v) * L))  # slots in q^(1/L)
    acc = QSeries({0: 1}, 1, n)
    for d, r in sorted(spec.exponents.items()):
        m = L // d  # eta(tau/d) uses powers q^(k/d) = x^(k m)
        part = QSeries.from_list(euler_power(r, -(-n // m)), 0, 1, order=-(-n // m)).substitute_power(m).truncate(n)
        acc = acc * part
    series = acc.substitute_power(Fraction(1, L)).truncate(truncation - v).shift(v)
    return prefactor, series
