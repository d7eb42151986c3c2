"""Dimensions of M_{k,rho*} and S_{k,rho*} for discriminant forms of square-free level.

Closed forms use only the genus symbol: Gauss sums through their unit
factors, and norm counts through per-prime distributions.  ``dim_oracle``
recomputes every invariant from explicit representation matrices.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction
from functools import lru_cache
from math import prod

import numpy as np

from .cyclotomic import Cyc
from .genus import (
    DiscriminantForm,
    GenusSymbol,
    JordanComponent,
    component_norm_distribution,
    format_genus_symbol,
    satisfies_milgram,
    symbol_norm_counts,
)
from .weilrep import alpha_from_traces

ORACLE_MAX_ORDER = 1000


@dataclass(frozen=True)
class DimensionReport:
    genus: str
    k: int
    c: int
    d: Fraction
    alpha1: Fraction
    alpha2: Fraction
    alpha3: Fraction
    alpha4: Fraction
    dim_M: int | None
    dim_S: int | None

    def invariants(self) -> tuple:
        return (self.c, self.d, self.alpha1, self.alpha2, self.alpha3, self.alpha4)

    def to_json(self) -> dict:
        out = asdict(self)
        for key in ("d", "alpha1", "alpha2", "alpha3", "alpha4"):
            out[key] = str(out[key])
        out["dimM"] = out.pop("dim_M")
        out["dimS"] = out.pop("dim_S")
        return out


@dataclass(frozen=True)
class FormData:
    """Weight-independent data of a discriminant form."""

    order: int
    order2: int  # |D^2|
    order3: int  # |D^3|
    units: dict  # n -> u with G(n)/sqrt|D| = sqrt|D^n| e(u/8)
    frac_sum: Fraction  # sum over D of frac(-Q)
    frac_sum2: Fraction  # sum over D^2 of frac(-Q)
    zeros: int  # #{Q = 0} in D
    zeros2: int  # #{Q = 0} in D^2


@lru_cache(maxsize=None)
def form_data(components: tuple[JordanComponent, ...]) -> FormData:
    order = prod(c.order for c in components)
    two = [c for c in components if c.p == 2]
    order2 = two[0].order if two else 1
    order3 = next((c.order for c in components if c.p == 3), 1)
    units = {n: sum(c.gauss_unit(n) for c in components) % 8 for n in (1, 2, -2, -3)}
    N = prod(c.p for c in components)
    counts = symbol_norm_counts(components)
    J = np.arange(N)
    frac_sum = Fraction(int(np.dot(counts.astype(object), ((-J) % N).astype(object))), N)
    if two:
        dist2 = component_norm_distribution(two[0])
        frac_sum2 = Fraction(int(dist2[1]), 2)
        zeros2 = int(dist2[0])
    else:
        frac_sum2 = Fraction(0)
        zeros2 = 1
    return FormData(order, order2, order3, units, frac_sum, frac_sum2, int(counts[0]), zeros2)


def c_sign(k: int, r: int) -> int:
    if (2 * k + r) % 2:
        raise ValueError("2k + r must be even")
    return 1 if ((2 * k + r) // 2) % 2 == 0 else -1


def _rational(x: Cyc, what: str) -> Fraction:
    if not x.is_rational():
        raise ArithmeticError(f"{what} is not rational: {x!r}")
    return x.to_fraction()


def invariants(sym: GenusSymbol, k: int) -> DimensionReport:
    """d, c and alpha_1..alpha_4 from closed forms, for any integer k.

    dim_M and dim_S are filled in only where the dimension formula applies
    (k >= 2 for dim_M, k > 2 for dim_S); otherwise they are None.
    """
    if not satisfies_milgram(sym):
        raise ValueError(f"{format_genus_symbol(sym)} violates the Milgram congruence")
    r = sym.r
    c = c_sign(k, r)
    fd = form_data(tuple(sym.components))
    d = Fraction(fd.order + c * fd.order2, 2)

    # alpha_1 = d/4 - e((2k+r)/8)(G(2) + c G(-2)) / (8 sqrt|D|)
    s2 = Cyc.sqrt(fd.order2)
    t = (Cyc.root(Fraction(2 * k + r + fd.units[2], 8)) + Cyc.root(Fraction(2 * k + r + fd.units[-2], 8)) * c) * s2
    alpha1 = d / 4 - _rational(t, "alpha_1 correction") / 8

    # alpha_2 = d/3 + Re(e((4k+3r-10)/24)(G(1) + c G(-3))) / (3 sqrt(3|D|))
    g = Cyc.root(Fraction(fd.units[1], 8)) + Cyc.root(Fraction(fd.units[-3], 8)) * Cyc.sqrt(fd.order3) * c
    t = (Cyc.root(Fraction(4 * k + 3 * r - 10, 24)) * g).real() / (Cyc.sqrt(3) * 3)
    alpha2 = d / 3 + _rational(t, "alpha_2 correction")

    alpha3 = fd.frac_sum / 2 + c * fd.frac_sum2 / 2
    alpha4 = Fraction(fd.zeros + c * fd.zeros2, 2)

    dim_M = dim_S = None
    if k >= 2:
        m = d + d * k / 12 - alpha1 - alpha2 - alpha3
        if m.denominator != 1 or m < 0:
            raise ArithmeticError(f"dim M = {m} is not a non-negative integer for {format_genus_symbol(sym)}, k = {k}")
        dim_M = int(m)
        if k > 2:
            s = m - alpha4
            if s.denominator != 1 or s < 0:
                raise ArithmeticError(f"dim S = {s} is not a non-negative integer for {format_genus_symbol(sym)}, k = {k}")
            dim_S = int(s)
    return DimensionReport(format_genus_symbol(sym), k, c, d, alpha1, alpha2, alpha3, alpha4, dim_M, dim_S)


def dim_report(sym: GenusSymbol, k: int) -> DimensionReport:
    """Closed-form dimensions; k >= 2 (dim_S is None for k = 2)."""
    if k < 2:
        raise ValueError("the dimension formula needs k >= 2")
    return invariants(sym, k)


def is_simple(sym: GenusSymbol) -> bool:
    n = sym.signature[1]
    if sym.signature[0] != 2 or n < 4 or n % 2:
        raise ValueError("simplicity is defined here for signature (2, n), n >= 4 even")
    return dim_report(sym, 1 + n // 2).dim_S == 0


# ---------------------------------------------------------------------------
# oracle
# ---------------------------------------------------------------------------

def _phase_sum(exps: np.ndarray, M: int) -> Cyc:
    return Cyc.from_counts(M, np.bincount(np.asarray(exps).ravel() % M, minlength=M))


def dim_oracle(D: DiscriminantForm, signature: tuple[int, int], k: int) -> DimensionReport:
    """All invariants from explicit rho* matrices, by traces on V_0.

    V_0 is the c-eigenspace of Z: e_g -> e_{-g}; it is invariant under rho*(S)
    and rho*(T), and the operators e(k/4)S*, (e(k/6)S*T*)^{-1} have orders 2
    and 3 on it.  Traces of their powers on V_0 are tr(X^t (1 + cZ)/2),
    read off entry by entry from the exponent matrix (b, g).
    """
    if D.order > ORACLE_MAX_ORDER:
        raise ValueError(f"oracle scale exceeded (|D| = {D.order} > {ORACLE_MAX_ORDER})")
    r = signature[0] - signature[1]
    c = c_sign(k, r)
    N = D.level
    X = D.elements()
    n = D.order
    Qn = D.norm_numerators(X)
    E = D.bilinear_numerators(X, X)
    neg = np.asarray(D.index(D.neg(X)))
    idx = np.arange(n)
    fixed = int(np.count_nonzero(neg == idx))
    d = Fraction(n + c * fixed, 2)
    inv_sqrt = Cyc.sqrt(n) / n

    def on_v0(tr_plain: Cyc, tr_z: Cyc) -> Cyc:
        return (tr_plain + tr_z * c) / 2

    # X = e(k/4) S*,  S*_{bg} = e(r/8)/sqrt|D| e((b, g))
    pref = Cyc.root(Fraction(2 * k + r, 8)) * inv_sqrt
    trX = on_v0(_phase_sum(E[idx, idx], N), _phase_sum(E[idx, neg], N)) * pref
    alpha1, _ = alpha_from_traces([Cyc.rational(d), trX], 2)

    # Y = e(-k/6) T*^{-1} S*^{-1},  Y_{gb} = e(-k/6 - r/8)/sqrt|D| e(Q(g) - (g, b))
    pref = Cyc.root(Fraction(-4 * k - 3 * r, 24)) * inv_sqrt
    Yexp = (Qn[:, None] - E) % N
    trY = on_v0(_phase_sum(Yexp[idx, idx], N), _phase_sum(Yexp[idx, neg], N)) * pref
    # tr(Y^2) = sum_{g,b} Y_gb Y_bg,  tr(Y^2 Z) = sum_{g,b} Y_gb Y_{b,-g}
    pref2 = pref * pref
    trY2 = on_v0(_phase_sum(Yexp + Yexp.T, N), _phase_sum(Yexp + Yexp[:, neg].T, N)) * pref2
    alpha2, _ = alpha_from_traces([Cyc.rational(d), trY, trY2], 3)

    # T* = diag e(-Q) on the basis e_g + c e_{-g} of V_0
    alpha3 = Fraction(0)
    alpha4 = Fraction(0)
    for g in range(n):
        h = int(neg[g])
        if h < g or (h == g and c == -1):
            continue
        alpha3 += Fraction(int((-Qn[g]) % N), N)
        alpha4 += int(Qn[g] == 0)

    dim_M = dim_S = None
    if k >= 2:
        m = d + d * k / 12 - alpha1 - alpha2 - alpha3
        if m.denominator != 1:
            raise ArithmeticError(f"oracle dim M = {m} is not an integer")
        dim_M = int(m)
        if k > 2:
            dim_S = int(m - alpha4)
    genus = format_genus_symbol(D.symbol(tuple(signature)))
    return DimensionReport(genus, k, c, d, alpha1, alpha2, alpha3, alpha4, dim_M, dim_S)
