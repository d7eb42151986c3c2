"""Lifts of eta quotients on Gamma_1(N) to vector-valued modular forms for rho_L.

For f of weight k on Gamma_1(N) with character e(b Q(gamma)) the lift is

    F = sum_M  f|_k M  rho_L(M^{-1}) e_gamma,

M running over Gamma_1(N)\\SL2(Z).  The sum is assembled exactly over a
cyclotomic field; f|_k S comes from the eta transformation law and
f|_k S T^j is the twist of that expansion.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

import numpy as np

from .cyclotomic import Cyc, CycMatrix
from .genus import DiscriminantForm, parse_genus_symbol
from .qseries import EtaQuotientSpec, QSeries, eta_quotient, eta_quotient_at_zero, format_qseries
from .search import PrincipalPart
from .weilrep import WeilRep

_I = ((1, 0), (0, 1))
_S = ((0, -1), (1, 0))
_ST = ((0, -1), (1, 1))
_STinv = ((0, -1), (1, -1))

# (sign, base matrix, T-twist applied after S or None for the identity coset)
COSETS = {
    1: ((1, _I, None),),
    2: ((1, _I, None), (1, _S, 0), (1, _ST, 1)),
    3: tuple((s, m, t) for s in (1, -1) for m, t in ((_I, None), (_S, 0), (_ST, 1), (_STinv, -1))),
}


def _neg(M):
    return tuple(tuple(-x for x in row) for row in M)


def _inverse(M):
    (a, b), (c, d) = M
    return ((d, -b), (-c, a))


@dataclass
class VVForm:
    """sum_g f_g e_g with integer q-series components f_g."""

    D: DiscriminantForm
    weight: int
    r: int
    components: dict[int, QSeries]
    truncation: Fraction
    meta: dict = field(default_factory=dict)

    def coefficient(self, g: int, m) -> int:
        return self.components[g].coefficient(Fraction(m))

    def is_integral(self) -> bool:
        return all(s.is_integral() for s in self.components.values())

    def support_ok(self) -> bool:
        """T-equivariance: every exponent of f_g lies in Q(g) + Z."""
        N = self.D.level
        norms = self.D.norm_numerators(self.D.elements())
        for g, s in self.components.items():
            q = Fraction(int(norms[g]), N)
            if any((m - q).denominator != 1 for m in s.exponents()):
                return False
        return True

    def copy_with(self, g: int, m, delta: int) -> "VVForm":
        """A copy with c(g, m) shifted by delta (used to test the tests)."""
        comps = dict(self.components)
        s = comps[g]
        comps[g] = s + QSeries.monomial(delta, m, s.truncation)
        return VVForm(self.D, self.weight, self.r, comps, self.truncation, dict(self.meta))

    def to_json(self) -> dict:
        X = self.D.elements()
        return {
            "weight": self.weight,
            "truncation": str(self.truncation),
            "components": {
                ",".join(str(int(v)) for v in X[g]): format_qseries(s)
                for g, s in sorted(self.components.items())
                if not s.is_zero()
            },
            **{k: v for k, v in self.meta.items() if isinstance(v, (str, int))},
        }


@dataclass
class PrincipalPartView:
    terms: dict  # (element index, m < 0) -> integer

    def __len__(self):
        return len(self.terms)

    def as_principal_part(self, D: DiscriminantForm) -> PrincipalPart:
        return PrincipalPart(D, self.terms)


def _hstack(cols: Sequence[CycMatrix]) -> CycMatrix:
    M = lcm(*(c.F.M for c in cols))
    cols = [c.lift(M) for c in cols]
    den = lcm(*(c.den for c in cols))
    data = np.concatenate([np.asarray(c.data, dtype=object) * (den // c.den) for c in cols], axis=2)
    return CycMatrix(cols[0].F, data, den)


def gamma1_lift(spec: EtaQuotientSpec, N: int, gamma: int, D: DiscriminantForm, r: int, truncation) -> VVForm:
    """The lift of the eta quotient ``spec`` along e_gamma, exact below q^truncation."""
    if N not in COSETS:
        raise ValueError(f"no coset representatives for N = {N}")
    if spec.level != N:
        raise ValueError("eta quotient level differs from N")
    if D.level not in (1, N) or (N % D.level):
        raise ValueError("the discriminant form must have level dividing N")
    x = D.element(gamma)
    if spec.character_exponent != D.q_value(x) % 1:
        raise ValueError(f"character e(b * {spec.character_exponent}) does not match Q(gamma) = {D.q_value(x)}")
    truncation = Fraction(truncation)
    k = spec.weight
    f = eta_quotient(spec, truncation)
    series = []
    vectors = []
    W = WeilRep(D, r)
    e = W.basis_vector(gamma)
    if N > 1:
        pref, g = eta_quotient_at_zero(spec, truncation)
    for sign, base, twist in COSETS[N]:
        M = base if sign == 1 else _neg(base)
        s = f if twist is None else (g.twist(twist) if twist else g)
        c = Cyc.rational((-1) ** k if sign == -1 else 1)
        if twist is not None:
            c = c * pref
        series.append(s)
        vectors.append(W.apply(_inverse(M), e).scale(c))
    den = lcm(*(s.den for s in series))
    lo = min(min((e for e in s.with_den(den).coeffs), default=0) for s in series)
    top = min(s.with_den(den).order for s in series)
    exps = list(range(lo, top))
    rows = [[s.with_den(den).coeffs.get(j, 0) for j in exps] for s in series]
    C = CycMatrix.from_entries(rows)
    V = _hstack(vectors)
    F = V @ C
    data = np.asarray(F.data, dtype=object)
    if np.any(data[1:]) or any(int(v) % F.den for v in data[0].ravel()):
        raise ArithmeticError("lift has non-integral coefficients")
    ints = data[0] // F.den
    comps = {}
    for b in range(D.order):
        comps[b] = QSeries({j: int(ints[b, i]) for i, j in enumerate(exps)}, den, top).normalized()
    return VVForm(D, k, r, comps, Fraction(top, den), {"gamma": gamma, "level": N})


def principal_part(F: VVForm) -> PrincipalPartView:
    out = {}
    for g, s in F.components.items():
        for m, c in s.items():
            if m < 0:
                out[(g, m)] = int(c)
    return PrincipalPartView(dict(sorted(out.items())))


def constant_term(F: VVForm) -> int:
    return F.coefficient(0, 0) if F.components else 0


# ---------------------------------------------------------------------------
# the two lattices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LiftCase:
    name: str
    genus: str
    level: int
    spec: EtaQuotientSpec
    gamma_norm: Fraction  # Q(gamma) mod 1
    f0_factor: int  # c(b, m) = f-part + f0_factor * phase * [f0](m)


CASES = {
    "level3": LiftCase("level3", "II_(2,4)(3^+5)", 3, EtaQuotientSpec(3, {1: 1, 3: -3}), Fraction(2, 3), 1),
    "level2": LiftCase("level2", "II_(2,6)(2_II^-6)", 2, EtaQuotientSpec(2, {1: 4, 2: -8}), Fraction(1, 2), 4),
}


def find_gamma(D: DiscriminantForm, norm: Fraction) -> int:
    norms = D.norm_numerators(D.elements())
    for g in range(1, D.order):
        if Fraction(int(norms[g]), D.level) == norm:
            return g
    raise ValueError(f"no element of norm {norm}")


def case_lift(name: str, truncation=15, D: DiscriminantForm | None = None, gamma: int | None = None) -> VVForm:
    """The lift for one of the two cases, on the realized form of its genus unless D is given."""
    case = CASES[name]
    sym = parse_genus_symbol(case.genus)
    if D is None:
        D = sym.form
    if gamma is None:
        gamma = find_gamma(D, case.gamma_norm)
    F = gamma1_lift(case.spec, case.level, gamma, D, sym.r, truncation)
    F.meta["case"] = name
    return F


def f0_series(name: str, truncation) -> QSeries:
    """f0 = (f|S) / prefactor, an eta quotient in tau/N."""
    return eta_quotient_at_zero(CASES[name].spec, truncation)[1]


def coefficient_formula_check(F: VVForm, name: str, order=10) -> dict:
    """Compare every c(b, m), m < order, with the closed form

    level 3:  f [b = +-gamma] + 2 cos(2 pi (b, gamma)) [f0](m)
    level 2:  f [b = gamma]   + 4 e((b, gamma)) [f0](m)

    where [f0](m) counts only for m = Q(b) mod 1.
    """
    case = CASES[name]
    order = min(Fraction(order), F.truncation)
    gamma = F.meta["gamma"]
    D = F.D
    X = D.elements()
    x = X[gamma]
    f = eta_quotient(case.spec, order)
    f0 = f0_series(name, order)
    E = D.bilinear_numerators(X, x[None, :])[:, 0]
    neg = int(D.index(D.neg(x[None, :]))[0])
    N = D.level
    norms = D.norm_numerators(X)
    mismatches = []
    checked = 0
    exps = sorted(set(f.exponents()) | set(f0.exponents()) | {m for s in F.components.values() for m in s.exponents() if m < order})
    for b in range(D.order):
        t = int(E[b]) % N
        if name == "level3":
            phase = case.f0_factor * (2 if t == 0 else -1)  # 2 cos(2 pi t/3)
        else:
            phase = case.f0_factor * (1 if t == 0 else -1)  # e((b, gamma)) = +-1
        on_orbit = b in (gamma, neg)
        qb = Fraction(int(norms[b]), N)
        for m in exps:
            want = phase * f0.coefficient(m) if (m - qb).denominator == 1 else 0
            if on_orbit:
                want += f.coefficient(m)
            got = F.coefficient(b, m)
            checked += 1
            if got != want:
                mismatches.append({"beta": [int(v) for v in X[b]], "m": str(m), "got": got, "want": want})
    return {"case": name, "order": str(order), "checked": checked, "mismatches": mismatches[:20], "passed": not mismatches}


# ---------------------------------------------------------------------------
# numerical modularity check
# ---------------------------------------------------------------------------

DEFAULT_POINTS = (2j, 0.3 + 1.5j, -0.2 + 1.6j, 0.1 + 1.8j, -0.4 + 1.5j)


def _growth_constants(F: VVForm) -> tuple[float, float]:
    """(C, p) with |c(g, m)| <= C exp(4 pi sqrt(p m)) on all known m > 0."""
    import math

    pp = principal_part(F)
    p = float(max((-m for _, m in pp.terms), default=Fraction(1, 24)))
    C = 1.0
    for s in F.components.values():
        for m, c in s.items():
            if m > 0:
                C = max(C, abs(int(c)) / math.exp(4 * math.pi * math.sqrt(p * float(m))))
    return 2 * C, p


def _tail(C: float, p: float, y: float, start: Fraction, step: Fraction) -> float:
    import math

    total = 0.0
    m = float(start)
    h = float(step)
    for _ in range(100000):
        term = C * math.exp(4 * math.pi * math.sqrt(p * m) - 2 * math.pi * y * m)
        total += term
        if term < 1e-40 and m > 4 * p / (y * y):
            break
        m += h
    return total


def _evaluate(F: VVForm, tau, dps: int):
    import mpmath

    with mpmath.workdps(dps):
        tau = mpmath.mpc(tau)
        den = lcm(*(s.den for s in F.components.values()))
        cache = {}
        out = []
        for g in range(F.D.order):
            acc = mpmath.mpc(0)
            for e, c in F.components[g].with_den(den).coeffs.items():
                if e not in cache:
                    cache[e] = mpmath.exp(2j * mpmath.pi * tau * e / den)
                acc += c * cache[e]
            out.append(acc)
        return out


def verify_modularity(F: VVForm, points: Iterable[complex] = DEFAULT_POINTS, tolerance: float = 1e-8, dps: int = 30) -> dict:
    """Check F(-1/tau) = tau^k rho(S) F(tau) numerically at each point.

    Status per point is "pass", "fail", or "inconclusive" when the estimated
    series tails at tau or -1/tau exceed the tolerance.
    """
    import math

    import mpmath

    W = WeilRep(F.D, F.r)
    S = W.rho_S().to_complex()
    n = F.D.order
    C, p = _growth_constants(F)
    den = lcm(*(s.den for s in F.components.values()))
    step = Fraction(1, den)
    results = []
    with mpmath.workdps(dps):
        for tau in points:
            tau = complex(tau)
            t = mpmath.mpc(tau.real, tau.imag)
            tinv = -1 / t
            a = _evaluate(F, tinv, dps)
            b = _evaluate(F, t, dps)
            pref = t ** F.weight
            err = 0.0
            for i in range(n):
                row = S[i]
                acc = mpmath.mpc(0)
                for j in np.nonzero(np.abs(row) > 0)[0]:
                    acc += mpmath.mpc(row[j].real, row[j].imag) * b[j]
                err = max(err, float(abs(a[i] - pref * acc)))
            tail_a = _tail(C, p, float(tinv.imag), F.truncation, step)
            tail_b = _tail(C, p, tau.imag, F.truncation, step)
            tail = tail_a + abs(tau) ** F.weight * math.sqrt(n) * tail_b
            if err <= tolerance and tail <= tolerance:
                status = "pass"
            elif err > tolerance + tail + 1e-12:
                status = "fail"
            else:
                status = "inconclusive"
            results.append({"tau": [tau.real, tau.imag], "error": err, "tail_bound": tail, "status": status})
    # float64 rho(S) limits accuracy to about 1e-13 relative; fine for 1e-8
    statuses = {r["status"] for r in results}
    overall = "fail" if "fail" in statuses else ("inconclusive" if "inconclusive" in statuses else "pass")
    return {"points": results, "tolerance": tolerance, "support_ok": F.support_ok(), "status": overall if F.support_ok() else "fail"}
