"""Formal expansions of the two singular-weight Borcherds products at a cusp.

L = K + II_(1,1)(N) with z, zeta spanning the hyperbolic plane, N in {2, 3}.
Vectors of K' are stored by integer coordinates y = G lambda, so heights
(lambda, w0) = y . w0 are integers for w0 in K, and q(lambda) = y G^-1 y / 2
is an exact rational.  Products live in the completed group ring of K',
graded by the height; everything up to a height bound is exact.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from math import comb, gcd, lcm

import numpy as np
from sympy import Matrix, prevprime

from . import _kernels
from .genus import LatticeDiscriminant, format_genus_symbol
from .lifts import CASES, VVForm, gamma1_lift
from .qseries import EtaQuotientSpec, eta_quotient

Vec = tuple  # integer coordinates y = G lambda of a vector of K'


# ---------------------------------------------------------------------------
# lattices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HyperbolicLattice:
    """Even lattice K of signature (1, n-1) whose last two basis vectors x, xi
    span a hyperbolic plane II_(1,1)(N)."""

    name: str
    gram: tuple
    level: int

    def __post_init__(self):
        G = self.G
        if not np.array_equal(G, G.T) or np.any(np.diag(G) % 2):
            raise ValueError("Gram matrix must be symmetric and even")
        ev = np.linalg.eigvalsh(G.astype(float))
        if int(np.sum(ev > 0)) != 1 or int(np.sum(ev < 0)) != len(ev) - 1:
            raise ValueError("lattice is not of signature (1, n-1)")
        n = self.rank
        if G[n - 2, n - 1] != self.level or G[n - 2, n - 2] or G[n - 1, n - 1]:
            raise ValueError("last two basis vectors must span II_(1,1)(N)")

    @cached_property
    def G(self) -> np.ndarray:
        return np.array(self.gram, dtype=np.int64)

    @property
    def rank(self) -> int:
        return len(self.gram)

    @cached_property
    def _inverse(self) -> tuple[np.ndarray, int]:
        inv = Matrix(self.gram).inv()
        den = reduce(lcm, (int(v.q) for v in inv), 1)
        num = np.array((inv * den).tolist(), dtype=np.int64)
        return num, den

    @property
    def x(self) -> np.ndarray:
        e = np.zeros(self.rank, dtype=np.int64)
        e[-2] = 1
        return e

    @property
    def xi(self) -> np.ndarray:
        e = np.zeros(self.rank, dtype=np.int64)
        e[-1] = 1
        return e

    def dual(self, v) -> Vec:
        """y = G v for v in K (or rational v with G v integral)."""
        y = [Fraction(int(a)) if not isinstance(a, Fraction) else a for a in (np.array(self.gram, dtype=object) @ np.array(v, dtype=object))]
        if any(a.denominator != 1 for a in y):
            raise ValueError("vector is not in K'")
        return tuple(int(a) for a in y)

    def pair(self, y1, y2) -> Fraction:
        num, den = self._inverse
        return Fraction(int(np.dot(np.asarray(y1, dtype=object), num.astype(object) @ np.asarray(y2, dtype=object))), den)

    def q(self, y) -> Fraction:
        return self.pair(y, y) / 2

    def height(self, y, w0) -> int:
        return int(np.dot(np.asarray(y, dtype=np.int64), np.asarray(w0, dtype=np.int64)))

    def same_class(self, y1, y2) -> bool:
        """y1 = y2 mod K."""
        num, den = self._inverse
        d = num @ (np.asarray(y1, dtype=np.int64) - np.asarray(y2, dtype=np.int64))
        return not np.any(d % den)

    def vector(self, y) -> tuple:
        """Coordinates of G^-1 y in the basis of K."""
        num, den = self._inverse
        return tuple(Fraction(int(a), den) for a in num @ np.asarray(y, dtype=np.int64))

    def is_primitive(self, y) -> bool:
        return reduce(gcd, (abs(int(a)) for a in y), 0) == 1


def _block(*blocks) -> tuple:
    n = sum(len(b) for b in blocks)
    out = [[0] * n for _ in range(n)]
    o = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, v in enumerate(row):
                out[o + i][o + j] = v
        o += len(b)
    return tuple(tuple(r) for r in out)


A2_NEG = ((-2, 1), (1, -2))
D4_NEG = ((-2, 1, 0, 0), (1, -2, 1, 1), (0, 1, -2, 0), (0, 1, 0, -2))


def hyperbolic_lattice(case: str) -> HyperbolicLattice:
    if case == "level3":
        return HyperbolicLattice("A2(-1)+II_(1,1)(3)", _block(A2_NEG, ((0, 3), (3, 0))), 3)
    if case == "level2":
        return HyperbolicLattice("D4(-1)+II_(1,1)(2)", _block(D4_NEG, ((0, 2), (2, 0))), 2)
    raise ValueError(f"unknown case {case!r}")


@dataclass
class CuspData:
    """L = K + span(z, zeta) with <z, zeta> = N; z' = zeta/N."""

    K: HyperbolicLattice
    N: int
    gram_L: tuple = field(init=False)
    disc: LatticeDiscriminant = field(init=False, repr=False)

    def __post_init__(self):
        self.gram_L = _block(self.K.gram, ((0, self.N), (self.N, 0)))
        self.disc = LatticeDiscriminant(self.gram_L)
        # z has level N: <z, L> = N Z
        col = np.array(self.gram_L)[:, -2]
        if reduce(gcd, (abs(int(v)) for v in col), 0) != self.N:
            raise AssertionError("z does not have level N")

    def element(self, y, j: int = 0) -> int:
        """Index of lambda + j z/N + L in the discriminant form (y = G_K lambda)."""
        return self.disc.index_of_dual(tuple(y) + (0, j))

    def gamma_cone(self) -> int:
        """z/N - zeta/N + L."""
        return self.disc.index_of_dual((0,) * self.K.rank + (-1, 1))

    def gamma_weyl(self) -> Vec:
        """p(gamma) for gamma = x/N - xi/N, as y-coordinates in K'."""
        N = self.N
        v = [Fraction(0)] * self.K.rank
        v[-2], v[-1] = Fraction(1, N), Fraction(-1, N)
        return self.K.dual(v)


# ---------------------------------------------------------------------------
# slab enumeration
# ---------------------------------------------------------------------------

def majorant(K: HyperbolicLattice, w0) -> np.ndarray:
    """Positive definite A with y A y = (lambda, w0)^2 / (w0, w0) - q(lambda)."""
    w0 = np.asarray(w0, dtype=float)
    n2 = float(w0 @ K.G @ w0)
    if n2 <= 0:
        raise ValueError("w0 must have positive norm")
    num, den = K._inverse
    return np.outer(w0, w0) / n2 - num.astype(float) / den / 2


def enumerate_slab(K: HyperbolicLattice, w0, H: int, q_min: Fraction = Fraction(0)) -> list[Vec]:
    """All lambda in K' with q(lambda) >= q_min and 0 < (lambda, w0) <= H,
    sorted by height then coordinates."""
    q_min = Fraction(q_min)
    if q_min > 0:
        raise ValueError("q_min must be <= 0")
    w0 = np.asarray(w0, dtype=np.int64)
    n2 = int(w0 @ K.G @ w0)
    if n2 <= 0:
        raise ValueError("w0 must have positive norm")
    if H < 1:
        return []
    A = majorant(K, w0)
    R = np.linalg.cholesky(A).T
    bound = H * H / n2 - float(q_min)
    pts = _kernels.ellipsoid_points(R, bound * (1 + 1e-9) + 1e-9)
    out = []
    for y in np.asarray(pts, dtype=np.int64).reshape(-1, K.rank):
        h = int(y @ w0)
        if 0 < h <= H and K.q(y) >= q_min:
            out.append(tuple(int(a) for a in y))
    out.sort(key=lambda y: (int(np.dot(y, w0)), y))
    return out


# ---------------------------------------------------------------------------
# per-factor polynomials in the group ring Z[C_N]
# ---------------------------------------------------------------------------

def _binomial(c: int, t: int) -> int:
    """Generalized binomial coefficient binom(c, t) for integer c."""
    if c >= 0:
        return comb(c, t) if t <= c else 0
    return (-1) ** t * comb(-c + t - 1, t)


def factor_polynomial(exponents: list[int], degree: int) -> tuple[list[int] | None, list[float]]:
    """prod_j (1 - e(j/N) X)^{exponents[j]} mod X^(degree+1).

    Returns (integer coefficients, majorant) or (None, majorant) when the
    product is not rational, i.e. the representative rule is ambiguous.
    """
    N = len(exponents)
    acc = np.zeros((degree + 1, N), dtype=object)
    acc[0, 0] = 1
    maj = np.zeros(degree + 1)
    maj[0] = 1.0
    for j, c in enumerate(exponents):
        if c == 0:
            continue
        term = np.zeros((degree + 1, N), dtype=object)
        tm = np.zeros(degree + 1)
        for t in range(degree + 1):
            term[t, (j * t) % N] = (-1) ** t * _binomial(c, t)
            tm[t] = abs(_binomial(c, t))
        new = np.zeros_like(acc)
        for a in range(degree + 1):
            for b in range(degree + 1 - a):
                if term[b].any():
                    for k in range(N):
                        if acc[a, k]:
                            new[a + b] += np.roll(term[b], k) * acc[a, k]
        acc = new
        maj = np.convolve(maj, tm)[: degree + 1]
    out = []
    for t in range(degree + 1):
        row = acc[t]
        if N == 1:
            out.append(int(row[0]))
        elif N == 2:
            out.append(int(row[0] - row[1]))
        else:
            # N prime: sum a_k e(k/N) is rational iff a_1 = ... = a_{N-1}
            if any(row[k] != row[1] for k in range(2, N)):
                return None, list(maj)
            out.append(int(row[0] - row[1]))
    return out, list(maj)


# ---------------------------------------------------------------------------
# product assembly
# ---------------------------------------------------------------------------

def monoid_closure(gens: list[Vec], heights: list[int], H: int) -> list[Vec]:
    """All sums of generators (with repetition) of total height <= H, plus 0."""
    n = len(gens[0]) if gens else 0
    by_height: dict[int, set] = {0: {(0,) * n}}
    for t in range(1, H + 1):
        level = set()
        for g, h in zip(gens, heights):
            if h <= t:
                for s in by_height.get(t - h, ()):
                    level.add(tuple(a + b for a, b in zip(s, g)))
        if level:
            by_height[t] = level
    out = []
    for t in sorted(by_height):
        out.extend(sorted(by_height[t]))
    return out


_PRIMES = []


def _primes(k: int) -> list[int]:
    while len(_PRIMES) < k:
        _PRIMES.append(prevprime(_PRIMES[-1] if _PRIMES else 2**31))
    return _PRIMES[:k]


def expand_product(factors: list[tuple[Vec, list[int], list[float]]], w0, H: int) -> dict[Vec, int]:
    """prod_lambda P_lambda(e(lambda)) up to height H, exactly.

    ``factors`` holds (lambda, integer polynomial, majorant polynomial).
    """
    w0 = np.asarray(w0, dtype=np.int64)
    factors = [f for f in factors if len(f[1]) > 1 and any(f[1][1:])]
    if not factors:
        return {}
    gens = [f[0] for f in factors]
    hs = [int(np.dot(g, w0)) for g in gens]
    support = monoid_closure(gens, hs, H)
    Y = np.array(support, dtype=np.int64)
    lo = Y.min(axis=0)
    span = Y.max(axis=0) - lo + 1
    strides = np.cumprod(np.concatenate([[1], span[:-1]])).astype(np.int64)
    codes = (Y - lo) @ strides
    order = np.argsort(codes)
    sorted_codes = codes[order]
    S = len(support)

    def locate(Z):
        ok = np.all((Z >= lo) & (Z < lo + span), axis=1)
        c = (Z - lo) @ strides
        pos = np.searchsorted(sorted_codes, c)
        pos = np.clip(pos, 0, S - 1)
        hit = ok & (sorted_codes[pos] == c)
        return np.where(hit, order[pos], -1)

    shifts = []
    for (lam, poly, _), h in zip(factors, hs):
        deg = min(len(poly) - 1, H // h)
        sh = np.empty((deg + 1, S), dtype=np.int64)
        lam = np.asarray(lam, dtype=np.int64)
        for j in range(deg + 1):
            sh[j] = locate(Y - j * lam) if j else np.arange(S)
        shifts.append(sh)

    # magnitude bound from the majorant series
    m = np.zeros(S)
    m[0] = 1.0
    for (_, _, maj), sh in zip(factors, shifts):
        m = _kernels.apply_factor(m, sh, np.asarray(maj[: sh.shape[0]], dtype=float), 0)
    bound = float(np.max(m)) * 2 + 1
    k = 1
    while math.prod(_primes(k)) <= 2 * bound:
        k += 1
    residues = []
    for p in _primes(k):
        f = np.zeros(S, dtype=np.int64)
        f[0] = 1
        for (_, poly, _), sh in zip(factors, shifts):
            f = _kernels.apply_factor(f, sh, np.array([c % p for c in poly[: sh.shape[0]]], dtype=np.int64), p)
        residues.append(f)
    P = math.prod(_primes(k))
    out = {}
    for i in range(S):
        x = 0
        for p, r in zip(_primes(k), residues):
            Mp = P // p
            x += int(r[i]) * Mp * pow(Mp, -1, p)
        x %= P
        if x > P // 2:
            x -= P
        if x:
            out[support[i]] = x
    return out


@dataclass
class ProductExpansion:
    case: str
    w0: tuple
    H: int
    weyl_vector: Vec
    coefficients: dict  # lambda -> c(lambda), constant term included at lambda = weyl vector
    ambiguous: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "case": self.case,
            "w0": list(self.w0),
            "height": self.H,
            "weyl_vector": list(self.weyl_vector),
            "coefficients": [{"lambda": list(k), "c": v} for k, v in sorted(self.coefficients.items(), key=lambda t: (int(np.dot(t[0], self.w0)), t[0]))],
            "ambiguous": [list(v) for v in self.ambiguous],
        }


def _lift_for(cusp: CuspData, name: str, gamma: int, truncation) -> VVForm:
    case = CASES[name]
    sym = cusp.disc.form.symbol((2, cusp.K.rank))
    if format_genus_symbol(sym) != case.genus:
        raise AssertionError(f"L has genus {format_genus_symbol(sym)}, expected {case.genus}")
    return gamma1_lift(case.spec, case.level, gamma, cusp.disc.form, sym.r, truncation)


def _required_truncation(K: HyperbolicLattice, w0, H: int) -> Fraction:
    # reverse Cauchy-Schwarz on the positive cone: q(lambda) <= h^2 / (2 (w0, w0))
    n2 = int(np.asarray(w0) @ K.G @ np.asarray(w0))
    return Fraction(H * H, 2 * n2) + 1


def product_factors(K: HyperbolicLattice, cusp: CuspData, F: VVForm, slab: list[Vec], w0, Hmax: int):
    """(lambda, polynomial, majorant) for every slab vector with a nonzero factor."""
    N = cusp.N
    factors = []
    ambiguous = []
    for y in slab:
        q = K.q(y)
        exps = [F.coefficient(cusp.element(y, j), q) for j in range(N)]
        if not any(exps):
            continue
        h = K.height(y, w0)
        poly, maj = factor_polynomial(exps, Hmax // h)
        if poly is None:
            ambiguous.append(y)
            continue
        factors.append((y, poly, maj))
    return factors, ambiguous


def product_expansion_cone_case(name: str, H: int = 6, w0=None, F: VVForm | None = None) -> ProductExpansion:
    """The product at gamma = z/N - zeta/N, where the Weyl vector is 0."""
    K = hyperbolic_lattice(name)
    cusp = CuspData(K, K.level)
    if w0 is None:
        w0 = tuple(int(a) for a in K.x + K.xi)
    slab = enumerate_slab(K, w0, H, Fraction(0))
    if F is None:
        F = _lift_for(cusp, name, cusp.gamma_cone(), _required_truncation(K, w0, H))
    factors, ambiguous = product_factors(K, cusp, F, slab, w0, H)
    coeffs = expand_product(factors, w0, H)
    zero = (0,) * K.rank
    coeffs[zero] = coeffs.get(zero, 1)
    return ProductExpansion(name + "-cone", tuple(w0), H, zero, coeffs, ambiguous)


# eta quotients on isotropic rays, as q-series in e((mu, Z))
RAY_SERIES = {
    "level3": EtaQuotientSpec(9, {1: 3, 3: -1}),  # eta^3 / eta(3 tau)
    "level2": EtaQuotientSpec(4, {1: 8, 2: -4}),  # eta^8 / eta(2 tau)^4
}
ORBIT_SERIES = {
    "level3": EtaQuotientSpec(9, {9: 3, 3: -1}),  # eta(9 tau)^3 / eta(3 tau)
    "level2": EtaQuotientSpec(4, {4: 8, 2: -4}),  # eta(4 tau)^8 / eta(2 tau)^4
}


def verify_cone_case(P: ProductExpansion, name: str) -> dict:
    """Off-ray coefficients vanish; on a ray n mu the coefficient is [q^n] of the eta quotient."""
    K = hyperbolic_lattice(name)
    ray = eta_quotient(RAY_SERIES[name], P.H + 1)
    slab = enumerate_slab(K, P.w0, P.H, Fraction(0))
    bad = []
    on_ray = 0
    multiples = 0
    for y in slab:
        c = P.coefficients.get(y, 0)
        if K.q(y) == 0:
            n = reduce(gcd, (abs(a) for a in y), 0)
            want = ray.coefficient(n)
            on_ray += 1
            multiples = max(multiples, n)
        else:
            want = 0
        if c != want:
            bad.append({"lambda": list(y), "c": c, "want": want})
    extra = [y for y in P.coefficients if y not in set(slab) and any(y)]
    return {
        "case": P.case,
        "height": P.H,
        "checked": len(slab),
        "isotropic_checked": on_ray,
        "max_ray_multiple": multiples,
        "mismatches": bad[:20],
        "outside_slab": len(extra),
        "ambiguous": len(P.ambiguous),
        "passed": not bad and not extra and not P.ambiguous,
    }


# ---------------------------------------------------------------------------
# Weyl-chamber case
# ---------------------------------------------------------------------------

def reflect(K: HyperbolicLattice, alpha: Vec, u: Vec) -> Vec:
    """sigma_alpha(u) = u - (alpha, u)/q(alpha) alpha."""
    s = K.pair(alpha, u) / K.q(alpha)
    out = [Fraction(a) - s * b for a, b in zip(u, alpha)]
    if any(a.denominator != 1 for a in out):
        raise ArithmeticError("reflection leaves K'")
    return tuple(int(a) for a in out)


def reflection_matrix(K: HyperbolicLattice, alpha: Vec) -> np.ndarray:
    """Matrix of sigma_alpha on y-coordinates (columns are images of unit vectors)."""
    n = K.rank
    cols = [reflect(K, alpha, tuple(int(i == j) for i in range(n))) for j in range(n)]
    return np.array(cols, dtype=np.int64).T


def weyl_roots(K: HyperbolicLattice, gamma: Vec, w0, H: int) -> list[Vec]:
    """Positive roots of height <= H: alpha in K', q(alpha) = -1/N, alpha + K = +-p(gamma)."""
    N = K.level
    neg = tuple(-a for a in gamma)
    return [
        y for y in enumerate_slab(K, w0, H, Fraction(-1, N))
        if K.q(y) == Fraction(-1, N) and (K.same_class(y, gamma) or K.same_class(y, neg))
    ]


@dataclass
class OrbitData:
    points: dict  # orbit point -> det of a group element carrying rho to it
    roots: list
    complete: bool
    consistent: bool
    certificate: dict


def weyl_orbit(K: HyperbolicLattice, rho: Vec, roots: list[Vec], w0, H: int, cap: int = 200000) -> OrbitData:
    """All w(rho) of height <= H, by ascending reflections.

    Any orbit point u != rho of height <= H has a positive root alpha with
    (alpha, u) < 0; reflecting lowers the height by at least h(alpha), so
    alpha has height < H.  Hence ascending from rho through the roots of
    height <= H reaches every orbit point in the slab.
    """
    N = K.level
    points = {rho: 1}
    queue = deque([rho])
    consistent = True
    complete = True
    while queue:
        u = queue.popleft()
        for a in roots:
            s = K.pair(a, u)
            if s <= 0:
                continue
            step = N * s
            if step.denominator != 1:
                raise ArithmeticError("reflection leaves K'")
            v = tuple(x + int(step) * y for x, y in zip(u, a))
            if K.height(v, w0) > H:
                continue
            d = -points[u]
            if v in points:
                consistent &= points[v] == d
                continue
            points[v] = d
            queue.append(v)
            if len(points) > cap:
                complete = False
                queue.clear()
                break
    cert = {
        "height": H,
        "positive_roots": len(roots),
        "orbit_points": len(points),
        "complete": complete,
        "determinants_consistent": consistent,
    }
    return OrbitData(points, roots, complete, consistent, cert)


def weyl_vector_consistency(K: HyperbolicLattice, rho: Vec, w0, gamma: Vec, H: int = 12) -> bool:
    """q(rho) = 0, rho primitive in K', rho in the closure of the chamber of w0
    (checked against all positive roots of height <= H), (rho, gamma) = -1/N mod 1."""
    N = K.level
    if K.q(rho) != 0 or not K.is_primitive(rho) or K.height(rho, w0) <= 0:
        return False
    if any(K.pair(a, rho) < 0 for a in weyl_roots(K, gamma, w0, H)):
        return False
    return (K.pair(rho, gamma) + Fraction(1, N)).denominator == 1


def weyl_setup(name: str, w0=None):
    K = hyperbolic_lattice(name)
    cusp = CuspData(K, K.level)
    N = K.level
    if w0 is None:
        w0 = tuple(int(a) for a in 2 * K.x + K.xi)
    rho_v = [Fraction(0)] * K.rank
    rho_v[-2] = Fraction(1, N)
    rho = K.dual(rho_v)
    gamma = cusp.gamma_weyl()
    return K, cusp, tuple(w0), rho, gamma


def ray_identity(name: str, terms: int = 30, F: VVForm | None = None) -> dict:
    """Single-chamber identity on the rho-ray:
    e(rho) prod_m prod_j (1 - e(j/N) X^m)^{c(m rho + j z/N, 0)} = eta quotient in X = e(rho)."""
    K, cusp, w0, rho, gamma = weyl_setup(name)
    N = K.level
    if F is None:
        F = _lift_for(cusp, name, cusp.element(gamma), 2)
    pattern = []
    series = np.zeros(terms + 1, dtype=object)
    series[0] = 1
    for m in range(1, terms + 1):
        y = tuple(m * a for a in rho)
        exps = [F.coefficient(cusp.element(y, j), 0) for j in range(N)]
        pattern.append(exps)
        poly, _ = factor_polynomial(exps, terms // m)
        new = np.zeros_like(series)
        for t, c in enumerate(poly):
            if c:
                new[t * m:] += c * series[: terms + 1 - t * m]
        series = new
    want = eta_quotient(ORBIT_SERIES[name], terms + 1)
    got = {n + 1: int(series[n]) for n in range(terms)}  # shift by e(rho)
    mismatches = [n for n in got if got[n] != want.coefficient(n)]
    pattern_ok = all(all(e == _ray_exponent(name, m) for e in exps) for m, exps in enumerate(pattern, start=1))
    return {"terms": terms, "pattern": pattern[:9], "pattern_ok": pattern_ok, "mismatches": mismatches, "passed": not mismatches and pattern_ok}


def _ray_exponent(name: str, m: int) -> int:
    """c(m rho + j z/N, 0): 2 or -1 (level 3, by m mod 3), +-4 (level 2, by parity)."""
    if name == "level3":
        return 2 if m % 3 == 0 else -1
    return 4 if m % 2 == 0 else -4


def weyl_group_expansion(name: str, H: int = 8, w0=None, cap: int = 200000) -> dict:
    """Product side and antisymmetrized eta-quotient side on the slab of height <= H."""
    K, cusp, w0, rho, gamma = weyl_setup(name, w0)
    N = K.level
    h_rho = K.height(rho, w0)
    Hp = H - h_rho
    F = _lift_for(cusp, name, cusp.element(gamma), _required_truncation(K, w0, max(Hp, 1)))
    slab = enumerate_slab(K, w0, Hp, Fraction(-1, N))
    factors, ambiguous = product_factors(K, cusp, F, slab, w0, Hp)
    P = expand_product(factors, w0, Hp)
    zero = (0,) * K.rank
    P[zero] = P.get(zero, 1)
    product_side = {tuple(a + b for a, b in zip(k, rho)): v for k, v in P.items() if v}

    roots = weyl_roots(K, gamma, w0, H)
    orbit = weyl_orbit(K, rho, roots, w0, H, cap)
    eta = eta_quotient(ORBIT_SERIES[name], H + 1)
    sum_side: dict = {}
    for u, d in orbit.points.items():
        h = K.height(u, w0)
        for n in range(1, H // h + 1):
            c = eta.coefficient(n)
            if c:
                key = tuple(n * a for a in u)
                sum_side[key] = sum_side.get(key, 0) + d * c
    sum_side = {k: v for k, v in sum_side.items() if v}
    keys = set(product_side) | set(sum_side)
    mismatches = [
        {"lambda": list(k), "product": product_side.get(k, 0), "sum": sum_side.get(k, 0)}
        for k in sorted(keys, key=lambda k: (K.height(k, w0), k))
        if product_side.get(k, 0) != sum_side.get(k, 0)
    ]
    certified = orbit.complete and orbit.consistent
    rho_ok = weyl_vector_consistency(K, rho, w0, gamma, H)
    holds = certified and rho_ok and not mismatches and not ambiguous
    ray = ray_identity(name, F=None)
    return {
        "case": name + "-weyl",
        "w0": list(w0),
        "height": H,
        "weyl_vector": list(rho),
        "weyl_vector_ok": rho_ok,
        "coverage": orbit.certificate,
        "certified": certified,
        "product_side": product_side,
        "sum_side": sum_side,
        "mismatches": mismatches[:20],
        "identity_holds": holds,
        "ambiguous": [list(v) for v in ambiguous],
        "ray_identity": ray,
        "orbit": orbit,
        "passed": holds or (not certified and ray["passed"]),
    }
