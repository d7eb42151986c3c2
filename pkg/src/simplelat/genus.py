"""Genus symbols and discriminant forms of square-free level.

A discriminant form is modelled prime by prime.  The p-part is (Z/p)^n with
an integer matrix ``g`` (entries mod p) encoding

    Q(x)     = (sum_i g[i,i] x_i^2 + sum_{i<j} g[i,j] x_i x_j) / p   mod 1,
    (x, y)   = (sum_i 2 g[i,i] x_i y_i + sum_{i!=j} g[i,j] x_i y_j) / p  mod 1.

Sign convention for odd p^(eps n): eps is the Legendre symbol of the
determinant of the bilinear matrix (diagonal 2 g[i,i]).  For the diagonal
model Q = sum a_i x_i^2 / p this is eps = prod (2 a_i / p); with it A_2(-1)
has discriminant form 3^+1 and E_6(-1) has 3^-1.  For 2_II^(eps n), eps = -1
iff the number of norm-zero vectors is below 2^(n-1) (odd number of V blocks).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from math import prod
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from sympy import Matrix, isprime, primefactors

from . import _kernels
from .cyclotomic import Cyc


def kronecker(a: int, p: int) -> int:
    """Legendre symbol (a/p) for an odd prime p, and (a/2) Kronecker for p = 2."""
    if p == 2:
        if a % 2 == 0:
            return 0
        return 1 if a % 8 in (1, 7) else -1
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


@dataclass(frozen=True, order=True)
class JordanComponent:
    p: int
    rank: int
    sign: int

    def __post_init__(self):
        if not isprime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.rank < 1:
            raise ValueError("rank must be positive")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if self.p == 2 and self.rank % 2:
            raise ValueError("2-adic components of square-free level are even (2_II) with even rank")

    @property
    def order(self) -> int:
        return self.p**self.rank

    def signature_mod8(self) -> int:
        """Oddity/excess contribution: sum e(Q) = sqrt(|D_p|) e(sig/8)."""
        if self.p == 2:
            return 4 if self.sign == -1 else 0
        s = 4 if self.sign * kronecker(2, self.p) ** self.rank == -1 else 0
        if self.p % 4 == 3:
            s += 2 * self.rank
        return s % 8

    def gauss_unit(self, n: int) -> int:
        """u with G(n, D_p) = sqrt|D_p| sqrt|D_p^n| e(u/8); u mod 8."""
        if n % self.p == 0:
            return 0
        u = self.signature_mod8()
        if self.p != 2 and kronecker(n, self.p) ** self.rank == -1:
            u += 4
        return u % 8

    def scaled(self, a: int) -> "JordanComponent":
        """The component after multiplying the form by a unit a (coprime to p)."""
        if self.p == 2:
            return self
        return JordanComponent(self.p, self.rank, self.sign * kronecker(a, self.p) ** self.rank)

    def __str__(self):
        s = "+" if self.sign > 0 else "-"
        if self.p == 2:
            return f"2_II^{s}{self.rank}"
        return f"{self.p}^{s}{self.rank}"


class GenusSymbol(NamedTuple):
    signature: tuple[int, int]
    components: tuple[JordanComponent, ...]

    @property
    def form(self) -> "DiscriminantForm":
        return realize(self.components)

    @property
    def order(self) -> int:
        return prod(c.order for c in self.components)

    @property
    def level(self) -> int:
        return prod(c.p for c in self.components)

    @property
    def r(self) -> int:
        return self.signature[0] - self.signature[1]

    def rank_at(self, p: int) -> int:
        for c in self.components:
            if c.p == p:
                return c.rank
        return 0

    def __str__(self):
        return format_genus_symbol(self)


# ---------------------------------------------------------------------------
# grammar
# ---------------------------------------------------------------------------

_SYMBOL = re.compile(r"^\s*II_\(\s*(\d+)\s*,\s*(\d+)\s*\)\s*\((.*)\)\s*$")
_COMP = re.compile(r"^(?:(2)_II|(\d+))\^([+-])(\d+)$")


def parse_genus_symbol(text: str) -> GenusSymbol:
    """Parse ``II_(b+,b-)(comp comp ...)``, e.g. ``II_(2,4)(2_II^+2 3^+1)``."""
    text = text.replace("−", "-")
    m = _SYMBOL.match(text)
    if not m:
        raise ValueError(f"malformed genus symbol: {text!r}")
    bp, bm = int(m.group(1)), int(m.group(2))
    if (bp - bm) % 2:
        raise ValueError("signature difference must be even")
    comps = []
    for tok in m.group(3).split():
        c = _COMP.match(tok)
        if not c:
            if re.match(r"^2\^", tok) or re.match(r"^2_I\^", tok):
                raise ValueError(f"odd 2-adic component {tok!r} is outside square-free level scope")
            raise ValueError(f"malformed Jordan component {tok!r}")
        p = int(c.group(1) or c.group(2))
        if p == 2 and c.group(1) is None:
            raise ValueError(f"odd 2-adic component {tok!r} is outside square-free level scope")
        if c.group(2) is not None and int(c.group(2)) != 2 and "_II" in tok:
            raise ValueError(f"only p = 2 carries the _II marker: {tok!r}")
        comps.append(JordanComponent(p, int(c.group(4)), 1 if c.group(3) == "+" else -1))
    primes = [c.p for c in comps]
    if len(set(primes)) != len(primes):
        raise ValueError("repeated prime in genus symbol")
    if primes != sorted(primes):
        raise ValueError("Jordan components must be listed with ascending primes")
    return GenusSymbol((bp, bm), tuple(comps))


def format_genus_symbol(sym: GenusSymbol) -> str:
    bp, bm = sym.signature
    return f"II_({bp},{bm})(" + " ".join(str(c) for c in sym.components) + ")"


def symbol_signature_mod8(components: Iterable[JordanComponent]) -> int:
    return sum(c.signature_mod8() for c in components) % 8


def satisfies_milgram(sym: GenusSymbol) -> bool:
    return symbol_signature_mod8(sym.components) == sym.r % 8


def exists_even_lattice(sym: GenusSymbol) -> bool:
    """Existence of an even lattice with this signature and discriminant form.

    Conditions: rank(D_p) <= rank, the Milgram congruence, and, whenever some
    p-rank equals the lattice rank, the same conditions for the rescaled
    lattice L(1/p) whose discriminant form drops the p-part and multiplies
    the remaining form by p.
    """
    bp, bm = sym.signature
    rank = bp + bm
    if (bp - bm) % 2:
        return False
    if any(c.rank > rank for c in sym.components):
        return False
    if not satisfies_milgram(sym):
        return False
    for c in sym.components:
        if c.rank == rank:
            rest = tuple(d.scaled(c.p) for d in sym.components if d.p != c.p)
            if not exists_even_lattice(GenusSymbol(sym.signature, rest)):
                return False
    return True


# ---------------------------------------------------------------------------
# explicit model
# ---------------------------------------------------------------------------

def _block_partition(g: np.ndarray) -> list[list[int]]:
    n = g.shape[0]
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if g[i, j] or g[j, i]:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _det_mod_p(B: np.ndarray, p: int) -> int:
    A = [[int(x) % p for x in row] for row in B]
    n = len(A)
    det = 1
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c]), None)
        if piv is None:
            return 0
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            det = -det
        det = det * A[c][c] % p
        inv = pow(A[c][c], -1, p)
        for r in range(c + 1, n):
            f = A[r][c] * inv % p
            if f:
                A[r] = [(a - f * b) % p for a, b in zip(A[r], A[c])]
    return det % p


class DiscriminantForm:
    """Finite quadratic module of square-free level, stored prime by prime."""

    def __init__(self, grams: dict[int, np.ndarray]):
        self.grams = {int(p): np.asarray(g, dtype=np.int64) % p for p, g in sorted(grams.items()) if np.asarray(g).shape[0]}
        for p in self.grams:
            if not isprime(p):
                raise ValueError(f"{p} is not prime")
        self.primes = tuple(self.grams)
        self.ranks = tuple(self.grams[p].shape[0] for p in self.primes)
        self.order = prod(p**n for p, n in zip(self.primes, self.ranks))
        self.level = prod(self.primes)
        self.moduli = np.array([p for p, n in zip(self.primes, self.ranks) for _ in range(n)], dtype=np.int64)
        self.rank = int(self.moduli.shape[0])
        offs = np.cumsum((0,) + self.ranks)
        self._slices = {p: slice(int(offs[i]), int(offs[i + 1])) for i, p in enumerate(self.primes)}
        for p, g in self.grams.items():
            B = self._bilinear_matrix(p)
            if _det_mod_p(B, p) == 0:
                raise ValueError(f"degenerate form at p = {p}")

    # -- structure --------------------------------------------------------
    def _bilinear_matrix(self, p: int) -> np.ndarray:
        g = self.grams[p]
        B = np.triu(g, 1)
        B = B + B.T + 2 * np.diag(np.diag(g))
        return B % p

    @cached_property
    def components(self) -> tuple[JordanComponent, ...]:
        out = []
        for p, n in zip(self.primes, self.ranks):
            if p == 2:
                zeros = int(self.prime_distribution(2)[0])
                sign = 1 if zeros > 2 ** (n - 1) else -1
            else:
                sign = kronecker(_det_mod_p(self._bilinear_matrix(p), p), p)
            out.append(JordanComponent(p, n, sign))
        return tuple(out)

    def symbol(self, signature: tuple[int, int]) -> GenusSymbol:
        return GenusSymbol(tuple(signature), self.components)

    def signature_mod8(self) -> int:
        return symbol_signature_mod8(self.components)

    def __repr__(self):
        return "DiscriminantForm(" + " ".join(str(c) for c in self.components) + ")"

    # -- elements ---------------------------------------------------------
    def elements(self) -> np.ndarray:
        """All elements as coordinate rows; row i is the element with index i."""
        if self.rank == 0:
            return np.zeros((1, 0), dtype=np.int64)
        grids = np.indices(tuple(int(m) for m in self.moduli)).reshape(self.rank, -1).T
        return grids.astype(np.int64)

    def iter_element_chunks(self, chunk: int = 4096):
        """Splittable iteration over element rows in index order."""
        total = self.order
        for start in range(0, total, chunk):
            idx = np.arange(start, min(total, start + chunk))
            yield self.element(idx)

    def element(self, index) -> np.ndarray:
        if self.rank == 0:
            return np.zeros((np.size(index), 0) if np.ndim(index) else (0,), dtype=np.int64)
        out = np.unravel_index(index, tuple(int(m) for m in self.moduli))
        return np.stack(out, axis=-1).astype(np.int64)

    def index(self, x) -> np.ndarray | int:
        x = np.asarray(x, dtype=np.int64) % self.moduli if self.rank else np.asarray(x)
        if self.rank == 0:
            return 0 if x.ndim <= 1 else np.zeros(x.shape[0], dtype=np.int64)
        return np.ravel_multi_index(tuple(np.moveaxis(x, -1, 0)), tuple(int(m) for m in self.moduli))

    def zero(self) -> np.ndarray:
        return np.zeros(self.rank, dtype=np.int64)

    def neg(self, x) -> np.ndarray:
        return (-np.asarray(x)) % self.moduli

    def add(self, x, y) -> np.ndarray:
        return (np.asarray(x) + np.asarray(y)) % self.moduli

    # -- forms ------------------------------------------------------------
    def norm_numerators(self, X) -> np.ndarray:
        """N * Q(x) mod N for rows x of X (N = level)."""
        X = np.atleast_2d(np.asarray(X, dtype=np.int64))
        out = np.zeros(X.shape[0], dtype=np.int64)
        for p in self.primes:
            g = self.grams[p]
            Y = X[:, self._slices[p]] % p
            U = np.triu(g)
            val = np.einsum("ij,jk,ik->i", Y, U, Y) % p
            out = (out + val * (self.level // p)) % self.level
        return out

    def bilinear_numerators(self, X, Y) -> np.ndarray:
        """N * (x, y) mod N for all pairs (rows of X against rows of Y)."""
        X = np.atleast_2d(np.asarray(X, dtype=np.int64))
        Y = np.atleast_2d(np.asarray(Y, dtype=np.int64))
        out = np.zeros((X.shape[0], Y.shape[0]), dtype=np.int64)
        for p in self.primes:
            B = self._bilinear_matrix(p)
            sl = self._slices[p]
            val = (X[:, sl] % p) @ B @ (Y[:, sl] % p).T % p
            out = (out + val * (self.level // p)) % self.level
        return out

    def q_value(self, x) -> Fraction:
        return Fraction(int(self.norm_numerators(x)[0]), self.level)

    def bilinear(self, x, y) -> Fraction:
        return Fraction(int(self.bilinear_numerators(x, y)[0, 0]), self.level)

    # -- invariants -------------------------------------------------------
    def prime_distribution(self, p: int) -> np.ndarray:
        """counts[j] = #{x in D_p : Q(x) = j/p}, via block-wise enumeration."""
        g = self.grams[p]
        dist = np.zeros(p, dtype=np.int64)
        dist[0] = 1
        for block in _block_partition(g):
            sub = g[np.ix_(block, block)]
            k = len(block)
            pts = np.indices((p,) * k).reshape(k, -1).T
            vals = np.einsum("ij,jk,ik->i", pts, np.triu(sub), pts) % p
            bd = np.bincount(vals, minlength=p).astype(np.int64)
            dist = _kernels.cyclic_convolve(dist, bd)
        return dist

    def gauss_sum(self, n: int) -> Cyc:
        """G(n) = sum_gamma e(n Q(gamma)), multiplicative over primes."""
        out = Cyc.rational(1)
        for p in self.primes:
            dist = self.prime_distribution(p)
            counts = np.zeros(p, dtype=np.int64)
            np.add.at(counts, (n * np.arange(p)) % p, dist)
            out = out * Cyc.from_counts(p, counts)
        return out

    def gauss_sum_bruteforce(self, n: int) -> Cyc:
        N = self.level
        vals = self.norm_numerators(self.elements())
        counts = np.bincount((n * vals) % N, minlength=N)
        return Cyc.from_counts(N, counts)

    def norm_counts(self) -> np.ndarray:
        """counts[j] = #{gamma : Q(gamma) = j/N}, combining primes by CRT."""
        N = self.level
        J = np.arange(N)
        out = np.ones(N, dtype=object if self.order >= _kernels.INT64_LIMIT else np.int64)
        for p in self.primes:
            inv = pow(N // p, -1, p)
            dist = self.prime_distribution(p)
            out = out * dist[(J * inv) % p]
        return out

    def norm_counts_bruteforce(self) -> np.ndarray:
        return np.bincount(self.norm_numerators(self.elements()), minlength=self.level)

    def torsion_subgroup(self, m: int) -> "DiscriminantForm":
        """D^m = {gamma : m gamma = 0}; for square-free level the p-parts with p | m."""
        if m < 1:
            raise ValueError("m must be positive")
        return DiscriminantForm({p: g for p, g in self.grams.items() if m % p == 0})

    def two_torsion_mask(self) -> np.ndarray:
        """Boolean mask over element indices of gamma with gamma = -gamma."""
        X = self.elements()
        return np.all((2 * X) % self.moduli == 0, axis=1) if self.rank else np.ones(1, dtype=bool)


def realize(components: Sequence[JordanComponent]) -> DiscriminantForm:
    """Explicit model: diag(1,..,1,a)/p for odd p, U and V blocks for p = 2."""
    grams = {}
    seen = set()
    for c in components:
        if c.p in seen:
            raise ValueError("repeated prime")
        seen.add(c.p)
        if c.p == 2:
            k = c.rank // 2
            g = np.zeros((c.rank, c.rank), dtype=np.int64)
            for b in range(k):
                i = 2 * b
                g[i, i + 1] = 1
                if c.sign == -1 and b == k - 1:
                    g[i, i] = g[i + 1, i + 1] = 1
            grams[2] = g
        else:
            want = c.sign * kronecker(2, c.p) ** c.rank  # required (a/p)
            a = 1
            if want == -1:
                a = next(x for x in range(2, c.p) if kronecker(x, c.p) == -1)
            g = np.eye(c.rank, dtype=np.int64)
            g[-1, -1] = a
            grams[c.p] = g
    D = DiscriminantForm(grams)
    if tuple(sorted(components)) != tuple(sorted(D.components)):
        raise AssertionError("realized model does not reproduce the requested symbol")
    return D


# ---------------------------------------------------------------------------
# discriminant forms of explicit lattices
# ---------------------------------------------------------------------------

class LatticeDiscriminant:
    """D = L'/L for an even lattice with Gram matrix G, in the per-prime model.

    ``index_of_dual(y)`` maps a dual vector given by y = G x (x in L') to the
    element index of x + L in ``form``.
    """

    def __init__(self, gram):
        G = Matrix(gram)
        if G != G.T:
            raise ValueError("Gram matrix must be symmetric")
        if any(G[i, i] % 2 for i in range(G.shape[0])):
            raise ValueError("lattice must be even")
        self.gram = np.array(G.tolist(), dtype=np.int64)
        det = int(G.det())
        if det == 0:
            raise ValueError("degenerate lattice")
        self.det = abs(det)
        self.adj = np.array((G.inv() * det).tolist(), dtype=np.int64) * (1 if det > 0 else -1)
        n = G.shape[0]
        # rational vectors mod 1 are keyed by integer numerators over det
        gens = [tuple(self.adj[:, i] % self.det) for i in range(n)]
        seen = {tuple([0] * n)}
        frontier = [tuple([0] * n)]
        while frontier:
            nxt = []
            for v in frontier:
                for g in gens:
                    w = tuple((a + b) % self.det for a, b in zip(v, g))
                    if w not in seen:
                        seen.add(w)
                        nxt.append(w)
            frontier = nxt
        elems = sorted(seen)
        if len(elems) != self.det:
            raise AssertionError("dual quotient enumeration is incomplete")
        grams = {}
        bases = {}
        for p in sorted(_prime_factors(self.det)):
            part = [v for v in elems if all((p * a) % self.det == 0 for a in v)]
            span = {tuple([0] * n)}
            basis = []
            for v in part:
                if v in span:
                    continue
                basis.append(v)
                span = {tuple((sv[i] + k * v[i]) % self.det for i in range(n)) for sv in span for k in range(p)}
            m = len(basis)
            g = np.zeros((m, m), dtype=np.int64)
            for i in range(m):
                qi = Fraction(self._q_num(basis[i]) * p, 2 * self.det**2)
                if qi.denominator != 1:
                    raise ValueError("level is not square-free")
                g[i, i] = int(qi) % p
                for j in range(i + 1, m):
                    bij = Fraction(self._b_num(basis[i], basis[j]) * p, self.det**2)
                    if bij.denominator != 1:
                        raise ValueError("level is not square-free")
                    g[i, j] = int(bij) % p
            grams[p] = g
            bases[p] = basis
        self.form = DiscriminantForm(grams)
        # table: numerator key -> element index
        self._lookup = {}
        coords = self.form.elements()
        for row in coords:
            key = [0] * n
            for p in self.form.primes:
                sl = self.form._slices[p]
                for c, b in zip(row[sl], bases[p]):
                    key = [(key[i] + int(c) * b[i]) % self.det for i in range(n)]
            self._lookup[tuple(key)] = int(self.form.index(row))
        if len(self._lookup) != self.form.order:
            raise AssertionError("per-prime basis does not generate the discriminant group")

    def _q_num(self, v) -> int:
        x = np.array(v, dtype=object)
        return int(x @ self.gram.astype(object) @ x)

    def _b_num(self, v, w) -> int:
        return int(np.array(v, dtype=object) @ self.gram.astype(object) @ np.array(w, dtype=object))

    def key_of_dual(self, y) -> tuple[int, ...]:
        y = np.asarray(y, dtype=np.int64)
        return tuple(int(a) for a in (self.adj @ y) % self.det)

    def index_of_dual(self, y) -> int:
        """Element index of G^{-1} y + L."""
        return self._lookup[self.key_of_dual(y)]


def _prime_factors(n: int) -> list[int]:
    return primefactors(n)


# ---------------------------------------------------------------------------
# symbol-level invariants (no element enumeration)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _square_distribution(p: int, a: int) -> np.ndarray:
    """counts[j] = #{x in Z/p : a x^2 = j}."""
    x = np.arange(p, dtype=np.int64)
    return np.bincount((a * x * x) % p, minlength=p).astype(np.int64)


@lru_cache(maxsize=None)
def _convolution_power(p: int, a: int, n: int) -> np.ndarray:
    if n == 0:
        out = np.zeros(p, dtype=np.int64)
        out[0] = 1
        return out
    half = _convolution_power(p, a, n // 2)
    out = _kernels.cyclic_convolve(half, half)
    if n % 2:
        out = _kernels.cyclic_convolve(out, _square_distribution(p, a))
    return out


@lru_cache(maxsize=None)
def component_norm_distribution(c: JordanComponent) -> np.ndarray:
    """counts[j] = #{x : Q(x) = j/p} in the realized model of one component."""
    if c.p == 2:
        u = np.array([3, 1], dtype=np.int64)
        v = np.array([1, 3], dtype=np.int64)
        k = c.rank // 2
        out = np.array([1, 0], dtype=np.int64)
        for b in range(k):
            out = _kernels.cyclic_convolve(out, v if (c.sign == -1 and b == k - 1) else u)
        return out
    want = c.sign * kronecker(2, c.p) ** c.rank
    a = 1 if want == 1 else next(x for x in range(2, c.p) if kronecker(x, c.p) == -1)
    return _kernels.cyclic_convolve(_convolution_power(c.p, 1, c.rank - 1), _square_distribution(c.p, a))


def symbol_norm_counts(components: Sequence[JordanComponent]) -> np.ndarray:
    """counts[J] = #{gamma : Q(gamma) = J/N}, the CRT product of per-prime counts."""
    N = prod(c.p for c in components)
    J = np.arange(N)
    big = prod(c.order for c in components) >= _kernels.INT64_LIMIT
    out = np.ones(N, dtype=object if big else np.int64)
    for c in components:
        inv = pow(N // c.p, -1, c.p) if N > 1 else 0
        out = out * component_norm_distribution(c)[(J * inv) % c.p]
    return out
