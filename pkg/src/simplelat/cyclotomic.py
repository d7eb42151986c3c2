"""Exact arithmetic in cyclotomic fields Q(zeta_M).

Elements are stored in a canonical integral basis obtained from the tensor
decomposition Q(zeta_M) = (x) Q(zeta_q) over the prime powers q || M.  In each
factor the basis is zeta_q**j for 0 <= j < phi(q), and a group-ring vector is
reduced with the relation 1 + x**b + ... + x**((p-1)b) = 0, b = q/p.  The
canonical form makes equality a plain array comparison, and an element is
rational exactly when only the basis vector 1 carries weight.

Matrices over Q(zeta_M) (``CycMatrix``) keep the same basis as a leading axis
and multiply through a precomputed structure-constant table.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache, reduce
from math import gcd, isqrt, lcm, prod
from numbers import Integral, Rational

import numpy as np
from sympy import factorint, isprime, primitive_root

from ._kernels import INT64_LIMIT


def _max_abs(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    if a.dtype == object:
        return max(abs(int(v)) for v in a.flat)
    return int(np.abs(a).max())


def _shrink(a: np.ndarray) -> np.ndarray:
    """Return an int64 copy when the entries are small enough, else object."""
    if a.dtype == object:
        if _max_abs(a) < INT64_LIMIT:
            return a.astype(np.int64)
        return a
    return a


def _widen(a: np.ndarray) -> np.ndarray:
    return a.astype(object) if a.dtype != object else a


def _gcd_all(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    if a.dtype == object:
        return reduce(gcd, (int(v) for v in a.flat), 0)
    return int(np.gcd.reduce(np.abs(a).ravel()))


class CyclotomicField:
    """Bookkeeping for Q(zeta_M): canonical basis exponents and reduction."""

    def __init__(self, M: int):
        if M < 1:
            raise ValueError("conductor must be positive")
        self.M = M
        self.parts = [(p, a, p**a) for p, a in sorted(factorint(M).items())]
        self.full_shape = tuple(q for _, _, q in self.parts) or (1,)
        self.red_shape = tuple((p - 1) * p ** (a - 1) for p, a, _ in self.parts) or (1,)
        self.phi = prod(self.red_shape)
        e = np.arange(M)
        if self.parts:
            self._pos = np.ravel_multi_index(tuple(e % q for q in self.full_shape), self.full_shape)
        else:
            self._pos = np.zeros(1, dtype=np.int64)
        idem = []
        for _, _, q in self.parts:
            co = M // q
            idem.append(co * pow(co, -1, q) % M if q > 1 else 0)
        grids = np.indices(self.red_shape).reshape(len(self.red_shape), -1)
        exps = np.zeros(self.phi, dtype=np.int64)
        for i, eps in enumerate(idem):
            exps = exps + eps * grids[i]
        self.basis_exps = exps % M
        self._table = None

    def __repr__(self):
        return f"CyclotomicField({self.M})"

    def reduce(self, v: np.ndarray) -> np.ndarray:
        """Canonical coordinates of sum_e v[e] zeta**e.

        ``v`` has shape (M, ...); trailing axes are carried along.
        """
        v = np.asarray(v)
        if v.dtype != object and _max_abs(v) * 2 ** len(self.parts) >= INT64_LIMIT:
            v = _widen(v)
        rest = v.shape[1:]
        W = np.zeros((int(np.prod(self.full_shape)),) + rest, dtype=v.dtype)
        W[self._pos] = v
        W = W.reshape(self.full_shape + rest)
        for axis, (p, a, q) in enumerate(self.parts):
            b = q // p
            ph = q - b
            low = np.take(W, np.arange(ph), axis=axis)
            top = np.take(W, np.arange(ph, q), axis=axis)
            W = low - np.concatenate([top] * (p - 1), axis=axis)
        return W.reshape((self.phi,) + rest)

    def table(self) -> np.ndarray:
        """Structure constants T[i, j, k]: b_i * b_j = sum_k T[i,j,k] b_k."""
        if self._table is None:
            phi, M = self.phi, self.M
            T = np.zeros((phi, phi, phi), dtype=np.int64)
            e = self.basis_exps
            for i in range(phi):
                v = np.zeros((M, phi), dtype=np.int64)
                v[(e[i] + e) % M, np.arange(phi)] = 1
                T[i] = self.reduce(v).T
            self._table = T
        return self._table


@lru_cache(maxsize=None)
def field(M: int) -> CyclotomicField:
    return CyclotomicField(M)


def _lift_coords(num: np.ndarray, src: CyclotomicField, dst: CyclotomicField) -> np.ndarray:
    if src.M == dst.M:
        return num
    scale = dst.M // src.M
    v = np.zeros(dst.M, dtype=num.dtype)
    nz = np.nonzero(num)[0]
    np.add.at(v, (src.basis_exps[nz] * scale) % dst.M, num[nz])
    return dst.reduce(v)


class Cyc:
    """An element num/den of Q(zeta_M) in canonical coordinates."""

    __slots__ = ("F", "num", "den")

    def __init__(self, F: CyclotomicField, num: np.ndarray, den: int = 1, *, _normal=False):
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        self.F = F
        if _normal:
            self.num, self.den = num, den
            return
        num = _shrink(np.asarray(num))
        if den < 0:
            num, den = -num, -den
        g = gcd(_gcd_all(num), den)
        if g > 1:
            num = num // g
            den //= g
        if not np.any(num):
            den = 1
        self.num, self.den = num, int(den)

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, M: int = 1) -> "Cyc":
        F = field(M)
        return cls(F, np.zeros(F.phi, dtype=np.int64), 1, _normal=True)

    @classmethod
    def rational(cls, x, M: int = 1) -> "Cyc":
        x = Fraction(x)
        F = field(M)
        num = np.zeros(F.phi, dtype=object if abs(x.numerator) >= INT64_LIMIT else np.int64)
        num[0] = x.numerator
        return cls(F, num, x.denominator)

    @classmethod
    def from_counts(cls, M: int, counts, den: int = 1) -> "Cyc":
        """sum_e counts[e] * zeta_M**e / den."""
        F = field(M)
        return cls(F, F.reduce(np.asarray(counts)), den)

    @classmethod
    def root(cls, x) -> "Cyc":
        """e(x) = exp(2 pi i x) for rational x."""
        x = Fraction(x)
        M = x.denominator
        v = np.zeros(M, dtype=np.int64)
        v[x.numerator % M] = 1
        return cls.from_counts(M, v)

    @classmethod
    def sqrt(cls, n: int) -> "Cyc":
        """The positive square root of a non-negative integer."""
        if n < 0:
            raise ValueError("negative radicand")
        if n == 0:
            return cls.zero()
        out = cls.rational(1)
        for p, a in factorint(n).items():
            out = out * cls.rational(p ** (a // 2))
            if a % 2:
                out = out * _sqrt_prime(p)
        return out

    # -- basic protocol ---------------------------------------------------
    @property
    def M(self) -> int:
        return self.F.M

    def lift(self, M: int) -> "Cyc":
        if M == self.F.M:
            return self
        if M % self.F.M:
            raise ValueError(f"Q(zeta_{self.F.M}) is not contained in Q(zeta_{M})")
        dst = field(M)
        return Cyc(dst, _lift_coords(self.num, self.F, dst), self.den)

    def _common(self, other):
        if not isinstance(other, Cyc):
            other = Cyc.rational(other)
        M = lcm(self.F.M, other.F.M)
        return self.lift(M), other.lift(M)

    def __add__(self, other):
        if not isinstance(other, (Cyc, Integral, Rational)):
            return NotImplemented
        a, b = self._common(other)
        den = lcm(a.den, b.den)
        na, nb = a.num, b.num
        if max(_max_abs(na) * (den // a.den), _max_abs(nb) * (den // b.den)) * 2 >= INT64_LIMIT:
            na, nb = _widen(na), _widen(nb)
        return Cyc(a.F, na * (den // a.den) + nb * (den // b.den), den)

    __radd__ = __add__

    def __neg__(self):
        return Cyc(self.F, -self.num, self.den, _normal=True)

    def __sub__(self, other):
        if not isinstance(other, (Cyc, Integral, Rational)):
            return NotImplemented
        return self + (-other if isinstance(other, Cyc) else -Fraction(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (Integral, Rational)) and not isinstance(other, Cyc):
            x = Fraction(other)
            num = self.num
            if _max_abs(num) * abs(x.numerator) >= INT64_LIMIT:
                num = _widen(num)
            return Cyc(self.F, num * x.numerator, self.den * x.denominator)
        if not isinstance(other, Cyc):
            return NotImplemented
        a, b = self._common(other)
        M = a.F.M
        ia = np.nonzero(a.num)[0]
        ib = np.nonzero(b.num)[0]
        if ia.size == 0 or ib.size == 0:
            return Cyc.zero(M)
        va, vb = a.num[ia], b.num[ib]
        bound = _max_abs(va) * _max_abs(vb) * min(ia.size, ib.size) * 2 ** (len(a.F.parts) + 1)
        if bound >= INT64_LIMIT:
            va, vb = _widen(va), _widen(vb)
        ea, eb = a.F.basis_exps[ia], a.F.basis_exps[ib]
        acc = np.zeros(M, dtype=va.dtype)
        if ia.size * ib.size <= 4 * M or M <= 64:
            np.add.at(acc, ((ea[:, None] + eb[None, :]) % M).ravel(), (va[:, None] * vb[None, :]).ravel())
        else:
            da = np.zeros(M, dtype=va.dtype)
            db = np.zeros(M, dtype=vb.dtype)
            da[ea], db[eb] = va, vb
            full = np.convolve(da, db)
            acc = full[:M].copy()
            acc[: full.shape[0] - M] += full[M:]
        return Cyc(a.F, a.F.reduce(acc), a.den * b.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (Integral, Rational)) and not isinstance(other, Cyc):
            x = Fraction(other)
            if x == 0:
                raise ZeroDivisionError("division by zero")
            return self * Fraction(x.denominator, x.numerator)
        if isinstance(other, Cyc):
            return self * other.inverse()
        return NotImplemented

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = Cyc.rational(1, self.F.M)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (Integral, Rational)) and not isinstance(other, Cyc):
            other = Cyc.rational(other)
        if not isinstance(other, Cyc):
            return NotImplemented
        a, b = self._common(other)
        return a.den == b.den and np.array_equal(np.asarray(a.num, dtype=object), np.asarray(b.num, dtype=object))

    def __hash__(self):
        # hash through the smallest field containing the element is not
        # tracked, so only rational elements hash consistently across fields
        if self.is_rational():
            return hash(self.to_fraction())
        return hash((self.F.M, self.den, tuple(int(v) for v in self.num)))

    def __bool__(self):
        return bool(np.any(self.num))

    def is_zero(self) -> bool:
        return not np.any(self.num)

    def is_rational(self) -> bool:
        return not np.any(self.num[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element is not rational")
        return Fraction(int(self.num[0]), self.den)

    def is_integer(self) -> bool:
        return self.is_rational() and self.den == 1

    def conj(self) -> "Cyc":
        F = self.F
        v = np.zeros(F.M, dtype=self.num.dtype)
        nz = np.nonzero(self.num)[0]
        np.add.at(v, (-F.basis_exps[nz]) % F.M, self.num[nz])
        return Cyc(F, F.reduce(v), self.den)

    def real(self) -> "Cyc":
        return (self + self.conj()) * Fraction(1, 2)

    def imag(self) -> "Cyc":
        """(x - conj x) / (2i), an element of the real subfield."""
        return (self - self.conj()) * Cyc.root(Fraction(-1, 4)) * Fraction(1, 2)

    def galois(self, t: int) -> "Cyc":
        """The automorphism zeta -> zeta**t (t coprime to M)."""
        F = self.F
        if gcd(t, F.M) != 1:
            raise ValueError("exponent not coprime to the conductor")
        v = np.zeros(F.M, dtype=self.num.dtype)
        nz = np.nonzero(self.num)[0]
        np.add.at(v, (t * F.basis_exps[nz]) % F.M, self.num[nz])
        return Cyc(F, F.reduce(v), self.den)

    def inverse(self) -> "Cyc":
        """Exact inverse, recovered from its values at the roots of unity mod many primes."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        if self.is_rational():
            return Cyc.rational(1 / self.to_fraction(), self.F.M)
        F = self.F
        M = F.M
        prim = np.array([k for k in range(M) if gcd(k, M) == 1], dtype=np.int64)
        nz = np.nonzero(self.num)[0]
        terms = [(int(F.basis_exps[i]), int(self.num[i])) for i in nz]
        # N(a) / a is integral, so the CRT recovers (norm, norm / a) as integers
        c_acc, n_acc, Q = None, 0, 1
        prev = None
        for p, w in _inverse_primes(M):
            pw = np.array([pow(w, j, p) for j in range(M)], dtype=np.int64)
            vals = np.zeros(len(prim), dtype=np.int64)
            for e, c in terms:
                vals = (vals + (c % p) * pw[(prim * e) % M]) % p
            if not vals.all():
                continue  # a vanishes at a root mod p
            norm = reduce(lambda x, y: x * y % p, vals.tolist(), 1)
            inv = np.array([norm * pow(int(v), -1, p) % p for v in vals], dtype=np.int64)
            v = np.zeros(M, dtype=np.int64)
            for k, y in zip(prim.tolist(), inv.tolist()):
                v = (v + y * pw[(-k * np.arange(M)) % M]) % p
            # any polynomial with the right values at primitive roots reduces to the same element
            r = F.reduce(v * pow(M, -1, p) % p) % p
            if c_acc is None:
                c_acc, n_acc = r.astype(object), norm
            else:
                qi = pow(Q, -1, p)
                c_acc = c_acc + Q * ((r.astype(object) - c_acc) % p * qi % p)
                n_acc = n_acc + Q * ((norm - n_acc) * qi % p)
            Q *= p
            half = Q // 2
            lift = (np.where(c_acc > half, c_acc - Q, c_acc), n_acc - Q if n_acc > half else n_acc)
            if prev is not None and lift[1] == prev[1] and (lift[0] == prev[0]).all() and lift[1] != 0:
                out = Cyc(F, lift[0], lift[1]) * self.den
                if out * self == Cyc.rational(1, M):
                    return out
            prev = lift
        raise ArithmeticError(f"inverse not recovered in Q(zeta_{M})")

    def to_complex(self) -> complex:
        ang = 2j * np.pi * self.F.basis_exps / self.F.M
        vals = np.asarray(self.num, dtype=float)
        return complex(np.sum(vals * np.exp(ang)) / self.den)

    def to_mpc(self, dps: int = 30):
        import mpmath

        with mpmath.workdps(dps):
            acc = mpmath.mpc(0)
            for i in np.nonzero(self.num)[0]:
                acc += int(self.num[i]) * mpmath.expjpi(2 * mpmath.mpf(int(self.F.basis_exps[i])) / self.F.M)
            return acc / self.den

    def __repr__(self):
        if self.is_rational():
            return f"Cyc({self.to_fraction()})"
        terms = []
        for i in np.nonzero(self.num)[0]:
            terms.append(f"{int(self.num[i])}*z{self.F.M}^{int(self.F.basis_exps[i])}")
        body = " + ".join(terms)
        return f"Cyc(({body})/{self.den})" if self.den != 1 else f"Cyc({body})"


@lru_cache(maxsize=None)
def _sqrt_prime(p: int) -> Cyc:
    if p == 2:
        return Cyc.root(Fraction(1, 8)) + Cyc.root(Fraction(-1, 8))
    v = np.zeros(p, dtype=np.int64)
    for x in range(p):
        v[x * x % p] += 1
    g = Cyc.from_counts(p, v)
    if p % 4 == 1:
        return g
    return g * Cyc.root(Fraction(-1, 4))


def as_cyc(x) -> Cyc:
    return x if isinstance(x, Cyc) else Cyc.rational(x)


def isqrt_exact(n: int) -> int | None:
    r = isqrt(n)
    return r if r * r == n else None


class CycMatrix:
    """Dense matrix over Q(zeta_M): integer tensor (phi, rows, cols) over den."""

    __slots__ = ("F", "data", "den")

    def __init__(self, F: CyclotomicField, data: np.ndarray, den: int = 1, *, _normal=False):
        self.F = F
        if _normal:
            self.data, self.den = data, den
            return
        data = _shrink(np.asarray(data))
        g = gcd(_gcd_all(data), den)
        if g > 1:
            data = data // g
            den //= g
        if not np.any(data):
            den = 1
        self.data, self.den = data, int(den)

    @property
    def shape(self):
        return self.data.shape[1:]

    @classmethod
    def from_exponents(cls, M: int, exps: np.ndarray, scale: Cyc | None = None, mask=None) -> "CycMatrix":
        """Matrix with entries scale * zeta_M**exps[i, j] (zero where mask is False)."""
        F = field(M)
        exps = np.asarray(exps) % M
        rows, cols = exps.shape
        # canonical coordinates of every power of zeta_M
        powers = F.reduce(np.eye(M, dtype=np.int64)).T
        data = powers[exps].transpose(2, 0, 1).copy()
        if mask is not None:
            data[:, ~np.asarray(mask)] = 0
        out = cls(F, data, 1)
        if scale is not None:
            out = out.scale(scale)
        return out

    @classmethod
    def identity(cls, n: int, M: int = 1) -> "CycMatrix":
        F = field(M)
        data = np.zeros((F.phi, n, n), dtype=np.int64)
        data[0] = np.eye(n, dtype=np.int64)
        return cls(F, data, 1, _normal=True)

    @classmethod
    def from_entries(cls, rows) -> "CycMatrix":
        rows = [[as_cyc(x) for x in row] for row in rows]
        M = reduce(lcm, (x.F.M for row in rows for x in row), 1)
        F = field(M)
        n, m = len(rows), len(rows[0]) if rows else 0
        den = reduce(lcm, (x.den for row in rows for x in row), 1)
        data = np.zeros((F.phi, n, m), dtype=object)
        for i, row in enumerate(rows):
            for j, x in enumerate(row):
                y = x.lift(M)
                data[:, i, j] = np.asarray(y.num, dtype=object) * (den // y.den)
        return cls(F, data, den)

    def lift(self, M: int) -> "CycMatrix":
        if M == self.F.M:
            return self
        dst = field(M)
        phi, rows, cols = self.data.shape
        flat = self.data.reshape(phi, -1)
        v = np.zeros((M, flat.shape[1]), dtype=flat.dtype)
        np.add.at(v, (self.F.basis_exps * (M // self.F.M)) % M, flat)
        red = dst.reduce(v)
        return CycMatrix(dst, red.reshape(dst.phi, rows, cols), self.den)

    def entry(self, i: int, j: int) -> Cyc:
        return Cyc(self.F, self.data[:, i, j].copy(), self.den)

    def scale(self, c) -> "CycMatrix":
        c = as_cyc(c)
        M = lcm(self.F.M, c.F.M)
        A = self.lift(M)
        c = c.lift(M)
        F = A.F
        phi, rows, cols = A.data.shape
        flat = A.data.reshape(phi, -1)
        nz = np.nonzero(c.num)[0]
        if _max_abs(flat) * max(_max_abs(c.num), 1) * len(nz) >= INT64_LIMIT:
            flat = _widen(flat)
        # multiply in Z[x]/(x^M - 1): shift by each basis exponent of c, then reduce
        v = np.zeros((M, flat.shape[1]), dtype=flat.dtype)
        for i in nz:
            v[(F.basis_exps + F.basis_exps[i]) % M] += flat * int(c.num[i])
        return CycMatrix(F, F.reduce(v).reshape(phi, rows, cols), A.den * c.den)

    def __matmul__(self, other: "CycMatrix") -> "CycMatrix":
        M = lcm(self.F.M, other.F.M)
        A, B = self.lift(M), other.lift(M)
        if A.F.phi >= _MODULAR_MIN_PHI:
            out = _matmul_modular(A, B)
            if out is not None:
                return out
        return _matmul_table(A, B)

    def __add__(self, other: "CycMatrix") -> "CycMatrix":
        M = lcm(self.F.M, other.F.M)
        A, B = self.lift(M), other.lift(M)
        den = lcm(A.den, B.den)
        da, db = A.data, B.data
        if max(_max_abs(da) * (den // A.den), _max_abs(db) * (den // B.den)) * 2 >= INT64_LIMIT:
            da, db = _widen(da), _widen(db)
        return CycMatrix(A.F, da * (den // A.den) + db * (den // B.den), den)

    def __neg__(self):
        return CycMatrix(self.F, -self.data, self.den, _normal=True)

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, CycMatrix):
            return NotImplemented
        if self.shape != other.shape:
            return False
        M = lcm(self.F.M, other.F.M)
        A, B = self.lift(M), other.lift(M)
        return A.den == B.den and np.array_equal(np.asarray(A.data, dtype=object), np.asarray(B.data, dtype=object))

    def __pow__(self, e: int) -> "CycMatrix":
        if e < 0:
            raise ValueError("negative matrix powers are not supported")
        out = CycMatrix.identity(self.shape[0], self.F.M)
        base = self
        while e:
            if e & 1:
                out = out @ base
            e >>= 1
            if e:
                base = base @ base
        return out

    def conj_transpose(self) -> "CycMatrix":
        F = self.F
        phi, rows, cols = self.data.shape
        flat = self.data.transpose(0, 2, 1).reshape(phi, -1)
        v = np.zeros((F.M, flat.shape[1]), dtype=flat.dtype)
        np.add.at(v, (-F.basis_exps) % F.M, flat)
        return CycMatrix(F, F.reduce(v).reshape(phi, cols, rows), self.den)

    def trace(self) -> Cyc:
        return Cyc(self.F, np.trace(self.data, axis1=1, axis2=2), self.den)

    def is_identity(self) -> bool:
        n, m = self.shape
        return n == m and self == CycMatrix.identity(n)

    def to_complex(self) -> np.ndarray:
        ang = np.exp(2j * np.pi * self.F.basis_exps / self.F.M)
        return np.tensordot(ang, self.data.astype(float), axes=([0], [0])) / self.den


def _matmul_table(A: CycMatrix, B: CycMatrix) -> CycMatrix:
    """Product through the structure constants: phi^2 integer matrix products."""
    F = A.F
    T = F.table()
    phi = F.phi
    n = A.shape[1]
    ba, bb = _max_abs(A.data), _max_abs(B.data)
    inner = ba * bb * max(n, 1)
    total = inner * phi * phi * max(_max_abs(T), 1)
    rows, cols = A.shape[0], B.shape[1]
    if inner < 2**53:
        prods = np.matmul(A.data.astype(np.float64)[:, None], B.data.astype(np.float64)[None, :])
        prods = np.rint(prods).astype(np.int64) if total < INT64_LIMIT else np.rint(prods).astype(np.int64).astype(object)
    elif inner < INT64_LIMIT:
        prods = np.matmul(A.data.astype(np.int64)[:, None], B.data.astype(np.int64)[None, :])
        if total >= INT64_LIMIT:
            prods = prods.astype(object)
    else:
        prods = np.matmul(_widen(A.data)[:, None], _widen(B.data)[None, :])
    Tt = T if prods.dtype != object else T.astype(object)
    out = np.tensordot(Tt, prods.reshape(phi, phi, -1), axes=([0, 1], [0, 1]))
    return CycMatrix(F, out.reshape(phi, rows, cols), A.den * B.den)


# ---------------------------------------------------------------------------
# multi-modular matrix product for large fields
# ---------------------------------------------------------------------------

_MODULAR_MIN_PHI = 16
_NTT_BITS = 20  # p < 2**20: every dot product of residues stays below 2**53 for sizes < 2048
_MAX_SIZE = 2048


@lru_cache(maxsize=None)
def _ntt_primes(M: int) -> tuple[tuple[int, int], ...]:
    """Three primes p = 1 mod M below 2**20, each with a primitive M-th root of unity."""
    out = []
    t = ((1 << _NTT_BITS) - 1) // M
    while len(out) < 3 and t > 0:
        p = t * M + 1
        if isprime(p):
            g = primitive_root(p)
            out.append((p, pow(g, (p - 1) // M, p)))
        t -= 1
    return tuple(out)


def _inverse_primes(M: int):
    """Primes p = 1 mod M below 2**31, descending, with a primitive M-th root of unity mod p."""
    t = ((1 << 31) - 1) // M
    while t > 0:
        p = t * M + 1
        if isprime(p):
            yield p, pow(primitive_root(p), (p - 1) // M, p)
        t -= 1


def _exact_matmul_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """(a @ b) mod p for residues below 2**20 and inner size below 2048, via float64."""
    return np.rint(np.matmul(a.astype(np.float64), b.astype(np.float64))).astype(np.int64) % p


def _matmul_modular(A: CycMatrix, B: CycMatrix) -> CycMatrix | None:
    """Exact product via evaluation at the M-th roots of unity mod small primes.

    Entries are lifted to Z[x]/(x^M - 1) through the basis exponents, the
    product is computed pointwise at the M roots of unity mod p = 1 mod M,
    interpolated, and recovered by CRT before reducing mod Phi_M.  Returns
    None when the sizes or the coefficient bound are out of range.
    """
    F = A.F
    M, phi = F.M, F.phi
    rows, n = A.shape
    cols = B.shape[1]
    if max(M, n) >= _MAX_SIZE:
        return None
    bound = 2 * _max_abs(A.data) * _max_abs(B.data) * n * phi + 1
    primes = []
    P = 1
    for p, w in _ntt_primes(M):
        if P > bound:
            break
        primes.append((p, w))
        P *= p
    if P <= bound:
        return None
    k = np.arange(M)
    da = np.asarray(A.data, dtype=object).reshape(phi, -1)
    db = np.asarray(B.data, dtype=object).reshape(phi, -1)
    x = None
    Q = 1
    for p, w in primes:
        pw = np.array([pow(w, int(j), p) for j in range(M)], dtype=np.int64)
        V = pw[np.outer(k, F.basis_exps) % M]  # (M, phi): the basis at the M points
        Vinv = pw[(-np.outer(k, k)) % M]  # inverse transform, up to the factor 1/M
        a = _exact_matmul_mod(V, (da % p).astype(np.int64), p)
        b = _exact_matmul_mod(V, (db % p).astype(np.int64), p)
        c = _exact_matmul_mod(a.reshape(M, rows, n), b.reshape(M, n, cols), p)
        r = _exact_matmul_mod(Vinv, c.reshape(M, -1), p) * pow(M, -1, p) % p
        # Garner step: x += Q * ((r - x) / Q mod p), all below 2**62
        if x is None:
            x = r
        else:
            t = ((r - x % p) % p) * pow(Q % p, -1, p) % p
            x = x + Q * t
        Q *= p
    x = np.where(x > Q // 2, x - Q, x)
    return CycMatrix(F, F.reduce(x).reshape(phi, rows, cols), A.den * B.den)
