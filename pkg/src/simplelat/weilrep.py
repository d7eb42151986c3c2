"""Weil representation of SL2(Z) on C[D] and eigenvalue-based alpha invariants.

Conventions (for the representation attached to a lattice of signature
difference r):

    rho(T) e_g = e(Q(g)) e_g,
    rho(S) e_g = e(-r/8) / sqrt|D| * sum_b e(-(b, g)) e_b.

The dual representation is the complex conjugate.  Matrices are dense
``CycMatrix`` objects; rows and columns are indexed by element indices of D.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

import numpy as np

from .cyclotomic import Cyc, CycMatrix
from .genus import DiscriminantForm


def sl2_word(M) -> tuple[int, list[tuple[str, int]]]:
    """Write M in SL2(Z) as sign * product of ('T', n) and ('S', 1) factors.

    Returns (sign, word) with M = sign * W_1 W_2 ... W_k.
    """
    (a, b), (c, d) = ((int(M[0][0]), int(M[0][1])), (int(M[1][0]), int(M[1][1])))
    if a * d - b * c != 1:
        raise ValueError("matrix is not in SL2(Z)")
    word: list[tuple[str, int]] = []
    while c != 0:
        q = a // c
        if q:
            word.append(("T", q))
        # M = T^q S M'  with  M' = S^{-1} T^{-q} M
        a, b = a - q * c, b - q * d
        a, b, c, d = c, d, -a, -b
        word.append(("S", 1))
    # now M = [[a, b], [0, a]] with a = +-1
    sign = a
    n = a * b
    if n:
        word.append(("T", n))
    return sign, word


def word_matrix(sign: int, word: Sequence[tuple[str, int]]) -> np.ndarray:
    out = np.array([[sign, 0], [0, sign]], dtype=object)
    for g, n in word:
        if g == "T":
            out = out @ np.array([[1, n], [0, 1]], dtype=object)
        else:
            out = out @ np.array([[0, -1], [1, 0]], dtype=object)
    return out


def parse_word(text: str) -> list[tuple[str, int]]:
    """Words like ``"STS"`` or ``"S T^-1 S^-1"``; empty text is the identity."""
    out = []
    toks = text.replace(" ", "")
    i = 0
    while i < len(toks):
        g = toks[i]
        if g not in "ST":
            raise ValueError(f"unknown generator {g!r}")
        i += 1
        n = 1
        if i < len(toks) and toks[i] == "^":
            j = i + 1
            if j < len(toks) and toks[j] in "+-":
                j += 1
            while j < len(toks) and toks[j].isdigit():
                j += 1
            n = int(toks[i + 1 : j])
            i = j
        if g == "S":
            n %= 4
            out.extend([("S", 1)] * n)
        else:
            out.append(("T", n))
    return out


class WeilRep:
    """rho_L (or its dual) for a discriminant form and signature difference r."""

    def __init__(self, D: DiscriminantForm, r: int, dual: bool = False):
        if r % 2:
            raise ValueError("signature difference must be even")
        self.D = D
        self.r = r % 8
        self.dual = dual
        self.N = D.level
        self.M = lcm(8, self.N)
        X = D.elements()
        self.norms = D.norm_numerators(X)  # N * Q mod N
        self.E = D.bilinear_numerators(X, X)  # N * (b, g) mod N
        self.neg = D.index(D.neg(X))
        self._S = None
        self._T = None

    @property
    def size(self) -> int:
        return self.D.order

    def _sign(self) -> int:
        return -1 if self.dual else 1

    def inv_sqrt_order(self) -> Cyc:
        return Cyc.sqrt(self.size) / self.size

    def rho_T(self) -> CycMatrix:
        if self._T is None:
            n = self.size
            exps = np.zeros((n, n), dtype=np.int64)
            exps[np.diag_indices(n)] = self._sign() * self.norms * (self.M // self.N)
            self._T = CycMatrix.from_exponents(self.M, exps, mask=np.eye(n, dtype=bool))
        return self._T

    def rho_T_power(self, q: int) -> CycMatrix:
        n = self.size
        exps = np.zeros((n, n), dtype=np.int64)
        exps[np.diag_indices(n)] = self._sign() * q * self.norms * (self.M // self.N)
        return CycMatrix.from_exponents(self.M, exps, mask=np.eye(n, dtype=bool))

    def rho_S_exponents(self) -> np.ndarray:
        """Exponents over self.M of sqrt|D| * rho(S)."""
        s = self._sign()
        return s * (-self.r * (self.M // 8) - self.E * (self.M // self.N))

    def rho_S(self) -> CycMatrix:
        if self._S is None:
            self._S = CycMatrix.from_exponents(self.M, self.rho_S_exponents(), scale=self.inv_sqrt_order())
        return self._S

    def rho_Z(self) -> CycMatrix:
        """The permutation e_g -> e_{-g}."""
        n = self.size
        exps = np.zeros((n, n), dtype=np.int64)
        mask = np.zeros((n, n), dtype=bool)
        mask[self.neg, np.arange(n)] = True
        return CycMatrix.from_exponents(1, exps, mask=mask)

    def rho_minus_identity(self) -> CycMatrix:
        """rho(-I) = rho(S)^2 = e(-r/4) Z (conjugated for the dual)."""
        return self.rho_Z().scale(Cyc.root(Fraction(-self._sign() * self.r, 4)))

    def rho_word(self, word: Iterable[tuple[str, int]] | str, sign: int = 1) -> CycMatrix:
        if isinstance(word, str):
            word = parse_word(word)
        out = CycMatrix.identity(self.size)
        for g, n in word:
            if g == "T":
                out = out @ self.rho_T_power(n)
            else:
                for _ in range(n % 4):
                    out = out @ self.rho_S()
        if sign == -1:
            out = out @ self.rho_minus_identity()
        return out

    def rho_matrix(self, M) -> CycMatrix:
        sign, word = sl2_word(M)
        return self.rho_word(word, sign)

    def apply(self, M, vec: CycMatrix) -> CycMatrix:
        """rho(M) vec for a column block vec, without forming rho(M)."""
        sign, word = sl2_word(M)
        out = vec
        if sign == -1:
            out = self.rho_minus_identity() @ out
        for g, n in reversed(word):
            if g == "T":
                out = self.rho_T_power(n) @ out
            else:
                out = self.rho_S() @ out
        return out

    def basis_vector(self, index: int) -> CycMatrix:
        n = self.size
        data = np.zeros((1, n, 1), dtype=np.int64)
        data[0, index, 0] = 1
        return CycMatrix(CycMatrix.identity(1).F, data)

    def rho_gamma1(self, M) -> np.ndarray:
        """Exponents over N of the diagonal action of M in Gamma_1(N): e(b Q(g))."""
        (a, b), (c, d) = M
        N = self.N
        if (a - 1) % N or (d - 1) % N or c % N:
            raise ValueError("matrix is not in Gamma_1(N)")
        return (self._sign() * b * self.norms) % N


# ---------------------------------------------------------------------------
# alpha invariants
# ---------------------------------------------------------------------------

def alpha_from_traces(traces: Sequence[Cyc], order: int) -> tuple[Fraction, list[int]]:
    """alpha and eigenvalue multiplicities from tr(X^t) on an invariant subspace.

    ``traces[t]`` is the trace of X^t (t = 0..order-1) where X^order = 1.
    """
    mults = []
    for j in range(order):
        s = Cyc.zero()
        for t, tr in enumerate(traces):
            s = s + tr * Cyc.root(Fraction(-j * t, order))
        m = s / order
        if not m.is_integer():
            raise ArithmeticError(f"eigenvalue multiplicity {m!r} is not an integer")
        m = int(m.to_fraction())
        if m < 0:
            raise ArithmeticError("negative multiplicity")
        mults.append(m)
    alpha = sum(Fraction(j, order) * m for j, m in enumerate(mults))
    return alpha, mults


def matrix_order(X: CycMatrix, projector: CycMatrix | None = None, cap: int = 10**4) -> int:
    n = X.shape[0]
    P = projector if projector is not None else CycMatrix.identity(n)
    Y = X
    for m in range(1, cap + 1):
        if Y @ P == P:
            return m
        Y = Y @ X
    raise ArithmeticError("matrix is not of finite order")


def alpha_invariant(X: CycMatrix, projector: CycMatrix | None = None, order: int | None = None) -> Fraction:
    """Sum of beta_j over eigenvalues e(beta_j), 0 <= beta_j < 1, of X on im(projector).

    The projector must commute with X.  Multiplicities come from exact traces
    of the spectral projectors (1/m) sum_t e(-jt/m) X^t.
    """
    n = X.shape[0]
    P = projector if projector is not None else CycMatrix.identity(n)
    m = order if order is not None else matrix_order(X, P)
    traces = []
    Y = P
    for _ in range(m):
        traces.append(Y.trace())
        Y = X @ Y
    return alpha_from_traces(traces, m)[0]
