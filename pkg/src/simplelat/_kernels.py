"""Integer inner loops shared by the series, genus and product modules.

Every kernel exists twice: a numba-compiled loop and a pure-numpy version.
The numba path is used when numba imports and ``SIMPLELAT_NUMBA`` is not set
to ``0``.  Both paths are exact on int64 input; callers are responsible for
checking magnitude bounds before choosing int64 (see ``int64_safe``), and
fall back to object arrays of Python ints, which only the numpy path accepts.
"""

from __future__ import annotations

import math
import os

import numpy as np

try:  # optional accelerator
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    HAVE_NUMBA = False

INT64_LIMIT = 2**62


def numba_enabled() -> bool:
    flag = os.environ.get("SIMPLELAT_NUMBA", "1").strip().lower()
    return HAVE_NUMBA and flag not in ("0", "false", "no", "off")


def int64_safe(bound) -> bool:
    """True when every intermediate value is known to stay below 2**62."""
    return bound < INT64_LIMIT


# ---------------------------------------------------------------------------
# power of a power series with constant term 1 (J.C.P. Miller recurrence)
# ---------------------------------------------------------------------------

def _series_pow_py(p_idx, p_val, r, n, dtype):
    q = np.zeros(n, dtype=dtype)
    if n == 0:
        return q
    q[0] = 1
    r1 = r + 1
    for m in range(1, n):
        cnt = int(np.searchsorted(p_idx, m, side="right"))
        if cnt == 0:
            continue
        ks = p_idx[:cnt]
        w = (r1 * ks - m) * p_val[:cnt]
        s = np.dot(w, q[m - ks])
        q[m] = s // m
    return q


def series_pow_numpy(p_idx, p_val, r, n):
    """Coefficients of P**r up to q**(n-1), where P = 1 + sum p_val q**p_idx.

    ``p_idx`` must be sorted, positive and unique.  Works on int64 or object
    arrays; the division by m is exact for integral P.
    """
    dtype = object if p_val.dtype == object else np.int64
    return _series_pow_py(p_idx.astype(np.int64), p_val, int(r), int(n), dtype)


def _series_pow_loop(p_idx, p_val, r, n):
    q = np.zeros(n, np.int64)
    if n == 0:
        return q
    q[0] = 1
    for m in range(1, n):
        s = 0
        for t in range(p_idx.shape[0]):
            k = p_idx[t]
            if k > m:
                break
            s += ((r + 1) * k - m) * p_val[t] * q[m - k]
        q[m] = s // m
    return q


# ---------------------------------------------------------------------------
# cyclic convolution over Z/p (norm distributions of Jordan blocks)
# ---------------------------------------------------------------------------

def cyclic_convolve_numpy(a, b):
    p = a.shape[0]
    full = np.convolve(a, b)
    out = full[:p].copy()
    out[: full.shape[0] - p] += full[p:]
    return out


def _cyclic_convolve_loop(a, b):
    p = a.shape[0]
    out = np.zeros(p, np.int64)
    for i in range(p):
        ai = a[i]
        if ai == 0:
            continue
        for j in range(p):
            k = i + j
            if k >= p:
                k -= p
            out[k] += ai * b[j]
    return out


# ---------------------------------------------------------------------------
# integer points in an ellipsoid (Fincke-Pohst)
# ---------------------------------------------------------------------------

_ELLIPSOID_EPS = 1e-7


def ellipsoid_points_numpy(R, bound):
    """All integer x with |R x|^2 <= bound (R upper triangular), with slack.

    The slack only ever adds points; callers filter exactly.
    """
    d = R.shape[0]
    found = []
    x = np.zeros(d, dtype=np.int64)

    def level(i, partial):
        rem = bound - partial
        if rem < -_ELLIPSOID_EPS:
            return
        rem = max(rem, 0.0)
        c = -float(np.dot(R[i, i + 1:], x[i + 1:])) / R[i, i]
        half = math.sqrt(rem) / R[i, i] + _ELLIPSOID_EPS
        lo, hi = math.ceil(c - half), math.floor(c + half)
        if hi < lo:
            return
        if i == 0:
            vals = np.arange(lo, hi + 1, dtype=np.int64)
            s = R[0, 0] * vals + float(np.dot(R[0, 1:], x[1:]))
            keep = vals[partial + s * s <= bound + _ELLIPSOID_EPS * (1 + bound)]
            if keep.size:
                block = np.tile(x, (keep.size, 1))
                block[:, 0] = keep
                found.append(block)
            return
        tail = float(np.dot(R[i, i + 1:], x[i + 1:]))
        for v in range(lo, hi + 1):
            x[i] = v
            s = R[i, i] * v + tail
            level(i - 1, partial + s * s)
        x[i] = 0

    if d:
        level(d - 1, 0.0)
    if not found:
        return np.zeros((0, d), dtype=np.int64)
    return np.concatenate(found)


def _ellipsoid_loop(R, bound):
    d = R.shape[0]
    eps = 1e-7
    cap = 1024
    out = np.zeros((cap, d), np.int64)
    count = 0
    x = np.zeros(d, np.int64)
    lo = np.zeros(d, np.int64)
    hi = np.zeros(d, np.int64)
    partial = np.zeros(d + 1)
    i = d - 1
    # bounds for the top level
    half = math.sqrt(max(bound, 0.0)) / R[i, i] + eps
    lo[i] = math.ceil(-half)
    hi[i] = math.floor(half)
    x[i] = lo[i]
    while True:
        if x[i] > hi[i]:
            i += 1
            if i == d:
                break
            x[i] += 1
            continue
        s = R[i, i] * x[i]
        for j in range(i + 1, d):
            s += R[i, j] * x[j]
        partial[i] = partial[i + 1] + s * s
        if partial[i] > bound + eps * (1.0 + bound):
            # still may be inside for larger x[i] only if below centre
            x[i] += 1
            continue
        if i == 0:
            if count == cap:
                cap *= 2
                grown = np.zeros((cap, d), np.int64)
                grown[:count] = out[:count]
                out = grown
            out[count] = x
            count += 1
            x[0] += 1
            continue
        i -= 1
        rem = bound - partial[i + 1]
        if rem < 0.0:
            rem = 0.0
        c = 0.0
        for j in range(i + 1, d):
            c -= R[i, j] * x[j]
        c /= R[i, i]
        half = math.sqrt(rem) / R[i, i] + eps
        lo[i] = math.ceil(c - half)
        hi[i] = math.floor(c + half)
        x[i] = lo[i]
    return out[:count]


# ---------------------------------------------------------------------------
# multiply a graded series by a one-variable polynomial in e(lambda)
# ---------------------------------------------------------------------------

def apply_factor_numpy(f, shift, poly, modulus):
    """out[i] = sum_j poly[j] * f[shift[j, i]] (mod modulus when modulus > 0).

    ``shift[j, i]`` is the index of mu_i - j*lambda in the support, or -1.
    """
    out = np.zeros_like(f)
    for j in range(shift.shape[0]):
        c = poly[j]
        if c == 0:
            continue
        idx = shift[j]
        ok = idx >= 0
        term = f[idx[ok]] * c
        if modulus:
            term = term % modulus
        out[ok] += term
        if modulus:
            out %= modulus
    return out


def _apply_factor_loop(f, shift, poly, modulus):
    n = f.shape[0]
    out = np.zeros(n, np.int64)
    for i in range(n):
        acc = 0
        for j in range(shift.shape[0]):
            k = shift[j, i]
            if k < 0 or poly[j] == 0:
                continue
            acc = (acc + (poly[j] * f[k]) % modulus) % modulus
        out[i] = acc
    return out


def _apply_factor_float_loop(f, shift, poly):
    n = f.shape[0]
    out = np.zeros(n)
    for i in range(n):
        acc = 0.0
        for j in range(shift.shape[0]):
            k = shift[j, i]
            if k < 0:
                continue
            acc += poly[j] * f[k]
        out[i] = acc
    return out


if HAVE_NUMBA:
    _jit = numba.njit(cache=True)
    _series_pow_nb = _jit(_series_pow_loop)
    _cyclic_convolve_nb = _jit(_cyclic_convolve_loop)
    _ellipsoid_nb = _jit(_ellipsoid_loop)
    _apply_factor_nb = _jit(_apply_factor_loop)
    _apply_factor_float_nb = _jit(_apply_factor_float_loop)


def series_pow_numba(p_idx, p_val, r, n):
    return _series_pow_nb(p_idx.astype(np.int64), p_val.astype(np.int64), int(r), int(n))


def cyclic_convolve_numba(a, b):
    return _cyclic_convolve_nb(a.astype(np.int64), b.astype(np.int64))


def ellipsoid_points_numba(R, bound):
    return _ellipsoid_nb(np.ascontiguousarray(R, dtype=np.float64), float(bound))


def apply_factor_numba(f, shift, poly, modulus):
    if modulus:
        return _apply_factor_nb(f, shift, poly, np.int64(modulus))
    return _apply_factor_float_nb(f, shift, poly)


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

def series_pow(p_idx, p_val, r, n):
    if numba_enabled() and p_val.dtype != object:
        return series_pow_numba(p_idx, p_val, r, n)
    return series_pow_numpy(p_idx, p_val, r, n)


def cyclic_convolve(a, b):
    if numba_enabled() and a.dtype != object and b.dtype != object:
        return cyclic_convolve_numba(a, b)
    return cyclic_convolve_numpy(a, b)


def ellipsoid_points(R, bound):
    if numba_enabled():
        return ellipsoid_points_numba(R, bound)
    return ellipsoid_points_numpy(R, bound)


def apply_factor(f, shift, poly, modulus):
    """Exact for modulus < 2**31 on int64 input, or modulus == 0 on floats."""
    if numba_enabled() and f.dtype != object:
        return apply_factor_numba(f, shift, poly, modulus)
    return apply_factor_numpy(f, shift, poly, modulus)
