import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from simplelat import _kernels as K

needs_numba = pytest.mark.skipif(not K.HAVE_NUMBA, reason="numba not installed")


def _naive_pow(idx, val, r, n):
    # repeated multiplication / inversion by explicit convolution
    if n == 0:
        return np.zeros(0, dtype=object)
    p = np.zeros(n, dtype=object)
    p[0] = 1
    for i, v in zip(idx, val):
        if i < n:
            p[i] = int(v)
    base = p
    if r < 0:
        inv = np.zeros(n, dtype=object)
        inv[0] = 1
        for m in range(1, n):
            inv[m] = -sum(p[k] * inv[m - k] for k in range(1, m + 1))
        base = inv
    out = np.zeros(n, dtype=object)
    out[0] = 1
    for _ in range(abs(r)):
        out = np.convolve(out, base)[:n]
    return out


sparse_series = st.lists(st.tuples(st.integers(1, 12), st.integers(-4, 4)), max_size=5).map(
    lambda ts: sorted({i: v for i, v in ts if v}.items())
)


@given(sparse_series, st.integers(-5, 6), st.integers(0, 25))
def test_series_pow_matches_naive(terms, r, n):
    idx = np.array([i for i, _ in terms], dtype=np.int64)
    val = np.array([v for _, v in terms], dtype=np.int64)
    got = K.series_pow_numpy(idx, val, r, n)
    assert [int(v) for v in got] == [int(v) for v in _naive_pow(idx, val, r, n)]


@needs_numba
@given(sparse_series, st.integers(-5, 6), st.integers(0, 25))
def test_series_pow_numba_equals_numpy(terms, r, n):
    idx = np.array([i for i, _ in terms], dtype=np.int64)
    val = np.array([v for _, v in terms], dtype=np.int64)
    assert np.array_equal(K.series_pow_numba(idx, val, r, n), K.series_pow_numpy(idx, val, r, n))


@given(st.sampled_from([2, 3, 5, 7, 11]).flatmap(
    lambda p: st.tuples(st.lists(st.integers(0, 50), min_size=p, max_size=p), st.lists(st.integers(0, 50), min_size=p, max_size=p))
))
def test_cyclic_convolution(ab):
    a, b = (np.array(v, dtype=np.int64) for v in ab)
    p = len(a)
    want = np.zeros(p, dtype=np.int64)
    for i, j in itertools.product(range(p), repeat=2):
        want[(i + j) % p] += a[i] * b[j]
    assert np.array_equal(K.cyclic_convolve_numpy(a, b), want)
    if K.HAVE_NUMBA:
        assert np.array_equal(K.cyclic_convolve_numba(a, b), want)


def _brute_ellipsoid(R, bound, box):
    d = R.shape[0]
    out = set()
    for x in itertools.product(range(-box, box + 1), repeat=d):
        v = R @ np.array(x, dtype=float)
        if v @ v <= bound + 1e-9:
            out.add(x)
    return out


@given(st.integers(0, 10**6), st.floats(0.5, 6.0))
def test_ellipsoid_points_complete(seed, bound):
    rng = np.random.default_rng(seed)
    d = 3
    # diagonally dominant, so the smallest singular value is at least 1
    B = rng.integers(-1, 2, size=(d, d)) + 4 * np.eye(d, dtype=np.int64)
    A = B.T @ B / 4.0
    R = np.linalg.cholesky(A).T
    got_np = {tuple(int(a) for a in row) for row in np.asarray(K.ellipsoid_points_numpy(R, bound)).reshape(-1, d)}
    lam = np.linalg.eigvalsh(A).min()
    box = int(np.ceil(np.sqrt(bound / lam))) + 1
    want = _brute_ellipsoid(R, bound, box)
    # the kernel may include boundary points within its slack; never misses one
    assert want <= got_np
    assert all(np.linalg.norm(R @ np.array(x)) ** 2 <= bound * (1 + 1e-6) + 1e-6 for x in got_np)
    if K.HAVE_NUMBA:
        got_nb = {tuple(int(a) for a in row) for row in np.asarray(K.ellipsoid_points_numba(R, bound)).reshape(-1, d)}
        assert got_nb == got_np


@given(st.integers(0, 10**6), st.sampled_from([0, 1000003, 2147483629]))
def test_apply_factor_routes_agree(seed, modulus):
    rng = np.random.default_rng(seed)
    S, deg = 30, 3
    f = rng.integers(-50, 50, size=S).astype(np.int64)
    shift = rng.integers(-1, S, size=(deg + 1, S)).astype(np.int64)
    shift[0] = np.arange(S)
    poly = rng.integers(-5, 6, size=deg + 1).astype(np.int64)
    if modulus:
        f = f % modulus
        poly = poly % modulus
    else:
        f = f.astype(float)
        poly = poly.astype(float)
    want = np.zeros(S, dtype=object)
    for i in range(S):
        want[i] = sum(int(poly[j]) * int(f[shift[j, i]]) for j in range(deg + 1) if shift[j, i] >= 0)
    if modulus:
        want = want % modulus
    got = K.apply_factor_numpy(f, shift, poly, modulus)
    assert [int(v) for v in got] == [int(v) for v in want]
    if K.HAVE_NUMBA:
        assert [int(v) for v in K.apply_factor_numba(f, shift, poly, modulus)] == [int(v) for v in want]


def test_numba_flag(monkeypatch):
    monkeypatch.setenv("SIMPLELAT_NUMBA", "0")
    assert not K.numba_enabled()
    monkeypatch.setenv("SIMPLELAT_NUMBA", "1")
    assert K.numba_enabled() == K.HAVE_NUMBA


def test_int64_guard():
    assert K.int64_safe(2**61)
    assert not K.int64_safe(2**62)
