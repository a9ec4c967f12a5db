"""Pure numpy implementations of the compiled kernels in ``_core.pyx``.

Per-element results do not depend on ``nthreads``; threads only split the
batch into fixed chunks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

_CHUNK = 4096


def _run_chunks(fn, m: int, nthreads: int) -> None:
    spans = [(lo, min(lo + _CHUNK, m)) for lo in range(0, m, _CHUNK)]
    if nthreads <= 1 or len(spans) <= 1:
        for lo, hi in spans:
            fn(lo, hi)
        return
    with ThreadPoolExecutor(max_workers=nthreads) as pool:
        list(pool.map(lambda s: fn(*s), spans))


def gamma_corr_batch(mats, khat, inv, nthreads: int = 1) -> np.ndarray:
    mats = np.ascontiguousarray(mats, dtype=np.int64)
    khat = np.ascontiguousarray(khat, dtype=np.complex128)
    inv = np.ascontiguousarray(inv, dtype=np.int64)
    p = khat.shape[0]
    m = mats.shape[0]
    out = np.zeros(m, dtype=np.complex128)
    xs = np.arange(p, dtype=np.int64)

    def work(lo: int, hi: int) -> None:
        a, b, c, d = (mats[lo:hi, j, None] for j in range(4))
        den = (c * xs + d) % p
        y = ((a * xs + b) % p) * inv[den] % p
        terms = khat[None, :] * np.conj(khat[y])
        terms[den == 0] = 0
        out[lo:hi] = terms.sum(axis=1)

    _run_chunks(work, m, nthreads)
    return out


def _totient(n: int) -> int:
    out, m, q = n, n, 2
    while q * q <= m:
        if m % q == 0:
            while m % q == 0:
                m //= q
            out -= out // q
        q += 1
    if m > 1:
        out -= out // m
    return out


def _divisors(n: int) -> list[int]:
    small = [k for k in range(1, math.isqrt(n) + 1) if n % k == 0]
    return sorted(set(small + [n // k for k in small]))


def _powmod(base: np.ndarray, e: int, m: int) -> np.ndarray:
    result = np.ones_like(base)
    base = base % m
    while e:
        if e & 1:
            result = result * base % m
        base = base * base % m
        e >>= 1
    return result


def _kl_one(a: int, b: int, d: int, c: int) -> complex:
    a, b, d = a % c, b % c, d % c
    s1_parts = []
    s2_parts = []
    # s1 = g*u with g = gcd(s1, c), u a unit mod c/g; only g | d contributes
    for g in _divisors(c):
        if d % g:
            continue
        cp = c // g
        u = np.arange(cp, dtype=np.int64)
        u = u[np.gcd(u, cp) == 1]
        if cp == 1:
            s20 = np.zeros(1, dtype=np.int64)
        else:
            s20 = (d // g) * _powmod(u, _totient(cp) - 1, cp) % cp
        s1_parts.append(np.repeat(g * u, g))
        s2_parts.append((s20[:, None] + cp * np.arange(g, dtype=np.int64)[None, :]).ravel())
    s1 = np.concatenate(s1_parts)
    s2 = np.concatenate(s2_parts)
    ang = (2.0 * math.pi / c) * ((a * s1 + b * s2) % c)
    return complex(np.cos(ang).sum(), np.sin(ang).sum())


def kl_ring_batch(a, b, d, c, nthreads: int = 1) -> np.ndarray:
    a, b, d, c = (np.asarray(v, dtype=np.int64) for v in (a, b, d, c))
    out = np.zeros(a.shape[0], dtype=np.complex128)
    for i in range(a.shape[0]):
        out[i] = _kl_one(int(a[i]), int(b[i]), int(d[i]), int(c[i]))
    return out


def sparse_mul_mod(dense, shifts, coeffs, modulus: int) -> np.ndarray:
    dense = np.asarray(dense, dtype=np.int64)
    n = dense.shape[0]
    out = np.zeros(n, dtype=np.int64)
    for s, cf in zip(np.asarray(shifts).tolist(), np.asarray(coeffs).tolist()):
        if s >= n:
            continue
        cf %= modulus
        out[s:] = (out[s:] + cf * dense[: n - s] % modulus) % modulus
    return out


def sigma_mod(N: int, k: int, modulus: int) -> np.ndarray:
    out = np.zeros(N + 1, dtype=np.int64)
    dk = np.array([pow(d, k, modulus) for d in range(N + 1)], dtype=np.int64)
    r = math.isqrt(N)
    for d in range(1, r + 1):
        out[d::d] = (out[d::d] + dk[d]) % modulus
    # divisors d > r: loop over the cofactor t instead
    for t in range(1, N // (r + 1) + 1):
        ds = np.arange(r + 1, N // t + 1)
        idx = t * ds
        out[idx] = (out[idx] + dk[ds]) % modulus
    return out


def self_conv_at(sig, ns, modulus: int, nthreads: int = 1) -> np.ndarray:
    sig = np.asarray(sig, dtype=np.int64)
    out = np.zeros(len(ns), dtype=np.int64)
    for i, n in enumerate(np.asarray(ns).tolist()):
        if n < 2:
            continue
        prods = sig[1:n] * sig[n - 1 : 0 : -1] % modulus
        out[i] = int(prods.sum()) % modulus
    return out
