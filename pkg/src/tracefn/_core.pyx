# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Signatures mirror tracefn._fallback exactly."""

import numpy as np
cimport numpy as cnp
from cython.parallel cimport prange
from libc.math cimport cos, sin, M_PI

cnp.import_array()


def gamma_corr_batch(const long long[:, ::1] mats, const double complex[::1] khat,
                     const long long[::1] inv, int nthreads=1):
    """Unnormalized sum_x khat[x] * conj(khat[gamma x]) for each row (a,b,c,d)."""
    cdef Py_ssize_t m = mats.shape[0]
    cdef long long p = khat.shape[0]
    out_np = np.zeros(m, dtype=np.complex128)
    cdef double complex[::1] out = out_np
    cdef Py_ssize_t i
    cdef long long x, a, b, c, d, num, den, y
    cdef double sr, si, ur, ui, vr, vi
    for i in prange(m, nogil=True, num_threads=nthreads, schedule="static"):
        a = mats[i, 0] % p
        b = mats[i, 1] % p
        c = mats[i, 2] % p
        d = mats[i, 3] % p
        sr = 0.0
        si = 0.0
        # num = a x + b and den = c x + d, stepped in x without division
        num = b - a
        den = d - c
        if num < 0:
            num = num + p
        if den < 0:
            den = den + p
        for x in range(p):
            num = num + a
            if num >= p:
                num = num - p
            den = den + c
            if den >= p:
                den = den - p
            if den == 0:
                continue
            y = num * inv[den] % p
            ur = khat[x].real
            ui = khat[x].imag
            vr = khat[y].real
            vi = khat[y].imag
            # u * conj(v)
            sr = sr + ur * vr + ui * vi
            si = si + ui * vr - ur * vi
        out[i] = sr + 1j * si
    return out_np


cdef inline long long _gcd(long long a, long long b) nogil:
    cdef long long t
    while b:
        t = a % b
        a = b
        b = t
    return a


cdef inline long long _inv_mod(long long a, long long m) nogil:
    # a invertible mod m, m >= 1
    cdef long long t = 0, newt = 1, r = m, newr = a % m, q, tmp
    if m == 1:
        return 0
    while newr:
        q = r // newr
        tmp = t - q * newt
        t = newt
        newt = tmp
        tmp = r - q * newr
        r = newr
        newr = tmp
    if t < 0:
        t += m
    return t


cdef double complex _kl_one(long long a, long long b, long long d, long long c) nogil:
    cdef long long s1, g, cp, s20, s2, t, r
    cdef double sr = 0.0, si = 0.0, ang
    cdef double w = 2.0 * M_PI / c
    a = a % c
    b = b % c
    d = d % c
    if a < 0:
        a += c
    if b < 0:
        b += c
    if d < 0:
        d += c
    for s1 in range(c):
        g = _gcd(s1, c)
        if d % g:
            continue
        cp = c // g
        s20 = ((d // g) % cp) * _inv_mod((s1 // g) % cp, cp) % cp
        for t in range(g):
            s2 = s20 + t * cp
            r = (a * s1 + b * s2) % c
            ang = w * r
            sr = sr + cos(ang)
            si = si + sin(ang)
    return sr + 1j * si


def kl_ring_batch(const long long[::1] a, const long long[::1] b,
                  const long long[::1] d, const long long[::1] c, int nthreads=1):
    """Kl(a_i, b_i, d_i; c_i) for each index i."""
    cdef Py_ssize_t m = a.shape[0]
    out_np = np.zeros(m, dtype=np.complex128)
    cdef double complex[::1] out = out_np
    cdef Py_ssize_t i
    for i in prange(m, nogil=True, num_threads=nthreads, schedule="dynamic"):
        out[i] = _kl_one(a[i], b[i], d[i], c[i])
    return out_np


def sparse_mul_mod(const long long[::1] dense, const long long[::1] shifts,
                   const long long[::1] coeffs, long long modulus):
    """(dense * sparse) mod modulus, truncated to len(dense).

    ``sparse`` is sum_j coeffs[j] q^shifts[j]; coefficients of ``dense`` must
    lie in [0, modulus) and |coeffs| * modulus must fit in int64.
    """
    cdef Py_ssize_t n = dense.shape[0]
    cdef Py_ssize_t k = shifts.shape[0]
    out_np = np.zeros(n, dtype=np.int64)
    cdef long long[::1] out = out_np
    cdef Py_ssize_t j, i
    cdef long long s, cf, v
    for j in range(k):
        s = shifts[j]
        cf = coeffs[j] % modulus
        if cf < 0:
            cf += modulus
        for i in range(s, n):
            v = out[i] + cf * dense[i - s] % modulus
            if v >= modulus:
                v -= modulus
            out[i] = v
    return out_np


cdef inline long long _powmod(long long b, long long e, long long m) nogil:
    cdef long long r = 1 % m
    b %= m
    while e:
        if e & 1:
            r = r * b % m
        b = b * b % m
        e >>= 1
    return r


def sigma_mod(Py_ssize_t N, int k, long long modulus):
    """sigma_k(n) mod modulus for 0 <= n <= N (entry 0 is 0); modulus < 2^31.

    Least-prime-factor sieve: with q the least prime of n and q^e || n,
    sigma(n) = sigma(q^e) sigma(n / q^e) and sigma(q^e) = sigma(q^{e-1}) + q^{ek}.
    """
    out_np = np.zeros(N + 1, dtype=np.int64)
    spf_np = np.zeros(N + 1, dtype=np.int64)
    qpow_np = np.zeros(N + 1, dtype=np.int64)
    cdef long long[::1] out = out_np
    cdef long long[::1] spf = spf_np
    cdef long long[::1] qpow = qpow_np
    cdef Py_ssize_t n, j, q, m
    if N >= 1:
        out[1] = 1 % modulus
    for n in range(2, N + 1):
        if spf[n] == 0:
            for j in range(n, N + 1, n):
                if spf[j] == 0:
                    spf[j] = n
        q = spf[n]
        m = n // q
        if m % q == 0:
            qpow[n] = qpow[m] * q
        else:
            qpow[n] = q
        if qpow[n] == n:
            out[n] = (out[m] + _powmod(n, k, modulus)) % modulus
        else:
            out[n] = out[qpow[n]] * out[n // qpow[n]] % modulus
    return out_np


def self_conv_at(const long long[::1] sig, const long long[::1] ns, long long modulus, int nthreads=1):
    """sum_{j=1}^{n-1} sig[j] sig[n-j] mod modulus for each n in ns.

    Entries of sig lie in [0, modulus) with modulus < 2^31, so each product
    fits in 62 bits and the running sum is reduced before it can pass 2^63.
    """
    cdef Py_ssize_t m = ns.shape[0]
    out_np = np.zeros(m, dtype=np.int64)
    cdef long long[::1] out = out_np
    cdef Py_ssize_t i, j, n, half
    cdef unsigned long long acc, lim = 1ULL << 63, um = <unsigned long long> modulus
    for i in prange(m, nogil=True, num_threads=nthreads, schedule="dynamic"):
        n = ns[i]
        half = (n - 1) // 2
        acc = 0
        for j in range(1, half + 1):
            acc = acc + <unsigned long long> (sig[j] * sig[n - j])
            if acc >= lim:
                acc = acc % um
        acc = (2 * (acc % um)) % um
        if n % 2 == 0 and n >= 2:
            acc = (acc + <unsigned long long> (sig[n // 2] * sig[n // 2]) % um) % um
        out[i] = <long long> acc
    return out_np
