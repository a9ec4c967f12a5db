"""Brute-force reference implementations used only by the tests."""

import cmath
import math
from fractions import Fraction


def e(x: float) -> complex:
    return cmath.exp(2j * math.pi * x)


def legendre(x: int, p: int) -> int:
    x %= p
    if x == 0:
        return 0
    return 1 if pow(x, (p - 1) // 2, p) == 1 else -1


def kl_naive(a: int, p: int, m: int) -> complex:
    """p^{-(m-1)/2} sum over x_1...x_m = a of e((x_1+...+x_m)/p), nested loops."""
    if a % p == 0:
        return 0j
    total = 0j

    def rec(depth, prod, s):
        nonlocal total
        if depth == m - 1:
            last = a * pow(prod, -1, p) % p
            total += e((s + last) / p)
            return
        for x in range(1, p):
            rec(depth + 1, prod * x % p, s + x)

    rec(0, 1, 0)
    return total / p ** ((m - 1) / 2)


def dft_loop(vals, p):
    return [sum(vals[y] * e(-x * y / p) for y in range(p)) / math.sqrt(p) for x in range(p)]


def kl_ring_naive(a, b, d, c):
    total = 0j
    for s1 in range(c):
        for s2 in range(c):
            if (s1 * s2 - d) % c == 0:
                total += e((a * s1 + b * s2) / c)
    return total


def tau_poly(N):
    """tau(1..N) from q prod_{n<=N} (1 - q^n)^24 by schoolbook integer
    polynomial arithmetic."""
    poly = [1] + [0] * N
    for n in range(1, N + 1):
        for _ in range(24):
            for i in range(N, n - 1, -1):
                poly[i] -= poly[i - n]
    return poly[:N]


def divisor_count(n):
    return sum(1 for d in range(1, n + 1) if n % d == 0)


def pgl2_brute(p):
    """All normalized invertible matrices, as a set of tuples."""
    out = set()
    for a in range(p):
        for b in range(p):
            for c in range(p):
                for d in range(p):
                    if (a * d - b * c) % p == 0:
                        continue
                    first = next(v for v in (a, b, c, d) if v)
                    inv = pow(first, -1, p)
                    out.add(tuple(v * inv % p for v in (a, b, c, d)))
    return out


def frac_pair(x, y=0):
    return (Fraction(x), Fraction(y))


def brute_divisor_pairs(F, I, k, R):
    """Scan every m in I with |m|_inf < R; keep those with k/m in I and small."""
    # |x|_2 <= sum |sigma_i| in the Minkowski coordinates used, so radius R suffices
    coeffs, _ = I.points_in_ball(R)
    out = set()
    for c in coeffs:
        if not c.any():
            continue
        m = I.element(c)
        if not F.abs_inf_less(m, R):
            continue
        n = F.div(k, m)
        if I.contains(n) and F.abs_inf_less(n, R):
            out.add((m, n))
    return out


def brute_units_q2(m0, R):
    """Count u m0 in Q(sqrt2) with |u m0|_inf < R, u = +-(1 + sqrt2)^k, |k| <= 60,
    in integer arithmetic: |a + b r| + |a - b r| = 2 max(|a|, |b| r)."""
    x0, y0 = m0
    seen = 0
    for sign in (1, -1):
        x, y = sign * x0, sign * y0
        elts = [(x, y)]
        for _ in range(60):
            x, y = x + 2 * y, x + y
            elts.append((x, y))
        x, y = sign * x0, sign * y0
        for _ in range(60):
            x, y = -x + 2 * y, x - y  # times (sqrt2 - 1)
            elts.append((x, y))
        for a, b in elts:
            if 2 * abs(a) < R and 8 * b * b < R * R:
                seen += 1
    return seen
