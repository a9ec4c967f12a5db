"""Prime-field arithmetic: primality, primitive roots, discrete logs and the
additive/multiplicative characters of F_p."""

from __future__ import annotations

import cmath
import math
from functools import cached_property, lru_cache

import numpy as np

from tracefn.errors import DomainError, InvalidCharacterError

# Deterministic Miller-Rabin witnesses, valid for n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of n by trial division."""
    out = []
    q = 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1 if q == 2 else 2
    if n > 1:
        out.append(n)
    return out


def primes_between(lo: int, hi: int) -> list[int]:
    """Primes in the closed interval [lo, hi]."""
    if hi < 2:
        return []
    sieve = np.ones(hi + 1, dtype=bool)
    sieve[:2] = False
    for q in range(2, math.isqrt(hi) + 1):
        if sieve[q]:
            sieve[q * q :: q] = False
    return [int(x) for x in np.flatnonzero(sieve) if x >= lo]


def primitive_root(p: int) -> int:
    """Smallest positive primitive root mod the odd prime p."""
    qs = prime_factors(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in qs):
            return g
    if p == 3:
        return 2
    raise DomainError(f"no primitive root found mod {p}")


class PrimeField:
    """The field F_p for an odd prime p, with a fixed primitive root.

    Instances are immutable and cached per modulus; use ``PrimeField.of(p)``
    to share tables between callers.
    """

    def __init__(self, p: int):
        p = int(p)
        if p < 3 or not is_prime(p):
            raise DomainError(f"modulus must be an odd prime, got {p}")
        self.p = p
        self.g = primitive_root(p)

    @staticmethod
    @lru_cache(maxsize=64)
    def of(p: int) -> PrimeField:
        return PrimeField(p)

    def __repr__(self) -> str:
        return f"PrimeField(p={self.p}, g={self.g})"

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("PrimeField", self.p))

    @cached_property
    def exp_table(self) -> np.ndarray:
        """exp_table[k] = g^k mod p for 0 <= k < p-1."""
        p, g = self.p, self.g
        out = np.empty(p - 1, dtype=np.int64)
        x = 1
        for k in range(p - 1):
            out[k] = x
            x = x * g % p
        out.setflags(write=False)
        return out

    @cached_property
    def dlog_table(self) -> np.ndarray:
        """dlog_table[x] = k with g^k = x; entry 0 is -1 (undefined)."""
        out = np.full(self.p, -1, dtype=np.int64)
        out[self.exp_table] = np.arange(self.p - 1, dtype=np.int64)
        out.setflags(write=False)
        return out

    @cached_property
    def inv_table(self) -> np.ndarray:
        """Modular inverses; inv_table[0] = 0 as a sentinel."""
        p = self.p
        out = np.zeros(p, dtype=np.int64)
        e = self.exp_table
        # g^{-k} = g^{p-1-k}
        out[e] = e[(-np.arange(p - 1)) % (p - 1)]
        out.setflags(write=False)
        return out

    def reduce(self, x: int) -> int:
        return int(x) % self.p

    def inverse(self, x: int) -> int:
        x %= self.p
        if x == 0:
            raise DomainError("0 has no inverse")
        return int(self.inv_table[x])


def additive_character(F: PrimeField, x: int) -> complex:
    """e(x/p)."""
    return cmath.exp(2j * math.pi * (int(x) % F.p) / F.p)


def dlog(F: PrimeField, x: int) -> int:
    x = int(x) % F.p
    if x == 0:
        raise DomainError("discrete log of 0 is undefined")
    return int(F.dlog_table[x])


def mult_character(F: PrimeField, order_divisor: int, x: int) -> complex:
    """The character chi(g^k) = e(k/order_divisor), extended by chi(0) = 0.

    Its order divides ``order_divisor``; order_divisor = 2 is the Legendre
    symbol.
    """
    if order_divisor < 1 or (F.p - 1) % order_divisor:
        raise InvalidCharacterError(f"order {order_divisor} does not divide p-1 = {F.p - 1}")
    x = int(x) % F.p
    if x == 0:
        return 0j
    k = int(F.dlog_table[x]) % order_divisor
    if k == 0:
        return 1 + 0j
    if 2 * k == order_divisor:
        return -1 + 0j
    return cmath.exp(2j * math.pi * k / order_divisor)


def additive_table(F: PrimeField, a: int = 1) -> np.ndarray:
    """Vector of e(a*x/p) for x in F_p."""
    idx = (int(a) * np.arange(F.p, dtype=np.int64)) % F.p
    return np.exp(2j * np.pi * idx / F.p)


def mult_table(F: PrimeField, order_divisor: int) -> np.ndarray:
    """Vector of chi(x) for x in F_p, chi as in :func:`mult_character`."""
    if order_divisor < 1 or (F.p - 1) % order_divisor:
        raise InvalidCharacterError(f"order {order_divisor} does not divide p-1 = {F.p - 1}")
    out = np.zeros(F.p, dtype=complex)
    k = F.dlog_table[1:] % order_divisor
    vals = np.exp(2j * np.pi * k / order_divisor)
    # exact real values where the phase is 0 or pi
    vals[k == 0] = 1.0
    if order_divisor % 2 == 0:
        vals[2 * k == order_divisor] = -1.0
    out[1:] = vals
    return out
