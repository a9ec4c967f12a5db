"""Complete Kloosterman sums over Z/c:

    Kl(a, b, d; c) = sum_{s1 s2 = d mod c} e((a s1 + b s2)/c)

with d allowed to be a non-unit.
"""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np

from tracefn import kernels
from tracefn.errors import DomainError


def kl_ring(a: int, b: int, d: int, c: int) -> complex:
    c = int(c)
    if c <= 0:
        raise DomainError(f"modulus must be positive, got {c}")
    if c == 1:
        return 1 + 0j
    return complex(kernels.kl_ring_batch(*_arrays([a], [b], [d], [c]))[0])


def kl_ring_many(args: Iterable[tuple[int, int, int, int]], threads=1, backend: str | None = None) -> np.ndarray:
    """Vectorized :func:`kl_ring` over (a, b, d, c) tuples."""
    args = list(args)
    if not args:
        return np.zeros(0, dtype=np.complex128)
    a, b, d, c = zip(*args)
    if min(c) <= 0:
        raise DomainError("modulus must be positive")
    impl = kernels.BACKENDS[backend] if backend else kernels
    return impl.kl_ring_batch(*_arrays(a, b, d, c), kernels.resolve_threads(threads))


def _arrays(a, b, d, c):
    c = np.asarray(c, dtype=np.int64)
    return tuple(np.ascontiguousarray(np.asarray(v, dtype=np.int64) % c) for v in (a, b, d)) + (
        np.ascontiguousarray(c),
    )


def kl_unit_twist(a: int, b: int, d: int, c: int) -> complex:
    """Kl(a, d b; c) for a unit d, which equals Kl(a, b, d; c)."""
    c = int(c)
    if c <= 0:
        raise DomainError(f"modulus must be positive, got {c}")
    if math.gcd(int(d), c) != 1:
        raise DomainError(f"d = {d} is not a unit mod {c}")
    return kl_ring(a, int(d) * int(b) % c, 1, c)


def crt_factors(a: int, b: int, d: int, c1: int, c2: int) -> list[tuple[int, int, int, int]]:
    """Argument tuples whose Kl values multiply to Kl(a, b, d; c1 c2), gcd(c1, c2) = 1.

    For c = c1 c2 the factor at c_i is Kl(a ci', b ci', d; c_i) with
    ci' = (c / c_i)^{-1} mod c_i.
    """
    if math.gcd(c1, c2) != 1:
        raise DomainError("CRT factorization needs coprime moduli")
    c = c1 * c2
    out = []
    for ci in (c1, c2):
        inv = pow(c // ci, -1, ci) if ci > 1 else 0
        out.append((a * inv % ci, b * inv % ci, d % ci, ci))
    return out
