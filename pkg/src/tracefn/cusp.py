"""Ramanujan tau, normalized Hecke eigenvalues of the discriminant form, and
the amplifier weights built from them.

tau(n) is computed exactly: Delta/q = (prod (1 - q^n)^3)^8 where the cube is
Jacobi's sparse series sum_k (-1)^k (2k+1) q^{k(k+1)/2}. The eighth power is
taken by seven sparse-times-dense products modulo several primes below 2^31
and lifted back by the CRT.

Isolated values far beyond the table (tau(l^2) for the amplifier) come from
Ramanujan's identity

    756 tau(n) = 65 sigma_11(n) + 691 sigma_5(n) - 691 * 252 * sum_{0<k<n} sigma_5(k) sigma_5(n-k),

evaluated modulo the same primes. It does not use the Hecke relations, so
the amplifier identity stays a genuine check.
"""

from __future__ import annotations

import io
import math
import os
import struct
from fractions import Fraction
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from tracefn import kernels
from tracefn.errors import ConfigError, DomainError
from tracefn.ff_core import is_prime, primes_between

WEIGHT = 12
_MODULI = (2147483647, 2147483629, 2147483587, 2147483579, 2147483563)
CACHE_MAGIC = b"TAUv1"


def jacobi_cube_series(n_terms: int) -> tuple[np.ndarray, np.ndarray]:
    """Exponents and coefficients of prod_{n>=1} (1 - q^n)^3 below q^n_terms."""
    shifts, coeffs = [], []
    k = 0
    while k * (k + 1) // 2 < n_terms:
        shifts.append(k * (k + 1) // 2)
        coeffs.append((-1) ** k * (2 * k + 1))
        k += 1
    return np.array(shifts, dtype=np.int64), np.array(coeffs, dtype=np.int64)


def pentagonal_series(n_terms: int) -> dict[int, int]:
    """prod_{n>=1} (1 - q^n) = sum_k (-1)^k q^{k(3k-1)/2}, k over Z, as {exponent: coeff}."""
    out = {0: 1}
    k = 1
    while k * (3 * k - 1) // 2 < n_terms:
        for e in (k * (3 * k - 1) // 2, k * (3 * k + 1) // 2):
            if e < n_terms:
                out[e] = (-1) ** k
        k += 1
    return out


def _crt_lift(residues: list[np.ndarray]) -> list[int]:
    M = math.prod(_MODULI[: len(residues)])
    parts = []
    for r, m in zip(residues, _MODULI):
        Mi = M // m
        parts.append((Mi * pow(Mi, -1, m), r.tolist()))
    half = M // 2
    out = []
    for i in range(len(residues[0])):
        v = sum(w * r[i] for w, r in parts) % M
        out.append(v - M if v > half else v)
    return out


def _sigma_exact(n: int, k: int) -> int:
    total = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            total += d**k
            if d * d != n:
                total += (n // d) ** k
        d += 1
    return total


def _divisor_count(n: int) -> int:
    return sum(1 + (d * d != n) for d in range(1, math.isqrt(n) + 1) if n % d == 0)


def tau_at(ns, threads=1) -> dict[int, int]:
    """Exact tau(n) for each n in ``ns`` without tabulating below them."""
    ns = sorted({int(n) for n in ns})
    if not ns:
        return {}
    if ns[0] < 1:
        raise DomainError("tau(n) needs n >= 1")
    N = ns[-1]
    # |tau(n)| <= d(n) n^{11/2}; choose enough moduli to cover twice that
    bound = max(_divisor_count(n) * math.isqrt(n**11 + 1) + 1 for n in ns)
    k, prod = 0, 1
    while prod <= 2 * bound:
        prod *= _MODULI[k]
        k += 1
        if k > len(_MODULI):
            raise DomainError(f"tau({N}) is beyond the CRT range")
    arr = np.array(ns, dtype=np.int64)
    s5 = [_sigma_exact(n, 5) for n in ns]
    s11 = [_sigma_exact(n, 11) for n in ns]
    residues = []
    for m in _MODULI[:k]:
        sig = kernels.sigma_mod(N, 5, m)
        conv = kernels.self_conv_at(sig, arr, m, kernels.resolve_threads(threads))
        inv756 = pow(756, -1, m)
        r = [
            (65 * a + 691 * b - 691 * 252 * int(c)) * inv756 % m
            for a, b, c in zip(s11, s5, conv.tolist())
        ]
        residues.append(np.array(r, dtype=np.int64))
    return dict(zip(ns, _crt_lift(residues)))


def compute_tau(N: int, moduli: int = 4) -> list[int]:
    """[tau(1), ..., tau(N)] exactly.

    |tau(n)| <= d(n) n^{11/2} stays far below half the product of four
    31-bit moduli for every N this package is used with (N < 10^7).
    """
    if N < 1:
        raise DomainError("N must be >= 1")
    shifts, coeffs = jacobi_cube_series(N)
    residues = []
    for m in _MODULI[:moduli]:
        cur = np.zeros(N, dtype=np.int64)
        cur[shifts] = coeffs % m
        for _ in range(7):
            cur = kernels.sparse_mul_mod(cur, shifts, coeffs, m)
        residues.append(cur)
    return _crt_lift(residues)


@dataclass(frozen=True)
class CuspFormCoeffs:
    """Fourier coefficients of a level-1 Hecke eigenform of weight ``weight``.

    tau[n-1] is the integer coefficient a(n); lam[n] = a(n)/n^{(k-1)/2} with
    lam[0] = 0 as padding so that lam[n] indexes naturally.
    """

    tau: tuple[int, ...]
    weight: int = WEIGHT
    name: str = "delta"
    level: int = 1
    extra: dict = field(default_factory=dict, compare=False)  # isolated n > N

    @property
    def N(self) -> int:
        return len(self.tau)

    @cached_property
    def lam(self) -> np.ndarray:
        n = np.arange(1, self.N + 1, dtype=np.float64)
        t = np.array([float(x) for x in self.tau])
        out = np.zeros(self.N + 1)
        out[1:] = t / n ** ((self.weight - 1) / 2)
        out.setflags(write=False)
        return out

    def has(self, n: int) -> bool:
        return 1 <= n <= self.N or n in self.extra

    def coeff(self, n: int) -> int:
        if 1 <= n <= self.N:
            return self.tau[n - 1]
        if n in self.extra:
            return self.extra[n]
        raise DomainError(f"n = {n} outside computed extent 1..{self.N}")

    def normalized(self, n: int) -> float:
        if 1 <= n <= self.N:
            return float(self.lam[n])
        return self.coeff(n) / n ** ((self.weight - 1) / 2)

    def with_isolated(self, ns) -> CuspFormCoeffs:
        """Copy that also knows tau(n) at the given n beyond the table."""
        if self.name != "delta" or self.level != 1:
            raise DomainError("isolated coefficients are only available for delta")
        missing = [n for n in ns if not self.has(n)]
        if not missing:
            return self
        extra = dict(self.extra)
        extra.update(tau_at(missing))
        return CuspFormCoeffs(self.tau, self.weight, self.name, self.level, extra)


def extend_tau(N: int, cache_dir: str | os.PathLike | None = None) -> CuspFormCoeffs:
    """Delta coefficients up to N, reusing a cached table when one is large enough."""
    N = int(N)
    if N < 1:
        raise DomainError("N must be >= 1")
    if cache_dir is not None:
        cached = _best_cache(Path(cache_dir), N)
        if cached is not None:
            return CuspFormCoeffs(tuple(cached[:N]))
    tau = compute_tau(N)
    if cache_dir is not None:
        path = Path(cache_dir)
        path.mkdir(parents=True, exist_ok=True)
        write_tau_cache(path / f"tau_{N}.bin", tau)
    return CuspFormCoeffs(tuple(tau))


def _best_cache(path: Path, N: int) -> list[int] | None:
    if not path.is_dir():
        return None
    best = None
    for f in path.glob("tau_*.bin"):
        try:
            n = int(f.stem.split("_", 1)[1])
        except ValueError:
            continue
        if n >= N and (best is None or n < best[0]):
            best = (n, f)
    if best is None:
        return None
    return read_tau_cache(best[1])


def write_tau_cache(path, tau: list[int]) -> None:
    """Binary layout: b'TAUv1', u64 count, then per value a u32 byte length
    and that many little-endian two's-complement bytes."""
    buf = io.BytesIO()
    buf.write(CACHE_MAGIC)
    buf.write(struct.pack("<Q", len(tau)))
    for v in tau:
        nbytes = (v.bit_length() + 8) // 8
        buf.write(struct.pack("<I", nbytes))
        buf.write(int(v).to_bytes(nbytes, "little", signed=True))
    tmp = Path(str(path) + ".tmp")
    tmp.write_bytes(buf.getvalue())
    os.replace(tmp, path)


def read_tau_cache(path) -> list[int]:
    data = Path(path).read_bytes()
    if not data.startswith(CACHE_MAGIC):
        raise ConfigError(f"{path}: not a TAUv1 cache file")
    pos = len(CACHE_MAGIC)
    (count,) = struct.unpack_from("<Q", data, pos)
    pos += 8
    out = []
    for _ in range(count):
        (nb,) = struct.unpack_from("<I", data, pos)
        pos += 4
        if pos + nb > len(data):
            raise ConfigError(f"{path}: truncated cache file")
        out.append(int.from_bytes(data[pos : pos + nb], "little", signed=True))
        pos += nb
    return out


def satake_check(coeffs: CuspFormCoeffs, p: int) -> tuple[complex, complex, float]:
    """Roots of X^2 - lam(p) X + 1 and the residual |lam(p^2) - (lam(p)^2 - 1)|.

    The residual is computed from the exact integers
    a(p)^2 - a(p^2) - p^{k-1}, scaled by p^{-(k-1)}.
    """
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    if p * p > coeffs.N:
        raise DomainError(f"need coefficients up to {p * p}, have {coeffs.N}")
    lp = coeffs.normalized(p)
    disc = complex(lp * lp - 4)
    root = disc**0.5
    alpha, beta = (lp + root) / 2, (lp - root) / 2
    k1 = coeffs.weight - 1
    exact = coeffs.coeff(p) ** 2 - coeffs.coeff(p * p) - p**k1
    residual = abs(exact) / p**k1
    return alpha, beta, float(residual)


@dataclass(frozen=True)
class Amplifier:
    kind: str
    L: float
    weights: dict[int, float]
    value: float  # sum_l x_l lam(l)
    exact_value: object = None  # Fraction for dfi, None otherwise


def amplifier_weights(kind: str, L: float, coeffs: CuspFormCoeffs) -> Amplifier:
    """Amplifier supported on primes l in [L, 2L] (and their squares for 'dfi').
    Coefficients beyond the table are computed as isolated values.

    venkatesh: x_l = sign(lam(l)), value = sum |lam(l)|.
    dfi:       x_l = lam(l), x_{l^2} = -1, value = sum (lam(l)^2 - lam(l^2)),
               which the Hecke relation at l makes exactly #primes.
    """
    if L < 2:
        raise DomainError("L must be >= 2")
    primes = [q for q in primes_between(math.ceil(L), math.floor(2 * L)) if coeffs.level % q]
    if kind == "venkatesh":
        coeffs = coeffs.with_isolated(primes)
        w = {}
        for q in primes:
            lq = coeffs.normalized(q)
            if coeffs.coeff(q) != 0:
                w[q] = 1.0 if lq > 0 else -1.0
        value = float(sum(w[q] * coeffs.normalized(q) for q in w))
        return Amplifier(kind, L, w, value)
    if kind == "dfi":
        coeffs = coeffs.with_isolated(primes + [q * q for q in primes])
        w: dict[int, float] = {}
        exact = Fraction(0)
        k1 = coeffs.weight - 1
        for q in primes:
            w[q] = coeffs.normalized(q)
            w[q * q] = -1.0
            # lam(q)^2 - lam(q^2) = (a(q)^2 - a(q^2)) / q^{k-1}
            exact += Fraction(coeffs.coeff(q) ** 2 - coeffs.coeff(q * q), q**k1)
        value = float(sum(w[q] * coeffs.normalized(q) for q in w))
        return Amplifier(kind, L, w, value, exact)
    raise DomainError(f"unknown amplifier kind {kind!r}")
