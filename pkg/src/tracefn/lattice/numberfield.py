"""Q and quadratic fields Q(sqrt D) with exact rational element arithmetic.

An element is a pair ``(x, y)`` of Fractions standing for x + y sqrt(D)
(y = 0 over Q). Minkowski coordinates are chosen so that the Euclidean
norm squared equals the trace form Tr(u conj(u)):

* Q:             u -> (u)
* real D > 0:    u -> (x + y sqrt D, x - y sqrt D)
* imaginary D:   u -> (sqrt2 Re sigma(u), sqrt2 Im sigma(u))

so every ideal lattice has covolume Nm(I) sqrt|disc|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Union

import numpy as np

from tracefn.errors import DomainError

Elt = tuple[Fraction, Fraction]
Number = Union[int, Fraction, float]


def _squarefree(n: int) -> bool:
    n = abs(n)
    q = 2
    while q * q <= n:
        if n % (q * q) == 0:
            return False
        q += 1
    return True


@dataclass(frozen=True)
class NumberFieldSpec:
    """Q (``D is None``) or Q(sqrt D) for squarefree D not in {0, 1}."""

    D: int | None = None

    def __post_init__(self):
        if self.D is not None:
            D = int(self.D)
            if D in (0, 1) or not _squarefree(D):
                raise DomainError(f"D = {D} must be squarefree and not 0 or 1")

    @classmethod
    def rationals(cls) -> NumberFieldSpec:
        return cls(None)

    @classmethod
    def quadratic(cls, D: int) -> NumberFieldSpec:
        return cls(int(D))

    @classmethod
    def from_config(cls, cfg: dict) -> NumberFieldSpec:
        degree = int(cfg.get("degree", 1 if cfg.get("D") is None else 2))
        if degree == 1:
            return cls.rationals()
        if degree == 2:
            if "D" not in cfg:
                raise DomainError("quadratic field needs D")
            return cls.quadratic(int(cfg["D"]))
        raise DomainError(f"degree {degree} fields are not supported")

    # --- invariants -----------------------------------------------------

    @property
    def degree(self) -> int:
        return 1 if self.D is None else 2

    @property
    def is_real(self) -> bool:
        return self.D is None or self.D > 0

    @property
    def signature(self) -> tuple[int, int]:
        if self.D is None:
            return (1, 0)
        return (2, 0) if self.D > 0 else (0, 1)

    @property
    def disc(self) -> int:
        if self.D is None:
            return 1
        return self.D if self.D % 4 == 1 else 4 * self.D

    @property
    def omega(self) -> Elt:
        """Second integral basis element (the first is 1)."""
        if self.D is None:
            raise DomainError("Q has integral basis {1}")
        if self.D % 4 == 1:
            return (Fraction(1, 2), Fraction(1, 2))
        return (Fraction(0), Fraction(1))

    @property
    def integral_basis(self) -> list[Elt]:
        if self.D is None:
            return [self.elt(1)]
        return [self.elt(1), self.omega]

    @property
    def n_roots_of_unity(self) -> int:
        return {-1: 4, -3: 6}.get(self.D, 2)

    @cached_property
    def roots_of_unity(self) -> list[Elt]:
        one, h = Fraction(1), Fraction(1, 2)
        if self.D == -1:
            return [(one, 0 * one), (-one, 0 * one), (0 * one, one), (0 * one, -one)]
        if self.D == -3:
            return [
                (s * one, 0 * one) for s in (1, -1)
            ] + [(sx * h, sy * h) for sx in (1, -1) for sy in (1, -1)]
        return [self.elt(1), self.elt(-1)]

    @cached_property
    def fundamental_unit(self) -> Elt | None:
        """The unit u > 1 (first embedding) generating units mod torsion;
        None when the unit group is finite."""
        if self.D is None or self.D < 0:
            return None
        return _fundamental_unit(self.D)

    # --- arithmetic -----------------------------------------------------

    def elt(self, x: Number, y: Number = 0) -> Elt:
        if self.D is None and y:
            raise DomainError("Q has no sqrt(D) component")
        return (Fraction(x), Fraction(y))

    def from_coords(self, c: tuple) -> Elt:
        """c_0 + c_1 omega."""
        if self.D is None:
            return self.elt(c[0])
        wx, wy = self.omega
        return (Fraction(c[0]) + Fraction(c[1]) * wx, Fraction(c[1]) * wy)

    def coords(self, u: Elt) -> tuple[Fraction, ...]:
        x, y = u
        if self.D is None:
            return (x,)
        if self.D % 4 == 1:
            return (x - y, 2 * y)
        return (x, y)

    def add(self, u: Elt, v: Elt) -> Elt:
        return (u[0] + v[0], u[1] + v[1])

    def neg(self, u: Elt) -> Elt:
        return (-u[0], -u[1])

    def mul(self, u: Elt, v: Elt) -> Elt:
        D = self.D or 0
        return (u[0] * v[0] + D * u[1] * v[1], u[0] * v[1] + u[1] * v[0])

    def conj(self, u: Elt) -> Elt:
        return (u[0], -u[1])

    def norm(self, u: Elt) -> Fraction:
        if self.D is None:
            return u[0]
        return u[0] * u[0] - self.D * u[1] * u[1]

    def trace(self, u: Elt) -> Fraction:
        return u[0] if self.D is None else 2 * u[0]

    def inv(self, u: Elt) -> Elt:
        n = self.norm(u)
        if n == 0:
            raise DomainError("zero has no inverse")
        if self.D is None:
            return (1 / u[0], Fraction(0))
        c = self.conj(u)
        return (c[0] / n, c[1] / n)

    def div(self, u: Elt, v: Elt) -> Elt:
        return self.mul(u, self.inv(v))

    def pow(self, u: Elt, k: int) -> Elt:
        if k < 0:
            return self.pow(self.inv(u), -k)
        out = self.elt(1)
        base = u
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    def is_zero(self, u: Elt) -> bool:
        return u[0] == 0 and u[1] == 0

    def is_integral(self, u: Elt) -> bool:
        return all(c.denominator == 1 for c in self.coords(u))

    # --- archimedean data ----------------------------------------------

    def embeddings(self, u: Elt) -> list[complex]:
        """All n complex embeddings sigma_i(u), conjugate pairs listed twice."""
        x, y = float(u[0]), float(u[1])
        if self.D is None:
            return [complex(x)]
        if self.D > 0:
            r = math.sqrt(self.D)
            return [complex(x + y * r), complex(x - y * r)]
        r = math.sqrt(-self.D)
        return [complex(x, y * r), complex(x, -y * r)]

    def minkowski(self, u: Elt) -> np.ndarray:
        x, y = float(u[0]), float(u[1])
        if self.D is None:
            return np.array([x])
        if self.D > 0:
            r = math.sqrt(self.D)
            return np.array([x + y * r, x - y * r])
        r = math.sqrt(-self.D)
        return np.array([math.sqrt(2) * x, math.sqrt(2) * y * r])

    def abs_inf(self, u: Elt) -> float:
        """|u|_inf = sum_i |sigma_i(u)| over all n embeddings."""
        return float(sum(abs(z) for z in self.embeddings(u)))

    def abs_inf_less(self, u: Elt, R: Number) -> bool:
        """Exact test of sum_i |sigma_i(u)| < R."""
        R = Fraction(R)
        if R <= 0:
            return False
        x, y = u
        if self.D is None:
            return abs(x) < R
        if self.D > 0:
            # |x + y r| + |x - y r| = 2 max(|x|, |y| r)
            return 2 * abs(x) < R and 4 * y * y * self.D < R * R
        return 4 * (x * x - self.D * y * y) < R * R

    def log_embedding(self, u: Elt) -> np.ndarray:
        """Log map: (log|sigma_i(u)|) over one embedding per archimedean place."""
        emb = self.embeddings(u)
        r, s = self.signature
        return np.array([math.log(abs(z)) for z in emb[: r + s]])


def _fundamental_unit(D: int) -> Elt:
    """Smallest unit > 1 of the ring of integers of Q(sqrt D), D > 1 squarefree.

    Walks the continued fraction of omega = (P0 + sqrt D)/Q0; the first
    convergent h/k with Nm(h - k omega) = +-1 gives the unit, normalized by
    sign and conjugation to be the representative > 1.
    """
    if D % 4 == 1:
        P, Q = 1, 2
        wx, wy = Fraction(1, 2), Fraction(1, 2)
    else:
        P, Q = 0, 1
        wx, wy = Fraction(0), Fraction(1)
    s = math.isqrt(D)
    # (h_{-2}, h_{-1}) = (0, 1), (k_{-2}, k_{-1}) = (1, 0)
    h_prev, h = 0, 1
    k_prev, k = 1, 0
    for _ in range(10_000):
        a = (P + s) // Q
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
        # candidate h - k*omega has norm h^2 - h k Tr(omega) + k^2 Nm(omega)
        x, y = Fraction(h) - k * wx, -k * wy
        n = x * x - D * y * y
        if abs(n) == 1:
            r = math.sqrt(D)
            cands = [(x, y), (x, -y), (-x, y), (-x, -y)]
            cands = [c for c in cands if float(c[0]) + float(c[1]) * r > 1]
            return min(cands, key=lambda c: float(c[0]) + float(c[1]) * r)
        P = a * Q - P
        Q = (D - P * P) // Q
    raise DomainError(f"continued fraction for D = {D} did not close")
