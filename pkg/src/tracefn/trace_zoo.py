"""Concrete trace functions on F_p as complex value tables.

Every constructor returns an immutable :class:`TraceFunction`. The conductor
bound carried along is declared metadata (a coarse upper bound on the sup
norm), never computed from the table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from tracefn.errors import DomainError, FieldMismatchError
from tracefn.ff_core import PrimeField, additive_table, mult_table


@dataclass(frozen=True, eq=False)
class TraceFunction:
    field: PrimeField
    values: np.ndarray
    kind: str
    conductor_bound: float
    fourier_eligible: bool = True
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.complex128)
        if vals.shape != (self.field.p,):
            raise DomainError(f"table has shape {vals.shape}, expected ({self.field.p},)")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if self.conductor_bound <= 0:
            raise DomainError("conductor_bound must be positive")
        if vals.size and float(np.max(np.abs(vals))) > self.conductor_bound * (1 + 1e-9):
            raise DomainError("values exceed the declared conductor bound")

    @property
    def p(self) -> int:
        return self.field.p

    def __getitem__(self, x: int) -> complex:
        return complex(self.values[int(x) % self.p])

    def __len__(self) -> int:
        return self.p

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def l2_norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def scaled(self, c: complex) -> TraceFunction:
        """c*K; the conductor bound scales by max(1, |c|)."""
        return TraceFunction(
            self.field,
            self.values * c,
            self.kind,
            self.conductor_bound * max(1.0, abs(c)),
            self.fourier_eligible,
        )

    def with_values(self, values, kind: str = "custom") -> TraceFunction:
        vals = np.asarray(values, dtype=np.complex128)
        bound = max(self.conductor_bound, float(np.max(np.abs(vals))) if vals.size else 1.0)
        return TraceFunction(self.field, vals, kind, bound, self.fourier_eligible)


def _field(F) -> PrimeField:
    return F if isinstance(F, PrimeField) else PrimeField.of(int(F))


def make_trivial(F) -> TraceFunction:
    F = _field(F)
    return TraceFunction(F, np.ones(F.p, dtype=complex), "trivial", 1.0, True)


def make_additive(F, a: int = 1) -> TraceFunction:
    """x -> e(a x / p). Not Fourier eligible for a != 0."""
    F = _field(F)
    a %= F.p
    return TraceFunction(
        F, additive_table(F, a), f"additive:{a}", 1.0 if a == 0 else 2.0, a == 0
    )


def make_mult(F, order: int) -> TraceFunction:
    """The multiplicative character of exact order ``order`` sending g to e(1/order)."""
    F = _field(F)
    return TraceFunction(F, mult_table(F, order), f"mult:{order}", 3.0, True)


def make_legendre(F) -> TraceFunction:
    F = _field(F)
    K = make_mult(F, 2)
    return TraceFunction(F, K.values.real, "legendre", 3.0, True)


def make_custom(F, values, conductor_bound: float | None = None, fourier_eligible: bool = True) -> TraceFunction:
    F = _field(F)
    vals = np.asarray(values, dtype=np.complex128)
    if conductor_bound is None:
        conductor_bound = max(1.0, float(np.max(np.abs(vals))))
    return TraceFunction(F, vals, "custom", conductor_bound, fourier_eligible)


def _to_cyclic(K: TraceFunction) -> np.ndarray:
    # A[k] = K(g^k)
    return K.values[K.field.exp_table]


def _from_cyclic(F: PrimeField, seq: np.ndarray, at_zero: complex = 0) -> np.ndarray:
    out = np.zeros(F.p, dtype=np.complex128)
    out[F.exp_table] = seq
    out[0] = at_zero
    return out


def _cyclic_convolve(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.fft.ifft(np.fft.fft(x) * np.fft.fft(y))


def _mult_convolve_values(K1: TraceFunction, K2: TraceFunction) -> np.ndarray:
    F = K1.field
    seq = _cyclic_convolve(_to_cyclic(K1), _to_cyclic(K2)) / math.sqrt(F.p)
    return _from_cyclic(F, seq)


def mult_convolve(K1: TraceFunction, K2: TraceFunction) -> TraceFunction:
    """(K1 * K2)(a) = p^{-1/2} sum_{xy=a, x,y != 0} K1(x) K2(y), and 0 at a = 0.

    Runs in O(p log p): F_p^x is reindexed through the discrete log and the
    two length-(p-1) sequences are convolved cyclically.
    """
    if K1.field != K2.field:
        raise FieldMismatchError("convolution of trace functions over different fields")
    vals = _mult_convolve_values(K1, K2)
    # declared bounds do not control a convolution of non-sheaf inputs
    # (trivial * trivial grows like sqrt(p)), so never declare below the sup
    return TraceFunction(
        K1.field,
        vals,
        "convolution",
        max(K1.conductor_bound * K2.conductor_bound, float(np.max(np.abs(vals)))),
        K1.fourier_eligible and K2.fourier_eligible,
    )


def make_kloosterman(F, m: int) -> TraceFunction:
    """Normalized hyper-Kloosterman sum Kl_m(a; p), with Kl_m(0; p) = 0.

    Kl_m(a) = p^{-(m-1)/2} sum_{x_1...x_m = a} e((x_1 + ... + x_m)/p),
    built as the (m-1)-fold multiplicative convolution of e(x/p).
    """
    F = _field(F)
    m = int(m)
    if m < 2:
        raise DomainError(f"hyper-Kloosterman rank must be >= 2, got {m}")
    psi = _to_cyclic(TraceFunction(F, additive_table(F, 1), "additive:1", 1.0, False))
    spec = np.fft.fft(psi)
    seq = np.fft.ifft(spec**m) / F.p ** ((m - 1) / 2)
    return TraceFunction(F, _from_cyclic(F, seq), f"kloosterman:{m}", float(m + 2), True)


def _poly_eval(coeffs: Sequence[int], x: np.ndarray, p: int) -> np.ndarray:
    # coeffs in increasing degree
    acc = np.zeros_like(x)
    for c in reversed(list(coeffs)):
        acc = (acc * x + int(c)) % p
    return acc


def _trim(coeffs: Sequence[int], p: int) -> list[int]:
    out = [int(c) % p for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return out


def pullback(K: TraceFunction, num: Sequence[int], den: Sequence[int] = (1,)) -> TraceFunction:
    """x -> K(num(x)/den(x)), zero at the poles of the rational map.

    Polynomials are coefficient lists in increasing degree.
    """
    F = K.field
    p = F.p
    num_t, den_t = _trim(num, p), _trim(den, p)
    if not den_t:
        raise DomainError("denominator of the rational map is identically zero")
    xs = np.arange(p, dtype=np.int64)
    nv = _poly_eval(num_t, xs, p)
    dv = _poly_eval(den_t, xs, p)
    poles = dv == 0
    img = nv * F.inv_table[dv] % p
    vals = K.values[img].copy()
    vals[poles] = 0
    deg = max(len(num_t), len(den_t)) - 1 if num_t else len(den_t) - 1
    return TraceFunction(
        F,
        vals,
        "pullback",
        K.conductor_bound * (1 + max(deg, 0)),
        K.fourier_eligible,
        meta={"num": num_t, "den": den_t, "base": K.kind},
    )


def pointwise_product(K1: TraceFunction, K2: TraceFunction) -> TraceFunction:
    if K1.field != K2.field:
        raise FieldMismatchError("product of trace functions over different fields")
    return TraceFunction(
        K1.field,
        K1.values * K2.values,
        "product",
        K1.conductor_bound * K2.conductor_bound,
        K1.fourier_eligible and K2.fourier_eligible,
    )


def linear_combination(terms: Sequence[tuple[complex, TraceFunction]]) -> TraceFunction:
    """sum_i c_i K_i over a common field."""
    F = terms[0][1].field
    vals = np.zeros(F.p, dtype=np.complex128)
    bound = 0.0
    eligible = True
    for c, K in terms:
        if K.field != F:
            raise FieldMismatchError("linear combination over different fields")
        vals = vals + c * K.values
        bound += abs(c) * K.conductor_bound
        eligible = eligible and K.fourier_eligible
    return TraceFunction(F, vals, "custom", bound or 1.0, eligible)


def residue_indicator(F, r: int) -> TraceFunction:
    """1 at x = r, 0 elsewhere."""
    F = _field(F)
    vals = np.zeros(F.p, dtype=complex)
    vals[int(r) % F.p] = 1
    return TraceFunction(F, vals, "custom", 1.0, True)
