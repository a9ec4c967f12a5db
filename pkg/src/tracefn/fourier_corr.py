"""Unitary Fourier transform on F_p, correlation sums, the PGL_2(F_p) action
on P^1(F_p), and exhaustive scans for large Moebius self-correlation."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from tracefn import kernels
from tracefn.errors import DomainError, FieldMismatchError
from tracefn.ff_core import PrimeField
from tracefn.trace_zoo import TraceFunction

POLE = None  # image of a point sent to infinity


def fourier(K: TraceFunction, method: str = "fast") -> TraceFunction:
    """K^(x) = p^{-1/2} sum_y K(y) e(-xy/p)."""
    p = K.p
    if method == "fast":
        vals = np.fft.fft(K.values) / math.sqrt(p)
    elif method == "naive":
        vals = dft_naive(K.values)
    else:
        raise ValueError(f"unknown method {method!r}")
    bound = max(K.conductor_bound, float(np.max(np.abs(vals))))
    return TraceFunction(K.field, vals, f"fourier({K.kind})", bound, K.fourier_eligible)


def dft_naive(values: np.ndarray) -> np.ndarray:
    """O(p^2) transform straight from the definition."""
    values = np.asarray(values, dtype=np.complex128)
    p = values.shape[0]
    idx = np.outer(np.arange(p), np.arange(p)) % p
    phase = np.exp(-2j * np.pi * np.arange(p) / p)
    return (phase[idx] @ values) / math.sqrt(p)


def correlate(K1: TraceFunction, K2: TraceFunction) -> complex:
    """(1/p) sum_a K1(a) conj(K2(a))."""
    if K1.field != K2.field:
        raise FieldMismatchError("correlation of trace functions over different fields")
    return complex(np.vdot(K2.values, K1.values) / K1.p)


@dataclass(frozen=True, order=True)
class MobiusMap:
    """An element of PGL_2(F_p), stored with its first nonzero entry equal to 1."""

    a: int
    b: int
    c: int
    d: int
    p: int = field(compare=False)

    @classmethod
    def from_matrix(cls, a: int, b: int, c: int, d: int, p: int) -> MobiusMap:
        a, b, c, d = (int(v) % p for v in (a, b, c, d))
        if (a * d - b * c) % p == 0:
            raise DomainError(f"singular matrix [[{a},{b}],[{c},{d}]] mod {p}")
        lead = next(v for v in (a, b, c, d) if v)
        s = pow(lead, -1, p)
        return cls(a * s % p, b * s % p, c * s % p, d * s % p, p)

    @classmethod
    def identity(cls, p: int) -> MobiusMap:
        return cls(1, 0, 0, 1, p)

    def __post_init__(self):
        p = self.p
        if (self.a * self.d - self.b * self.c) % p == 0:
            raise DomainError("singular matrix")
        lead = next(v for v in self.astuple() if v)
        if lead != 1 or any(not 0 <= v < p for v in self.astuple()):
            raise DomainError("MobiusMap entries must be normalized; use MobiusMap.from_matrix")

    def astuple(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def __matmul__(self, other: MobiusMap) -> MobiusMap:
        """Composition: (self @ other)(x) = self(other(x))."""
        a, b, c, d = self.astuple()
        e, f, g, h = other.astuple()
        return MobiusMap.from_matrix(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h, self.p)

    def inverse(self) -> MobiusMap:
        a, b, c, d = self.astuple()
        return MobiusMap.from_matrix(d, -b, -c, a, self.p)

    def __call__(self, x: int):
        return mobius_apply(self, x)

    def is_upper_triangular(self) -> bool:
        return self.c == 0


def mobius_apply(gamma: MobiusMap, x: int):
    """(a x + b)/(c x + d) in F_p, or POLE when c x + d = 0."""
    p = gamma.p
    x = int(x) % p
    den = (gamma.c * x + gamma.d) % p
    if den == 0:
        return POLE
    return (gamma.a * x + gamma.b) * pow(den, -1, p) % p


def _require_fourier(K: TraceFunction) -> None:
    if not K.fourier_eligible:
        raise DomainError(
            f"kernel {K.kind!r} has an additive-character component; its Fourier "
            "transform is a delta mass and Moebius correlations are undefined"
        )


def _gamma_corr_khat(khat: np.ndarray, F: PrimeField, gamma: MobiusMap) -> complex:
    p = F.p
    xs = np.arange(p, dtype=np.int64)
    den = (gamma.c * xs + gamma.d) % p
    ok = den != 0
    y = (gamma.a * xs[ok] + gamma.b) % p * F.inv_table[den[ok]] % p
    return complex(np.sum(khat[ok] * np.conj(khat[y])) / p)


def gamma_correlation(K: TraceFunction, gamma: MobiusMap) -> complex:
    """(1/p) sum_{a : gamma(a) finite} K^(a) conj(K^(gamma a))."""
    _require_fourier(K)
    if gamma.p != K.p:
        raise FieldMismatchError("Moebius map and kernel live over different fields")
    khat = fourier(K).values
    return _gamma_corr_khat(khat, K.field, gamma)


def gamma_family_matrix(m: int, n: int, mu: int, p: int) -> MobiusMap:
    """[[m, mu - m n], [1, -n]]; its determinant is -mu."""
    if int(mu) % p == 0:
        raise DomainError("gamma_{m,n}(mu) is singular for mu = 0")
    return MobiusMap.from_matrix(m, mu - m * n, 1, -n, p)


def gamma_family_correlation(K: TraceFunction, m: int, n: int, mu: int) -> complex:
    return gamma_correlation(K, gamma_family_matrix(m, n, mu, K.p))


def pgl2_order(p: int) -> int:
    return p * (p * p - 1)


def enumerate_pgl2(p: int) -> np.ndarray:
    """All normalized representatives of PGL_2(F_p) as rows (a, b, c, d),
    in lexicographic order."""
    r = np.arange(p, dtype=np.int64)
    # a = 0: b = 1, c != 0, d free
    c0, d0 = np.meshgrid(r[1:], r, indexing="ij")
    first = np.stack(
        [np.zeros(c0.size, np.int64), np.ones(c0.size, np.int64), c0.ravel(), d0.ravel()], axis=1
    )
    # a = 1: d != b c
    b1, c1, d1 = np.meshgrid(r, r, r, indexing="ij")
    b1, c1, d1 = b1.ravel(), c1.ravel(), d1.ravel()
    keep = (d1 - b1 * c1) % p != 0
    second = np.stack([np.ones(keep.sum(), np.int64), b1[keep], c1[keep], d1[keep]], axis=1)
    out = np.ascontiguousarray(np.concatenate([first, second]))
    return out


def is_subgroup(members: list[MobiusMap]) -> bool:
    """Exact closure under composition and inversion."""
    if not members:
        return False
    s = set(members)
    p = members[0].p
    if MobiusMap.identity(p) not in s:
        return False
    for g in members:
        if g.inverse() not in s:
            return False
        for h in members:
            if g @ h not in s:
                return False
    return True


@dataclass
class FMScanReport:
    p: int
    kind: str
    tau: float
    members: list[MobiusMap]
    values: list[float]
    phases: list[float]
    max_nonmember: float
    scanned: int
    elapsed_ms: float | None = None
    warnings: list[str] = field(default_factory=list)

    @property
    def min_member(self) -> float:
        return min(self.values) if self.values else 0.0

    def closed(self) -> bool:
        return is_subgroup(self.members)

    def to_dict(self, timing: bool = True) -> dict:
        return {
            "p": self.p,
            "kind": self.kind,
            "tau": self.tau,
            "members": [list(g.astuple()) for g in self.members],
            "values": [round(v, 12) for v in self.values],
            "phases": [round(v, 12) for v in self.phases],
            "max_nonmember": round(self.max_nonmember, 12),
            "scanned": self.scanned,
            "closed": self.closed(),
            "warnings": list(self.warnings),
            "elapsed_ms": round(self.elapsed_ms, 3) if timing and self.elapsed_ms is not None else None,
        }


def fm_scan_values(K: TraceFunction, threads=1, backend: str | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Correlations C(K, gamma) for every gamma from :func:`enumerate_pgl2`."""
    _require_fourier(K)
    F = K.field
    mats = enumerate_pgl2(F.p)
    khat = np.ascontiguousarray(fourier(K).values)
    impl = kernels.BACKENDS[backend] if backend else kernels
    raw = impl.gamma_corr_batch(mats, khat, np.ascontiguousarray(F.inv_table), kernels.resolve_threads(threads))
    return mats, raw / F.p


def fm_scan(K: TraceFunction, tau: float = 0.5, threads=1, backend: str | None = None) -> FMScanReport:
    """Every gamma in PGL_2(F_p) with |C(K, gamma)| >= tau."""
    if not 0 < tau < 1:
        raise DomainError(f"threshold must lie in (0, 1), got {tau}")
    t0 = time.perf_counter()
    mats, corr = fm_scan_values(K, threads=threads, backend=backend)
    mags = np.abs(corr)
    hit = mags >= tau
    p = K.p
    members = [MobiusMap(*map(int, row), p) for row in mats[hit]]
    max_non = float(mags[~hit].max()) if (~hit).any() else 0.0
    report = FMScanReport(
        p=p,
        kind=K.kind,
        tau=tau,
        members=members,
        values=[float(v) for v in mags[hit]],
        phases=[float(v) for v in np.angle(corr[hit])],
        max_nonmember=max_non,
        scanned=int(mats.shape[0]),
        elapsed_ms=(time.perf_counter() - t0) * 1e3,
    )
    if p >= 53 and members and report.min_member < 2 * max_non:
        report.warnings.append(
            f"weak separation: min member {report.min_member:.4f} < 2 x max non-member {max_non:.4f}"
        )
    if members and not report.closed():
        report.warnings.append("detected set is not closed under the group law")
    return report
