"""Smoothed twists S_V(f, K; p) = sum_n lam(n) K(n mod p) V(n/p) of a cusp
form's normalized coefficients by a trace function, and the exponent fit
against the trivial bound."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from tracefn import kernels
from tracefn.cusp import CuspFormCoeffs, amplifier_weights
from tracefn.errors import DomainError, ExtentError
from tracefn.trace_zoo import TraceFunction

WINDOW_CUTOFF = 1e-12
BURGESS_DELTA = 1 / 8


@dataclass(frozen=True)
class Window:
    """V(x) for x > 0, evaluated at x = n / (scale * p).

    logbump:  exp(-4 (log x)^2), effectively supported on [0.072, 13.9]
    gaussian: exp(-pi (x - 1)^2 * 4)
    """

    profile: str = "logbump"
    scale: float = 1.0

    def __post_init__(self):
        if self.profile not in ("logbump", "gaussian"):
            raise DomainError(f"unknown window profile {self.profile!r}")
        if self.scale <= 0:
            raise DomainError("window scale must be positive")

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64) / self.scale
        out = np.zeros_like(x)
        pos = x > 0
        if self.profile == "logbump":
            out[pos] = np.exp(-4.0 * np.log(x[pos]) ** 2)
        else:
            out[pos] = np.exp(-4.0 * np.pi * (x[pos] - 1.0) ** 2)
        return out

    def x_max(self) -> float:
        """Largest x with V(x) >= WINDOW_CUTOFF."""
        t = -math.log(WINDOW_CUTOFF)
        if self.profile == "logbump":
            return self.scale * math.exp(math.sqrt(t / 4.0))
        return self.scale * (1.0 + math.sqrt(t / (4.0 * math.pi)))

    def extent(self, p: int) -> int:
        """Coefficient extent needed for the sum at modulus p."""
        return int(math.floor(self.x_max() * p)) + 1

    def describe(self) -> dict:
        return {"profile": self.profile, "scale": self.scale}


def _weights(coeffs: CuspFormCoeffs, V: Window, p: int) -> tuple[np.ndarray, np.ndarray]:
    need = V.extent(p)
    if need > coeffs.N:
        raise ExtentError(f"S_V at p = {p} needs coefficients up to {need}, have {coeffs.N}")
    n = np.arange(1, need + 1)
    v = V(n / p)
    v[np.abs(v) < WINDOW_CUTOFF] = 0.0
    return n, coeffs.lam[1 : need + 1] * v


def twisted_sum(coeffs: CuspFormCoeffs, K: TraceFunction, V: Window | None = None) -> complex:
    """sum_{n >= 1} lam(n) K(n mod p) V(n/p), truncated where |V| < 1e-12."""
    V = V or Window()
    p = K.p
    n, w = _weights(coeffs, V, p)
    return complex(np.dot(w, K.values[n % p]))


def trivial_bound(coeffs: CuspFormCoeffs, K: TraceFunction, V: Window | None = None) -> float:
    """||K||_inf * sum_n |lam(n) V(n/p)| over the same truncated range."""
    V = V or Window()
    _, w = _weights(coeffs, V, K.p)
    return K.sup_norm() * float(np.sum(np.abs(w)))


@dataclass(frozen=True)
class TwistRow:
    p: int
    S: complex
    trivial: float

    @property
    def abs(self) -> float:
        return abs(self.S)

    @property
    def ratio(self) -> float:
        return self.abs / self.trivial if self.trivial else 0.0


@dataclass(frozen=True)
class ExponentFit:
    delta: float | None
    stderr: float | None
    slope: float | None
    intercept: float | None
    n_used: int
    dropped: list[int]
    passed: bool | None
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "delta_emp": self.delta,
            "stderr": self.stderr,
            "slope": self.slope,
            "intercept": self.intercept,
            "n_used": self.n_used,
            "dropped": self.dropped,
            "pass": self.passed,
            "note": self.note,
        }


@dataclass
class TwistRun:
    form: str
    kernel: str
    primes: list[int]
    window: Window
    rows: list[TwistRow] = field(default_factory=list)
    control: bool = False

    def fit(self) -> ExponentFit:
        return exponent_fit(self)


def run_twist(
    coeffs: CuspFormCoeffs,
    kernel_factory: Callable[[int], TraceFunction],
    primes: Sequence[int],
    V: Window | None = None,
    kernel_name: str = "custom",
    control: bool = False,
    threads=1,
) -> TwistRun:
    """Compute S_V over ``primes``; per-prime work runs in parallel and is
    gathered in ascending prime order."""
    V = V or Window()
    primes = sorted(int(p) for p in primes)
    for p in primes:
        if coeffs.level % p == 0:
            raise DomainError(f"p = {p} divides the level")
    need = max((V.extent(p) for p in primes), default=0)
    if need > coeffs.N:
        raise ExtentError(f"run needs coefficients up to {need}, have {coeffs.N}")

    def one(p: int) -> TwistRow:
        K = kernel_factory(p)
        return TwistRow(p, twisted_sum(coeffs, K, V), trivial_bound(coeffs, K, V))

    nthreads = kernels.resolve_threads(threads)
    if nthreads > 1:
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            rows = list(pool.map(one, primes))
    else:
        rows = [one(p) for p in primes]
    return TwistRun(coeffs.name, kernel_name, primes, V, rows, control)


def exponent_fit(run: TwistRun) -> ExponentFit:
    """Least squares for log|S| = (1 - delta) log p + c.

    PASS when delta >= 1/8 - 2 stderr; control runs report the fit with
    ``passed = None``.
    """
    rows = [r for r in run.rows if r.abs >= 1e-12]
    dropped = [r.p for r in run.rows if r.abs < 1e-12]
    if len(run.rows) < 5:
        raise DomainError("exponent fit needs at least 5 primes")
    if len(rows) < 3:
        return ExponentFit(None, None, None, None, len(rows), dropped, None, "degenerate: |S| below 1e-12")
    x = np.log([r.p for r in rows])
    y = np.log([r.abs for r in rows])
    A = np.stack([x, np.ones_like(x)], axis=1)
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ np.array([slope, intercept])
    dof = len(rows) - 2
    sigma2 = float(resid @ resid) / dof if dof > 0 else float("nan")
    sxx = float(np.sum((x - x.mean()) ** 2))
    stderr = math.sqrt(sigma2 / sxx) if sxx > 0 else float("nan")
    delta = 1.0 - float(slope)
    note = f"dropped {len(dropped)} rows with |S| < 1e-12" if dropped else ""
    passed = None if run.control else bool(delta >= BURGESS_DELTA - 2 * stderr)
    return ExponentFit(delta, stderr, float(slope), float(intercept), len(rows), dropped, passed, note)


def amplified_second_moment_demo(
    coeffs: CuspFormCoeffs, K: TraceFunction, L: float, kind: str, V: Window | None = None
) -> dict:
    """|A|^2 |S_V|^2 for the single form, A = sum_l x_l lam(l)."""
    amp = amplifier_weights(kind, L, coeffs)
    S = twisted_sum(coeffs, K, V)
    A = amp.value
    return {
        "kind": kind,
        "L": L,
        "p": K.p,
        "A": A,
        "A_exact": str(amp.exact_value) if amp.exact_value is not None else None,
        "gain": A * A,
        "S_re": S.real,
        "S_im": S.imag,
        "S_abs": abs(S),
        "amplified": A * A * abs(S) ** 2,
        "n_weights": len(amp.weights),
    }
