"""Counting lemmas over ideal lattices: smoothed point counts and their
Poisson dual, units of bounded size, and bounded divisor pairs."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

import numpy as np

from tracefn.errors import DomainError
from tracefn.lattice.ideal import IdealLattice
from tracefn.lattice.numberfield import Elt, NumberFieldSpec

TAIL_CUTOFF = 1e-14
_trapezoid = getattr(np, "trapezoid", None) or np.trapz


@dataclass(frozen=True)
class Profile:
    """A smooth product test function on R^n whose Fourier transform (for the
    pairing x . y) is itself."""

    name: str

    def __post_init__(self):
        if self.name not in ("gaussian", "bump"):
            raise DomainError(f"unknown test-function profile {self.name!r}")

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(x)
        if self.name == "gaussian":
            return np.exp(-np.pi * np.einsum("ij,ij->i", x, x))
        return np.prod(1.0 / np.cosh(np.pi * x), axis=1)

    def hat(self, y: np.ndarray) -> np.ndarray:
        # exp(-pi x^2) and sech(pi x) are both self-dual under e(-x y)
        return self(y)

    def cutoff_radius(self, n: int) -> float:
        """Euclidean radius beyond which the profile is below TAIL_CUTOFF."""
        if self.name == "gaussian":
            return math.sqrt(-math.log(TAIL_CUTOFF) / math.pi)
        # prod sech <= sech(pi max|x_i|) <= 2 exp(-pi |x|_2 / sqrt n)
        return math.sqrt(n) * math.log(2 / TAIL_CUTOFF) / math.pi

    def sobolev_norm(self, n: int) -> float:
        """sum over multi-indices |alpha| <= n+1 of ||d^alpha f||_{L^1}."""
        one_d = _derivative_l1_norms(self.name, n + 1)
        total = 0.0
        for alpha in product(range(n + 2), repeat=n):
            if sum(alpha) <= n + 1:
                total += math.prod(one_d[a] for a in alpha)
        return total


@lru_cache(maxsize=None)
def _derivative_l1_norms(name: str, kmax: int) -> tuple[float, ...]:
    """||g^(k)||_1 for k = 0..kmax, g(x) = exp(-pi x^2) or sech(pi x)."""
    P = np.polynomial.Polynomial
    xs = np.linspace(-14.0, 14.0, 280_001)
    out = []
    if name == "gaussian":
        poly = P([1.0])
        base = np.exp(-np.pi * xs * xs)
        for _ in range(kmax + 1):
            out.append(_trapezoid(np.abs(poly(xs) * base), xs))
            poly = poly.deriv() - P([0.0, 2 * np.pi]) * poly
    else:
        # g^(k) = P_k(tanh(pi x)) sech(pi x),  P_{k+1} = pi((1 - t^2) P_k' - t P_k)
        poly = P([1.0])
        t = np.tanh(np.pi * xs)
        base = 1.0 / np.cosh(np.pi * xs)
        for _ in range(kmax + 1):
            out.append(_trapezoid(np.abs(poly(t) * base), xs))
            poly = np.pi * (P([1.0, 0.0, -1.0]) * poly.deriv() - P([0.0, 1.0]) * poly)
    return tuple(float(v) for v in out)


@dataclass(frozen=True)
class LatticeSum:
    value: float
    main_term: float
    dual_sum: float  # (R^n / covol) * sum over the dual lattice, incl. the origin
    error_bound: float
    points: int

    @property
    def poisson_residual(self) -> float:
        return abs(self.value - self.dual_sum)


def _smoothed_sum(L: IdealLattice, f: Profile, R: float) -> tuple[float, int]:
    n = L.degree
    _, pts = L.points_in_ball(R * f.cutoff_radius(n))
    vals = f(pts / R)
    vals = vals[vals >= TAIL_CUTOFF]
    # sort before summing so the total does not depend on enumeration order
    return float(np.sum(np.sort(vals))), int(vals.size)


def lattice_sum(L: IdealLattice, f: Profile | str, R: float) -> LatticeSum:
    """sum_{m in I} f(m/R), its Poisson main term R^n f^(0) / covol(I), the
    full dual-side sum, and a rigorous bound on |value - main term|."""
    if R <= 0:
        raise DomainError("scale R must be positive")
    if isinstance(f, str):
        f = Profile(f)
    n = L.degree
    value, npts = _smoothed_sum(L, f, R)
    covol = L.covolume
    scale = R**n / covol
    main = scale * float(f.hat(np.zeros((1, n)))[0])
    dual = L.dual()
    # hat(R y) summed over the dual lattice = smoothed sum of hat at scale 1/R
    dual_raw, _ = _smoothed_sum(dual, f, 1.0 / R)
    bound = scale * _dual_tail_bound(f, n, R, shortest_vector_lower_bound(dual))
    return LatticeSum(value, main, scale * dual_raw, bound, npts)


def _dual_tail_bound(f: Profile, n: int, R: float, l1_min: float) -> float:
    """Upper bound for sum_{y in dual, y != 0} |f^(R y)|.

    Nonzero dual vectors have |y|_2 >= mu = l1_min / sqrt(n); disjoint balls
    of radius mu/2 give at most (3 + 2k)^n vectors with |y|_2 in [k mu, (k+1) mu).
    """
    mu = l1_min / math.sqrt(n)
    total = 0.0
    for k in range(1, 10_000):
        r = R * k * mu
        if f.name == "gaussian":
            term = math.exp(-math.pi * r * r)
        else:
            # prod sech(pi y_i) <= 2^n exp(-pi |y|_1) <= 2^n exp(-pi |y|_2)
            term = 2.0**n * math.exp(-math.pi * r)
        total += (3 + 2 * k) ** n * term
        if term < 1e-300 or (k > 3 and (3 + 2 * k) ** n * term < 1e-18 * max(total, 1e-300)):
            break
    return total


def shortest_vector_lower_bound(L: IdealLattice) -> float:
    """n Nm(I)^{1/n}, a lower bound for sum_i |sigma_i(m)| over nonzero m in I."""
    n = L.degree
    return n * float(L.norm) ** (1.0 / n)


# --- units -------------------------------------------------------------------


def _unit_window(F: NumberFieldSpec, m0: Elt, R: float) -> range:
    """Exponents k for which eps^k m0 can satisfy |.|_inf < R (with slack)."""
    eps = F.fundamental_unit
    le = math.log(float(eps[0]) + float(eps[1]) * math.sqrt(F.D))
    s1, s2 = (abs(z) for z in F.embeddings(m0))
    # need eps^k s1 < R and eps^-k s2 < R
    hi = math.floor(math.log(R / s1) / le) + 2
    lo = math.ceil(-math.log(R / s2) / le) - 2
    return range(lo, hi + 1)


def units_in_box(F: NumberFieldSpec, m0: Elt, R: float) -> list[Elt]:
    """All generators m = u m0 of (m0) with sum_i |sigma_i(m)| < R."""
    if F.is_zero(m0):
        raise DomainError("m0 must be nonzero")
    if R <= 0:
        return []
    out = []
    tors = F.roots_of_unity
    if F.fundamental_unit is None:
        cands = [F.mul(z, m0) for z in tors]
    else:
        cands = []
        eps = F.fundamental_unit
        for k in _unit_window(F, m0, R):
            base = F.mul(F.pow(eps, k), m0)
            cands.extend(F.mul(z, base) for z in tors)
    for m in cands:
        if F.abs_inf_less(m, R):
            out.append(m)
    return out


def count_units_in_box(F: NumberFieldSpec, m0: Elt, R: float) -> int:
    return len(units_in_box(F, m0, R))


# --- divisors ------------------------------------------------------------------


def integral_ideals_of_norm(F: NumberFieldSpec, N: int) -> list[IdealLattice]:
    """Every integral ideal of norm N, via HNF bases {(a, 0), (b, c)} with a c = N."""
    out = []
    if F.degree == 1:
        return [IdealLattice.principal(F, F.elt(N))]
    for a in range(1, N + 1):
        if N % a:
            continue
        c = N // a
        for b in range(a):
            gens = [F.from_coords((a, 0)), F.from_coords((b, c))]
            cand = IdealLattice.from_generators(F, gens)
            # closed under O iff the O-ideal generated has the same norm
            if cand.norm == N:
                out.append(cand)
    # distinct HNFs are distinct ideals; from_generators may collapse duplicates
    uniq = []
    for I in out:
        if I not in uniq:
            uniq.append(I)
    return uniq


def principal_generator(J: IdealLattice) -> Elt | None:
    """A generator of J, or None when J is not principal."""
    F = J.field
    target = J.norm
    if F.degree == 1:
        return J.basis[0]
    # some generator has all |sigma_i| <= sqrt(Nm * eps)
    eps_size = 1.0
    if F.fundamental_unit is not None:
        u = F.fundamental_unit
        eps_size = float(u[0]) + float(u[1]) * math.sqrt(F.D)
    radius = math.sqrt(2 * float(target) * eps_size) * (1 + 1e-9) + 1e-9
    coeffs, _ = J.points_in_ball(radius)
    best = None
    for c in coeffs:
        if not c.any():
            continue
        m = J.element(c)
        if abs(F.norm(m)) == target:
            size = F.abs_inf(m)
            if best is None or size < best[0]:
                best = (size, m)
    return None if best is None else best[1]


def divisor_pairs(F: NumberFieldSpec, I: IdealLattice, k: Elt, R: float) -> list[tuple[Elt, Elt]]:
    """Pairs (m, n) in I x I with m n = k and |m|_inf, |n|_inf < R.

    m runs over generators of I J for integral J dividing (k) I^{-2};
    each such J contributes the unit translates of one generator.
    """
    if F.is_zero(k):
        raise DomainError("k must be nonzero")
    I2 = I * I
    if not I2.contains(k):
        raise DomainError("k is not in I^2")
    if R <= 0:
        return []
    Iinv = I.inverse()
    K = IdealLattice.principal(F, k) * Iinv * Iinv  # integral since k in I^2
    NK = K.norm
    assert NK.denominator == 1
    NK = int(NK)
    out = []
    for d in range(1, NK + 1):
        if NK % d:
            continue
        for J in integral_ideals_of_norm(F, d):
            if not J.contains_ideal(K):
                continue
            gen = principal_generator(I * J)
            if gen is None:
                continue
            for m in units_in_box(F, gen, R):
                n = F.div(k, m)
                if F.abs_inf_less(n, R):
                    out.append((m, n))
    return out


def count_divisor_pairs(F: NumberFieldSpec, I: IdealLattice, k: Elt, R: float) -> int:
    return len(divisor_pairs(F, I, k, R))
