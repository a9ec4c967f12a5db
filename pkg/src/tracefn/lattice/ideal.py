"""Fractional ideals of Q and quadratic fields as Z-lattices in Minkowski space."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from typing import Iterable, Sequence

import numpy as np

from tracefn.errors import DomainError
from tracefn.lattice.numberfield import Elt, NumberFieldSpec


def _hnf(rows: list[list[int]], ncols: int) -> list[list[int]]:
    """Row Hermite normal form of a full-rank integer lattice, as an
    upper-triangular square basis with positive diagonal and reduced
    entries above it."""
    rows = [list(r) for r in rows if any(r)]
    basis = []
    for col in range(ncols):
        # gcd-combine the column entries of the remaining rows
        pivot = None
        rest = []
        for r in rows:
            if r[col] == 0:
                rest.append(r)
                continue
            if pivot is None:
                pivot = r
                continue
            g, s, t = _xgcd(pivot[col], r[col])
            u, v = pivot[col] // g, r[col] // g
            new_pivot = [s * x + t * y for x, y in zip(pivot, r)]
            other = [u * y - v * x for x, y in zip(pivot, r)]
            pivot = new_pivot
            if any(other):
                rest.append(other)
        if pivot is None:
            raise DomainError("generators do not span a full-rank lattice")
        if pivot[col] < 0:
            pivot = [-x for x in pivot]
        basis.append(pivot)
        rows = rest
    # reduce entries above the diagonal
    for i in range(ncols - 1, -1, -1):
        for j in range(i):
            q = basis[j][i] // basis[i][i]
            if q:
                basis[j] = [x - q * y for x, y in zip(basis[j], basis[i])]
    return basis


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def _det(m: Sequence[Sequence[Fraction]]) -> Fraction:
    if len(m) == 1:
        return m[0][0]
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


def _solve(m: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> list[Fraction]:
    """Row vector c with c . m = v."""
    if len(m) == 1:
        return [v[0] / m[0][0]]
    det = _det(m)
    (a, b), (c, d) = m
    # c0*(a,b) + c1*(c,d) = v
    return [(v[0] * d - v[1] * c) / det, (a * v[1] - b * v[0]) / det]


@dataclass(frozen=True)
class IdealLattice:
    """A nonzero fractional ideal, stored by an HNF Z-basis in integral-basis
    coordinates (rows of ``basis_coords``)."""

    field: NumberFieldSpec
    basis_coords: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def from_generators(cls, F: NumberFieldSpec, gens: Iterable[Elt]) -> IdealLattice:
        gens = [g for g in gens if not F.is_zero(g)]
        if not gens:
            raise DomainError("the zero ideal is not a lattice")
        zgens = []
        for g in gens:
            for w in F.integral_basis:
                zgens.append(F.coords(F.mul(g, w)))
        den = reduce(math.lcm, (c.denominator for row in zgens for c in row), 1)
        rows = [[int(c * den) for c in row] for row in zgens]
        basis = _hnf(rows, F.degree)
        coords = tuple(tuple(Fraction(x, den) for x in row) for row in basis)
        return cls(F, coords)

    @classmethod
    def principal(cls, F: NumberFieldSpec, m: Elt) -> IdealLattice:
        return cls.from_generators(F, [m])

    @classmethod
    def unit(cls, F: NumberFieldSpec) -> IdealLattice:
        return cls.principal(F, F.elt(1))

    # --- structure --------------------------------------------------------

    @property
    def degree(self) -> int:
        return self.field.degree

    @cached_property
    def basis(self) -> list[Elt]:
        return [self.field.from_coords(row) for row in self.basis_coords]

    @cached_property
    def norm(self) -> Fraction:
        """Nm(I) = [O : I] extended multiplicatively to fractional ideals."""
        return abs(_det(self.basis_coords))

    @cached_property
    def embedding_matrix(self) -> np.ndarray:
        """Rows are Minkowski images of the Z-basis."""
        return np.array([self.field.minkowski(b) for b in self.basis])

    @cached_property
    def covolume(self) -> float:
        return float(self.norm) * math.sqrt(abs(self.field.disc))

    def contains(self, u: Elt) -> bool:
        c = _solve(self.basis_coords, self.field.coords(u))
        return all(x.denominator == 1 for x in c)

    def contains_ideal(self, other: IdealLattice) -> bool:
        return all(self.contains(b) for b in other.basis)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, IdealLattice)
            and self.field == other.field
            and self.basis_coords == other.basis_coords
        )

    def __hash__(self) -> int:
        return hash((self.field, self.basis_coords))

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for row in self.basis_coords for c in row)

    # --- ideal arithmetic ---------------------------------------------------

    def __mul__(self, other: IdealLattice) -> IdealLattice:
        F = self.field
        return IdealLattice.from_generators(F, [F.mul(u, v) for u in self.basis for v in other.basis])

    def scale(self, m: Elt) -> IdealLattice:
        F = self.field
        return IdealLattice.from_generators(F, [F.mul(m, b) for b in self.basis])

    def conjugate(self) -> IdealLattice:
        F = self.field
        return IdealLattice.from_generators(F, [F.conj(b) for b in self.basis])

    def inverse(self) -> IdealLattice:
        """I^{-1} = conj(I) / Nm(I); over Q simply (1/r) Z."""
        F = self.field
        if F.degree == 1:
            return IdealLattice.from_generators(F, [F.inv(self.basis[0])])
        return self.conjugate().scale(F.elt(1 / self.norm))

    def dual(self) -> IdealLattice:
        """{y : Tr(x y) in Z for all x in I}."""
        F = self.field
        n = F.degree
        ebasis = F.integral_basis
        # A[i][k] = Tr(b_i e_k); dual element d_j = sum_k M[j][k] e_k with A M^T = 1
        A = [[F.trace(F.mul(b, e)) for e in ebasis] for b in self.basis]
        if n == 1:
            Ainv = [[1 / A[0][0]]]
        else:
            det = _det(A)
            Ainv = [[A[1][1] / det, -A[0][1] / det], [-A[1][0] / det, A[0][0] / det]]
        # M^T = Ainv -> M[j][k] = Ainv[k][j]
        elts = [F.from_coords(tuple(Ainv[k][j] for k in range(n))) for j in range(n)]
        return IdealLattice.from_generators(F, elts)

    # --- lattice geometry ---------------------------------------------------

    def points_in_ball(self, radius: float) -> tuple[np.ndarray, np.ndarray]:
        """Integer coefficient rows and Minkowski points with |x|_2 <= radius."""
        E = self.embedding_matrix
        Einv = np.linalg.inv(E)
        n = E.shape[0]
        # x = c E  =>  |c_j| <= radius * |column j of E^{-1}|
        bounds = [int(math.floor(radius * np.linalg.norm(Einv[:, j]) + 1e-9)) for j in range(n)]
        axes = [np.arange(-b, b + 1, dtype=np.int64) for b in bounds]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
        pts = grid @ E
        keep = np.einsum("ij,ij->i", pts, pts) <= radius * radius * (1 + 1e-12)
        return grid[keep], pts[keep]

    def element(self, coeffs: Sequence[int]) -> Elt:
        F = self.field
        out = F.elt(0)
        for c, b in zip(coeffs, self.basis):
            out = F.add(out, (b[0] * int(c), b[1] * int(c)))
        return out
