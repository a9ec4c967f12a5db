import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tracefn.errors import DomainError
from tracefn.lattice import (
    IdealLattice,
    NumberFieldSpec,
    Profile,
    count_divisor_pairs,
    count_units_in_box,
    divisor_pairs,
    lattice_sum,
    shortest_vector_lower_bound,
    units_in_box,
)
from tracefn.lattice.counting import integral_ideals_of_norm, principal_generator

from oracles import brute_divisor_pairs, brute_units_q2

Q = NumberFieldSpec.rationals()
Q2 = NumberFieldSpec.quadratic(2)


def ideal(F, *gens):
    return IdealLattice.from_generators(F, [F.elt(*g) if isinstance(g, tuple) else F.elt(g) for g in gens])


# --- number fields ------------------------------------------------------------


@pytest.mark.parametrize("D", [2, 3, 5, 6, 7, 13, 19, 21, 29, 46, 94, 109, -1, -2, -3, -5, -7, -15])
def test_field_invariants(D):
    F = NumberFieldSpec.quadratic(D)
    assert F.disc == (D if D % 4 == 1 else 4 * D)
    assert F.signature == ((2, 0) if D > 0 else (0, 1))
    if D > 0:
        u = F.fundamental_unit
        assert abs(F.norm(u)) == 1 and F.is_integral(u)
        assert F.embeddings(u)[0].real > 1
    else:
        assert F.fundamental_unit is None
        for z in F.roots_of_unity:
            assert F.norm(z) == 1 and F.pow(z, F.n_roots_of_unity) == F.elt(1)


def test_known_fundamental_units():
    assert NumberFieldSpec.quadratic(2).fundamental_unit == (1, 1)
    assert NumberFieldSpec.quadratic(3).fundamental_unit == (2, 1)
    assert NumberFieldSpec.quadratic(5).fundamental_unit == (Fraction(1, 2), Fraction(1, 2))
    assert NumberFieldSpec.quadratic(94).fundamental_unit == (2143295, 221064)


def test_fundamental_unit_is_minimal():
    # no unit in 1 < u < eps with small coordinates
    for D in (2, 3, 6, 7, 11, 13):
        F = NumberFieldSpec.quadratic(D)
        eps = F.embeddings(F.fundamental_unit)[0].real
        for x2 in range(-60, 61):
            for y2 in range(-60, 61):
                u = (Fraction(x2, 2), Fraction(y2, 2))
                if not F.is_integral(u) or abs(F.norm(u)) != 1:
                    continue
                v = F.embeddings(u)[0].real
                assert not (1 + 1e-12 < v < eps - 1e-9)


def test_field_errors():
    for bad in (0, 1, 4, 12, -4):
        with pytest.raises(DomainError):
            NumberFieldSpec.quadratic(bad)
    with pytest.raises(DomainError):
        NumberFieldSpec.from_config({"degree": 3})
    with pytest.raises(DomainError):
        NumberFieldSpec.from_config({"degree": 2})
    assert NumberFieldSpec.from_config({"degree": 2, "D": -5}).D == -5
    assert NumberFieldSpec.from_config({"degree": 1}).degree == 1


@given(st.sampled_from([2, 5, -1, -3, -5, 13]), st.tuples(*[st.integers(-20, 20)] * 4))
def test_element_arithmetic(D, xs):
    F = NumberFieldSpec.quadratic(D)
    u = (Fraction(xs[0], 2), Fraction(xs[1], 3))
    v = (Fraction(xs[2]), Fraction(xs[3], 5))
    assert F.norm(F.mul(u, v)) == F.norm(u) * F.norm(v)
    assert F.trace(F.add(u, v)) == F.trace(u) + F.trace(v)
    if not F.is_zero(v):
        assert F.mul(F.div(u, v), v) == u
    eu = F.embeddings(u)
    ev = F.embeddings(v)
    euv = F.embeddings(F.mul(u, v))
    for a, b, c in zip(eu, ev, euv):
        assert abs(a * b - c) < 1e-9 * (1 + abs(c))
    assert F.coords(F.from_coords(F.coords(u))) == F.coords(u)
    x = np.dot(F.minkowski(u), F.minkowski(u))
    partner = u if D > 0 else F.conj(u)  # real: sum sigma_i(u)^2 = Tr(u^2)
    assert abs(x - float(F.trace(F.mul(u, partner)))) < 1e-9 * (1 + x)


@given(st.sampled_from([2, 3, 5, -1, -2, -3, -5]), st.integers(-30, 30), st.integers(-30, 30), st.floats(0.5, 200))
def test_abs_inf_less_is_exact_version_of_float(D, x, y, R):
    F = NumberFieldSpec.quadratic(D)
    u = F.elt(x, y)
    val = F.abs_inf(u)
    if abs(val - R) > 1e-9 * max(1.0, R):
        assert F.abs_inf_less(u, R) == (val < R)


# --- ideals ---------------------------------------------------------------------


@pytest.mark.parametrize(
    "D,gens",
    [
        (None, [3]),
        (None, [Fraction(1, 5)]),
        (2, [1]),
        (2, [(3, 1)]),
        (5, [2]),
        (-5, [2, (1, 1)]),
        (-1, [(1, 1)]),
        (-3, [(Fraction(1, 2), Fraction(3, 2))]),
        (10, [3, (1, 1)]),
    ],
)
def test_ideal_invariants(D, gens):
    F = NumberFieldSpec(D)
    I = ideal(F, *gens)
    det = abs(np.linalg.det(I.embedding_matrix)) if F.degree == 2 else abs(I.embedding_matrix[0, 0])
    assert abs(det - float(I.norm) * math.sqrt(abs(F.disc))) < 1e-9 * det
    Id = I.dual()
    assert Id.norm == 1 / (abs(F.disc) * I.norm)
    # trace pairing between I and its dual is integral
    for u in I.basis:
        for v in Id.basis:
            assert F.trace(F.mul(u, v)).denominator == 1
    assert (I * I.inverse()) == IdealLattice.unit(F)
    for b in I.basis:
        assert I.contains(b)
        for w in F.integral_basis:
            assert I.contains(F.mul(b, w))


def test_ideal_norms_and_products():
    F = NumberFieldSpec.quadratic(-5)
    P = ideal(F, 2, (1, 1))
    assert P.norm == 2 and P != IdealLattice.unit(F)
    assert principal_generator(P) is None
    assert P * P == ideal(F, 2)
    assert ideal(F, (3, 1)).norm == 14
    assert len(integral_ideals_of_norm(F, 6)) == 2  # 2 ramifies, 3 splits: P2 P3 and P2 P3'
    with pytest.raises(DomainError):
        IdealLattice.from_generators(F, [F.elt(0)])


# --- lattice sums ---------------------------------------------------------------


def test_lattice_sum_examples():
    r = lattice_sum(ideal(Q, 1), "gaussian", 10)
    assert r.main_term == 10 and abs(r.value / 10 - 1) < 1e-8
    r = lattice_sum(ideal(Q, Fraction(1, 5)), "gaussian", 1)
    assert abs(r.value - 5) / 5 < 1e-6
    r = lattice_sum(ideal(Q2, 1), "gaussian", 20)
    assert abs(r.value - 400 / math.sqrt(8)) / r.value < 1e-4
    with pytest.raises(DomainError):
        lattice_sum(ideal(Q, 1), "gaussian", 0)
    with pytest.raises(DomainError):
        lattice_sum(ideal(Q, 1), "boxcar", 1)


POISSON_CASES = [
    (None, [1], 0.5),
    (None, [1], 3.0),
    (None, [Fraction(1, 5)], 1.0),
    (None, [7], 10.0),
    (2, [1], 1.0),
    (2, [1], 5.0),
    (2, [(3, 1)], 2.0),
    (2, [Fraction(1, 3)], 1.0),
    (5, [1], 3.0),
    (-1, [(1, 1)], 2.0),
    (-3, [1], 4.0),
    (-5, [2, (1, 1)], 3.0),
]


@pytest.mark.parametrize("D,gens,R", POISSON_CASES)
@pytest.mark.parametrize("profile", ["gaussian", "bump"])
def test_poisson_identity(D, gens, R, profile):
    F = NumberFieldSpec(D)
    r = lattice_sum(ideal(F, *gens), profile, R)
    assert r.poisson_residual < 1e-8
    assert abs(r.value - r.main_term) <= r.error_bound + 1e-9


@pytest.mark.parametrize("F", [Q, Q2], ids=["Q", "Q(sqrt2)"])
def test_fitted_constant_stable_across_norms(F):
    if F.degree == 1:
        ideals = [ideal(F, Fraction(1, 10)), ideal(F, Fraction(1, 3)), ideal(F, 1), ideal(F, 7), ideal(F, 100)]
    else:
        ideals = [ideal(F, Fraction(1, 10)), ideal(F, 1), ideal(F, (0, 1)), ideal(F, (3, 1)), ideal(F, 10)]
    f = Profile("gaussian")
    n = F.degree
    sob = f.sobolev_norm(n)
    ratios = []
    for I in ideals:
        R = 6.0 * float(I.norm) ** (1 / n)
        r = lattice_sum(I, f, R)
        ratios.append(r.value / (sob * R**n / float(I.norm)))
    C = float(np.median(ratios))
    assert all(0.8 * C <= x <= 1.2 * C for x in ratios), ratios


def test_sobolev_norms_positive_and_growing():
    for name in ("gaussian", "bump"):
        f = Profile(name)
        assert 0 < f.sobolev_norm(1) < f.sobolev_norm(2)


def test_shortest_vector_bound_examples():
    assert shortest_vector_lower_bound(ideal(Q, 1)) == 1
    assert shortest_vector_lower_bound(ideal(Q2, 1)) == 2
    assert shortest_vector_lower_bound(ideal(Q, Fraction(1, 5))) == pytest.approx(0.2)
    assert Q2.abs_inf(Q2.elt(1)) == 2


@pytest.mark.parametrize("D,gens", [(None, [1]), (None, [Fraction(1, 5)]), (2, [1]), (2, [(3, 1)]), (-5, [2, (1, 1)]), (-3, [1]), (5, [(1, 1)])])
def test_amgm_bound_exhaustive(D, gens):
    F = NumberFieldSpec(D)
    I = ideal(F, *gens)
    bound = shortest_vector_lower_bound(I)
    coeffs, _ = I.points_in_ball(10)
    for c in coeffs:
        if c.any():
            m = I.element(c)
            if F.abs_inf(m) < 10:
                assert F.abs_inf(m) >= bound - 1e-12


# --- units ----------------------------------------------------------------------


def test_unit_examples():
    assert count_units_in_box(Q, Q.elt(3), 10) == 2
    assert count_units_in_box(Q2, Q2.elt(1), 100) == 22
    with pytest.raises(DomainError):
        count_units_in_box(Q2, Q2.elt(0), 10)


@pytest.mark.parametrize("m0", [(1, 0), (3, 1), (7, 0), (5, -2), (1, 4)])
def test_unit_counts_match_power_enumeration(m0):
    for j in range(0, 7):
        for R in (10**j, 3 * 10**j):
            got = count_units_in_box(Q2, Q2.elt(*m0), R)
            assert got == brute_units_q2(m0, R)


def test_unit_count_log_growth():
    counts = [count_units_in_box(Q2, Q2.elt(1), 10**j) for j in range(1, 7)]
    log_eps = math.log(1 + math.sqrt(2))
    for j, c in enumerate(counts, start=1):
        main = 2 * (2 * math.log(10**j / 2) / log_eps + 1)
        assert abs(c - main) <= 4
    per = [c / j for j, c in enumerate(counts, start=1)]
    assert max(per) < 12
    assert counts == sorted(counts)


@given(st.integers(-20, 20), st.integers(-20, 20), st.integers(-8, 8), st.floats(1, 1e5))
def test_unit_count_depends_only_on_ideal(x, y, k, R):
    m0 = Q2.elt(x, y)
    if Q2.is_zero(m0):
        return
    u = Q2.mul(Q2.pow(Q2.fundamental_unit, k), Q2.elt(-1 if k % 2 else 1))
    assert count_units_in_box(Q2, m0, R) == count_units_in_box(Q2, Q2.mul(u, m0), R)


def test_imaginary_units():
    F = NumberFieldSpec.quadratic(-1)
    assert count_units_in_box(F, F.elt(2, 1), 100) == 4
    F3 = NumberFieldSpec.quadratic(-3)
    assert count_units_in_box(F3, F3.elt(1), 3) == 6
    assert count_units_in_box(F3, F3.elt(1), 2) == 0


# --- divisors -------------------------------------------------------------------


def test_divisor_examples():
    assert count_divisor_pairs(Q, ideal(Q, 1), Q.elt(12), 100) == 12
    assert count_divisor_pairs(Q, ideal(Q, 1), Q.elt(1), 1.5) == 2
    with pytest.raises(DomainError):
        count_divisor_pairs(Q, ideal(Q, 2), Q.elt(2), 10)
    with pytest.raises(DomainError):
        count_divisor_pairs(Q, ideal(Q, 1), Q.elt(0), 10)


DIVISOR_CASES = [
    (None, [1], 12, 100),
    (None, [1], 360, 50),
    (None, [2], 24, 30),
    (2, [1], 2, 10),
    (2, [1], (7, 0), 40),
    (2, [(0, 1)], (6, 2), 30),
    (5, [1], 11, 40),
    (-1, [1], 5, 20),
    (-3, [1], 7, 20),
    (-5, [2, (1, 1)], 2, 12),
    (-5, [2, (1, 1)], 6, 20),
    (-5, [1], 6, 20),
]


@pytest.mark.parametrize("D,gens,k,R", DIVISOR_CASES)
def test_divisor_pairs_match_brute_force(D, gens, k, R):
    F = NumberFieldSpec(D)
    I = ideal(F, *gens)
    kk = F.elt(*k) if isinstance(k, tuple) else F.elt(k)
    got = divisor_pairs(F, I, kk, R)
    assert len(got) == len(set(got))
    assert set(got) == brute_divisor_pairs(F, I, kk, R)
    for m, n in got:
        assert F.mul(m, n) == kk and I.contains(m) and I.contains(n)
