import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import dft_loop, legendre, pgl2_brute
from tracefn.errors import DomainError
from tracefn.ff_core import PrimeField, primes_between
from tracefn.fourier_corr import (
    POLE,
    MobiusMap,
    correlate,
    dft_naive,
    enumerate_pgl2,
    fm_scan,
    fourier,
    gamma_correlation,
    gamma_family_correlation,
    gamma_family_matrix,
    is_subgroup,
    mobius_apply,
    pgl2_order,
)
from tracefn.trace_zoo import (
    make_additive,
    make_kloosterman,
    make_legendre,
    make_mult,
    make_trivial,
    pointwise_product,
    pullback,
)


def zoo(p):
    out = [make_trivial(p), make_legendre(p), make_kloosterman(p, 2), make_kloosterman(p, 3)]
    if (p - 1) % 4 == 0:
        out.append(make_mult(p, 4))
    out.append(make_additive(p, 2))
    out.append(pullback(make_kloosterman(p, 2), [1, 0, 1]))
    out.append(pointwise_product(make_kloosterman(p, 2), make_legendre(p)))
    return out


def brute_gamma_corr(K, g):
    p = K.p
    kh = dft_loop(list(K.values), p)
    total = 0j
    for x in range(p):
        y = mobius_apply(g, x)
        if y is POLE:
            continue
        total += kh[x] * kh[y].conjugate()
    return total / p


def test_fourier_trivial():
    kh = fourier(make_trivial(7)).values
    assert abs(kh[0] - math.sqrt(7)) < 1e-12
    assert np.max(np.abs(kh[1:])) < 1e-12


def test_fourier_legendre_self_dual_p5():
    K = make_legendre(5)
    oracle = dft_loop([legendre(x, 5) for x in range(5)], 5)
    kh = fourier(K).values
    assert np.max(np.abs(kh - np.array(oracle))) < 1e-12
    assert np.max(np.abs(kh - K.values)) < 1e-12


@pytest.mark.parametrize("p", [13, 53])
def test_fast_matches_naive(p):
    for K in zoo(p):
        fast = fourier(K).values
        assert np.max(np.abs(fast - dft_naive(K.values))) < 1e-8
        assert np.max(np.abs(fourier(K, method="naive").values - fast)) < 1e-8


def test_naive_matches_loop():
    K = make_kloosterman(11, 2)
    assert np.max(np.abs(dft_naive(K.values) - np.array(dft_loop(list(K.values), 11)))) < 1e-12


@pytest.mark.parametrize("p", [13, 101, 499])
def test_plancherel_and_involution(p):
    for K in zoo(p):
        kh = fourier(K)
        assert abs(kh.l2_norm() - K.l2_norm()) < 1e-9
        twice = fourier(kh).values
        assert np.max(np.abs(twice - K.values[(-np.arange(p)) % p])) < 1e-9


def test_fourier_unknown_method():
    with pytest.raises(ValueError):
        fourier(make_trivial(5), method="magic")


def test_correlate_examples():
    assert abs(correlate(make_trivial(11), make_trivial(11)) - 1) < 1e-12
    K = make_kloosterman(13, 2)
    c = correlate(K, K)
    assert abs(c.imag) < 1e-12 and 0 < c.real <= 4
    assert abs(c - np.sum(np.abs(K.values) ** 2) / 13) < 1e-12
    c = correlate(make_kloosterman(101, 2), make_trivial(101))
    assert abs(c) <= 10 / math.sqrt(101)


@given(st.sampled_from([13, 29, 53]), st.integers(0, 10), st.integers(0, 10))
def test_correlate_bounded_by_sup_norms(p, i, j):
    ks = zoo(p)
    K1, K2 = ks[i % len(ks)], ks[j % len(ks)]
    assert abs(correlate(K1, K2)) <= K1.sup_norm() * K2.sup_norm() + 1e-12


def test_quasi_orthogonality_fitted_constant():
    worst = 0.0
    for p in [q for q in primes_between(53, 499)][::6]:
        K1 = make_kloosterman(p, 2)
        for c in (2, 3, p - 1):
            K2 = pullback(K1, [0, c])
            worst = max(worst, abs(correlate(K1, K2)) * math.sqrt(p))
    assert worst <= 20


def test_mobius_normalization_and_examples():
    g = MobiusMap.from_matrix(0, -1, 1, 0, 5)
    assert g.astuple() == (0, 1, 4, 0)
    assert mobius_apply(g, 2) == 2
    assert mobius_apply(g, 0) is POLE
    t = MobiusMap.from_matrix(1, 1, 0, 1, 7)
    assert t(6) == 0
    ident = MobiusMap.identity(11)
    assert all(ident(x) == x for x in range(11))
    assert MobiusMap.from_matrix(3, 6, 9, 5, 11) == MobiusMap.from_matrix(6, 12, 18, 10, 11)
    with pytest.raises(DomainError):
        MobiusMap.from_matrix(1, 2, 2, 4, 7)
    with pytest.raises(DomainError):
        MobiusMap(2, 0, 0, 1, 7)


@given(st.sampled_from([5, 7, 13]), st.data())
def test_composition_matches_action(p, data):
    mats = enumerate_pgl2(p)
    i = data.draw(st.integers(0, len(mats) - 1))
    j = data.draw(st.integers(0, len(mats) - 1))
    g = MobiusMap(*map(int, mats[i]), p)
    h = MobiusMap(*map(int, mats[j]), p)
    gh = g @ h
    for x in range(p):
        hx = h(x)
        if hx is POLE or g(hx) is POLE:
            continue
        assert gh(x) == g(hx)
    assert (g @ g.inverse()) == MobiusMap.identity(p)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_enumeration_matches_brute_force(p):
    mats = enumerate_pgl2(p)
    rows = [tuple(map(int, r)) for r in mats]
    assert len(rows) == pgl2_order(p)
    assert set(rows) == pgl2_brute(p)
    assert rows == sorted(rows)


def test_enumeration_order_counts():
    for p in (53, 101):
        assert enumerate_pgl2(p).shape == (pgl2_order(p), 4)


def test_gamma_correlation_identity_is_plancherel():
    K = make_kloosterman(13, 2)
    c = gamma_correlation(K, MobiusMap.identity(13))
    assert abs(c - np.sum(np.abs(K.values) ** 2) / 13) < 1e-12


def test_gamma_correlation_against_brute_force():
    p = 13
    K = make_kloosterman(p, 2)
    mats = enumerate_pgl2(p)
    for row in mats[::97]:
        g = MobiusMap(*map(int, row), p)
        assert abs(gamma_correlation(K, g) - brute_gamma_corr(K, g)) < 1e-10


def test_gamma_correlation_examples():
    p = 13
    L = make_legendre(p)
    for lam in range(1, p):
        if legendre(lam, p) == 1:
            g = MobiusMap.from_matrix(lam, 0, 0, 1, p)
            assert abs(abs(gamma_correlation(L, g)) - 1) <= 2 / 13
    K = make_kloosterman(53, 2)
    assert abs(gamma_correlation(K, MobiusMap.from_matrix(1, 1, 0, 1, 53))) <= 16 / math.sqrt(53)
    with pytest.raises(DomainError):
        gamma_correlation(make_additive(13, 1), MobiusMap.identity(13))


def test_gamma_family():
    L = make_legendre(13)
    g = gamma_family_matrix(0, 0, 1, 13)
    assert g.astuple() == (0, 1, 1, 0)
    assert abs(abs(gamma_family_correlation(L, 0, 0, 1)) - 1) <= 2 / 13
    assert abs(gamma_family_correlation(make_kloosterman(53, 2), 1, 1, 2)) <= 16 / math.sqrt(53)
    with pytest.raises(DomainError):
        gamma_family_matrix(1, 1, 0, 13)


@given(st.sampled_from([7, 13, 53]), st.integers(0, 100), st.integers(0, 100), st.integers(1, 100))
def test_gamma_family_never_upper_triangular(p, m, n, mu):
    if mu % p == 0:
        return
    assert not gamma_family_matrix(m, n, mu, p).is_upper_triangular()


def test_fm_scan_legendre_normalizer():
    p = 13
    r = fm_scan(make_legendre(p), 0.5)
    expect = sorted(
        [MobiusMap.from_matrix(lam, 0, 0, 1, p) for lam in range(1, p)]
        + [MobiusMap.from_matrix(0, mu, 1, 0, p) for mu in range(1, p)]
    )
    assert r.members == expect
    assert len(r.members) == 24 and r.closed()
    assert r.scanned == 2184


def test_fm_scan_order4_torus():
    p = 13
    r = fm_scan(make_mult(p, 4), 0.5)
    assert r.members == sorted(MobiusMap.from_matrix(lam, 0, 0, 1, p) for lam in range(1, p))
    assert r.closed()


def test_fm_scan_kl2_finds_lower_unipotents():
    # K^ for Kl2 is an additive character in 1/t, so t -> t/(ct+1) preserves it
    p = 53
    r = fm_scan(make_kloosterman(p, 2), 0.5)
    assert set(r.members) == {MobiusMap.from_matrix(1, 0, c, 1, p) for c in range(p)}
    assert r.closed()


def test_fm_scan_member_set_invariant_under_unimodular_scaling():
    p = 13
    K = make_kloosterman(p, 3)
    base = fm_scan(K, 0.5)
    for theta in (0.3, 1.7, math.pi):
        other = fm_scan(K.scaled(cmath.exp(1j * theta)), 0.5)
        assert other.members == base.members


def test_fm_scan_report_and_errors():
    r = fm_scan(make_legendre(13), 0.5)
    d = r.to_dict(timing=False)
    assert d["elapsed_ms"] is None and d["members"][0] == [0, 1, 1, 0]
    assert r.to_dict()["elapsed_ms"] is not None
    with pytest.raises(DomainError):
        fm_scan(make_legendre(13), 1.5)
    with pytest.raises(DomainError):
        fm_scan(make_additive(13, 1), 0.5)


def test_is_subgroup():
    p = 7
    torus = [MobiusMap.from_matrix(l, 0, 0, 1, p) for l in range(1, p)]
    assert is_subgroup(torus)
    assert not is_subgroup(torus[1:])
    assert not is_subgroup([])
