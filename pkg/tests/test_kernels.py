import os
import subprocess
import sys

import numpy as np
import pytest

from tracefn import _fallback, kernels
from tracefn.cusp import compute_tau, jacobi_cube_series
from tracefn.ff_core import PrimeField
from tracefn.fourier_corr import enumerate_pgl2, fourier
from tracefn.kloosterman_ring import _arrays
from tracefn.trace_zoo import make_kloosterman

needs_ext = pytest.mark.skipif("cython" not in kernels.BACKENDS, reason="compiled extension not built")


def _scan_inputs(p):
    F = PrimeField.of(p)
    K = make_kloosterman(p, 2)
    return enumerate_pgl2(p), np.ascontiguousarray(fourier(K).values), np.ascontiguousarray(F.inv_table)


def test_resolve_threads():
    assert kernels.resolve_threads(3) == 3
    assert kernels.resolve_threads("auto") >= 1
    assert kernels.resolve_threads(None) >= 1
    with pytest.raises(ValueError):
        kernels.resolve_threads(-2)


@pytest.mark.parametrize("backend", sorted(kernels.BACKENDS))
def test_scan_thread_count_does_not_change_bits(backend):
    impl = kernels.BACKENDS[backend]
    mats, khat, inv = _scan_inputs(31)
    one = impl.gamma_corr_batch(mats, khat, inv, 1)
    many = impl.gamma_corr_batch(mats, khat, inv, 8)
    assert one.tobytes() == many.tobytes()


@pytest.mark.parametrize("backend", sorted(kernels.BACKENDS))
def test_kl_thread_count_does_not_change_bits(backend):
    impl = kernels.BACKENDS[backend]
    args = _arrays(*zip(*[(a, 3, d, c) for c in range(1, 200) for a in (1, 4) for d in (1, 6)]))
    assert impl.kl_ring_batch(*args, 1).tobytes() == impl.kl_ring_batch(*args, 8).tobytes()


@needs_ext
def test_scan_backends_agree():
    mats, khat, inv = _scan_inputs(53)
    a = kernels.BACKENDS["cython"].gamma_corr_batch(mats, khat, inv, 1)
    b = _fallback.gamma_corr_batch(mats, khat, inv, 1)
    assert np.max(np.abs(a - b)) < 1e-10


@needs_ext
def test_kl_backends_agree():
    args = _arrays(*zip(*[(a, b, d, c) for c in range(1, 400, 7) for a in (0, 1, 9) for b in (2, 5) for d in (0, 1, 12)]))
    a = kernels.BACKENDS["cython"].kl_ring_batch(*args, 1)
    b = _fallback.kl_ring_batch(*args, 1)
    assert np.max(np.abs(a - b)) < 1e-9


@needs_ext
def test_sparse_mul_backends_agree_exactly():
    m = 2147483629
    shifts, coeffs = jacobi_cube_series(3000)
    dense = np.random.default_rng(1).integers(0, m, size=3000, dtype=np.int64)
    a = kernels.BACKENDS["cython"].sparse_mul_mod(dense, shifts, coeffs, m)
    b = _fallback.sparse_mul_mod(dense, shifts, coeffs, m)
    assert np.array_equal(a, b)


def test_pure_fallback_selected_by_env():
    code = "from tracefn import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, TRACEFN_PURE="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_tau_same_on_both_backends(monkeypatch):
    ref = compute_tau(400)
    monkeypatch.setattr(kernels, "sparse_mul_mod", _fallback.sparse_mul_mod)
    assert compute_tau(400) == ref
