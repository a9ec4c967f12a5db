"""Wall-clock timings for the hot paths, per backend."""

from __future__ import annotations

import math
import time

import numpy as np

from tracefn import kernels
from tracefn.fourier_corr import dft_naive, fm_scan_values, pgl2_order
from tracefn.kloosterman_ring import kl_ring_many
from tracefn.trace_zoo import make_kloosterman, make_legendre

DFT_PRIMES = (10_007, 100_003)
SCAN_PRIMES = (53, 101)
NAIVE_ROWS = 256  # naive DFT rows timed at large p, then scaled to p rows


def _timed(fn, repeat: int = 1) -> tuple[float, object]:
    best, out = math.inf, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_dft(p: int) -> dict:
    K = make_kloosterman(p, 2)
    vals = K.values
    t_fast, fast = _timed(lambda: np.fft.fft(vals) / math.sqrt(p), repeat=3)
    rows = min(p, NAIVE_ROWS)
    x = np.arange(rows)[:, None]
    y = np.arange(p)[None, :]

    def naive_rows():
        return (np.exp(-2j * np.pi * ((x * y) % p) / p) @ vals) / math.sqrt(p)

    t_rows, part = _timed(naive_rows)
    t_naive = t_rows * p / rows
    err = float(np.max(np.abs(part - fast[:rows])))
    return {
        "p": p,
        "fast_s": t_fast,
        "naive_s_est": t_naive,
        "naive_rows_timed": rows,
        "speedup": t_naive / t_fast if t_fast > 0 else None,
        "max_abs_diff": err,
    }


def bench_scan(p: int, backend: str, threads: int) -> dict:
    K = make_legendre(p)
    t, (mats, _) = _timed(lambda: fm_scan_values(K, threads=threads, backend=backend))
    n = int(mats.shape[0])
    return {
        "p": p,
        "backend": backend,
        "elements": n,
        "expected": pgl2_order(p),
        "seconds": t,
        "ns_per_element": t / n * 1e9,
    }


def bench_kl(cmax: int, backend: str, threads: int) -> dict:
    args = [(1, 1, 1, c) for c in range(1, cmax + 1)]
    t, _ = _timed(lambda: kl_ring_many(args, threads=threads, backend=backend))
    return {"cmax": cmax, "backend": backend, "sums": len(args), "seconds": t}


def run_bench(quick: bool = False, threads=1, backends=None) -> dict:
    """Timings for the DFT, the PGL_2 scan and the Kloosterman grid.

    ``quick`` keeps only the small cases (used by the test suite).
    """
    nthreads = kernels.resolve_threads(threads)
    backends = list(backends or kernels.BACKENDS)
    dft_primes = DFT_PRIMES[:1] if quick else DFT_PRIMES
    scan_primes = SCAN_PRIMES[:1] if quick else SCAN_PRIMES
    cmax = 500 if quick else 10_000
    report = {
        "default_backend": kernels.BACKEND,
        "threads": nthreads,
        "dft": [bench_dft(p) for p in dft_primes],
        "fm_scan": [bench_scan(p, b, nthreads) for p in scan_primes for b in backends],
        "kl_grid": [bench_kl(cmax, b, nthreads) for b in backends],
    }
    # oracle agreement of the naive path itself at a small prime
    small = make_kloosterman(101, 2).values
    report["dft_oracle_check"] = float(
        np.max(np.abs(dft_naive(small) - np.fft.fft(small) / math.sqrt(101)))
    )
    return report
