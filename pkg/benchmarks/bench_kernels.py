"""Compiled vs pure-Python kernels: PGL_2 scan, Kloosterman grid, sigma sieve.

    python benchmarks/bench_kernels.py [--quick] [--threads N] [--json out.json]

Prints a table per hot path with the time for each available backend and the
speedup of the compiled one. Results are also checked for agreement.
"""

from __future__ import annotations

import argparse
import json
import sys
import time


from tracefn import bench, kernels


def _time(fn):
    t0 = time.perf_counter()
    out = fn()
    return time.perf_counter() - t0, out


def bench_sigma(N: int, backend: str) -> dict:
    impl = kernels.BACKENDS[backend]
    t, out = _time(lambda: impl.sigma_mod(N, 5, 2_147_483_629))
    return {"N": N, "backend": backend, "seconds": t, "checksum": int(out.sum() % 1_000_003)}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--quick", action="store_true", help="small sizes only")
    ap.add_argument("--threads", default="1", help="worker threads or 'auto'")
    ap.add_argument("--json", default=None, help="also write the raw report here")
    args = ap.parse_args(argv)

    threads = args.threads if args.threads == "auto" else int(args.threads)
    backends = list(kernels.BACKENDS)
    report = bench.run_bench(quick=args.quick, threads=threads, backends=backends)
    N = 200_000 if args.quick else 2_000_000
    report["sigma"] = [bench_sigma(N, b) for b in backends]

    print(f"default backend: {report['default_backend']}, threads: {report['threads']}")
    print(f"available backends: {', '.join(backends)}")
    print()
    print("DFT (numpy.fft vs naive O(p^2), naive extrapolated from sampled rows)")
    for row in report["dft"]:
        print(f"  p={row['p']:>7}  fft {row['fast_s'] * 1e3:9.3f} ms  naive ~{row['naive_s_est']:8.2f} s"
              f"  speedup ~{row['speedup']:,.0f}x  max diff {row['max_abs_diff']:.1e}")

    def table(title, rows, key, size):
        print()
        print(title)
        by = {}
        for r in rows:
            by.setdefault(r[key], {})[r["backend"]] = r
        for k, group in by.items():
            cells = "  ".join(f"{b} {g['seconds']:8.3f} s" for b, g in group.items())
            extra = ""
            if "cython" in group and "python" in group and group["cython"]["seconds"] > 0:
                extra = f"  speedup {group['python']['seconds'] / group['cython']['seconds']:6.1f}x"
            print(f"  {size}={k:<9} {cells}{extra}")

    table("PGL_2 correlation scan (all p(p^2-1) elements)", report["fm_scan"], "p", "p")
    table("Kloosterman sums Kl(1,1,1;c), c = 1..cmax", report["kl_grid"], "cmax", "cmax")
    table("sigma_5(n) mod q sieve", report["sigma"], "N", "N")

    sig = {r["checksum"] for r in report["sigma"]}
    if len(sig) != 1:
        print("backends disagree on the sigma sieve", file=sys.stderr)
        return 1
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(report, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
