"""Command-line front end.

Exit codes: 0 success, 1 invalid mathematical input, 2 I/O or config error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from tracefn import kernels
from tracefn.errors import ConfigError, DomainError
from tracefn.ff_core import is_prime, primes_between

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

RESERVED = {"command", "lattice_cmd", "func", "config", "_parser"}


# --- config and output ----------------------------------------------------------


def load_config(path: str | os.PathLike) -> dict:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e.strerror}") from e
    try:
        if path.suffix.lower() == ".json":
            data = json.loads(raw)
        else:
            data = tomllib.loads(raw.decode("utf-8"))
    except (ValueError, UnicodeDecodeError) as e:
        raise ConfigError(f"cannot parse config {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must hold a table of settings")
    return data


def apply_config(args: argparse.Namespace, cfg: dict) -> None:
    """Fill options not given on the command line; unknown keys are rejected."""
    actions = {a.dest: a for a in args._parser._actions}
    given = getattr(args, "_explicit", set())
    for key, value in cfg.items():
        dest = key.replace("-", "_")
        if dest in RESERVED or dest not in actions or not hasattr(args, dest):
            raise ConfigError(f"unknown config key {key!r} for '{args.command}'")
        if dest in given:
            continue
        action = actions[dest]
        try:
            if action.type is not None and value is not None:
                value = action.type(value if action.type is not _threads else str(value))
            if action.choices is not None and value not in action.choices:
                raise ValueError(f"must be one of {list(action.choices)}")
        except (ValueError, TypeError, argparse.ArgumentTypeError) as e:
            raise ConfigError(f"config key {key!r}: {e}") from e
        setattr(args, dest, value)


def _explicit_dests(parser: argparse.ArgumentParser, argv: list[str]) -> set[str]:
    out = set()
    for action in parser._actions:
        for opt in action.option_strings:
            if any(a == opt or a.startswith(opt + "=") for a in argv):
                out.add(action.dest)
    return out


def _num(x: float) -> str:
    return repr(float(x))


def _csv_text(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    path = Path(out)
    try:
        if path.parent and not path.parent.exists():
            path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as e:
        raise ConfigError(f"cannot write {out}: {e.strerror}") from e


def _cache_dir(args) -> str | None:
    if getattr(args, "no_cache", False):
        return None
    if getattr(args, "cache_dir", None):
        return args.cache_dir
    if os.environ.get("TRACEFN_CACHE"):
        return os.environ["TRACEFN_CACHE"]
    return str(Path.home() / ".cache" / "tracefn")


def _require_prime(p: int) -> int:
    if p < 3 or not is_prime(p):
        raise DomainError(f"p = {p} must be an odd prime")
    return p


def _threads(value: str):
    if value == "auto":
        return value
    try:
        n = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError("threads must be a positive integer or 'auto'")
    if n < 1:
        raise argparse.ArgumentTypeError("threads must be a positive integer or 'auto'")
    return n


# --- subcommands ---------------------------------------------------------------


def cmd_kl(args) -> int:
    from tracefn.kloosterman_ring import crt_factors, kl_ring, kl_ring_many

    if args.random:
        if args.cmax is None or args.cmax < 2:
            raise DomainError("--random needs --cmax >= 2")
        rng = np.random.default_rng(args.seed)
        triples = []
        while len(triples) < args.random:
            c = int(rng.integers(2, args.cmax + 1))
            a, b, d = (int(v) for v in rng.integers(0, c, size=3))
            if math.gcd(d, c) == 1:
                triples.append((a, b, d, c))
    elif args.cmax is not None:
        if args.cmax < 1:
            raise DomainError("--cmax must be >= 1")
        triples = [(args.a % c, args.b % c, args.d % c, c) for c in range(1, args.cmax + 1)]
    else:
        if args.c is None:
            raise DomainError("give --c, --cmax or --random")
        if args.c <= 0:
            raise DomainError(f"modulus c = {args.c} must be positive")
        c = args.c
        triples = [(args.a % c, args.b % c, args.d % c, c)]

    vals = kl_ring_many(triples, threads=args.threads)
    if args.verify:
        for (a, b, d, c), v in zip(triples, vals):
            split = _coprime_split(c)
            if split is None:
                continue
            parts = crt_factors(a, b, d, *split)
            prod = np.prod([kl_ring(*t) for t in parts])
            if abs(prod - v) > 1e-8:
                raise DomainError(f"CRT check failed at {(a, b, d, c)}: {v} vs {prod}")
    if args.format == "json":
        rows = [
            {"a": a, "b": b, "d": d, "c": c, "re": float(v.real), "im": float(v.imag), "abs": float(abs(v))}
            for (a, b, d, c), v in zip(triples, vals)
        ]
        _emit(_json_text(rows), args.out)
    else:
        rows = [
            [a, b, d, c, _num(v.real), _num(v.imag), _num(abs(v))] for (a, b, d, c), v in zip(triples, vals)
        ]
        _emit(_csv_text(["a", "b", "d", "c", "re", "im", "abs"], rows), args.out)
    return 0


def _coprime_split(c: int) -> tuple[int, int] | None:
    """c = c1 c2 with 1 < c1, c2 and gcd 1, using the smallest prime power of c."""
    from tracefn.ff_core import prime_factors

    ps = prime_factors(c)
    if len(set(ps)) < 2:
        return None
    q = min(ps)
    c1 = 1
    while c % (c1 * q) == 0:
        c1 *= q
    return c1, c // c1


def cmd_fm_scan(args) -> int:
    from tracefn.fourier_corr import fm_scan
    from tracefn.kernel_spec import build

    p = _require_prime(args.p)
    K = build(args.kernel, p)
    report = fm_scan(K, tau=args.tau, threads=args.threads)
    report.kind = args.kernel
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    if args.format == "csv":
        rows = [[*g.astuple(), _num(v), _num(ph)] for g, v, ph in zip(report.members, report.values, report.phases)]
        _emit(_csv_text(["a", "b", "c", "d", "abs", "phase"], rows), args.out)
    else:
        _emit(_json_text(report.to_dict(timing=args.timing)), args.out)
    return 0


def _twist_grid(args) -> list[int]:
    if args.pmin > args.pmax:
        raise DomainError("--pmin must not exceed --pmax")
    primes = [p for p in primes_between(max(3, args.pmin), args.pmax)]
    if args.count is not None:
        if args.count < 1:
            raise DomainError("--count must be positive")
        if args.count < len(primes):
            idx = np.linspace(0, len(primes) - 1, args.count).round().astype(int)
            primes = [primes[i] for i in idx]
    if len(primes) < 5:
        raise DomainError(f"the grid [{args.pmin}, {args.pmax}] holds {len(primes)} primes; the fit needs 5")
    return primes


def cmd_twist(args) -> int:
    from tracefn.cusp import extend_tau
    from tracefn.kernel_spec import build, parse_kernel, to_text
    from tracefn.twist import Window, exponent_fit, run_twist

    if args.form != "delta":
        raise DomainError(f"unknown form {args.form!r}; only 'delta' is available")
    node = parse_kernel(args.kernel)
    kname = to_text(node)
    V = Window(args.window, args.scale)
    primes = _twist_grid(args)
    need = max(V.extent(p) for p in primes)
    coeffs = extend_tau(need, cache_dir=_cache_dir(args))
    control = args.control or kname == "trivial"
    run = run_twist(coeffs, lambda p: build(node, p), primes, V, kname, control, threads=args.threads)
    fit = exponent_fit(run)
    summary = {
        "form": run.form,
        "kernel": kname,
        "window": V.describe(),
        "grid": {"pmin": args.pmin, "pmax": args.pmax, "count": len(primes), "primes": primes},
        "coeff_extent": need,
        **fit.to_dict(),
        "trivial_bound_ok": all(r.abs <= r.trivial for r in run.rows),
    }
    if args.format == "json":
        rows = [
            {"p": r.p, "re": r.S.real, "im": r.S.imag, "abs": r.abs, "trivial": r.trivial, "ratio": r.ratio}
            for r in run.rows
        ]
        _emit(_json_text({"rows": rows, "summary": summary}), args.out)
        return 0
    rows = [[r.p, _num(r.S.real), _num(r.S.imag), _num(r.abs), _num(r.trivial), _num(r.ratio)] for r in run.rows]
    _emit(_csv_text(["p", "re", "im", "abs", "trivial", "ratio"], rows), args.out)
    text = _json_text(summary)
    if args.summary:
        _emit(text, args.summary)
    elif args.out and args.out != "-":
        _emit(text, str(Path(args.out).with_suffix(".summary.json")))
    else:
        sys.stderr.write(text)
    return 0


def cmd_trace(args) -> int:
    from tracefn.kernel_spec import build

    p = _require_prime(args.p)
    K = build(args.kernel, p)
    if args.format == "json":
        obj = {
            "p": p,
            "kernel": args.kernel,
            "kind": K.kind,
            "conductor_bound": K.conductor_bound,
            "fourier_eligible": K.fourier_eligible,
            "values": [[float(v.real), float(v.imag)] for v in K.values],
        }
        _emit(_json_text(obj), args.out)
    else:
        rows = [[x, _num(v.real), _num(v.imag)] for x, v in enumerate(K.values)]
        _emit(_csv_text(["x", "re", "im"], rows), args.out)
    return 0


def cmd_tau(args) -> int:
    from tracefn.cusp import extend_tau

    if args.n < 1:
        raise DomainError("--n must be >= 1")
    coeffs = extend_tau(args.n, cache_dir=_cache_dir(args))
    if args.format == "json":
        obj = {"form": "delta", "weight": coeffs.weight, "N": args.n, "tau": [str(t) for t in coeffs.tau]}
        _emit(_json_text(obj), args.out)
    else:
        rows = [[n, t, _num(coeffs.lam[n])] for n, t in enumerate(coeffs.tau, start=1)]
        _emit(_csv_text(["n", "tau", "lambda"], rows), args.out)
    return 0


def _parse_elt(F, text: str):
    try:
        parts = [Fraction(s.strip()) for s in str(text).split(",")]
    except (ValueError, ZeroDivisionError) as e:
        raise DomainError(f"cannot parse field element {text!r}") from e
    if len(parts) == 1:
        parts.append(Fraction(0))
    if len(parts) != 2:
        raise DomainError(f"field element {text!r} must be 'x' or 'x,y' for x + y sqrt(D)")
    return F.elt(*parts)


def _field_from_args(args):
    from tracefn.lattice import NumberFieldSpec

    cfg = {}
    if args.field_config:
        cfg = load_config(args.field_config)
        unknown = set(cfg) - {"degree", "D"}
        if unknown:
            raise ConfigError(f"unknown field config keys {sorted(unknown)}")
    if args.D is not None:
        cfg["D"] = args.D
        cfg.setdefault("degree", 2)
    if args.degree is not None:
        cfg["degree"] = args.degree
    return NumberFieldSpec.from_config(cfg)


def _ideal_from_args(F, args):
    from tracefn.lattice import IdealLattice

    gens = [_parse_elt(F, g) for g in (args.gen or ["1"])]
    I = IdealLattice.from_generators(F, gens)
    if args.scale != "1":
        I = I.scale(_parse_elt(F, args.scale))
    return I


def _field_inputs(F, I=None) -> dict:
    out = {"degree": F.degree, "D": F.D, "disc": F.disc}
    if I is not None:
        out["ideal_basis"] = [[str(c) for c in row] for row in I.basis_coords]
        out["ideal_norm"] = str(I.norm)
    return out


def cmd_lattice(args) -> int:
    from tracefn.lattice import (
        count_divisor_pairs,
        count_units_in_box,
        lattice_sum,
        shortest_vector_lower_bound,
    )

    F = _field_from_args(args)
    if args.R <= 0:
        raise DomainError("--R must be positive")
    if args.lattice_cmd == "verify-lpc":
        I = _ideal_from_args(F, args)
        res = lattice_sum(I, args.profile, args.R)
        obj = {
            "inputs": {**_field_inputs(F, I), "profile": args.profile, "R": args.R},
            "value": res.value,
            "main_term": res.main_term,
            "ratio": res.value / res.main_term,
            "dual_sum": res.dual_sum,
            "poisson_residual": res.poisson_residual,
            "error_bound": res.error_bound,
            "points": res.points,
            "shortest_vector_lower_bound": shortest_vector_lower_bound(I),
        }
    elif args.lattice_cmd == "count-units":
        m0 = _parse_elt(F, args.m0)
        value = count_units_in_box(F, m0, args.R)
        main = _unit_main_term(F, m0, args.R)
        obj = {
            "inputs": {**_field_inputs(F), "m0": [str(c) for c in m0], "R": args.R},
            "value": value,
            "main_term": main,
            "ratio": value / main if main else None,
        }
    else:
        I = _ideal_from_args(F, args)
        k = _parse_elt(F, args.k)
        value = count_divisor_pairs(F, I, k, args.R)
        obj = {
            "inputs": {**_field_inputs(F, I), "k": [str(c) for c in k], "R": args.R},
            "value": value,
            "main_term": None,
            "ratio": None,
        }
    _emit(_json_text(obj), args.out)
    return 0


def _unit_main_term(F, m0, R: float) -> float:
    """Leading-order count: |mu_F| in rank 0, otherwise
    |mu_F| (2 log(R / (2 sqrt|Nm m0|)) / log eps + 1) for real quadratic F."""
    w = F.n_roots_of_unity
    if F.fundamental_unit is None:
        return float(w)
    eps = F.fundamental_unit
    le = math.log(float(eps[0]) + float(eps[1]) * math.sqrt(F.D))
    t = math.log(R / (2 * math.sqrt(abs(float(F.norm(m0))))))
    return float(w * max(0.0, 2 * t / le + 1))


def cmd_bench(args) -> int:
    from tracefn.bench import run_bench

    backends = [args.backend] if args.backend else None
    if args.backend and args.backend not in kernels.BACKENDS:
        raise ConfigError(f"backend {args.backend!r} is not available")
    report = run_bench(quick=args.quick, threads=args.threads, backends=backends)
    _emit(_json_text(report), args.out)
    return 0


# --- parser ----------------------------------------------------------------------


def _common(out_default: str = "csv") -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.add_argument("--format", choices=["csv", "json"], default=out_default)
    p.add_argument("--threads", type=_threads, default=1, help="worker threads, or 'auto'")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", default=None, help="TOML or JSON file mirroring the flags")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tracefn",
        description="Trace functions over prime fields, Kloosterman sums, ideal-lattice counts "
        "and twisted sums of Ramanujan tau.",
    )
    parser.add_argument("--version", action="version", version=_version())
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True
    csv_common = _common("csv")
    json_common = _common("json")

    sp = sub.add_parser(
        "kl",
        parents=[csv_common],
        help="complete Kloosterman sums Kl(a,b,d;c) over Z/c",
        description="Complete Kloosterman sums Kl(a,b,d;c) = sum over s1 s2 = d mod c of "
        "e((a s1 + b s2)/c), as met in non-diagonal orbital integrals.",
    )
    sp.add_argument("--a", type=int, default=1)
    sp.add_argument("--b", type=int, default=1)
    sp.add_argument("--d", type=int, default=1)
    sp.add_argument("--c", type=int, default=None)
    sp.add_argument("--cmax", type=int, default=None, help="tabulate c = 1..cmax")
    sp.add_argument("--random", type=int, default=0, help="N random unit triples with c <= cmax")
    sp.add_argument("--verify", action="store_true", help="check each value against its CRT factorization")
    sp.set_defaults(func=cmd_kl, _parser=sp)

    sp = sub.add_parser(
        "fm-scan",
        parents=[json_common],
        help="Fourier-Moebius group scan over PGL_2(F_p)",
        description="Scan all of PGL_2(F_p) for fractional linear maps under which the "
        "Fourier transform of a trace function correlates with itself (the Fourier-Moebius group).",
    )
    sp.add_argument("--kernel", default="legendre", help="kernel spec, e.g. kloosterman:2")
    sp.add_argument("--p", type=int, default=13)
    sp.add_argument("--tau", type=float, default=0.5, help="detection threshold in (0, 1)")
    sp.add_argument("--timing", action="store_true", help="record elapsed_ms (breaks byte-identity)")
    sp.set_defaults(func=cmd_fm_scan, _parser=sp)

    sp = sub.add_parser(
        "twist",
        parents=[csv_common],
        help="smoothed twists of Ramanujan tau by a trace function",
        description="Smoothed correlation sums S_V(f,K;p) = sum lambda(n) K(n) V(n/p) of the "
        "discriminant form against a trace function, with the exponent fit against p^(1-delta).",
    )
    sp.add_argument("--form", default="delta")
    sp.add_argument("--kernel", default="kloosterman:2")
    sp.add_argument("--pmin", type=int, default=101)
    sp.add_argument("--pmax", type=int, default=4999)
    sp.add_argument("--count", type=int, default=None, help="evenly spaced subset of the primes")
    sp.add_argument("--window", choices=["logbump", "gaussian"], default="logbump")
    sp.add_argument("--scale", type=float, default=1.0)
    sp.add_argument("--control", action="store_true", help="report the fit without PASS/FAIL")
    sp.add_argument("--summary", default=None, help="path for the JSON summary")
    sp.add_argument("--cache-dir", default=None)
    sp.add_argument("--no-cache", action="store_true")
    sp.set_defaults(func=cmd_twist, _parser=sp)

    sp = sub.add_parser(
        "trace",
        parents=[csv_common],
        help="export a trace-function table",
        description="Export the value table of a trace function on F_p "
        "(characters, hyper-Kloosterman sums, pullbacks, products).",
    )
    sp.add_argument("--kernel", default="kloosterman:2")
    sp.add_argument("--p", type=int, default=13)
    sp.set_defaults(func=cmd_trace, _parser=sp)

    sp = sub.add_parser(
        "tau",
        parents=[csv_common],
        help="export Ramanujan tau(n), using the cache",
        description="Exact Ramanujan tau(n) (coefficients of the discriminant form) and the "
        "normalized Hecke eigenvalues lambda(n) = tau(n)/n^(11/2).",
    )
    sp.add_argument("--n", type=int, default=100)
    sp.add_argument("--cache-dir", default=None)
    sp.add_argument("--no-cache", action="store_true")
    sp.set_defaults(func=cmd_tau, _parser=sp)

    sp = sub.add_parser(
        "lattice",
        help="ideal-lattice counting lemmas",
        description="Poisson-summation lattice counts, unit counts and divisor counts "
        "for ideals of Q and quadratic fields.",
    )
    lsub = sp.add_subparsers(dest="lattice_cmd", metavar="lattice_command")
    lsub.required = True
    field_opts = argparse.ArgumentParser(add_help=False)
    field_opts.add_argument("--D", type=int, default=None, help="squarefree D for Q(sqrt D); omit for Q")
    field_opts.add_argument("--degree", type=int, default=None)
    field_opts.add_argument("--field-config", default=None, help="TOML/JSON file {degree, D}")
    field_opts.add_argument("--R", type=float, default=10.0)
    ideal_opts = argparse.ArgumentParser(add_help=False)
    ideal_opts.add_argument(
        "--gen", action="append", default=None, help="ideal generator 'x' or 'x,y' (repeatable)"
    )
    ideal_opts.add_argument("--scale", default="1", help="scale the ideal by this element")
    for name, extra, text, desc in [
        (
            "verify-lpc",
            [ideal_opts],
            "smoothed lattice count against its Poisson main term",
            "Smoothed count sum_{m in I} f(m/R) against R^n f^(0) / covol(I), with the dual "
            "sum and the tail bound from the shortest-vector estimate (dense and sparse limits).",
        ),
        (
            "count-units",
            [],
            "generators of (m0) with |m|_inf < R",
            "Count the generators m of the principal ideal (m0) with sum_i |sigma_i(m)| < R "
            "(unit counting through the log map).",
        ),
        (
            "count-divisors",
            [ideal_opts],
            "pairs m, n in I with m n = k and both small",
            "Count pairs m, n in I with m n = k and |m|_inf, |n|_inf < R (divisor counting).",
        ),
    ]:
        lp = lsub.add_parser(name, parents=[json_common, field_opts, *extra], help=text, description=desc)
        if name == "verify-lpc":
            lp.add_argument("--profile", choices=["gaussian", "bump"], default="gaussian")
        if name == "count-units":
            lp.add_argument("--m0", default="1")
        if name == "count-divisors":
            lp.add_argument("--k", default="1")
        lp.set_defaults(func=cmd_lattice, _parser=lp)

    sp = sub.add_parser(
        "bench",
        parents=[json_common],
        help="time the DFT, the PGL_2 scan and the Kloosterman grid",
        description="Benchmark the fast DFT against the naive transform, the full PGL_2(F_p) "
        "correlation scan and a Kloosterman grid, on every available backend.",
    )
    sp.add_argument("--quick", action="store_true")
    sp.add_argument("--backend", default=None, help="cython or python (default: all available)")
    sp.set_defaults(func=cmd_bench, _parser=sp)
    return parser


def _version() -> str:
    from tracefn import __version__

    return f"tracefn {__version__} ({kernels.BACKEND} backend)"


def dispatch(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    args._explicit = _explicit_dests(args._parser, argv)
    try:
        if args.config:
            apply_config(args, load_config(args.config))
        t0 = time.perf_counter()
        code = args.func(args)
        if os.environ.get("TRACEFN_VERBOSE"):
            print(f"{args.command}: {time.perf_counter() - t0:.3f} s", file=sys.stderr)
        return code
    except DomainError as e:
        print(f"tracefn: error: {e}", file=sys.stderr)
        return 1
    except (ConfigError, OSError) as e:
        print(f"tracefn: error: {e}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
