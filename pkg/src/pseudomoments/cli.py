"""Command-line front end.

Subcommands wrap one module each and print a RunRecord as JSON. Records are
cached under a canonical parameter hash; a cache hit replays the stored
bytes unchanged. Exit codes: 0 success, 1 verification failure, 2 usage
error (argparse default), 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import hashlib
import json
import os
import sys
import tempfile
import time
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import __version__, acceptance, arith, bounds, euler, moments, polytope, torus
from .errors import BudgetExceededError
from .moments import DirichletPolynomial, as_fraction

RESULTS_DIR_ENV = "PSEUDOMOMENT_RESULTS_DIR"

EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


def _canonical_key(command: str, params: dict) -> str:
    payload = json.dumps(
        {"command": command, "params": params, "tool_version": __version__},
        sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()


def _results_dir(override: Optional[str]) -> Path:
    if override:
        return Path(override)
    return Path(os.environ.get(RESULTS_DIR_ENV, "results"))


def _emit_record(command: str, params: dict, result: dict, seed: Optional[int],
                 elapsed: float, results_dir: Path, use_cache: bool) -> None:
    key = _canonical_key(command, params)
    path = results_dir / f"{key}.json"
    if use_cache and path.exists():
        try:
            cached = json.loads(path.read_text())
            if cached.get("tool_version") == __version__:
                sys.stdout.write(path.read_text())
                return
        except (json.JSONDecodeError, OSError):
            pass
    record = {
        "command": command,
        "params": params,
        "result": result,
        "seed": seed,
        "tool_version": __version__,
        "meta": {
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "elapsed": repr(elapsed),
        },
    }
    text = json.dumps(record, indent=2, sort_keys=True) + "\n"
    if use_cache:
        results_dir.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=results_dir, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)  # atomic publish
    sys.stdout.write(text)


def _frac_str(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


def cmd_moment(args) -> int:
    rho2 = as_fraction(args.rho2)
    params = {
        "N": args.N, "k": args.k, "rho_squared": _frac_str(rho2),
        "smoothed": args.smoothed, "precision_bits": args.precision_bits,
    }
    t0 = time.perf_counter()
    if args.smoothed:
        res = moments.smoothed_pseudomoment(args.N, args.k, rho2, args.precision_bits)
    else:
        res = moments.pseudomoment(args.N, args.k, rho2, args.precision_bits)
    _emit_record("moment", params, res.to_json_dict(), None,
                 time.perf_counter() - t0, _results_dir(args.results_dir),
                 not args.no_cache)
    return 0


def cmd_euler(args) -> int:
    rho2 = as_fraction(args.rho2)
    params = {
        "verb": args.verb, "k": args.k, "rho_squared": _frac_str(rho2),
        "sigma": args.sigma, "truncation_prime": args.trunc_prime,
        "precision_bits": args.precision_bits,
    }
    t0 = time.perf_counter()
    if args.verb == "factor":
        res = euler.arithmetic_factor(args.k, rho2, args.precision_bits,
                                      args.trunc_prime).to_json_dict()
    elif args.verb == "diagonal":
        if args.sigma is None:
            raise SystemExit("diagonal needs --sigma")
        res = euler.diagonal_F(args.k, rho2, args.sigma, args.precision_bits,
                               args.trunc_prime).to_json_dict()
    else:  # asymptotic
        import mpmath as mp
        res = {"k": args.k, "rho_squared": _frac_str(rho2),
               "main_term": mp.nstr(euler.a_asymptotic(args.k, rho2), 20)}
    _emit_record("euler", params, res, None, time.perf_counter() - t0,
                 _results_dir(args.results_dir), not args.no_cache)
    return 0


def cmd_polytope(args) -> int:
    rho2 = as_fraction(args.rho2)
    params = {
        "verb": args.verb, "k": args.k, "rho_squared": _frac_str(rho2),
        "samples": args.samples, "seed": args.seed, "workers": args.workers,
    }
    t0 = time.perf_counter()
    if args.verb == "gamma":
        res = polytope.gamma_factor_mc(args.k, rho2, args.samples, args.seed,
                                       args.workers).to_json_dict()
    elif args.verb == "volume":
        res = polytope.volume_mc(args.k, rho2, args.samples, args.seed,
                                 args.workers).to_json_dict()
    else:  # sandwich
        lo, hi = polytope.volume_sandwich(args.k, rho2)
        res = {"k": args.k, "rho_squared": _frac_str(rho2),
               "lower": repr(lo), "upper": repr(hi)}
    _emit_record("polytope", params, res, args.seed, time.perf_counter() - t0,
                 _results_dir(args.results_dir), not args.no_cache)
    return 0


def cmd_bounds(args) -> int:
    params = {
        "verb": args.verb, "N": args.N, "k": args.k,
        "sigma_grid": args.sigma_grid, "C": args.C, "C0": args.C0,
        "precision_bits": args.precision_bits,
        "smoothed_lower": args.smoothed_lower,
    }
    t0 = time.perf_counter()
    if args.verb == "sandwich":
        cert = bounds.sandwich(args.N, as_fraction(args.k), args.precision_bits,
                               args.sigma_grid, args.smoothed_lower)
        res = cert.to_json_dict()
    else:  # breakdown
        rep = bounds.breakdown_threshold(args.N, args.C, args.C0)
        res = rep.to_json_dict()
    _emit_record("bounds", params, res, None, time.perf_counter() - t0,
                 _results_dir(args.results_dir), not args.no_cache)
    return 0


def cmd_torus(args) -> int:
    params = {
        "verb": args.verb, "N": args.N, "k": args.k, "lambda": args.lam,
        "eps": args.eps, "y": args.y, "samples": args.samples,
        "seed": args.seed, "workers": args.workers,
    }
    t0 = time.perf_counter()
    if args.verb == "concentration":
        F = torus.bohr_lift(DirichletPolynomial.zeta_partial_sum(args.N))
        res = torus.empirical_concentration(F, args.lam, args.samples,
                                            args.seed, args.workers).to_json_dict()
    elif args.verb == "khintchine":
        coeffs = {p: Fraction(1) for p in arith.primes_up_to(args.N)}
        r = torus.khintchine_bound(args.N, args.k, coeffs)
        res = {"N": args.N, "k": args.k, "exact_norm": repr(r.exact_norm),
               "bound": repr(r.bound), "holds": r.holds}
    elif args.verb == "smooth-sum":
        r = torus.smooth_sum_lower(args.N, args.eps)
        res = {"N": args.N, "eps": repr(args.eps), "sum": repr(r.sum_value),
               "dickman_prediction": repr(r.dickman_prediction),
               "ratio": repr(r.ratio), "count": r.count, "y": r.smoothness_y}
    else:  # normcomp
        r = torus.normcomp_threshold(args.N, args.k)
        res = {"N": args.N, "k": args.k, "sup_norm": repr(r.sup_norm),
               "l2k_norm": repr(r.l2k), "psi": r.psi,
               "psi_is_estimate": r.psi_is_estimate, "holds": r.holds}
    _emit_record("torus", params, res, args.seed, time.perf_counter() - t0,
                 _results_dir(args.results_dir), not args.no_cache)
    return 0


def _parse_list(spec: str, cast):
    return [cast(tok) for tok in spec.split(",") if tok]


def cmd_sweep(args) -> int:
    """Cartesian sweep to a plot-ready CSV (decimal strings)."""
    Ns = _parse_list(args.N_list, int) if args.N_list else [None]
    ks = _parse_list(args.k_list, str)
    rhos = _parse_list(args.rho2_list, str) if args.rho2_list else ["1"]
    rows = []
    for N in Ns:
        for k in ks:
            for r in rhos:
                rho2 = as_fraction(r)
                if args.target == "moment":
                    res = moments.pseudomoment(N, int(k), rho2, 53)
                    value = float(res.value_float)
                    import math as _m
                    rows.append({"N": N, "k": k, "rho2": r, "value": repr(value),
                                 "normalized": repr(value / _m.log(N) ** (int(k) ** 2 * float(rho2)))})
                elif args.target == "gamma":
                    est = polytope.gamma_factor_mc(int(k), rho2, args.samples, args.seed)
                    lo, hi = polytope.volume_sandwich(int(k), rho2)
                    rows.append({"N": "", "k": k, "rho2": r, "value": repr(est.mean),
                                 "std_error": repr(est.std_error),
                                 "lower": repr(lo), "upper": repr(hi)})
                else:  # volume
                    est = polytope.volume_mc(int(k), rho2, args.samples, args.seed)
                    rows.append({"N": "", "k": k, "rho2": r, "value": repr(est.mean),
                                 "std_error": repr(est.std_error)})
    out = Path(args.out)
    fields = sorted({key for row in rows for key in row})
    with out.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {len(rows)} rows to {out}")
    return 0


def cmd_verify(args) -> int:
    results = acceptance.run_all(quick=args.quick, seed=args.seed)
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return EXIT_VERIFY_FAILED if failed else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="pseudomoments",
        description="Pseudomoments of zeta partial sums: exact moments, "
                    "Euler products, polytope constants, bound certificates, "
                    "and polytorus sampling.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--results-dir", default=None,
                       help=f"cache directory (default ./results or ${RESULTS_DIR_ENV})")
        p.add_argument("--no-cache", action="store_true")

    p = sub.add_parser("moment", help="twisted or smoothed pseudomoment")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--rho2", default="1", help="rho^2 as p/q")
    p.add_argument("--smoothed", action="store_true")
    p.add_argument("--precision-bits", type=int, default=128, dest="precision_bits")
    common(p)
    p.set_defaults(fn=cmd_moment)

    p = sub.add_parser("euler", help="Euler products and asymptotics")
    p.add_argument("verb", choices=["factor", "diagonal", "asymptotic"])
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--rho2", default="1")
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--trunc-prime", type=int, default=10**5, dest="trunc_prime")
    p.add_argument("--precision-bits", type=int, default=128, dest="precision_bits")
    common(p)
    p.set_defaults(fn=cmd_euler)

    p = sub.add_parser("polytope", help="Monte Carlo polytope constants")
    p.add_argument("verb", choices=["gamma", "volume", "sandwich"])
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--rho2", default="1")
    p.add_argument("--samples", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    common(p)
    p.set_defaults(fn=cmd_polytope)

    p = sub.add_parser("bounds", help="bound certificates and the breakdown threshold")
    p.add_argument("verb", choices=["sandwich", "breakdown"])
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--k", default="2", help="decimal or p/q")
    p.add_argument("--sigma-grid", type=int, default=None, dest="sigma_grid",
                   help="number of grid segments for the sigma minimization")
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--C0", type=float, default=None)
    p.add_argument("--smoothed-lower", action="store_true", dest="smoothed_lower")
    p.add_argument("--precision-bits", type=int, default=128, dest="precision_bits")
    common(p)
    p.set_defaults(fn=cmd_bounds)

    p = sub.add_parser("torus", help="polytorus sampling and norm comparisons")
    p.add_argument("verb", choices=["concentration", "khintchine", "smooth-sum", "normcomp"])
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--lambda", type=float, default=0.5, dest="lam")
    p.add_argument("--eps", type=float, default=0.5)
    p.add_argument("--y", type=int, default=None)
    p.add_argument("--samples", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    common(p)
    p.set_defaults(fn=cmd_torus)

    p = sub.add_parser("sweep", help="cartesian parameter sweep to CSV")
    p.add_argument("--target", choices=["moment", "gamma", "volume"], required=True)
    p.add_argument("--N-list", default=None, dest="N_list")
    p.add_argument("--k-list", required=True, dest="k_list")
    p.add_argument("--rho2-list", default=None, dest="rho2_list")
    p.add_argument("--samples", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("verify", help="run the acceptance criteria")
    p.add_argument("--quick", action="store_true",
                   help="reduced sample counts (MC tolerances adapt)")
    p.add_argument("--seed", type=int, default=acceptance.DEFAULT_SEED)
    p.set_defaults(fn=cmd_verify)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
