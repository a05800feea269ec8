"""Command-line entry point: one subcommand per library operation.

Exit codes: 0 success, 2 bad arguments, 3 budget exceeded, 4 precondition
violated. Errors go to stderr as a single JSON object.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings

import numpy as np

from multcoinc.errors import BudgetExceeded, InvalidArgument

CACHE_ENV = "MULTCOINC_CACHE_DIR"
EXIT_PARSE, EXIT_BUDGET, EXIT_PRECONDITION = 2, 3, 4

SUBCOMMANDS = (
    "primes",
    "eval",
    "distance",
    "pretender",
    "density",
    "correlate",
    "fejer-scan",
    "pipeline",
    "sumset",
    "converse",
    "cuspform",
)


def load_schema(name: str) -> dict:
    """The published JSON schema for subcommand ``name`` (or ``"error"``)."""
    from importlib.resources import files

    return json.loads(files("multcoinc").joinpath("schemas", f"{name}.schema.json").read_text())


class ParseError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(f"{self.prog}: {message}")


def parse_complex(text: str) -> complex:
    """``"re,im"`` or a bare real."""
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected 're,im', got {text!r}")


def parse_int(text: str) -> int:
    """Integers, also written as ``1e6`` or ``10**6``."""
    try:
        if "**" in text:
            b, e = text.split("**")
            return int(b) ** int(e)
        v = float(text) if any(c in text for c in ".eE") else int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if isinstance(v, float):
        if not v.is_integer():
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
        v = int(v)
    return v


def parse_interval(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'lo:hi', got {text!r}") from None
    return lo, hi


def _affine(text: str):
    from multcoinc.correlate import AffinePair

    return AffinePair.parse(text)


def _func(text: str):
    from multcoinc.multfunc import parse_function

    try:
        return parse_function(text)
    except InvalidArgument as exc:
        raise ParseError(f"function string {text!r}: {exc}") from None


def _table(upto: int):
    from multcoinc.primes import build_prime_table

    return build_prime_table(max(int(upto), 10))


def _pair_top(pair, x: int) -> int:
    return max(pair.a * x + pair.b, pair.c * x + pair.d) + 1


def _complex_dict(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag), "magnitude": float(abs(z))}


# -- subcommands ---------------------------------------------------------------


def cmd_primes(args) -> dict:
    from multcoinc.primes import restricted_prime_sum

    x = args.x if args.x is not None else args.limit
    table = _table(max(args.limit, x))
    member = None
    if args.modulus is not None:
        q, r = args.modulus, args.residue % args.modulus
        member = lambda ps: ps % q == r  # noqa: E731
    s = restricted_prime_sum(table, x, member)
    return {
        "limit": args.limit,
        "x": x,
        "pi_x": table.pi(x),
        "modulus": args.modulus,
        "residue": args.residue if args.modulus is not None else None,
        "reciprocal_sum": s,
        "mertens_prediction": math.log(math.log(x)) + 0.2614972128476428 if x >= 3 else None,
    }


def cmd_eval(args) -> dict:
    from multcoinc.multfunc import mf_eval

    f = _func(args.f)
    table = _table(max(args.n))
    vals = []
    for n in args.n:
        v = complex(mf_eval(f, n, table))
        vals.append({"n": n, "re": v.real, "im": v.imag})
    return {"function": f.name, "values": vals}


def cmd_distance(args) -> dict:
    from multcoinc.pretense import distance_squared, nit_distance_profile

    table = _table(args.x)
    out = {"x": args.x}
    if args.profile is not None:
        measured, predicted = nit_distance_profile(args.profile, args.x, table)
        out.update({"t": args.profile, "measured": measured, "predicted": predicted})
        return out
    if args.f is None or args.g is None:
        raise InvalidArgument("--f and --g are required unless --profile is given")
    f, g = _func(args.f), _func(args.g)
    out.update({"f": f.name, "g": g.name, "distance_squared": distance_squared(f, g, args.x, table)})
    return out


def cmd_pretender(args) -> dict:
    from multcoinc.pretense import best_pretender

    f = _func(args.f)
    table = _table(args.x)
    res = best_pretender(f, args.x, args.conductor_bound, args.t_max, args.t_step, table, threads=args.threads)
    return {
        "function": f.name,
        "x": args.x,
        "conductor_bound": args.conductor_bound,
        "t_max": args.t_max,
        "t_step": args.t_step,
        "distance_squared": res.distance_squared,
        "t": res.t,
        "character_modulus": res.character_modulus,
        "character_index": res.character_index,
    }


def cmd_density(args) -> dict:
    from multcoinc.correlate import log_density_equal

    f1, f2, pair = _func(args.f1), _func(args.f2), _affine(args.affine)
    table = _table(_pair_top(pair, args.x))
    rep = log_density_equal(f1, f2, pair, args.C, args.x, table, args.tolerance)
    return {
        "f1": f1.name,
        "f2": f2.name,
        "affine": str(pair),
        "C": [args.C.real, args.C.imag],
        "x": rep.x,
        "log_sum": rep.log_sum,
        "normalized": rep.normalized,
        "per_log_x": rep.per_log_x,
        "sample_count": rep.sample_count,
    }


def cmd_correlate(args) -> dict:
    from multcoinc.correlate import log_avg_correlation

    g1, g2, pair = _func(args.g1), _func(args.g2), _affine(args.affine)
    table = _table(_pair_top(pair, args.x))
    z = log_avg_correlation(g1, g2, pair, args.x, table)
    return {"g1": g1.name, "g2": g2.name, "affine": str(pair), "x": args.x, **_complex_dict(z)}


def cmd_fejer_scan(args):
    from multcoinc.correlate import dh_chain, fejer_scan

    f1, f2, pair = _func(args.f1), _func(args.f2), _affine(args.affine)
    table = _table(_pair_top(pair, args.x))
    scan = fejer_scan(
        f1, f2, pair, args.C, args.A, args.B, args.alpha_step, args.x, table,
        threshold=args.threshold, delta=args.delta,
    )
    if args.format == "csv":
        return scan.to_csv()
    chain = dh_chain(scan)
    return {
        "f1": f1.name,
        "f2": f2.name,
        "affine": str(pair),
        "x": args.x,
        "A": args.A,
        "B": args.B,
        "alpha_step": args.alpha_step,
        "delta": scan.delta,
        "threshold": scan.threshold,
        "rho": scan.rho,
        "measured_measure": scan.measured_measure,
        "X_count": scan.X.count,
        "chain": {
            "integral_re": chain.integral.real,
            "tail": chain.tail,
            "rhs_stated": chain.rhs_stated,
            "rhs_exact": chain.rhs_exact,
            "holds": chain.holds(),
        },
        "curve": [
            {"alpha": float(a), "re": float(v.real), "im": float(v.imag), "in_X": bool(m)}
            for a, v, m in zip(scan.curve.alphas, scan.curve.values, scan.X.members)
        ],
        "warnings": list(scan.warnings),
    }


def cmd_pipeline(args):
    from multcoinc.pipeline import PipelineConfig, run_pipeline

    f1, f2, pair = _func(args.f1), _func(args.f2), _affine(args.affine)
    cfg = PipelineConfig(
        A=args.A, B=args.B, alpha_step=args.alpha_step, x=args.x, conductor_bound=args.conductor_bound,
        t_max=args.t_max, t_step=args.t_step, delta_override=args.delta, threshold=args.threshold,
        m_cap=args.m_cap, quality_threshold=args.quality_threshold, max_searches=args.max_searches,
        threads=args.threads,
    )
    table = _table(_pair_top(pair, args.x))
    res = run_pipeline(f1, f2, pair, args.C, cfg, table)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["beta", "t_beta"])
        for b, t in zip(res.t_map.alphas, res.t_map.values):
            w.writerow([repr(float(b)), repr(float(t))])
        return buf.getvalue()
    out = res.to_dict(timings=args.timings)
    out.update({"f1": f1.name, "f2": f2.name, "affine": str(pair), "x": args.x, "A": args.A, "B": args.B})
    return out


def cmd_sumset(args) -> dict:
    from multcoinc.sumset import GridSet, cover_check, covering_ell, minimal_cover_ell, sum_decompose

    if args.intervals:
        ivs = []
        for lo, hi in args.intervals:
            ivs += [(lo, hi), (-hi, -lo)]
        Y = GridSet.from_intervals(args.bound, args.step, ivs + [(0.0, 0.0)])
    else:
        g = GridSet.build(args.bound, args.step)
        rng = np.random.default_rng(args.seed)
        right = rng.random(g.half) < args.random_fraction
        mask = np.concatenate([right[::-1], [True], right])
        Y = GridSet(g.half, g.step, mask)
    ell = args.ell if args.ell is not None else covering_ell(Y)
    out = {
        "bound": Y.bound,
        "step": Y.step,
        "measure": Y.measure,
        "count": Y.count,
        "symmetric": Y.is_symmetric(),
        "covering_ell": covering_ell(Y),
        "ell": ell,
        "covers": cover_check(Y, ell),
        "minimal_ell": minimal_cover_ell(Y, max(ell, 1)),
    }
    if args.beta is not None:
        out["beta"] = args.beta
        out["k"] = args.k
        out["decomposition"] = sum_decompose(args.beta, Y, args.k)
    return out


def cmd_converse(args) -> dict:
    from multcoinc.converse import SieveConfig, converse_report

    f = _func(args.f)
    table = _table(max(args.x + 2, args.prime_cutoff))
    rep = converse_report(f, args.x, table, SieveConfig(prime_cutoff=args.prime_cutoff))
    return {"function": f.name, "x": args.x, **rep.to_dict()}


def cmd_cuspform(args) -> dict:
    from multcoinc.cuspform import (
        cached_delta_coefficients,
        deligne_check,
        dyadic_ne1_logsum,
        ne1_reciprocal_sum,
        rs_pnt_ratio,
    )

    cache = args.cache or os.environ.get(CACHE_ENV)
    coeffs = cached_delta_coefficients(args.N, cache)
    dl = deligne_check(coeffs)
    X = args.X if args.X is not None else args.N
    dyadic = []
    y = args.y_min
    while 2 * y <= coeffs.N:
        d = dyadic_ne1_logsum(coeffs, y, args.y0)
        dyadic.append({"y": d.y, "log_sum": d.log_sum, "bound": d.bound, "holds": d.holds, "below_y0": d.below_y0})
        y *= 2
    s, pred = ne1_reciprocal_sum(coeffs, X)
    return {
        "N": coeffs.N,
        "weight": coeffs.k,
        "tau_head": [int(v) for v in coeffs.a[1 : min(coeffs.N, args.head) + 1]],
        "deligne": {"max_ratio": dl.max_ratio, "argmax": dl.argmax, "exact_ok": dl.exact_ok},
        "rs_pnt_ratio": rs_pnt_ratio(coeffs, X),
        "X": X,
        "dyadic": dyadic,
        "ne1_reciprocal_sum": s,
        "ne1_prediction": pred,
    }


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", "-o", help="write here instead of stdout")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--seed", type=int, default=0)

    p = _Parser(prog="multcoinc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_, description=help_)
        sp.set_defaults(func=fn)
        return sp

    sp = add("primes", cmd_primes, "prime counts and reciprocal prime sums")
    sp.add_argument("--limit", type=parse_int, required=True)
    sp.add_argument("--x", type=parse_int)
    sp.add_argument("--modulus", type=int, help="restrict to p = residue mod modulus")
    sp.add_argument("--residue", type=int, default=1)

    sp = add("eval", cmd_eval, "evaluate a multiplicative function")
    sp.add_argument("--f", required=True)
    sp.add_argument("--n", type=parse_int, nargs="+", required=True)

    sp = add("distance", cmd_distance, "pretentious distance D(f, g; x)^2, or the n^it profile")
    sp.add_argument("--f")
    sp.add_argument("--g")
    sp.add_argument("--x", type=parse_int, required=True)
    sp.add_argument("--profile", type=float, metavar="T", help="report D(n^iT, 1; x)^2 and its prediction")

    sp = add("pretender", cmd_pretender, "closest twisted character psi(n) n^it")
    sp.add_argument("--f", required=True)
    sp.add_argument("--x", type=parse_int, required=True)
    sp.add_argument("--conductor-bound", type=int, default=10)
    sp.add_argument("--t-max", type=float, default=100.0)
    sp.add_argument("--t-step", type=float, default=0.01)

    def pair_args(sp, names=("f1", "f2"), with_C=True):
        for n in names:
            sp.add_argument(f"--{n}", required=True)
        sp.add_argument("--affine", default="1,0,1,1", help="a,b,c,d")
        if with_C:
            sp.add_argument("--C", type=parse_complex, default=complex(1, 0), help="re,im")
        sp.add_argument("--x", type=parse_int, required=True)

    sp = add("density", cmd_density, "logarithmic density of f1(an+b) = C f2(cn+d) != 0")
    pair_args(sp)
    sp.add_argument("--tolerance", type=float)

    sp = add("correlate", cmd_correlate, "logarithmic correlation of g1(an+b) g2(cn+d)")
    pair_args(sp, ("g1", "g2"), with_C=False)

    def scan_args(sp):
        pair_args(sp)
        sp.add_argument("--A", type=float, default=1.0)
        sp.add_argument("--B", type=float, default=40.0)
        sp.add_argument("--alpha-step", type=float, default=0.01)
        sp.add_argument("--delta", type=float, help="use this density instead of measuring it")
        sp.add_argument("--threshold", type=float, help="default delta / (16 pi)")

    sp = add("fejer-scan", cmd_fejer_scan, "scan the projected correlation over [-B, B] and extract X")
    scan_args(sp)

    sp = add("pipeline", cmd_pipeline, "scan, pretender search, sum decomposition, linear fit, exception sum")
    scan_args(sp)
    sp.add_argument("--conductor-bound", type=int, default=10)
    sp.add_argument("--t-max", type=float, default=10.0)
    sp.add_argument("--t-step", type=float, default=0.01)
    sp.add_argument("--m-cap", type=int, default=720)
    sp.add_argument("--quality-threshold", type=float, default=1.0)
    sp.add_argument("--max-searches", type=int, default=64)
    sp.add_argument("--timings", action="store_true", help="include wall-clock timings (not reproducible)")

    sp = add("sumset", cmd_sumset, "covering and decomposition checks on a symmetric grid set")
    sp.add_argument("--bound", type=float, default=1.0)
    sp.add_argument("--step", type=float, default=1e-3)
    sp.add_argument("--intervals", type=parse_interval, nargs="*", metavar="LO:HI", help="positive intervals, mirrored")
    sp.add_argument("--random-fraction", type=float, default=0.3)
    sp.add_argument("--ell", type=int)
    sp.add_argument("--beta", type=float)
    sp.add_argument("--k", type=int, default=2)

    sp = add("converse", cmd_converse, "squarefree-pair count and sign-split densities for real f")
    sp.add_argument("--f", required=True)
    sp.add_argument("--x", type=parse_int, required=True)
    sp.add_argument("--prime-cutoff", type=parse_int, default=10**6)

    sp = add("cuspform", cmd_cuspform, "tau coefficients and their checks")
    sp.add_argument("--N", type=parse_int, default=10**4)
    sp.add_argument("--X", type=parse_int)
    sp.add_argument("--y-min", type=parse_int, default=1000)
    sp.add_argument("--y0", type=parse_int, default=100)
    sp.add_argument("--head", type=int, default=10)
    sp.add_argument("--cache", help=f"coefficient cache directory (else ${CACHE_ENV})")
    return p


def _to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def _render(result, fmt: str) -> str:
    if isinstance(result, str):
        return result
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "value"])
        for k, v in sorted(_flatten(_to_jsonable(result)).items()):
            w.writerow([k, v])
        return buf.getvalue()
    return json.dumps(_to_jsonable(result), sort_keys=True, indent=2) + "\n"


def _flatten(obj, prefix=""):
    out = {}
    if isinstance(obj, dict):
        for k, v in obj.items():
            out.update(_flatten(v, f"{prefix}{k}."))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            out.update(_flatten(v, f"{prefix}{i}."))
    else:
        out[prefix[:-1]] = obj
    return out


def _fail(kind: str, message: str, code: int) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message, "exit_code": code}, sort_keys=True) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except ParseError as exc:
        return _fail("parse", str(exc), EXIT_PARSE)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            result = args.func(args)
        if isinstance(result, dict) and caught:
            result.setdefault("warnings", [])
            result["warnings"] = list(result["warnings"]) + [str(w.message) for w in caught if str(w.message) not in result["warnings"]]
        text = _render(result, args.format)
    except ParseError as exc:
        return _fail("parse", str(exc), EXIT_PARSE)
    except BudgetExceeded as exc:
        return _fail("budget", str(exc), EXIT_BUDGET)
    except (InvalidArgument, argparse.ArgumentTypeError) as exc:
        return _fail("precondition", str(exc), EXIT_PRECONDITION)
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
