"""Run the pipeline at x = 10^5, 10^6, 10^7 and report the A-trend of the window sums.

    python3 scripts/pipeline_scales.py --f moebius --out pipeline_scales.json
"""

import argparse
import json
import time

from multcoinc.correlate import AffinePair
from multcoinc.multfunc import parse_function
from multcoinc.pipeline import PipelineConfig, run_pipeline, sigma_A
from multcoinc.primes import build_prime_table


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--f", default="moebius")
    ap.add_argument("--affine", default="1,0,1,1")
    ap.add_argument("--C", type=float, default=1.0)
    ap.add_argument("--B", type=float, default=40.0)
    ap.add_argument("--scales", type=int, nargs="+", default=[5, 6, 7], help="exponents j of x = 10^j")
    ap.add_argument("--A-values", type=float, nargs="+", default=[1, 2, 4, 8, 16])
    ap.add_argument("--out")
    args = ap.parse_args()

    f = parse_function(args.f)
    pair = AffinePair.parse(args.affine)
    top = 10 ** max(args.scales)
    table = build_prime_table(max(pair.a, pair.c) * top + max(abs(pair.b), abs(pair.d)) + 2)
    rows = []
    for j in args.scales:
        x = 10**j
        start = time.perf_counter()
        res = run_pipeline(f, f, pair, args.C, PipelineConfig(x=x, B=args.B), table)
        trend = {str(A): sigma_A(f, A, args.B, x, table) for A in args.A_values}
        row = {
            "x": x,
            "delta": res.measured_delta,
            "lambda_X": res.X_measure,
            "k": res.k,
            "m": res.m,
            "r": res.r,
            "exception_sum": res.exception_sum,
            "sigma_A": trend,
            "seconds": round(time.perf_counter() - start, 1),
        }
        rows.append(row)
        print(
            f"x=10^{j}  delta={row['delta']:.5f}  lambda(X)={row['lambda_X']:.2f}  k={row['k']}  "
            f"r={row['r']:.4g}  exc={row['exception_sum']:.4g}  sigma_A={[round(v, 4) for v in trend.values()]}  "
            f"({row['seconds']}s)"
        )
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(rows, fh, indent=2, sort_keys=True)


if __name__ == "__main__":
    main()
