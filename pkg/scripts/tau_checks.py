"""Deligne, Rankin-Selberg and dyadic checks on tau(n) for n <= N.

    python3 scripts/tau_checks.py --N 100000 --cache ~/.cache/multcoinc
"""

import argparse

from multcoinc.cuspform import cached_delta_coefficients, deligne_check, dyadic_ne1_logsum, ne1_reciprocal_sum, rs_pnt_ratio


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--N", type=int, default=10**5)
    ap.add_argument("--y0", type=int, default=100)
    ap.add_argument("--cache")
    args = ap.parse_args()

    c = cached_delta_coefficients(args.N, args.cache)
    dl = deligne_check(c)
    print(f"Deligne: max |lambda(p)|/2 = {dl.max_ratio:.6f} at p={dl.argmax}; exact integer check {dl.exact_ok}")
    X = 1000
    while X <= args.N:
        print(f"rs ratio X={X:>8}: {rs_pnt_ratio(c, X):.4f}")
        X *= 10
    y = 16
    while 2 * y <= args.N:
        chk = dyadic_ne1_logsum(c, y, args.y0)
        flag = " (below y0)" if chk.below_y0 else ""
        print(f"y={y:>7}: sum log p = {chk.log_sum:10.2f}  y/5 = {chk.bound:9.2f}  holds={chk.holds}{flag}")
        y *= 2
    s, pred = ne1_reciprocal_sum(c, args.N)
    print(f"sum 1/p over |tau(p)| != 1: {s:.4f} (lower bound log log N / (10 log 2) = {pred:.4f})")


if __name__ == "__main__":
    main()
