"""Coincidence density of mu(n) = mu(n+1) != 0 across scales, under both normalisations.

    python3 scripts/moebius_density_scan.py --max-exp 7 > density.csv
"""

import argparse
import csv
import sys

from multcoinc.converse import pair_squarefree_constant
from multcoinc.correlate import AffinePair, log_density_equal
from multcoinc.multfunc import moebius
from multcoinc.primes import build_prime_table


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-exp", type=int, default=7)
    ap.add_argument("--h", type=int, default=1, help="shift")
    args = ap.parse_args()

    table = build_prime_table(10**args.max_exp + args.h + 1)
    target = pair_squarefree_constant(min(10**6, table.limit), table)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["x", "by_harmonic", "by_log_x", "natural", "target"])
    mu = moebius()
    for j in range(3, args.max_exp + 1):
        for mant in (1, 3):
            x = mant * 10**j
            if x > 10**args.max_exp:
                break
            rep = log_density_equal(mu, mu, AffinePair.shift(args.h), 1, x, table)
            w.writerow([x, f"{rep.normalized:.6f}", f"{rep.per_log_x:.6f}", f"{rep.sample_count / x:.6f}", f"{target:.6f}"])


if __name__ == "__main__":
    main()
