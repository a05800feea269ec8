"""Compare the squarefree-pair count with the candidate constants for several sign patterns.

    python3 scripts/converse_constants.py --x 1000000
"""

import argparse

from multcoinc.converse import converse_report
from multcoinc.multfunc import one, sign_flip
from multcoinc.primes import build_prime_table

PATTERNS = [(), (3,), (5,), (3, 5), (3, 5, 7), (7, 11, 13)]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--x", type=int, default=10**6)
    args = ap.parse_args()

    table = build_prime_table(args.x + 2)
    print(f"{'f(p) = -1 at':>14} {'density':>9} {'stated':>9} {'C*c_f':>9} {'full':>9}  matched")
    for bad in PATTERNS:
        f = sign_flip(*bad) if bad else one()
        r = converse_report(f, args.x, table)
        label = ",".join(map(str, bad)) or "none"
        print(f"{label:>14} {r.density:9.6f} {r.stated:9.6f} {r.sieve_constant:9.6f} {r.full_prediction:9.6f}  {r.matched}")


if __name__ == "__main__":
    main()
