#!/usr/bin/env python3
"""High-precision oracle for the log-L1 distance between two probability vectors.

Computes sum_j |ln(a_j) - ln(b_j)| at 60 decimal digits with mpmath,
independently of the C++ implementation. The acceptance suite freezes the
value printed for the default vectors below.

Usage:
    oracle_log_l1.py                 # default regression vectors
    oracle_log_l1.py a1 a2 a3 b1 b2 b3
"""

import sys

from mpmath import mp, mpf, fabs, log

mp.dps = 60


def log_l1(a, b):
    return sum(fabs(log(mpf(x)) - log(mpf(y))) for x, y in zip(a, b))


def main(argv):
    if len(argv) == 7:
        vals = [argv[i] for i in range(1, 7)]
        a, b = vals[:3], vals[3:]
    elif len(argv) == 1:
        a = ["0.05", "0.20", "0.75"]
        b = ["0.13", "0.76", "0.11"]
    else:
        print("usage: oracle_log_l1.py [a1 a2 a3 b1 b2 b3]", file=sys.stderr)
        return 1
    print(mp.nstr(log_l1(a, b), 30))
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
