"""Monte Carlo error versus trial count for a constant-p conflict.

Prints one CSV row per trial count: trials, q_hat, std_error, z-score against
the closed form.
"""

import argparse
import csv
import sys

from conflictruin.battle import q_constant_p
from conflictruin.markov import ConflictShape, build_chain, simulate


def main():
    parser = argparse.ArgumentParser(description="Monte Carlo convergence check")
    parser.add_argument("--m", type=int, default=2)
    parser.add_argument("--n", type=int, default=3)
    parser.add_argument("--p", type=float, default=0.6)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args()

    chain = build_chain(ConflictShape(args.m, args.n), args.p)
    exact = q_constant_p(args.p, args.m, args.n)
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["trials", "q_hat", "std_error", "z"])
    for k in range(2, 7):
        est = simulate(chain, 10**k, args.seed, args.workers)
        z = (est.q_hat - exact) / est.std_error if est.std_error else float("nan")
        out.writerow([est.trials, f"{est.q_hat:.8f}", f"{est.std_error:.3e}", f"{z:+.2f}"])


if __name__ == "__main__":
    main()
