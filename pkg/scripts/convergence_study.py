"""Distribution of log-log convergence slopes of exact limits along realized sequences."""

import argparse
import random
import statistics

from asympt.checks import convergence_pair
from asympt.laurent import convergence_slope


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--pairs", type=int, default=200)
    ap.add_argument("--seed", type=int, default=20240607)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    ks = (10**3, 10**4, 10**5, 10**6)
    slopes = sorted(convergence_slope(ks, convergence_pair(rng, ks)[3]) for _ in range(args.pairs))
    print(f"pairs {len(slopes)}  worst {slopes[-1]:.3f}  median {statistics.median(slopes):.3f}  "
          f"best {slopes[0]:.3f}")
    # slopes near -1 come from 1/k corrections, near -2 from 1/k^2
    for lo in (-3.0, -2.5, -2.0, -1.5, -1.0):
        count = sum(lo <= s < lo + 0.5 for s in slopes)
        print(f"  [{lo:+.1f}, {lo + 0.5:+.1f})  {'#' * count}")


if __name__ == "__main__":
    main()
