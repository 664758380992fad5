"""Sample the asymptotic set of one mapping file numerically and fit its components."""

import argparse
from pathlib import Path

import numpy as np

from asympt.oracle import ProbeConfig, fit_implicit, sample_asymptotic
from asympt.parser import parse_mapping


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("file", type=Path)
    ap.add_argument("--radius-start", type=float, default=1e2)
    ap.add_argument("--samples", type=int, default=400)
    ap.add_argument("--seed", type=int, default=20240607)
    args = ap.parse_args()
    F = parse_mapping(args.file.read_text())
    for start in (args.radius_start, 2 * args.radius_start):
        cfg = ProbeConfig(radius_start=start, samples_per_radius=args.samples, seed=args.seed)
        cloud = sample_asymptotic(F, cfg)
        print(f"radius start {start:g}: {len(cloud)} points, stats {cloud.stats}")
        if len(cloud):
            print(f"  extrapolation error: median {np.median(cloud.errors):.1e}, max {cloud.errors.max():.1e}")
        for fit in fit_implicit(cloud, tolerance=cfg.fit_tolerance):
            print(f"  {fit.signature:<10} {fit.points:>5} pts  residual {fit.residual:.1e}  {fit.equation_str()}"
                  + (f"  [{fit.warning}]" if fit.warning else ""))


if __name__ == "__main__":
    main()
