"""Sweep generic facon profiles and print the realizable configurations with witnesses."""

import argparse
import json
import logging
import time

from asympt.catalogue import CatalogueConfig, catalogue, viable_profiles


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=20240607)
    ap.add_argument("--json", help="also write the catalogue here")
    ap.add_argument("--profiles", action="store_true", help="list the viable profiles first")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    if args.profiles:
        profiles, swept = viable_profiles(3, args.seed)
        print(f"{swept} branch combinations, {len(profiles)} viable profiles up to coordinate permutation")
        for p in profiles:
            print("  " + ", ".join(map(str, p.facons)) + ": " + ", ".join(c.label() for c in p.members))
    t = time.perf_counter()
    cat = catalogue(3, 2, CatalogueConfig(seed=args.seed))
    print(cat.to_text())
    print(f"{cat.classified} witnesses classified in {time.perf_counter() - t:.0f}s")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(cat.to_dict(), fh, indent=2)


if __name__ == "__main__":
    main()
