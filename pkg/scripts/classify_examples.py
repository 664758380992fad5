"""Classify every mapping in mappings/ and cross-check it with the numeric probe."""

import argparse
from pathlib import Path

from asympt.classifier import ClassifierConfig, classify_mapping, structural_checks
from asympt.oracle import ProbeConfig, crosscheck, report_components, sample_asymptotic
from asympt.parser import parse_mapping

ROOT = Path(__file__).resolve().parent.parent


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("files", nargs="*", type=Path)
    ap.add_argument("--seed", type=int, default=20240607)
    args = ap.parse_args()
    files = args.files or sorted((ROOT / "mappings").glob("*.txt"))
    print(f"{'file':<26} {'type':>4}  {'residual':>9}  components")
    for path in files:
        F = parse_mapping(path.read_text())
        rep = classify_mapping(F, ClassifierConfig(seed=args.seed))
        cloud = sample_asymptotic(F, ProbeConfig(seed=args.seed))
        cc = crosscheck(report_components(rep), cloud)
        comps = "; ".join(c.equation_str() for c in rep.components) or "(none)"
        typ = rep.matched_type if rep.matched_type is not None else "-"
        res = f"{cc.max_residual:.1e}" if len(cloud) else "empty"
        flags = "" if cc.passed and not structural_checks(rep) else "  !! " + "; ".join(cc.flags)
        print(f"{path.name:<26} {typ:>4}  {res:>9}  {comps}{flags}")


if __name__ == "__main__":
    main()
