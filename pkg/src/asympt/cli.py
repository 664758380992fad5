"""Command-line entry point: ``asympt {facons,classify,probe,catalogue,check}``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .facons import enumerate_facons, facon_count_by_cases, facon_count_formula, group_facons_n3
from .iofiles import atomic_write_text
from .parser import ParseError, parse_mapping

DEFAULT_SEED = 20240607
SEED_ENV = "ASYMPT_SEED"

EXIT_OK, EXIT_USAGE, EXIT_ANALYSIS, EXIT_ORACLE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def resolve_seed(flag: int | None) -> int:
    """Flag, then the environment variable, then the built-in default."""
    if flag is not None:
        return flag
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    return DEFAULT_SEED


def _emit(text: str, output: str | None):
    if output:
        atomic_write_text(output, text)
    else:
        sys.stdout.write(text)


def _dump(data) -> str:
    return json.dumps(data, indent=2) + "\n"


def _read_mapping(args):
    path = args.input or args.path
    if not path:
        raise UsageError("an input mapping file is required")
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return parse_mapping(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_facons(args) -> int:
    n = args.dim
    if n < 1:
        raise UsageError("--dim must be positive")
    facons = enumerate_facons(n)
    if args.count_only:
        print(len(facons))
        return EXIT_OK
    if args.format == "json":
        data = {"n": n, "count": len(facons), "facons": [f.to_dict() for f in facons],
                "count_by_cases": facon_count_by_cases(n), "count_formula": facon_count_formula(n)}
        if n == 3:
            data["groups"] = {g.label: [str(f) for f in g.members] for g in group_facons_n3(facons)}
        _emit(_dump(data), args.output)
        return EXIT_OK
    lines = [f"{len(facons)} facons for n = {n}"]
    if n == 3:
        for g in group_facons_n3(facons):
            lines.append(f"{g.label:>4}: " + " ".join(str(f) for f in g.members))
    else:
        lines += [str(f) for f in facons]
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def _probe_config(args, seed):
    from .oracle import ProbeConfig

    try:
        return ProbeConfig(radius_start=args.radius_start, radius_factor=args.radius_factor, steps=args.steps,
                           image_bound=args.bound, samples_per_radius=args.samples, seed=seed,
                           fit_tolerance=args.fit_tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_classify(args) -> int:
    from .classifier import ClassifierConfig, classify_mapping, structural_checks

    F = _read_mapping(args)
    seed = resolve_seed(args.seed)
    pcfg = _probe_config(args, seed) if args.probe else None
    if F.n != 3 or F.degree() > 3:
        print(f"classify supports mappings of C^3 of degree <= 3 (got n = {F.n}, degree {F.degree()})",
              file=sys.stderr)
        return EXIT_ANALYSIS
    report = classify_mapping(F, ClassifierConfig(seed=seed, pertinent=not args.no_pertinent))
    problems = structural_checks(report)
    code = EXIT_OK
    tolerances = {"oracle_tol": args.tol}
    if pcfg is not None:
        from .oracle import crosscheck, report_components, sample_asymptotic

        cloud = sample_asymptotic(F, pcfg)
        cc = crosscheck(report_components(report), cloud, tolerance=pcfg.fit_tolerance)
        report.oracle_residual = cc.max_residual if len(cloud) else None
        report.oracle = cc.to_dict() | {"cloud_points": len(cloud), "possibly_proper": cloud.possibly_proper}
        tolerances["fit_tolerance"] = pcfg.fit_tolerance
        if len(cloud) and cc.max_residual > args.tol:
            code = EXIT_ORACLE
    data = report.to_dict()
    data["tolerances"] = tolerances
    if problems:
        data["violations"] = problems
        code = EXIT_ANALYSIS
    text = _dump(data) if args.format == "json" else report.to_text() + "\n"
    _emit(text, args.output)
    if code == EXIT_ORACLE:
        print(f"oracle residual {report.oracle_residual:.2e} exceeds --tol {args.tol:g}", file=sys.stderr)
    for p in problems:
        print(f"structural check failed: {p}", file=sys.stderr)
    return code


def cmd_probe(args) -> int:
    from .oracle import fit_implicit, sample_asymptotic

    F = _read_mapping(args)
    if F.n != 3:
        print("the probe works on mappings of C^3", file=sys.stderr)
        return EXIT_ANALYSIS
    cfg = _probe_config(args, resolve_seed(args.seed))
    cloud = sample_asymptotic(F, cfg)
    if args.export:
        atomic_write_text(args.export, cloud.to_jsonl())
    fits = fit_implicit(cloud, tolerance=cfg.fit_tolerance)
    data = {
        "mapping": F.to_str(),
        "points": len(cloud),
        "possibly_proper": cloud.possibly_proper,
        "signatures": {s: len(cloud.subset(s)) for s in cloud.signatures()},
        "fits": [f.to_dict() for f in fits],
        "stats": cloud.stats,
        "seed": cfg.seed,
        "config": {"radius_start": cfg.radius_start, "radius_factor": cfg.radius_factor, "steps": cfg.steps,
                   "image_bound": cfg.image_bound, "samples": cfg.samples_per_radius,
                   "fit_tolerance": cfg.fit_tolerance},
        "version": __version__,
    }
    if args.format == "json":
        text = _dump(data)
    else:
        lines = [f"mapping: {F.to_str()}", f"points: {len(cloud)}" + ("  (possibly proper)" if cloud.possibly_proper else "")]
        for f in fits:
            lines.append(f"{f.signature:<10} {f.points:>6} pts  residual {f.residual:.1e}  {f.equation_str()}"
                         + (f"  [{f.warning}]" if f.warning else ""))
        text = "\n".join(lines) + "\n"
    _emit(text, args.output)
    return EXIT_OK


def cmd_catalogue(args) -> int:
    from .catalogue import CatalogueConfig, cached_catalogue

    if (args.dim, args.degree) != (3, 2):
        print("the catalogue is available for --dim 3 --degree 2 only", file=sys.stderr)
        return EXIT_ANALYSIS
    cfg = CatalogueConfig(seed=resolve_seed(args.seed))
    text, hit = cached_catalogue(args.dim, args.degree, cfg, Path(args.cache_dir) if args.cache_dir else None,
                                 refresh=args.refresh)
    logging.getLogger(__name__).info("catalogue cache %s", "hit" if hit else "miss")
    data = json.loads(text)
    if args.format == "json":
        out = text
    else:
        lines = [f"realizable asymptotic sets, n = {data['n']}, degree {data['degree']}: {len(data['types'])} types"]
        lines.append(f"{'type':<5} {'configuration':<22} {'witness':<44} profile facons")
        for e in data["types"]:
            w = e["witness"]
            lines.append(f"{e['type']:<5} {e['name']:<22} {w['mapping']:<44} {', '.join(w['profile_facons'])}")
        lines += [f"violation: {v}" for v in data["violations"]]
        out = "\n".join(lines) + "\n"
    _emit(out, args.output)
    return EXIT_ANALYSIS if data["violations"] else EXIT_OK


def cmd_check(args) -> int:
    from .checks import FAULTS, run_check

    if args.inject_fault and args.inject_fault not in FAULTS:
        raise UsageError(f"unknown fault {args.inject_fault!r}; choose from {', '.join(FAULTS)}")
    results = run_check(quick=args.quick, seed=resolve_seed(args.seed), fault=args.inject_fault)
    for r in results:
        print(r.line())
    failed = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    if failed:
        print("failing: " + ", ".join(failed), file=sys.stderr)
        return EXIT_ANALYSIS
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="asympt", description="Asymptotic sets of polynomial mappings of C^3.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, fmt="text"):
        sp.add_argument("--seed", type=int, default=None, help=f"random seed (env {SEED_ENV}, default {DEFAULT_SEED})")
        sp.add_argument("--format", choices=("json", "text"), default=fmt)
        sp.add_argument("-o", "--output", help="write here (atomically) instead of stdout")

    def probe_flags(sp):
        sp.add_argument("--radius-start", type=float, default=1e2)
        sp.add_argument("--radius-factor", type=float, default=10.0)
        sp.add_argument("--steps", type=int, default=4)
        sp.add_argument("--bound", type=float, default=1e3, help="image bound")
        sp.add_argument("--samples", type=int, default=400, help="Newton starts per anchored coordinate")
        sp.add_argument("--fit-tol", type=float, default=1e-6)

    sp = sub.add_parser("facons", help="enumerate facons")
    sp.add_argument("--dim", type=int, default=3)
    sp.add_argument("--count-only", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_facons)

    sp = sub.add_parser("classify", help="asymptotic set of a mapping file")
    sp.add_argument("path", nargs="?")
    sp.add_argument("-i", "--input")
    sp.add_argument("--probe", action="store_true", help="cross-check with the numeric oracle")
    sp.add_argument("--tol", type=float, default=1e-5, help="largest accepted oracle residual")
    sp.add_argument("--no-pertinent", action="store_true", help="skip the pertinent-variable analysis")
    probe_flags(sp)
    common(sp, "json")
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("probe", help="numeric sampling of the asymptotic set")
    sp.add_argument("path", nargs="?")
    sp.add_argument("-i", "--input")
    sp.add_argument("--export", help="write the cloud as JSON lines")
    probe_flags(sp)
    common(sp, "json")
    sp.set_defaults(func=cmd_probe)

    sp = sub.add_parser("catalogue", help="realizable asymptotic-set types")
    sp.add_argument("--dim", type=int, default=3)
    sp.add_argument("--degree", type=int, default=2)
    sp.add_argument("--cache-dir")
    sp.add_argument("--refresh", action="store_true", help="ignore the cache")
    common(sp, "json")
    sp.set_defaults(func=cmd_catalogue)

    sp = sub.add_parser("check", help="run the self-check suite")
    sp.add_argument("--quick", action="store_true")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--inject-fault", help=argparse.SUPPRESS)
    sp.set_defaults(func=cmd_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"asympt: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"asympt: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
