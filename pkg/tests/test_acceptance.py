"""Acceptance criteria, one PASS/FAIL line each (printed in the pytest summary).

Criterion 8 re-runs the workloads of criteria 3-5 and compares bytes with
the first run, so the catalogue sweep is executed twice here.
"""

import functools
import io
import json
import random
import sys
import time
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path

import pytest

from asympt.checks import check_dominance, check_homomorphism, convergence_pair
from asympt.classifier import ClassifierConfig, classify_mapping, structural_checks
from asympt.cli import DEFAULT_SEED, main
from asympt.facons import enumerate_facons, facon_count_formula, group_facons_n3
from asympt.golden import GOLDEN
from asympt.laurent import convergence_slope
from asympt.parser import parse_polynomial

TRIPLE = "dim 3\nF1 = x1\nF2 = x2\nF3 = x1*x2*x3\n"
PARABOLOID = "dim 3\nF1 = x1\nF2 = x2*x3\nF3 = x2 + x1^2\n"
TWO_PLANES = "dim 3\nF1 = x1*x2\nF2 = x2*x3\nF3 = x3\n"


def cli(*argv) -> tuple[int, str, float]:
    out, err = io.StringIO(), io.StringIO()
    t = time.perf_counter()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(list(argv))
    return code, out.getvalue(), time.perf_counter() - t


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    d = tmp_path_factory.mktemp("acceptance")
    for name, text in (("triple.txt", TRIPLE), ("paraboloid.txt", PARABOLOID), ("two_planes.txt", TWO_PLANES)):
        (d / name).write_text(text)
    return d


@functools.lru_cache(maxsize=None)
def _run(workdir: Path, run: int) -> dict:
    """Reports of criteria 3-5 for one run; each run uses its own empty cache."""
    out = {}
    for name in ("triple", "paraboloid", "two_planes"):
        out[name] = cli("classify", str(workdir / f"{name}.txt"), "--probe", "--seed", str(DEFAULT_SEED))
    out["catalogue"] = cli("catalogue", "--dim", "3", "--degree", "2", "--cache-dir", str(workdir / f"cache{run}"))
    return out


def test_1_facon_count(criterion):
    code, out, secs = cli("facons", "--dim", "3", "--count-only")
    sizes = [len(g.members) for g in group_facons_n3(enumerate_facons(3))]
    ok = code == 0 and out.strip() == "19" and sizes == [1, 3, 3, 3, 6, 3] and secs < 0.1
    criterion("1 facon count for n = 3", ok, f"printed {out.strip()}, groups {sizes}, {secs:.3f}s")


def test_2_count_formula(criterion):
    t = time.perf_counter()
    rows = [(n, facon_count_formula(n), len(enumerate_facons(n))) for n in range(1, 7)]
    secs = time.perf_counter() - t
    bad = [f"n={n}: formula {f} vs enumeration {e}" for n, f, e in rows if f != e]
    ok = not bad and secs < 1
    criterion("2 closed formula equals enumeration, n = 1..6", ok,
              ("; ".join(bad) if bad else "all equal") + f" ({secs:.2f}s)")


def _components(report):
    return [c["equation"] for c in report["components"]]


def test_3_triple_product_pipeline(criterion, workdir):
    code, out, secs = _run(workdir, 1)["triple"]
    rep = json.loads(out)
    facons = rep["realized_facons"]
    ok = (code == 0 and sorted(facons) == sorted(["(3)[1]", "(3)[2]", "(3)[1,2]"])
          and _components(rep) == ["alpha1 = 0", "alpha2 = 0"] and rep["mode"] == "facon-realization"
          and rep["oracle_residual"] is not None and rep["oracle_residual"] < 1e-6 and secs < 30)
    criterion("3 (x1, x2, x1x2x3): facons, two planes, oracle", ok,
              f"facons {facons}, components {_components(rep)}, residual {rep['oracle_residual']:.1e}, {secs:.1f}s")


def _proportional(eq_text, expected):
    """Equation strings 'p = 0' equal up to a nonzero scalar."""
    p = parse_polynomial(eq_text.replace("alpha", "x").removesuffix(" = 0"), 3)
    q = parse_polynomial(expected.replace("alpha", "x"), 3)
    e, c = p.leading_term()
    return p == q.scale(c / q.terms[e]) if e in q.terms else False


def test_4_degree_two_golden(criterion, workdir):
    runs = _run(workdir, 1)
    code_p, out_p, secs_p = runs["paraboloid"]
    code_t, out_t, secs_t = runs["two_planes"]
    par, two = json.loads(out_p), json.loads(out_t)
    ok_p = (code_p == 0 and par["matched_type"] == 2 and len(par["components"]) == 1
            and _proportional(par["components"][0]["equation"], "x3 - x1^2")
            and par["oracle_residual"] < 1e-6 and secs_p < 60)
    ok_t = (code_t == 0 and two["matched_type"] == 3 and len({c["equation"] for c in two["components"]}) == 2
            and all(c["type"] == "plane" for c in two["components"]) and two["oracle_residual"] < 1e-6
            and secs_t < 60)
    criterion("4 paraboloid -> type 2, two-plane example -> type 3", ok_p and ok_t,
              f"type {par['matched_type']} {_components(par)} res {par['oracle_residual']:.1e} {secs_p:.1f}s; "
              f"type {two['matched_type']} {_components(two)} res {two['oracle_residual']:.1e} {secs_t:.1f}s")


def test_5_catalogue(criterion, workdir):
    code, out, secs = _run(workdir, 1)["catalogue"]
    data = json.loads(out)
    names = [(e["type"], e["name"]) for e in data["types"]]
    expected = [(1, "plane"), (2, "paraboloid"), (3, "two planes"), (4, "plane and paraboloid"), (5, "three planes")]
    five = next((e for e in data["types"] if e["type"] == 5), None)
    members = set(five["witness"]["pertinent"]) if five else set()
    ok = (code == 0 and names == expected and {"x1*x2", "x2*x3", "x1*x3"} <= members
          and not data["violations"] and secs < 300)
    criterion("5 catalogue: exactly the five configurations", ok,
              f"types {[t for t, _ in names]}, type-5 pertinent {sorted(members)}, {secs:.0f}s")


@pytest.fixture(scope="module")
def golden_reports():
    return [classify_mapping(c.mapping(), ClassifierConfig()) for c in GOLDEN]


def test_6a_two_facon_strata_are_planes(criterion, workdir, golden_reports):
    bad = []
    catalogue = json.loads(_run(workdir, 1)["catalogue"][1])
    for e in catalogue["types"]:
        for c in e["witness"]["components"]:
            if len(c["facons"]) > 2 or (len(c["facons"]) == 2 and c["type"] != "plane"):
                bad.append(f"catalogue type {e['type']}: {c}")
    for rep in golden_reports:
        for c in rep.components:
            if len(c.facons) > 2 or (len(c.facons) == 2 and c.geom_type != "plane"):
                bad.append(f"{rep.mapping}: {c.equation_str()}")
    criterion("6a surfaces carry <= 2 facons; two-facon surfaces are planes", not bad,
              "; ".join(bad) or f"{len(catalogue['types'])} catalogue witnesses, {len(golden_reports)} golden reports")


def test_6b_paraboloid_company(criterion, workdir, golden_reports):
    bad = []
    catalogue = json.loads(_run(workdir, 1)["catalogue"][1])
    kinds_all = [sorted(c["type"] for c in e["witness"]["components"]) for e in catalogue["types"]]
    kinds_all += [sorted(c.geom_type for c in rep.components) for rep in golden_reports]
    for kinds in kinds_all:
        if "paraboloid" in kinds and kinds not in (["paraboloid"], ["paraboloid", "plane"]):
            bad.append(str(kinds))
    bad += [v for rep in golden_reports for v in structural_checks(rep)]
    criterion("6b a paraboloid appears alone or with one plane", not bad, "; ".join(bad) or f"{len(kinds_all)} sets")


def test_6c_substitution_homomorphism(criterion):
    ok, detail = check_homomorphism(200, DEFAULT_SEED)
    criterion("6c substitution homomorphism, 200 exact trials", ok, detail)


def test_6d_dominance_agreement(criterion):
    ok, detail = check_dominance(100, DEFAULT_SEED)
    criterion("6d dominance: determinant vs numeric rank, 100 maps", ok, detail)


def test_7_limit_convergence(criterion):
    t = time.perf_counter()
    rng = random.Random(f"{DEFAULT_SEED}:acceptance-convergence")
    ks = (10**3, 10**4, 10**5, 10**6)
    slopes = [convergence_slope(ks, convergence_pair(rng, ks)[3]) for _ in range(50)]
    secs = time.perf_counter() - t
    worst = max(slopes)
    criterion("7 numeric limits converge with log-log slope <= -0.9", worst <= -0.9 and secs < 30,
              f"worst slope {worst:.3f} over 50 pairs, {secs:.1f}s")


def test_8_determinism(criterion, workdir):
    first, second = _run(workdir, 1), _run(workdir, 2)
    diff = [name for name in first if first[name][:2] != second[name][:2]]
    criterion("8 criteria 3-5 reports are byte-identical across runs", not diff,
              f"differing: {diff}" if diff else f"{len(first)} reports identical")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
