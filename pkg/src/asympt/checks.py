"""The self-check suite behind ``asympt check``: invariants, golden cases and seeded samplers."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .classifier import ClassifierConfig, classify_mapping, structural_checks
from .facons import enumerate_facons, facon_count_by_cases, facon_count_formula, group_facons_n3
from .golden import GOLDEN
from .laurent import SequenceAnsatz, convergence_errors, convergence_slope, random_point, substitute
from .parser import parse_mapping, render_mapping
from .pertinent import EngineConfig, realize_facon
from .poly import (Polynomial, PolynomialMapping, is_dominant, numeric_jacobian,
                   random_gaussian_rational, random_polynomial)

FAULTS = ("facon-count", "homomorphism", "golden", "dominance")


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name:<34} {self.detail} ({self.seconds:.2f}s)"


# ---------------------------------------------------------------------------
# samplers shared with the test suite


def random_ansatz(rng: random.Random, n: int = 3, m: int = 3, low: int = -2, high: int = 1) -> SequenceAnsatz:
    """Sequence with random Laurent coordinates whose coefficients are random linear forms."""
    names = [f"t{j + 1}" for j in range(m)]
    coords = []
    for _ in range(n):
        series = {}
        for e in range(low, high + 1):
            if rng.random() < 0.6:
                form = Polynomial(m, {tuple(int(i == j) for i in range(m)): random_gaussian_rational(rng, 5)
                                      for j in range(m) if rng.random() < 0.7})
                form = form + random_gaussian_rational(rng, 5)
                series[e] = form
        coords.append(series)
    return SequenceAnsatz.from_series(names, coords)


def substitution_homomorphism_trial(rng: random.Random, fault: bool = False) -> bool:
    """substitute(p*q + r) == substitute(p)*substitute(q) + substitute(r), exactly."""
    p = random_polynomial(rng, 3, 2)
    q = random_polynomial(rng, 3, 2)
    r = random_polynomial(rng, 3, 2)
    s = random_ansatz(rng)
    lhs = substitute(p * q + r, s)
    rhs = substitute(p, s) * substitute(q, s) + substitute(r, s)
    if fault:
        rhs = rhs + substitute(Polynomial.constant(3, 1), s)
    return lhs == rhs


def random_mapping_mix(rng: random.Random) -> tuple[PolynomialMapping, bool | None]:
    """Degree-2 mappings of C^3, about half built to be non-dominant.

    Returns the mapping and the dominance known by construction (None when random).
    """
    kind = rng.randrange(4)
    F1 = random_polynomial(rng, 3, 2)
    F2 = random_polynomial(rng, 3, 2)
    if kind == 0:
        F3 = F1.scale(random_gaussian_rational(rng, 5)) + F2.scale(random_gaussian_rational(rng, 5)) + 1
        return PolynomialMapping((F1, F2, F3)), False
    if kind == 1:
        L = random_polynomial(rng, 3, 1)
        return PolynomialMapping((L, F2, L * L + L.scale(random_gaussian_rational(rng, 5)))), False
    if kind == 2:
        # components in two variables only
        x = [Polynomial.var(3, j) for j in range(3)]
        G = [random_polynomial(rng, 2, 2).compose([x[0], x[1]], one=Polynomial.constant(3, 1)) for _ in range(3)]
        return PolynomialMapping(tuple(G)), False
    return PolynomialMapping((F1, F2, random_polynomial(rng, 3, 2))), None


def numeric_dominance(F: PolynomialMapping, rng: random.Random, threshold: float = 1e-8) -> bool:
    """Full numeric rank of the Jacobian at a random point (relative singular-value threshold)."""
    point = [complex(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(F.n)]
    s = np.linalg.svd(numeric_jacobian(F, point), compute_uv=False)
    return bool(s[0] > 0 and s[-1] > threshold * s[0])


_CONVERGENCE_BASES = [case.text for case in GOLDEN if case.matched_type or case.name == "triple-product"]
_BRANCH_CACHE: dict[str, list] = {}


def _branches(text: str):
    if text not in _BRANCH_CACHE:
        F = parse_mapping(text)
        out = []
        for kappa in enumerate_facons(3):
            out += [(F, b) for b in realize_facon(F, kappa, EngineConfig())]
        _BRANCH_CACHE[text] = out
    return _BRANCH_CACHE[text]


def convergence_pair(rng: random.Random, ks=(10**3, 10**4, 10**5, 10**6)):
    """A polynomial with a finite limit along a realized sequence, and its exact errors.

    The polynomial is a random affine combination of the components of a
    reference mapping, evaluated along one of that mapping's bounded branches
    at random parameter values.  Pairs whose error is exactly zero are redrawn.
    """
    while True:
        F, b = rng.choice(_branches(rng.choice(_CONVERGENCE_BASES)))
        coeffs = [random_gaussian_rational(rng, 5) for _ in range(3)]
        p = sum((c.scale(a) for c, a in zip(F.components, coeffs)), Polynomial.zero(3)) + \
            random_gaussian_rational(rng, 5)
        point = random_point(rng, b.ansatz.m, 50)
        try:
            errs = convergence_errors(p, b.ansatz, point, ks)
        except ZeroDivisionError:
            continue
        if all(e > 0 for e in errs):
            return p, b.ansatz, point, errs


# ---------------------------------------------------------------------------
# individual checks


def _timed(name: str, fn: Callable[[], tuple[bool, str]]) -> CheckResult:
    t = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crashing check is a failing check
        ok, detail = False, f"raised {type(exc).__name__}: {exc}"
    return CheckResult(name, ok, detail, time.perf_counter() - t)


def check_facon_counts(fault: bool = False) -> tuple[bool, str]:
    bad = []
    for n in range(1, 7):
        got = len(enumerate_facons(n)) + (1 if fault and n == 3 else 0)
        if got != facon_count_by_cases(n):
            bad.append(f"n={n}: enumeration {got} vs case count {facon_count_by_cases(n)}")
        if n <= 4 and got != facon_count_formula(n):
            bad.append(f"n={n}: enumeration {got} vs closed formula {facon_count_formula(n)}")
    sizes = [len(g.members) for g in group_facons_n3()]
    if sizes != [1, 3, 3, 3, 6, 3]:
        bad.append(f"group sizes {sizes}")
    if bad:
        return False, "; ".join(bad)
    return True, "1, 5, 19, 65, 211, 665 (closed formula compared for n <= 4 only)"


def check_homomorphism(trials: int, seed: int, fault: bool = False) -> tuple[bool, str]:
    rng = random.Random(f"{seed}:homomorphism")
    fails = sum(not substitution_homomorphism_trial(rng, fault) for _ in range(trials))
    return fails == 0, f"{trials - fails}/{trials} exact"


def check_round_trip(trials: int, seed: int) -> tuple[bool, str]:
    rng = random.Random(f"{seed}:round-trip")
    fails = 0
    for _ in range(trials):
        F = PolynomialMapping(tuple(random_polynomial(rng, 3, 2) for _ in range(3)))
        if parse_mapping(render_mapping(F)) != F:
            fails += 1
    return fails == 0, f"{trials - fails}/{trials} parse(render(F)) == F"


def check_dominance(trials: int, seed: int, fault: bool = False) -> tuple[bool, str]:
    rng = random.Random(f"{seed}:dominance")
    agree = 0
    for _ in range(trials):
        F, known = random_mapping_mix(rng)
        sym = is_dominant(F)
        num = numeric_dominance(F, rng)
        if fault:
            num = not num
        agree += (sym == num) and (known is None or known == sym)
    return agree == trials, f"{agree}/{trials} symbolic == numeric"


def check_convergence(pairs: int, seed: int) -> tuple[bool, str]:
    rng = random.Random(f"{seed}:convergence")
    ks = (10**3, 10**4, 10**5, 10**6)
    slopes = [convergence_slope(ks, convergence_pair(rng, ks)[3]) for _ in range(pairs)]
    worst = max(slopes)
    return worst <= -0.9, f"worst log-log slope {worst:.3f} over {pairs} pairs"


def check_golden(names: list[str] | None, seed: int, fault: bool = False) -> tuple[bool, str]:
    bad = []
    cases = [c for c in GOLDEN if names is None or c.name in names]
    for case in cases:
        rep = classify_mapping(case.mapping(), ClassifierConfig(seed=seed))
        facons = tuple(str(f) for f in rep.realized_facons)
        comps = tuple(c.equation_str() for c in rep.components)
        expected = case.components if not fault else case.components + ("alpha1 + 1 = 0",)
        if facons != case.facons:
            bad.append(f"{case.name}: facons {facons}")
        if comps != expected:
            bad.append(f"{case.name}: components {comps}")
        if rep.matched_type != case.matched_type or rep.dominant != case.dominant:
            bad.append(f"{case.name}: type {rep.matched_type}, dominant {rep.dominant}")
        bad += [f"{case.name}: {v}" for v in structural_checks(rep)]
    return not bad, "; ".join(bad) if bad else f"{len(cases)} mappings as expected"


def check_oracle(seed: int) -> tuple[bool, str]:
    from .oracle import ProbeConfig, crosscheck, report_components, sample_asymptotic

    worst = 0.0
    for case in GOLDEN:
        if case.name not in ("triple-product", "paraboloid", "two-planes"):
            continue
        F = case.mapping()
        cloud = sample_asymptotic(F, ProbeConfig(seed=seed))
        cc = crosscheck(report_components(classify_mapping(F, ClassifierConfig(seed=seed))), cloud)
        if not cc.passed:
            return False, f"{case.name}: {'; '.join(cc.flags)}"
        worst = max(worst, cc.max_residual)
    return True, f"max residual {worst:.1e}"


def run_check(quick: bool = False, seed: int = 20240607, fault: str | None = None) -> list[CheckResult]:
    """Run the suite; ``fault`` deliberately corrupts one check (to test the reporting)."""
    if fault is not None and fault not in FAULTS:
        raise ValueError(f"unknown fault {fault!r}; choose from {', '.join(FAULTS)}")
    out = [
        _timed("facon counts n=1..6", lambda: check_facon_counts(fault == "facon-count")),
        _timed("substitution homomorphism", lambda: check_homomorphism(15 if quick else 200, seed,
                                                                       fault == "homomorphism")),
        _timed("parse/render round trip", lambda: check_round_trip(20 if quick else 100, seed)),
        _timed("dominance symbolic vs numeric", lambda: check_dominance(20 if quick else 100, seed,
                                                                        fault == "dominance")),
        _timed("golden mappings", lambda: check_golden(["triple-product", "paraboloid", "identity"] if quick else None,
                                                       seed, fault == "golden")),
    ]
    if not quick:
        out.append(_timed("limit convergence", lambda: check_convergence(50, seed)))
        out.append(_timed("numeric oracle agreement", lambda: check_oracle(seed)))
    return out
