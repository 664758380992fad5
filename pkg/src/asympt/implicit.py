"""Exact implicit equations (degree <= 2) of a parametrised set in C^3."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .laurent import ParamField, random_point
from .linalg import nullspace, rref
from .poly import ZERO, GaussianRational, Polynomial, grlex_key, monomials_upto


class GenericityError(RuntimeError):
    pass


def target_monomials(n: int = 3, degree: int = 2) -> list[tuple[int, ...]]:
    """Monomials of degree <= ``degree`` in graded-lex descending order."""
    return sorted(monomials_upto(n, degree), key=grlex_key, reverse=True)


def _sample_values(params: Sequence[ParamField], count: int, rng: random.Random, bound: int):
    m = params[0].m
    rows = []
    guard = 0
    while len(rows) < count:
        guard += 1
        if guard > 20 * count:
            raise GenericityError("could not find points where the parametrisation is defined")
        point = random_point(rng, m, bound)
        try:
            rows.append([p.evaluate_exact(point) for p in params])
        except ZeroDivisionError:
            continue
    return rows


def _monomial_row(values: Sequence[GaussianRational], monos) -> list[GaussianRational]:
    out = []
    for e in monos:
        v = GaussianRational(1)
        for x, k in zip(values, e):
            if k:
                v = v * x ** k
        out.append(v)
    return out


def _reduce_mod(vec, basis_rows, pivots):
    vec = list(vec)
    for row, p in zip(basis_rows, pivots):
        if vec[p]:
            f = vec[p]
            vec = [a - f * b for a, b in zip(vec, row)]
    return vec


def _relations(samples, n: int, max_degree: int) -> list[Polynomial]:
    monos2 = target_monomials(n, max_degree)
    lin = [e for e in monos2 if sum(e) <= 1]
    # degree-1 relations
    m1 = [_monomial_row(s, lin) for s in samples]
    lin_basis = nullspace(m1, len(lin))
    lin_rows, _ = rref(lin_basis) if lin_basis else ([], [])
    eqs = [Polynomial(n, dict(zip(lin, row))) for row in lin_rows]
    if max_degree < 2:
        return eqs
    # degree-2 relations modulo those generated by the linear ones
    multiples = []
    for L in eqs:
        multiples.append(L)
        for j in range(n):
            multiples.append(L * Polynomial.var(n, j))
    span = [[p.terms.get(e, ZERO) for e in monos2] for p in multiples]
    span_rows, span_piv = rref(span) if span else ([], [])
    m2 = [_monomial_row(s, monos2) for s in samples]
    quad = nullspace(m2, len(monos2))
    reduced = [_reduce_mod(v, span_rows, span_piv) for v in quad]
    reduced = [v for v in reduced if any(v)]
    if reduced:
        rows, _ = rref(reduced)
        eqs += [Polynomial(n, dict(zip(monos2, row))) for row in rows]
    return eqs


def implicitize_exact(parametrization: Sequence[ParamField], rng: random.Random | None = None,
                      points: int = 16, max_degree: int = 2, bound: int = 10**3,
                      attempts: int = 3) -> list[Polynomial]:
    """Basis of the polynomial relations of degree <= ``max_degree`` among the coordinates.

    Linear relations come first (reduced echelon form), then quadratic ones not
    generated by them; each has graded-lex leading coefficient 1.  Two
    independent samples must agree, otherwise the draw is repeated.
    """
    params = list(parametrization)
    n = len(params)
    if all(p.is_constant() for p in params):
        # a point: the coordinate functions minus their values
        return [Polynomial.var(n, j) - p.constant_value() for j, p in enumerate(params)]
    rng = rng or random.Random(0)
    for _ in range(attempts):
        first = _relations(_sample_values(params, points, rng, bound), n, max_degree)
        second = _relations(_sample_values(params, points, rng, bound), n, max_degree)
        if first == second and vanishes_on(first, params):
            return first
    raise GenericityError("implicit equations disagree between independent samples")


def vanishes_on(equations: Sequence[Polynomial], parametrization: Sequence[ParamField]) -> bool:
    """Exact check that every equation is identically zero on the parametrisation."""
    vals = list(parametrization)
    one = ParamField.one(vals[0].m)
    for eq in equations:
        out = eq.compose(vals, one=one)
        if isinstance(out, ParamField):
            if not out.is_zero():
                return False
        elif out:
            return False
    return True


def equation_str(eq: Polynomial, names: Sequence[str] | None = None) -> str:
    names = names or [f"a{j + 1}" for j in range(eq.num_vars)]
    return f"{eq.to_str(names)} = 0"


@dataclass
class QuadricShape:
    kind: str  # "plane" | "paraboloid" | "other"
    detail: str = ""


def classify_surface(eq: Polynomial) -> QuadricShape:
    """Plane, paraboloid (rank-1 quadratic part plus an independent linear part) or other."""
    deg = eq.degree()
    if deg == 1:
        return QuadricShape("plane")
    if deg != 2:
        return QuadricShape("other", f"degree {deg}")
    n = eq.num_vars
    q = [[ZERO] * n for _ in range(n)]
    lin = [ZERO] * n
    for e, c in eq.terms.items():
        if sum(e) == 2:
            idx = [j for j in range(n) for _ in range(e[j])]
            a, b = idx
            if a == b:
                q[a][a] = c
            else:
                half = c / 2
                q[a][b] = half
                q[b][a] = half
        elif sum(e) == 1:
            lin[e.index(1)] = c
    qrows, _ = rref(q)
    if len(qrows) != 1:
        return QuadricShape("other", f"quadratic part of rank {len(qrows)}")
    square_dir = qrows[0]
    both, _ = rref([square_dir, lin])
    if len(both) < 2:
        return QuadricShape("other", "linear part inside the span of the square")
    return QuadricShape("paraboloid")
