import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from asympt.poly import (I, GaussianRational, Polynomial, PolynomialMapping, StructureError, evaluate, gr,
                         is_dominant, jacobian, numeric_jacobian, poly_add, poly_mul, random_gaussian_rational,
                         variables)

from conftest import gaussian_rationals, mappings, polynomials

x1, x2, x3 = variables(3)


# --- Gaussian rationals -----------------------------------------------------


def test_gaussian_rational_is_reduced():
    z = GaussianRational(Fraction(6, -4), Fraction(10, 20))
    assert (z.re.numerator, z.re.denominator) == (-3, 2)
    assert (z.im.numerator, z.im.denominator) == (1, 2)


def test_gaussian_rational_rejects_floats():
    with pytest.raises(TypeError):
        GaussianRational.coerce(0.5)
    with pytest.raises(TypeError):
        GaussianRational.coerce(1j)


def test_imaginary_unit_squares_to_minus_one():
    assert I * I == gr(-1)


@given(gaussian_rationals(), gaussian_rationals())
def test_field_operations_exact(a, b):
    assert (a + b) - b == a
    if b:
        assert (a / b) * b == a
        assert b * b.inverse() == gr(1)


def test_exact_square_roots():
    assert gr(-4).sqrt() == gr(0, 2) or gr(-4).sqrt() == gr(0, -2)
    assert gr(0, 2).sqrt() ** 2 == gr(0, 2)
    assert gr(2).sqrt() is None


# --- polynomial arithmetic --------------------------------------------------


def test_additive_inverse_is_zero():
    assert (x1 + (-x1)).is_zero()


def test_like_terms_merge():
    assert x1 * x2 + x1 * x2 == (x1 * x2).scale(2)


def test_sum_telescopes():
    rng = random.Random(1)
    p = poly_add(x1 - x2, x2 - x3)
    assert p == x1 - x3
    for _ in range(20):
        pt = [random_gaussian_rational(rng, 50) for _ in range(3)]
        assert p.evaluate_exact(pt) == (x1 - x3).evaluate_exact(pt)


def test_products():
    assert poly_mul(x1 - x2, x1) == x1 ** 2 - x1 * x2
    assert poly_mul(x1 + x2, Polynomial.zero(3)).is_zero()
    assert poly_mul(x1 + I * x2, x1 - I * x2) == x1 ** 2 + x2 ** 2


def test_variable_count_mismatch():
    y = Polynomial.var(2, 0)
    with pytest.raises(StructureError):
        poly_add(x1, y)
    with pytest.raises(StructureError):
        poly_mul(x1, y)


def test_zero_polynomial_degree_is_minus_infinity():
    assert Polynomial.zero(3).degree() == float("-inf")
    assert Polynomial.constant(3, 5).degree() == 0


def test_no_zero_coefficients_stored():
    p = Polynomial(3, {(1, 0, 0): gr(0), (0, 1, 0): gr(2)})
    assert list(p.terms) == [(0, 1, 0)]


def test_canonical_rendering():
    p = x1 ** 2 - (x2 * x3).scale(gr(0, Fraction(1, 2)))
    assert p.to_str() == "x1^2 - 1/2*i*x2*x3"
    assert (x3 + x1 * x2 + x1 ** 2 + x2).to_str() == "x1^2 + x1*x2 + x2 + x3"


@settings(max_examples=200)
@given(polynomials(), polynomials(), polynomials())
def test_ring_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)


# --- evaluation -------------------------------------------------------------


def test_evaluate_examples():
    assert evaluate(x1 * x2 * x3, [2, 3, 4]) == 24
    assert evaluate(Polynomial.zero(3), [1, 2, 3]) == 0
    assert abs(evaluate(x1 ** 2 - x2, [1 + 1j, 2j, 0])) < 1e-15


@settings(max_examples=200)
@given(polynomials(), polynomials(),
       st.lists(st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False), min_size=3, max_size=3))
def test_evaluate_is_multiplicative(a, b, pt):
    lhs = (a * b).evaluate(pt)
    rhs = a.evaluate(pt) * b.evaluate(pt)
    scale = max(1.0, abs(lhs), abs(rhs))
    # absolute slack for cancellation between terms of size up to ~10*2^3 each
    assert abs(lhs - rhs) <= 1e-9 * scale + 1e-9


# --- Jacobian and dominance -------------------------------------------------


def test_jacobian_of_identity():
    J = jacobian(PolynomialMapping((x1, x2, x3)))
    assert [[e.constant_term() for e in row] for row in J] == [[gr(int(i == j)) for j in range(3)] for i in range(3)]
    assert all(e.is_constant() for row in J for e in row)


def test_jacobian_of_triple_product():
    J = jacobian(PolynomialMapping((x1, x2, x1 * x2 * x3)))
    assert J[2] == [x2 * x3, x1 * x3, x1 * x2]
    assert J[0][0] == Polynomial.constant(3, 1) and J[0][1].is_zero()


def test_jacobian_diagonal():
    J = jacobian(PolynomialMapping((x1 ** 2, x2, x3)))
    assert J[0][0] == x1.scale(2) and J[1][1] == Polynomial.constant(3, 1)
    assert J[0][1].is_zero() and J[1][0].is_zero()


def test_dominance_examples():
    assert is_dominant(PolynomialMapping((x1, x2, x1 * x2 * x3)))
    assert not is_dominant(PolynomialMapping((x1, x2, x1 * x2)))
    F = PolynomialMapping((x1, x2 * x3, x2 + x1 ** 2))
    assert is_dominant(F)
    rng = np.random.default_rng(0)
    for _ in range(10):
        pt = rng.normal(size=3) + 1j * rng.normal(size=3)
        assert np.linalg.matrix_rank(numeric_jacobian(F, pt)) == 3


def _numeric_ranks(F, seed, tries=10):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(tries):
        pt = rng.normal(size=3) + 1j * rng.normal(size=3)
        s = np.linalg.svd(numeric_jacobian(F, pt), compute_uv=False)
        out.append(int((s > 1e-8 * max(s[0], 1e-300)).sum()) if s[0] > 0 else 0)
    return out


@settings(max_examples=100, deadline=None)
@given(mappings(max_degree=2), st.integers(0, 2**32 - 1))
def test_dominance_matches_numeric_rank(F, seed):
    ranks = _numeric_ranks(F, seed)
    if is_dominant(F):
        assert sum(r == 3 for r in ranks) >= 9
    else:
        assert all(r < 3 for r in ranks)


def test_dominant_components_are_independent():
    """No component of a dominant map is a quadratic polynomial in the other two."""
    rng = np.random.default_rng(3)
    F = PolynomialMapping((x1, x2 * x3, x2 + x1 ** 2))
    pts = rng.normal(size=(60, 3)) + 1j * rng.normal(size=(60, 3))
    vals = np.array([F.evaluate(p) for p in pts])
    for k in range(3):
        u, v = [vals[:, j] for j in range(3) if j != k]
        cols = [np.ones(len(u)), u, v, u * u, u * v, v * v]
        A = np.stack(cols, axis=1)
        coef, *_ = np.linalg.lstsq(A, vals[:, k], rcond=None)
        resid = np.linalg.norm(A @ coef - vals[:, k]) / np.linalg.norm(vals[:, k])
        assert resid > 1e-6
