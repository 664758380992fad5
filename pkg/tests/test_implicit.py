import random

import pytest

from asympt.implicit import classify_surface, implicitize_exact, target_monomials, vanishes_on
from asympt.laurent import ParamField
from asympt.poly import Polynomial, variables

from conftest import params

a1, a2, a3 = variables(3)


def test_plane_through_coordinate():
    _, s, t = params(3)
    assert implicitize_exact([ParamField.zero(3), s, t], random.Random(0)) == [a1]


def test_paraboloid():
    mu, lam = params(2)
    eqs = implicitize_exact([mu, lam, mu * mu], random.Random(0))
    assert eqs == [a1 ** 2 - a3]
    assert vanishes_on(eqs, [mu, lam, mu * mu])


def test_coordinate_equality():
    lam, mu = params(2)
    assert implicitize_exact([lam, lam, mu], random.Random(0)) == [a1 - a2]


def test_curve_gives_several_equations():
    (t,) = params(1)
    eqs = implicitize_exact([t, t * t, ParamField.zero(1)], random.Random(0))
    assert a3 in eqs
    assert len(eqs) >= 2
    assert vanishes_on(eqs, [t, t * t, ParamField.zero(1)])


def test_point():
    c = ParamField.constant(2, 3)
    z = ParamField.zero(2)
    assert implicitize_exact([c, z, z]) == [a1 - 3, a2, a3]


def test_rational_parametrisation():
    s, t = params(2)
    par = [s / t, t, s]
    eqs = implicitize_exact(par, random.Random(1))
    assert eqs == [a1 * a2 - a3]


def test_full_dimensional_has_no_relation():
    s, t, u = params(3)
    assert implicitize_exact([s, t, u], random.Random(0)) == []


def test_vanishing_check_detects_wrong_equation():
    s, t = params(2)
    assert not vanishes_on([a1 - a2], [s, t, s])
    assert vanishes_on([a1 - a3], [s, t, s])


@pytest.mark.parametrize("eq, kind", [
    (a1, "plane"),
    (a1 + a2 - 3, "plane"),
    (a1 ** 2 - a3, "paraboloid"),
    ((a1 + a2) ** 2 + a3 - a1, "paraboloid"),
    (a1 ** 2 + a2 ** 2 + a3 ** 2 - 1, "other"),
    (a1 * a2 - a3, "other"),
    (a1 ** 2 - a1, "other"),
    (a1 * a2 * a3 - 1, "other"),
])
def test_surface_shapes(eq, kind):
    assert classify_surface(eq).kind == kind


def test_target_monomials():
    monos = target_monomials(3, 2)
    assert len(monos) == 10
    assert monos[0] == (2, 0, 0) and monos[-1] == (0, 0, 0)
    assert Polynomial.monomial(monos[0]).degree() == 2
