import random

import pytest
from hypothesis import strategies as st

from asympt.laurent import ParamField, SequenceAnsatz
from asympt.parser import parse_mapping
from asympt.poly import GaussianRational, Polynomial, monomials_upto

rationals = st.fractions(min_value=-10, max_value=10, max_denominator=12)


@st.composite
def gaussian_rationals(draw):
    re, im = draw(rationals), draw(rationals)
    return GaussianRational(re, im)


@st.composite
def polynomials(draw, num_vars=3, max_degree=3):
    monos = monomials_upto(num_vars, max_degree)
    chosen = draw(st.lists(st.sampled_from(monos), max_size=6, unique=True))
    return Polynomial(num_vars, {e: draw(gaussian_rationals()) for e in chosen})


@st.composite
def mappings(draw, max_degree=2):
    from asympt.poly import PolynomialMapping

    return PolynomialMapping(tuple(draw(polynomials(3, max_degree)) for _ in range(3)))


def sequence(names, coords):
    """Ansatz from per-coordinate {exponent: ParamField-or-int} dicts."""
    m = len(names)
    conv = [{e: c if isinstance(c, ParamField) else ParamField.constant(m, c) for e, c in d.items()} for d in coords]
    return SequenceAnsatz.from_series(names, conv)


def params(m):
    return [ParamField.param(m, j) for j in range(m)]


@pytest.fixture
def rng():
    return random.Random(20240607)


@pytest.fixture
def mapping_of():
    def make(*exprs):
        body = "\n".join(f"F{j + 1} = {e}" for j, e in enumerate(exprs))
        return parse_mapping(f"dim {len(exprs)}\n{body}")
    return make


# --- acceptance report ------------------------------------------------------

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """``record(label, ok, detail)``: keep a PASS/FAIL line for the summary, then assert."""
    def record(label, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'}  {label:<62} {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, f"{label}: {detail}"
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
