"""Exact sparse polynomials over the Gaussian rationals Q(i).

A polynomial is a mapping from exponent tuples to :class:`GaussianRational`
coefficients.  Zero coefficients are never stored, so two polynomials are equal
exactly when their term dictionaries are equal.  Terms are printed in graded
lexicographic order with ``x1 > x2 > ... > xn``.

    x1^2 - 1/2*i*x2*x3   ->   {(2, 0, 0): 1, (0, 1, 1): -1/2*i}
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import gmpy2
from gmpy2 import mpq

Exponent = tuple[int, ...]


def _q(value) -> mpq:
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    return mpq(value)


def _is_scalar(value) -> bool:
    return isinstance(value, (int, Fraction)) or type(value) is type(_ZERO_Q)


def _qstr(q: mpq) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


class GaussianRational:
    """A complex number ``re + im*i`` with exact rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is type(_ZERO_Q) else _q(re)
        self.im = im if type(im) is type(_ZERO_Q) else _q(im)

    @classmethod
    def coerce(cls, value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, complex):
            raise TypeError("floating complex values are not exact")
        if isinstance(value, float):
            raise TypeError("floating values are not exact")
        return cls(value, 0)

    def is_zero(self) -> bool:
        return not self.re and not self.im

    def is_real(self) -> bool:
        return not self.im

    def __add__(self, other):
        if not isinstance(other, GaussianRational):
            if not _is_scalar(other):
                return NotImplemented
            other = GaussianRational.coerce(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, GaussianRational):
            if not _is_scalar(other):
                return NotImplemented
            other = GaussianRational.coerce(other)
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        if not _is_scalar(other):
            return NotImplemented
        return GaussianRational.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, GaussianRational):
            if not _is_scalar(other):
                return NotImplemented
            other = GaussianRational.coerce(other)
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b and not d:
            return GaussianRational(a * c, _ZERO_Q)
        return GaussianRational(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def norm(self) -> mpq:
        return self.re * self.re + self.im * self.im

    def inverse(self) -> "GaussianRational":
        n = self.norm()
        if not n:
            raise ZeroDivisionError("inverse of zero")
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        if not isinstance(other, GaussianRational):
            if not _is_scalar(other):
                return NotImplemented
            other = GaussianRational.coerce(other)
        if not other.im:
            if not other.re:
                raise ZeroDivisionError("division by zero")
            return GaussianRational(self.re / other.re, self.im / other.re)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) / self

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = ONE
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)) or type(other) is type(_ZERO_Q):
            return not self.im and self.re == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return not self.is_zero()

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def sqrt(self) -> "GaussianRational | None":
        """Exact square root in Q(i), or ``None`` when it does not exist."""
        if self.is_zero():
            return ZERO
        a, b = self.re, self.im
        r = _qsqrt(a * a + b * b)
        if r is None:
            return None
        x = _qsqrt((a + r) / 2)
        if x is not None and x:
            y = b / (2 * x)
            return GaussianRational(x, y)
        y = _qsqrt((r - a) / 2)
        if y is not None and y:
            x = b / (2 * y)
            return GaussianRational(x, y)
        return None

    def to_str(self) -> str:
        """Render as ``a/b``, ``c/d*i`` or ``(a/b+c/d*i)``."""
        if not self.im:
            return _qstr(self.re)
        if not self.re:
            if self.im == 1:
                return "i"
            if self.im == -1:
                return "-i"
            return f"{_qstr(self.im)}*i"
        im = "i" if abs(self.im) == 1 else f"{_qstr(abs(self.im))}*i"
        sign = "+" if self.im > 0 else "-"
        return f"({_qstr(self.re)}{sign}{im})"

    def __repr__(self):
        return f"GaussianRational({self.to_str()})"

    __str__ = to_str


def _qsqrt(q: mpq) -> mpq | None:
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, exact_n = gmpy2.iroot(n, 2)
    rd, exact_d = gmpy2.iroot(d, 2)
    if exact_n and exact_d:
        return mpq(rn, rd)
    return None


_ZERO_Q = mpq(0)
ZERO = GaussianRational(0, 0)
ONE = GaussianRational(1, 0)
I = GaussianRational(0, 1)


def gr(value, im=0) -> GaussianRational:
    """Shorthand constructor accepting ints, Fractions, mpq or strings like '1/2'."""
    if isinstance(value, GaussianRational) and not im:
        return value
    if isinstance(value, str):
        value = Fraction(value)
    if isinstance(im, str):
        im = Fraction(im)
    return GaussianRational(value, im)


def random_gaussian_rational(rng: random.Random, bound: int = 10**6, real: bool = False) -> GaussianRational:
    """Random Gaussian rational with numerators and denominators bounded by ``bound``."""
    re = mpq(rng.randint(-bound, bound), rng.randint(1, bound))
    if real:
        return GaussianRational(re, 0)
    im = mpq(rng.randint(-bound, bound), rng.randint(1, bound))
    return GaussianRational(re, im)


class StructureError(ValueError):
    """Operands have incompatible shapes (variable counts, dimensions)."""


def grlex_key(exp: Exponent):
    return (sum(exp), exp)


class Polynomial:
    """Immutable sparse polynomial in ``num_vars`` variables over Q(i)."""

    __slots__ = ("num_vars", "terms", "_hash")

    def __init__(self, num_vars: int, terms: Mapping[Exponent, GaussianRational] | None = None, *, _trusted=False):
        self.num_vars = num_vars
        if _trusted:
            self.terms = terms
        else:
            clean = {}
            for exp, c in (terms or {}).items():
                exp = tuple(int(e) for e in exp)
                if len(exp) != num_vars:
                    raise StructureError(f"exponent {exp} does not have {num_vars} entries")
                if any(e < 0 for e in exp):
                    raise StructureError(f"negative exponent in {exp}")
                c = GaussianRational.coerce(c)
                if c:
                    clean[exp] = clean.get(exp, ZERO) + c
            self.terms = {e: c for e, c in clean.items() if c}
        self._hash = None

    # constructors
    @classmethod
    def zero(cls, num_vars: int) -> "Polynomial":
        return cls(num_vars, {}, _trusted=True)

    @classmethod
    def constant(cls, num_vars: int, value) -> "Polynomial":
        c = GaussianRational.coerce(value)
        if not c:
            return cls.zero(num_vars)
        return cls(num_vars, {(0,) * num_vars: c}, _trusted=True)

    @classmethod
    def var(cls, num_vars: int, index: int) -> "Polynomial":
        """The variable ``x_{index+1}`` (0-based index)."""
        if not 0 <= index < num_vars:
            raise StructureError(f"variable index {index} out of range for {num_vars} variables")
        exp = [0] * num_vars
        exp[index] = 1
        return cls(num_vars, {tuple(exp): ONE}, _trusted=True)

    @classmethod
    def monomial(cls, exp: Sequence[int], coeff=1) -> "Polynomial":
        return cls(len(exp), {tuple(exp): coeff})

    # basic queries
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_term(self) -> GaussianRational:
        return self.terms.get((0,) * self.num_vars, ZERO)

    def degree(self) -> float:
        """Total degree; ``-inf`` for the zero polynomial."""
        if not self.terms:
            return float("-inf")
        return max(sum(e) for e in self.terms)

    def degree_in(self, index: int) -> float:
        if not self.terms:
            return float("-inf")
        return max(e[index] for e in self.terms)

    def variables(self) -> set[int]:
        used = set()
        for exp in self.terms:
            for i, e in enumerate(exp):
                if e:
                    used.add(i)
        return used

    def sorted_terms(self) -> list[tuple[Exponent, GaussianRational]]:
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def leading_term(self) -> tuple[Exponent, GaussianRational]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        exp = max(self.terms, key=grlex_key)
        return exp, self.terms[exp]

    def homogeneous_part(self, deg: int) -> "Polynomial":
        return Polynomial(self.num_vars, {e: c for e, c in self.terms.items() if sum(e) == deg}, _trusted=True)

    # arithmetic
    def _check(self, other: "Polynomial"):
        if self.num_vars != other.num_vars:
            raise StructureError(f"variable-count mismatch: {self.num_vars} vs {other.num_vars}")

    def _lift(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        return Polynomial.constant(self.num_vars, other)

    def __add__(self, other):
        other = self._lift(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            cur = out.get(e)
            if cur is None:
                out[e] = c
            else:
                s = cur + c
                if s:
                    out[e] = s
                else:
                    del out[e]
        return Polynomial(self.num_vars, out, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.num_vars, {e: -c for e, c in self.terms.items()}, _trusted=True)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def scale(self, c) -> "Polynomial":
        c = GaussianRational.coerce(c)
        if not c:
            return Polynomial.zero(self.num_vars)
        if c == ONE:
            return self
        return Polynomial(self.num_vars, {e: v * c for e, v in self.terms.items()}, _trusted=True)

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return self.scale(other)
        self._check(other)
        if not self.terms or not other.terms:
            return Polynomial.zero(self.num_vars)
        out: dict = {}
        get = out.get
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                cur = get(e)
                p = c1 * c2
                out[e] = p if cur is None else cur + p
        return Polynomial(self.num_vars, {e: c for e, c in out.items() if c}, _trusted=True)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        out = Polynomial.constant(self.num_vars, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def diff(self, index: int) -> "Polynomial":
        """Formal partial derivative with respect to variable ``index`` (0-based)."""
        out = {}
        for e, c in self.terms.items():
            k = e[index]
            if k:
                ne = e[:index] + (k - 1,) + e[index + 1:]
                out[ne] = c * k
        return Polynomial(self.num_vars, out, _trusted=True)

    def divmod(self, divisor: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        """Multivariate division by a single divisor in graded-lex order."""
        self._check(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        lt_e, lt_c = divisor.leading_term()
        inv = lt_c.inverse()
        quot: dict = {}
        rem: dict = {}
        p = dict(self.terms)
        while p:
            e = max(p, key=grlex_key)
            c = p[e]
            if all(a >= b for a, b in zip(e, lt_e)):
                qe = tuple(a - b for a, b in zip(e, lt_e))
                qc = c * inv
                quot[qe] = quot.get(qe, ZERO) + qc
                for de, dc in divisor.terms.items():
                    te = tuple(a + b for a, b in zip(qe, de))
                    v = p.get(te, ZERO) - qc * dc
                    if v:
                        p[te] = v
                    else:
                        p.pop(te, None)
            else:
                rem[e] = c
                del p[e]
        return (Polynomial(self.num_vars, {e: c for e, c in quot.items() if c}, _trusted=True),
                Polynomial(self.num_vars, rem, _trusted=True))

    def exact_div(self, divisor: "Polynomial") -> "Polynomial | None":
        """Quotient if ``divisor`` divides ``self`` exactly, else ``None``."""
        q, r = self.divmod(divisor)
        return q if r.is_zero() else None

    def monomial_content(self) -> Exponent:
        """Componentwise minimum exponent over all terms."""
        if not self.terms:
            return (0,) * self.num_vars
        it = iter(self.terms)
        m = list(next(it))
        for e in it:
            for i, v in enumerate(e):
                if v < m[i]:
                    m[i] = v
        return tuple(m)

    def sqrt(self) -> "Polynomial | None":
        """Exact square root over Q(i) when ``self`` is a perfect square, else ``None``."""
        if not self.terms:
            return self
        e0, c0 = self.leading_term()
        s0 = c0.sqrt()
        if s0 is None or any(k % 2 for k in e0):
            return None
        lead_e = tuple(k // 2 for k in e0)
        two_lead = s0 * 2
        root = Polynomial(self.num_vars, {lead_e: s0}, _trusted=True)
        for _ in range(4 * len(self.terms) + 4):
            rem = self - root * root
            if rem.is_zero():
                return root
            e, c = rem.leading_term()
            te = tuple(a - b for a, b in zip(e, lead_e))
            if any(k < 0 for k in te) or grlex_key(te) >= grlex_key(lead_e):
                return None
            root = root + Polynomial(self.num_vars, {te: c / two_lead}, _trusted=True)
        return None

    def shift_down(self, exp: Exponent) -> "Polynomial":
        return Polynomial(self.num_vars, {tuple(a - b for a, b in zip(e, exp)): c for e, c in self.terms.items()},
                          _trusted=True)

    def monic(self) -> "Polynomial":
        """Scale so that the graded-lex leading coefficient is 1."""
        if not self.terms:
            return self
        return self.scale(self.leading_term()[1].inverse())

    # evaluation
    def evaluate(self, point: Sequence[complex]) -> complex:
        """Numeric value at a complex point; coefficients converted to floats here."""
        if len(point) != self.num_vars:
            raise StructureError(f"point has {len(point)} entries, polynomial has {self.num_vars} variables")
        total = 0j
        for e, c in self.terms.items():
            term = complex(c)
            for x, k in zip(point, e):
                if k:
                    term *= x ** k
            total += term
        return total

    def evaluate_exact(self, point: Sequence) -> GaussianRational:
        if len(point) != self.num_vars:
            raise StructureError(f"point has {len(point)} entries, polynomial has {self.num_vars} variables")
        point = [GaussianRational.coerce(x) for x in point]
        powers: dict = {}
        total = ZERO
        for e, c in self.terms.items():
            term = c
            for j, k in enumerate(e):
                if k:
                    key = (j, k)
                    pw = powers.get(key)
                    if pw is None:
                        pw = powers[key] = point[j] ** k
                    term = term * pw
            total = total + term
        return total

    def compose(self, values: Sequence, one=None):
        """Substitute ``values[j]`` for variable j; values support + and *."""
        if len(values) != self.num_vars:
            raise StructureError("composition needs one value per variable")
        powers: dict = {}
        total = None
        for e, c in self.terms.items():
            term = None
            for j, k in enumerate(e):
                if k:
                    pw = powers.get((j, k))
                    if pw is None:
                        pw = powers[(j, k)] = values[j] ** k
                    term = pw if term is None else term * pw
            if term is None:
                term = one * c if one is not None else c
            else:
                term = term * c
            total = term if total is None else total + term
        if total is None:
            return one * ZERO if one is not None else ZERO
        return total

    def extend(self, num_vars: int, offset: int = 0) -> "Polynomial":
        """Embed into a ring with more variables, placing ours at ``offset``."""
        pad_l = (0,) * offset
        pad_r = (0,) * (num_vars - offset - self.num_vars)
        return Polynomial(num_vars, {pad_l + e + pad_r: c for e, c in self.terms.items()}, _trusted=True)

    # comparison / rendering
    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.num_vars == other.num_vars and self.terms == other.terms
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self == Polynomial.constant(self.num_vars, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num_vars, frozenset(self.terms.items())))
        return self._hash

    def to_str(self, names: Sequence[str] | None = None) -> str:
        if names is None:
            names = [f"x{j + 1}" for j in range(self.num_vars)]
        if not self.terms:
            return "0"
        parts = []
        for idx, (e, c) in enumerate(self.sorted_terms()):
            mono = "*".join(
                names[j] if k == 1 else f"{names[j]}^{k}" for j, k in enumerate(e) if k
            )
            neg = False
            if c.is_real() and c.re < 0:
                neg, c = True, -c
            elif not c.re and c.im < 0:
                neg, c = True, -c
            if not mono:
                body = c.to_str()
            elif c == ONE:
                body = mono
            else:
                body = f"{c.to_str()}*{mono}"
            if idx == 0:
                parts.append(f"-{body}" if neg else body)
            else:
                parts.append(f" - {body}" if neg else f" + {body}")
        return "".join(parts)

    __str__ = to_str

    def __repr__(self):
        return f"Polynomial({self.to_str()!r})"


def poly_add(a: Polynomial, b: Polynomial) -> Polynomial:
    a._check(b)
    return a + b


def poly_mul(a: Polynomial, b: Polynomial) -> Polynomial:
    a._check(b)
    return a * b


def evaluate(p: Polynomial, point: Sequence[complex]) -> complex:
    return p.evaluate(point)


def variables(n: int) -> list[Polynomial]:
    """The coordinate polynomials x1..xn."""
    return [Polynomial.var(n, j) for j in range(n)]


@dataclass(frozen=True)
class PolynomialMapping:
    """F = (F_1, ..., F_n) with every component in n variables."""

    components: tuple[Polynomial, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        n = len(comps)
        for c in comps:
            if c.num_vars != n:
                raise StructureError(f"component has {c.num_vars} variables, mapping has {n} components")

    @property
    def n(self) -> int:
        return len(self.components)

    def degree(self) -> float:
        return max((c.degree() for c in self.components), default=float("-inf"))

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __len__(self):
        return len(self.components)

    def evaluate(self, point: Sequence[complex]) -> list[complex]:
        return [c.evaluate(point) for c in self.components]

    def to_str(self) -> str:
        return "(" + ", ".join(c.to_str() for c in self.components) + ")"

    __str__ = to_str


def mapping(*components: Polynomial) -> PolynomialMapping:
    return PolynomialMapping(tuple(components))


def jacobian(F: PolynomialMapping) -> list[list[Polynomial]]:
    """Entry (i, j) is dF_i/dx_j."""
    return [[c.diff(j) for j in range(c.num_vars)] for c in F.components]


def determinant(matrix: list[list[Polynomial]]) -> Polynomial:
    """Exact determinant by cofactor expansion (fine for the small sizes used here)."""
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise StructureError("determinant of a non-square matrix")
    if n == 0:
        raise StructureError("empty matrix")
    if n == 1:
        return matrix[0][0]
    if n == 2:
        return matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0]
    total = Polynomial.zero(matrix[0][0].num_vars)
    for j in range(n):
        if matrix[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in matrix[1:]]
        term = matrix[0][j] * determinant(minor)
        total = total - term if j % 2 else total + term
    return total


def is_dominant(F: PolynomialMapping) -> bool:
    """True iff the Jacobian determinant is not the zero polynomial."""
    if F.n != (F.components[0].num_vars if F.components else 0):
        raise StructureError("dominance test needs a square mapping")
    return not determinant(jacobian(F)).is_zero()


def numeric_jacobian(F: PolynomialMapping, point: Sequence[complex]):
    import numpy as np

    return np.array([[d.evaluate(point) for d in row] for row in jacobian(F)], dtype=complex)


def random_polynomial(rng: random.Random, num_vars: int, max_degree: int, *, density: float = 0.6,
                      coeff_bound: int = 5, gaussian: bool = True) -> Polynomial:
    """Random polynomial used by property tests and fault injection."""
    from itertools import product

    terms = {}
    for exp in product(range(max_degree + 1), repeat=num_vars):
        if sum(exp) > max_degree or rng.random() > density:
            continue
        re = Fraction(rng.randint(-coeff_bound, coeff_bound), rng.randint(1, 3))
        im = Fraction(rng.randint(-coeff_bound, coeff_bound), rng.randint(1, 3)) if gaussian and rng.random() < 0.3 else 0
        terms[exp] = GaussianRational(re, im)
    return Polynomial(num_vars, terms)


def monomials_upto(num_vars: int, degree: int) -> list[Exponent]:
    """All exponents of total degree <= degree, in increasing graded-lex order."""
    from itertools import product

    exps = [e for e in product(range(degree + 1), repeat=num_vars) if sum(e) <= degree]
    return sorted(exps, key=grlex_key)
