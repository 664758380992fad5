"""Parametrised sequences and their limits as k -> infinity.

A sequence is a Laurent polynomial in ``k`` per coordinate whose coefficients
are rational functions of a few parameters.  Substituting it into a polynomial
gives another Laurent polynomial; the limit is read off its non-negative part.
"""

from __future__ import annotations

import math
import random
import statistics
from dataclasses import dataclass, field
from typing import Sequence

from .facons import Facon
from .linalg import rank as exact_rank
from .poly import ONE, ZERO, GaussianRational, Polynomial, StructureError, random_gaussian_rational


def _factor_key(f: Polynomial):
    return (f.degree(), sorted(((e, (int(c.re.numerator), int(c.re.denominator), int(c.im.numerator),
                                      int(c.im.denominator))) for e, c in f.terms.items()), reverse=True))


def split_factors(p: Polynomial) -> tuple[GaussianRational, list[tuple[Polynomial, int]]]:
    """Write nonzero ``p`` as scalar * prod(factor^exp) with monic, non-constant factors.

    Only the monomial content is split off; the rest stays one factor.
    """
    m = p.num_vars
    content = p.monomial_content()
    rest = p.shift_down(content) if any(content) else p
    scalar = rest.leading_term()[1]
    out = [(Polynomial.var(m, j), k) for j, k in enumerate(content) if k]
    if not rest.is_constant():
        out.append((rest.scale(scalar.inverse()), 1))
    return scalar, out


class ParamField:
    """Rational function ``num / prod(f^e)`` in ``m`` parameters over Q(i).

    Denominator factors are monic and kept factored; common factors with the
    numerator are cancelled by trial division after every operation.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: dict | None = None, *, _reduced=False):
        self.num = num
        den = {f: e for f, e in (den or {}).items() if e}
        if not _reduced:
            num, den = _reduce(num, den)
            self.num = num
        self.den = den

    @property
    def m(self) -> int:
        return self.num.num_vars

    # constructors
    @classmethod
    def constant(cls, m: int, value) -> "ParamField":
        return cls(Polynomial.constant(m, value), _reduced=True)

    @classmethod
    def param(cls, m: int, index: int) -> "ParamField":
        return cls(Polynomial.var(m, index), _reduced=True)

    @classmethod
    def from_poly(cls, p: Polynomial) -> "ParamField":
        return cls(p, _reduced=True)

    @classmethod
    def zero(cls, m: int) -> "ParamField":
        return cls(Polynomial.zero(m), _reduced=True)

    @classmethod
    def one(cls, m: int) -> "ParamField":
        return cls.constant(m, 1)

    def _coerce(self, other) -> "ParamField":
        if isinstance(other, ParamField):
            if other.m != self.m:
                raise StructureError(f"parameter-count mismatch: {self.m} vs {other.m}")
            return other
        if isinstance(other, Polynomial):
            return ParamField.from_poly(other)
        return ParamField.constant(self.m, other)

    # queries
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def is_polynomial(self) -> bool:
        return not self.den

    def is_constant(self) -> bool:
        return not self.den and self.num.is_constant()

    def constant_value(self) -> GaussianRational:
        if not self.is_constant():
            raise ValueError("not a constant")
        return self.num.constant_term()

    def variables(self) -> set[int]:
        out = set(self.num.variables())
        for f in self.den:
            out |= f.variables()
        return out

    def denominator(self) -> Polynomial:
        d = Polynomial.constant(self.m, 1)
        for f, e in self.den.items():
            d = d * f ** e
        return d

    def den_factors(self) -> list[Polynomial]:
        return list(self.den)

    # arithmetic
    def __add__(self, other):
        other = self._coerce(other)
        if other.num.is_zero():
            return self
        if self.num.is_zero():
            return other
        if self.den == other.den:
            return ParamField(self.num + other.num, dict(self.den))
        den = dict(self.den)
        for f, e in other.den.items():
            den[f] = max(den.get(f, 0), e)
        a = self.num
        for f, e in den.items():
            k = e - self.den.get(f, 0)
            if k:
                a = a * f ** k
        b = other.num
        for f, e in den.items():
            k = e - other.den.get(f, 0)
            if k:
                b = b * f ** k
        return ParamField(a + b, den)

    __radd__ = __add__

    def __neg__(self):
        return ParamField(-self.num, dict(self.den), _reduced=True)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, (ParamField, Polynomial)):
            c = GaussianRational.coerce(other)
            if not c:
                return ParamField.zero(self.m)
            return ParamField(self.num.scale(c), dict(self.den), _reduced=True)
        other = self._coerce(other)
        if self.num.is_zero() or other.num.is_zero():
            return ParamField.zero(self.m)
        den = dict(self.den)
        for f, e in other.den.items():
            den[f] = den.get(f, 0) + e
        if not self.den and not other.den:
            return ParamField(self.num * other.num, _reduced=True)
        return ParamField(self.num * other.num, den)

    __rmul__ = __mul__

    def inverse(self) -> "ParamField":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of the zero rational function")
        scalar, factors = split_factors(self.num)
        num = self.denominator().scale(scalar.inverse())
        return ParamField(num, {f: e for f, e in factors})

    def __truediv__(self, other):
        if not isinstance(other, (ParamField, Polynomial)):
            return self * GaussianRational.coerce(other).inverse()
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = ParamField.one(self.m)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, (ParamField, Polynomial, int, GaussianRational)):
            return NotImplemented
        other = self._coerce(other)
        if self.den == other.den:
            return self.num == other.num
        return self.num * other.denominator() == other.num * self.denominator()

    __hash__ = None

    # substitution and evaluation
    def substitute(self, values: Sequence["ParamField"]) -> "ParamField":
        """Replace parameter j by ``values[j]`` (all in one common parameter ring)."""
        if not values:
            raise StructureError("substitution needs at least one value")
        one = ParamField.one(values[0].m)
        out = self.num.compose(values, one=one)
        if not isinstance(out, ParamField):
            out = ParamField.constant(values[0].m, out)
        for f, e in self.den.items():
            fv = f.compose(values, one=one)
            out = out / (fv ** e)
        return out

    def evaluate_exact(self, point: Sequence) -> GaussianRational:
        d = ONE
        for f, e in self.den.items():
            d = d * f.evaluate_exact(point) ** e
        if not d:
            raise ZeroDivisionError("denominator vanishes at this point")
        return self.num.evaluate_exact(point) / d

    def evaluate(self, point: Sequence[complex]) -> complex:
        d = 1 + 0j
        for f, e in self.den.items():
            d *= f.evaluate(point) ** e
        return self.num.evaluate(point) / d

    def gradient_at(self, point: Sequence) -> list[GaussianRational]:
        """Exact partial derivatives at ``point`` via the quotient rule."""
        den = self.denominator()
        d = den.evaluate_exact(point)
        if not d:
            raise ZeroDivisionError("denominator vanishes at this point")
        n = self.num.evaluate_exact(point)
        out = []
        for j in range(self.m):
            dn = self.num.diff(j).evaluate_exact(point) if self.num.degree_in(j) > 0 else ZERO
            dd = den.diff(j).evaluate_exact(point) if den.degree_in(j) > 0 else ZERO
            out.append((dn * d - n * dd) / (d * d))
        return out

    def to_str(self, names: Sequence[str] | None = None) -> str:
        num = self.num.to_str(names)
        if not self.den:
            return num
        parts = []
        for f in sorted(self.den, key=_factor_key):
            e = self.den[f]
            s = f.to_str(names)
            if len(f.terms) > 1:
                s = f"({s})"
            parts.append(s if e == 1 else f"{s}^{e}")
        if len(self.num.terms) > 1:
            num = f"({num})"
        return f"{num}/{'*'.join(parts) if len(parts) == 1 else '(' + '*'.join(parts) + ')'}"

    def __repr__(self):
        return f"ParamField({self.to_str()})"


def _reduce(num: Polynomial, den: dict) -> tuple[Polynomial, dict]:
    if num.is_zero():
        return num, {}
    if not den:
        return num, den
    den = dict(den)
    content = list(num.monomial_content())
    for f in list(den):
        e = den[f]
        if len(f.terms) == 1:
            # a single variable
            j = next(iter(f.variables()))
            k = min(e, content[j])
            if k:
                shift = [0] * num.num_vars
                shift[j] = k
                num = num.shift_down(tuple(shift))
                content[j] -= k
                e -= k
        else:
            while e and num.degree() >= f.degree():
                q = num.exact_div(f)
                if q is None:
                    break
                num = q
                e -= 1
        if e:
            den[f] = e
        else:
            del den[f]
    return num, den


class ParamLaurent:
    """Finite Laurent polynomial in ``k``: exponent -> ParamField coefficient."""

    __slots__ = ("m", "terms")

    def __init__(self, m: int, terms: dict[int, ParamField] | None = None):
        self.m = m
        self.terms = {e: c for e, c in (terms or {}).items() if not c.is_zero()}

    @classmethod
    def constant(cls, m: int, value) -> "ParamLaurent":
        c = value if isinstance(value, ParamField) else ParamField.constant(m, value)
        return cls(m, {0: c})

    @classmethod
    def one(cls, m: int) -> "ParamLaurent":
        return cls.constant(m, 1)

    def coefficient(self, e: int) -> ParamField:
        return self.terms.get(e, ParamField.zero(self.m))

    def max_exponent(self) -> float:
        return max(self.terms) if self.terms else float("-inf")

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        if not isinstance(other, ParamLaurent):
            other = ParamLaurent.constant(self.m, other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return ParamLaurent(self.m, out)

    __radd__ = __add__

    def __neg__(self):
        return ParamLaurent(self.m, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, ParamLaurent):
            other = ParamLaurent.constant(self.m, other)
        return self + (-other)

    def mul(self, other, floor: int | None = None) -> "ParamLaurent":
        if not isinstance(other, ParamLaurent):
            c = other
            return ParamLaurent(self.m, {e: v * c for e, v in self.terms.items()})
        out: dict[int, ParamField] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                if floor is not None and e < floor:
                    continue
                p = c1 * c2
                out[e] = out[e] + p if e in out else p
        return ParamLaurent(self.m, out)

    def __mul__(self, other):
        return self.mul(other)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = ParamLaurent.one(self.m)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, ParamLaurent):
            return NotImplemented
        keys = set(self.terms) | set(other.terms)
        return all(self.coefficient(e) == other.coefficient(e) for e in keys)

    __hash__ = None

    def substitute(self, values: Sequence[ParamField]) -> "ParamLaurent":
        return ParamLaurent(values[0].m, {e: c.substitute(values) for e, c in self.terms.items()})

    def evaluate(self, k: complex, params: Sequence[complex]) -> complex:
        return sum(c.evaluate(params) * k ** e for e, c in self.terms.items())

    def to_str(self, names: Sequence[str] | None = None) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e].to_str(names)
            if e == 0:
                parts.append(c)
            else:
                kp = "k" if abs(e) == 1 else f"k^{abs(e)}"
                parts.append(f"({c})*{kp}" if e > 0 else f"({c})/{kp}")
        return " + ".join(parts)

    def __repr__(self):
        return f"ParamLaurent({self.to_str()})"


def param_name(coord: int, exponent: int) -> str:
    return f"a{coord}_{exponent}" if exponent >= 0 else f"a{coord}_m{-exponent}"


@dataclass
class SequenceAnsatz:
    """One Laurent series in ``k`` per source coordinate.

    ``leading``/``fixed_const``/``free_const`` record, for ansatze built from a
    facon, which parameter is the leading coefficient of each divergent
    coordinate and which is the k^0 coefficient of each bounded coordinate.
    """

    coords: tuple[ParamLaurent, ...]
    names: tuple[str, ...]
    facon: Facon | None = None
    weights: tuple[int, ...] = ()
    leading: dict[int, int] = field(default_factory=dict)
    fixed_const: dict[int, int] = field(default_factory=dict)
    free_const: dict[int, int] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def m(self) -> int:
        return len(self.names)

    def params(self) -> list[ParamField]:
        return [ParamField.param(self.m, j) for j in range(self.m)]

    def specialize(self, values: Sequence[ParamField]) -> "SequenceAnsatz":
        """Apply a parameter substitution to every coefficient."""
        return SequenceAnsatz(tuple(c.substitute(values) for c in self.coords), self.names, self.facon,
                              self.weights, dict(self.leading), dict(self.fixed_const), dict(self.free_const))

    def evaluate(self, k: complex, params: Sequence[complex]) -> list[complex]:
        return [c.evaluate(k, params) for c in self.coords]

    def to_str(self) -> str:
        return ", ".join(f"x{i + 1} = {c.to_str(self.names)}" for i, c in enumerate(self.coords))

    @classmethod
    def from_series(cls, names: Sequence[str], coords: Sequence[dict]) -> "SequenceAnsatz":
        """Build from ``{exponent: coefficient}`` dicts; coefficients may be
        ParamField, Polynomial (in the parameters) or scalars."""
        m = len(names)
        out = []
        for series in coords:
            terms = {}
            for e, c in series.items():
                if isinstance(c, ParamField):
                    terms[e] = c
                elif isinstance(c, Polynomial):
                    terms[e] = ParamField.from_poly(c)
                else:
                    terms[e] = ParamField.constant(m, c)
            out.append(ParamLaurent(m, terms))
        return cls(tuple(out), tuple(names))


def facon_ansatz(facon: Facon, weights: Sequence[int], depth: int | None = None) -> SequenceAnsatz:
    """Most general series for ``facon`` with leading exponents ``weights`` (one per divergent coordinate).

    Every coordinate gets unknown coefficients from its top exponent down to
    ``-depth`` (default: the largest weight, enough for degree-2 products).
    Bounded coordinates start at k^0; that coefficient is resolved later.
    """
    if len(weights) != len(facon.inf_set):
        raise StructureError("one weight per divergent coordinate is required")
    if depth is None:
        depth = max(weights)
    top = {i: w for i, w in zip(facon.inf_set, weights)}
    names = []
    slots = []  # (coord, exponent)
    for i in range(1, facon.n + 1):
        for e in range(top.get(i, 0), -depth - 1, -1):
            names.append(param_name(i, e))
            slots.append((i, e))
    m = len(names)
    coords = {i: {} for i in range(1, facon.n + 1)}
    for j, (i, e) in enumerate(slots):
        coords[i][e] = ParamField.param(m, j)
    index = {s: j for j, s in enumerate(slots)}
    return SequenceAnsatz(
        coords=tuple(ParamLaurent(m, coords[i]) for i in range(1, facon.n + 1)),
        names=tuple(names),
        facon=facon,
        weights=tuple(weights),
        leading={i: index[(i, w)] for i, w in top.items()},
        fixed_const={j: index[(j, 0)] for j in facon.fixed_set},
        free_const={f: index[(f, 0)] for f in facon.free_set},
    )


def substitute(p: Polynomial, s: SequenceAnsatz, floor: int | None = None) -> ParamLaurent:
    """Expand ``p(x1(k), ..., xn(k))``; terms below ``k^floor`` are dropped when given."""
    if p.num_vars != s.n:
        raise StructureError(f"polynomial has {p.num_vars} variables, sequence has {s.n} coordinates")
    m = s.m
    total = ParamLaurent(m)
    for exp, c in p.terms.items():
        term = ParamLaurent.constant(m, ParamField.constant(m, c))
        for j, k in enumerate(exp):
            for _ in range(k):
                term = term.mul(s.coords[j], floor=None)
        if floor is not None:
            term = ParamLaurent(m, {e: v for e, v in term.terms.items() if e >= floor})
        total = total + term
    return total


@dataclass(frozen=True)
class LimitValue:
    """Either divergence to infinity or a finite rational-function value."""

    diverges: bool
    value: ParamField | None = None

    @classmethod
    def finite(cls, value: ParamField) -> "LimitValue":
        return cls(False, value)

    @property
    def kind(self) -> str:
        if self.diverges:
            return "infinite"
        return "fixed" if self.value.is_constant() else "varying"

    def to_str(self, names=None) -> str:
        return "inf" if self.diverges else self.value.to_str(names)


def limit(L: ParamLaurent) -> LimitValue:
    if any(e > 0 for e in L.terms):
        return LimitValue(True)
    return LimitValue.finite(L.coefficient(0))


def limit_map(F, s: SequenceAnsatz) -> list[LimitValue]:
    return [limit(substitute(comp, s, floor=0)) for comp in F.components]


def random_point(rng: random.Random, m: int, bound: int = 10**6) -> list[GaussianRational]:
    return [random_gaussian_rational(rng, bound) for _ in range(m)]


def jacobian_rank_at(values: Sequence[ParamField], point) -> int:
    rows = [v.gradient_at(point) for v in values if not v.is_constant()]
    return exact_rank(rows) if rows else 0


def varying_rank(limits: Sequence, rng: random.Random | None = None, attempts: int = 3) -> int:
    """Generic rank of the parameter Jacobian of the finite limits.

    Evaluated exactly at random Gaussian-rational points; the maximum over
    ``attempts`` draws is returned.
    """
    values = []
    for lv in limits:
        if isinstance(lv, LimitValue):
            if lv.diverges:
                raise ValueError("varying_rank needs finite limits only")
            values.append(lv.value)
        else:
            values.append(lv)
    values = [v for v in values if not v.is_constant()]
    if not values:
        return 0
    rng = rng or random.Random(0)
    m = values[0].m
    best = 0
    tries = 0
    done = 0
    while done < attempts and tries < 10 * attempts:
        tries += 1
        point = random_point(rng, m)
        try:
            r = jacobian_rank_at(values, point)
        except ZeroDivisionError:
            continue
        done += 1
        best = max(best, r)
        if best == min(len(values), m):
            break
    return best


def sequence_point(s: SequenceAnsatz, k: int, point: Sequence[GaussianRational]) -> list[GaussianRational]:
    """Exact coordinates of the sequence at step ``k`` for parameter values ``point``."""
    kk = GaussianRational(k)
    out = []
    for c in s.coords:
        total = GaussianRational(0)
        for e, coef in c.terms.items():
            total = total + coef.evaluate_exact(point) * kk ** e
        out.append(total)
    return out


def convergence_errors(p: Polynomial, s: SequenceAnsatz, point: Sequence[GaussianRational],
                       ks: Sequence[int] = (10**3, 10**4, 10**5, 10**6)) -> list[float]:
    """``|p(x(k)) - limit|`` computed exactly, then rounded, for each k.

    Raises ValueError when the symbolic limit is infinite.
    """
    lv = limit(substitute(p, s, floor=0))
    if lv.diverges:
        raise ValueError("the polynomial diverges along this sequence")
    target = lv.value.evaluate_exact(point)
    return [abs(complex(p.evaluate_exact(sequence_point(s, k, point)) - target)) for k in ks]


def convergence_slope(ks: Sequence[float], errors: Sequence[float]) -> float:
    """Least-squares slope of log(error) against log(k)."""
    xs = [math.log10(k) for k in ks]
    ys = [math.log10(e) for e in errors]
    return statistics.linear_regression(xs, ys).slope
