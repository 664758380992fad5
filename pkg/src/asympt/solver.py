"""Case-splitting solver for the polynomial conditions that keep a sequence's image bounded.

Unknowns are eliminated one at a time by rational substitution.  Whenever a
pivot coefficient could vanish the search splits into "pivot nonzero" and
"pivot zero" branches, so the returned branches cover every solution
reachable by rational substitutions (plus square roots that exist in Q(i)).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .laurent import ParamField, split_factors
from .poly import Polynomial


@dataclass
class SolverConfig:
    max_branches: int = 96
    max_steps: int = 60


@dataclass
class Branch:
    """A partial solution: ``values[j]`` is what parameter j has been replaced by."""

    values: list[ParamField]
    pending: list[Polynomial] = field(default_factory=list)
    nonzero: list[Polynomial] = field(default_factory=list)
    solved: set[int] = field(default_factory=set)
    steps: int = 0

    @property
    def m(self) -> int:
        return len(self.values)

    def free_params(self) -> list[int]:
        return [j for j in range(self.m) if j not in self.solved]

    def copy(self) -> "Branch":
        return Branch(list(self.values), list(self.pending), list(self.nonzero), set(self.solved), self.steps)


@dataclass
class SolveResult:
    branches: list[Branch]
    unresolved: int = 0
    truncated: bool = False


def initial_branch(m: int, equations: list[Polynomial], nonzero: list[Polynomial]) -> Branch:
    b = Branch([ParamField.param(m, j) for j in range(m)])
    b.pending = [e for e in equations if not e.is_zero()]
    for g in nonzero:
        _add_nonzero(b, g)
    return b


def _add_nonzero(b: Branch, g: Polynomial) -> bool:
    """Record ``g != 0``; False if g is identically zero."""
    if g.is_zero():
        return False
    if g.is_constant():
        return True
    _, factors = split_factors(g)
    for f, _ in factors:
        if f not in b.nonzero:
            b.nonzero.append(f)
    return True


def _strip(eq: Polynomial, nonzero: list[Polynomial]) -> Polynomial:
    """Remove factors known to be nonzero (they cannot make ``eq`` vanish)."""
    if eq.is_zero() or eq.is_constant():
        return eq
    changed = True
    while changed:
        changed = False
        for g in nonzero:
            if len(g.terms) == 1:
                j = next(iter(g.variables()))
                content = eq.monomial_content()
                if content[j]:
                    shift = [0] * eq.num_vars
                    shift[j] = content[j]
                    eq = eq.shift_down(tuple(shift))
                    changed = True
            elif eq.degree() >= g.degree():
                q = eq.exact_div(g)
                if q is not None:
                    eq = q
                    changed = True
    return eq.monic()


def _apply(b: Branch, var: int, value: ParamField) -> bool:
    """Substitute ``var := value`` everywhere; False if a nonzero constraint dies."""
    m = b.m
    sub = [ParamField.param(m, j) for j in range(m)]
    sub[var] = value
    b.values = [v if var not in v.variables() else v.substitute(sub) for v in b.values]
    b.solved.add(var)
    pending = []
    for eq in b.pending:
        if var in eq.variables():
            eq = ParamField.from_poly(eq).substitute(sub).num
        pending.append(eq)
    b.pending = pending
    old = b.nonzero
    b.nonzero = []
    for g in old:
        if var in g.variables():
            g = ParamField.from_poly(g).substitute(sub).num
            if not _add_nonzero(b, g):
                return False
        elif g not in b.nonzero:
            b.nonzero.append(g)
    for den_factor in value.den:
        _add_nonzero(b, den_factor)
    b.steps += 1
    return True


def _coeffs_in(eq: Polynomial, var: int) -> dict[int, Polynomial]:
    """Coefficients of ``eq`` viewed as a polynomial in ``var``."""
    out: dict[int, dict] = {}
    for e, c in eq.terms.items():
        k = e[var]
        rest = e[:var] + (0,) + e[var + 1:]
        out.setdefault(k, {})[rest] = c
    return {k: Polynomial(eq.num_vars, t) for k, t in out.items()}


def _normalize(b: Branch) -> bool:
    """Strip, deduplicate and sort pending equations; False if one is a nonzero constant."""
    seen = []
    for eq in b.pending:
        eq = _strip(eq, b.nonzero)
        if eq.is_zero():
            continue
        if eq.is_constant():
            return False
        if eq not in seen:
            seen.append(eq)
    seen.sort(key=lambda p: (len(p.terms), p.degree(), p.to_str()))
    b.pending = seen
    return True


def _split(b: Branch) -> list[Branch] | None:
    """Children of ``b`` after one elimination step, or None if nothing can be done."""
    m = b.m
    # 1. a variable appearing linearly with a constant coefficient
    best = None
    for idx, eq in enumerate(b.pending):
        for v in sorted(eq.variables()):
            cs = _coeffs_in(eq, v)
            if max(cs) == 1:
                c = cs[1]
                key = (0 if c.is_constant() else 1, len(c.terms), len(eq.terms), idx, v)
                if best is None or key < best[0]:
                    best = (key, idx, v, cs)
    if best is not None and best[0][0] == 0:
        _, idx, v, cs = best
        return [_solve_linear(b, idx, v, cs)]
    # 2. a monomial factor: one of its variables vanishes, or the cofactor does
    for idx, eq in enumerate(b.pending):
        content = eq.monomial_content()
        if any(content):
            kids = []
            vars_ = [j for j, k in enumerate(content) if k]
            for pos, j in enumerate(vars_):
                kid = b.copy()
                for prev in vars_[:pos]:
                    _add_nonzero(kid, Polynomial.var(m, prev))
                kid.pending = [p for i, p in enumerate(b.pending) if i != idx]
                if _apply(kid, j, ParamField.zero(m)):
                    kids.append(kid)
            rest = eq.shift_down(content)
            if not rest.is_constant():
                kid = b.copy()
                for j in vars_:
                    _add_nonzero(kid, Polynomial.var(m, j))
                kid.pending[idx] = rest
                kids.append(kid)
            return kids
    # 3. linear with a non-constant coefficient: pivot != 0 or pivot == 0
    if best is not None:
        _, idx, v, cs = best
        c = cs[1]
        r = cs.get(0, Polynomial.zero(m))
        nz = b.copy()
        _add_nonzero(nz, c)
        kids = [_solve_linear(nz, idx, v, cs)]
        zero = b.copy()
        zero.pending = [p for i, p in enumerate(b.pending) if i != idx] + [c, r]
        kids.append(zero)
        return kids
    # 4. quadratic: exact square root of the discriminant
    for idx, eq in enumerate(b.pending):
        for v in sorted(eq.variables()):
            cs = _coeffs_in(eq, v)
            if max(cs) != 2:
                continue
            a = cs[2]
            bb = cs.get(1, Polynomial.zero(m))
            cc = cs.get(0, Polynomial.zero(m))
            disc = bb * bb - a * cc * 4
            s = disc.sqrt()
            if s is None:
                continue
            kids = []
            base = b.copy()
            if not a.is_constant():
                _add_nonzero(base, a)
            base.pending = [p for i, p in enumerate(b.pending) if i != idx]
            roots = [s] if s.is_zero() else [s, -s]
            for sq in roots:
                kid = base.copy()
                val = ParamField.from_poly(-bb + sq) / ParamField.from_poly(a * 2)
                if _apply(kid, v, val):
                    kids.append(kid)
            if not a.is_constant():
                zero = b.copy()
                zero.pending = [p for i, p in enumerate(b.pending) if i != idx] + [a, bb * Polynomial.var(m, v) + cc]
                kids.append(zero)
            return kids
    return None


def _solve_linear(b: Branch, idx: int, v: int, cs: dict) -> Branch | None:
    m = b.m
    c = cs[1]
    r = cs.get(0, Polynomial.zero(m))
    kid = b.copy()
    kid.pending = [p for i, p in enumerate(b.pending) if i != idx]
    val = -ParamField.from_poly(r) / ParamField.from_poly(c)
    return kid if _apply(kid, v, val) else None


def solve(start: Branch, cfg: SolverConfig | None = None) -> SolveResult:
    """Depth-first elimination; returns every completed branch."""
    cfg = cfg or SolverConfig()
    stack = [start]
    done: list[Branch] = []
    unresolved = 0
    truncated = False
    while stack:
        b = stack.pop()
        if b is None:
            continue
        if not _normalize(b):
            continue
        if not b.pending:
            done.append(b)
            if len(done) >= cfg.max_branches:
                truncated = bool(stack)
                break
            continue
        if b.steps >= cfg.max_steps:
            truncated = True
            continue
        kids = _split(b)
        if kids is None:
            unresolved += 1
            continue
        stack.extend(reversed([k for k in kids if k is not None]))
    return SolveResult(done, unresolved, truncated)
