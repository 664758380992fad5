"""Mapping description files.

    # comment
    dim 3
    F1 = x1
    F2 = x2
    F3 = x1*x2*x3

Expressions use ``+ - * ^``, parentheses, integer exponents, rational literals
``a/b`` and the imaginary unit ``i``.  ``^`` binds tighter than unary minus,
which binds tighter than ``*``, which binds tighter than ``+``/``-``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from dataclasses import dataclass, field

from .poly import GaussianRational, I, Polynomial, PolynomialMapping


@dataclass
class ParseError(ValueError):
    """Structured diagnostic: ``kind`` plus 1-based line/column when known."""

    kind: str
    message: str
    line: int | None = None
    column: int | None = None

    def __post_init__(self):
        super().__init__(str(self))

    def __str__(self):
        where = ""
        if self.line is not None:
            where = f"line {self.line}"
            if self.column is not None:
                where += f", column {self.column}"
            where += ": "
        return f"{where}{self.kind}: {self.message}"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "message": self.message, "line": self.line, "column": self.column}


@dataclass
class MappingSource:
    raw_text: str
    declared_dim: int
    assignments: list[tuple[int, str, int, int]] = field(default_factory=list)  # (index, expr, line, column)


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<var>x\d+)|(?P<imag>i)(?![A-Za-z0-9_])|(?P<op>[-+*^/()])|(?P<bad>\S))")


class _ExprParser:
    def __init__(self, text: str, n: int, line: int, col0: int, max_degree: int | None):
        self.text = text
        self.n = n
        self.line = line
        self.col0 = col0
        self.max_degree = max_degree
        self.tokens = self._tokenize()
        self.pos = 0

    def _tokenize(self):
        toks = []
        i = 0
        while i < len(self.text):
            m = _TOKEN.match(self.text, i)
            if m is None or m.end() == i:
                break
            kind = m.lastgroup
            value = m.group(kind)
            col = self.col0 + m.start(kind)
            if kind == "bad":
                raise ParseError("syntax", f"unexpected character {value!r}", self.line, col)
            toks.append((kind, value, col))
            i = m.end()
        toks.append(("end", "", self.col0 + len(self.text.rstrip())))
        return toks

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        return ParseError("syntax", msg, self.line, tok[2])

    def parse(self) -> Polynomial:
        if self.peek()[0] == "end":
            raise self.error("empty expression")
        p = self.expr()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected token {self.peek()[1]!r}")
        return p

    def expr(self) -> Polynomial:
        p = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> Polynomial:
        p = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] == "*":
            self.take()
            p = p * self.unary()
        return p

    def unary(self) -> Polynomial:
        tok = self.peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.take()
            p = self.unary()
            return -p if tok[1] == "-" else p
        return self.power()

    def power(self) -> Polynomial:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            tok = self.take()
            if tok[0] != "num":
                raise self.error("exponent must be a non-negative integer", tok)
            k = int(tok[1])
            if self.max_degree is not None and k > self.max_degree:
                raise ParseError("degree", f"exponent {k} exceeds the maximum degree {self.max_degree}", self.line, tok[2])
            base = base ** k
        return base

    def atom(self) -> Polynomial:
        tok = self.take()
        kind, value, col = tok
        if kind == "num":
            num = int(value)
            if self.peek()[0] == "op" and self.peek()[1] == "/":
                self.take()
                den_tok = self.take()
                if den_tok[0] != "num":
                    raise self.error("rational literal needs an integer denominator", den_tok)
                den = int(den_tok[1])
                if den == 0:
                    raise ParseError("syntax", "zero denominator", self.line, den_tok[2])
                return Polynomial.constant(self.n, GaussianRational(Fraction(num, den)))
            return Polynomial.constant(self.n, num)
        if kind == "imag":
            return Polynomial.constant(self.n, I)
        if kind == "var":
            idx = int(value[1:])
            if not 1 <= idx <= self.n:
                raise ParseError("unknown-variable", f"{value} is not one of x1..x{self.n}", self.line, col)
            return Polynomial.var(self.n, idx - 1)
        if kind == "op" and value == "(":
            p = self.expr()
            close = self.take()
            if close[0] != "op" or close[1] != ")":
                raise self.error("expected ')'", close)
            return p
        if kind == "end":
            raise self.error("unexpected end of expression", tok)
        raise self.error(f"unexpected token {value!r}", tok)


def _strip_comment(line: str) -> str:
    pos = line.find("#")
    return line if pos < 0 else line[:pos]


_DIM = re.compile(r"^\s*dim\s+(\d+)\s*$")
_ASSIGN = re.compile(r"^\s*F(\d+)\s*=(.*)$")


def read_source(text: str) -> MappingSource:
    """Split a mapping file into its header and assignments (no expression parsing)."""
    lines = text.replace("\r\n", "\n").split("\n")
    dim = None
    src = MappingSource(raw_text=text, declared_dim=0)
    for lineno, raw in enumerate(lines, start=1):
        body = _strip_comment(raw)
        if not body.strip():
            continue
        if dim is None:
            m = _DIM.match(body)
            if not m:
                col = len(body) - len(body.lstrip()) + 1
                raise ParseError("header", "first non-comment line must be 'dim <n>'", lineno, col)
            dim = int(m.group(1))
            if dim < 1:
                raise ParseError("header", "dimension must be at least 1", lineno, m.start(1) + 1)
            src.declared_dim = dim
            continue
        m = _ASSIGN.match(body)
        if not m:
            if _DIM.match(body):
                raise ParseError("header", "duplicate 'dim' line", lineno, 1)
            col = len(body) - len(body.lstrip()) + 1
            raise ParseError("syntax", "expected 'F<j> = <expression>'", lineno, col)
        src.assignments.append((int(m.group(1)), m.group(2), lineno, m.start(2) + 1))
    if dim is None:
        raise ParseError("header", "missing 'dim <n>' line")
    return src


def parse_mapping(text: str, max_degree: int | None = None) -> PolynomialMapping:
    """Parse a mapping file into an exact :class:`PolynomialMapping`."""
    src = read_source(text)
    n = src.declared_dim
    comps: dict[int, Polynomial] = {}
    for idx, expr, lineno, col in src.assignments:
        if not 1 <= idx <= n:
            raise ParseError("index", f"component F{idx} out of range 1..{n}", lineno, 1)
        if idx in comps:
            raise ParseError("duplicate", f"component F{idx} assigned twice", lineno, 1)
        poly = _ExprParser(expr, n, lineno, col, max_degree).parse()
        if max_degree is not None and poly.degree() > max_degree:
            raise ParseError("degree", f"F{idx} has degree {poly.degree()} > {max_degree}", lineno, col)
        comps[idx] = poly
    missing = [j for j in range(1, n + 1) if j not in comps]
    if missing:
        names = ", ".join(f"F{j}" for j in missing)
        raise ParseError("dimension", f"dim {n} declared but {names} missing")
    return PolynomialMapping(tuple(comps[j] for j in range(1, n + 1)))


def parse_polynomial(expr: str, n: int) -> Polynomial:
    return _ExprParser(expr, n, 1, 1, None).parse()


def render_mapping(F: PolynomialMapping) -> str:
    """Canonical text; ``parse_mapping(render_mapping(F)) == F``."""
    lines = [f"dim {F.n}"]
    for j, comp in enumerate(F.components, start=1):
        lines.append(f"F{j} = {comp.to_str()}")
    return "\n".join(lines)


__all__ = ["ParseError", "MappingSource", "parse_mapping", "parse_polynomial", "render_mapping", "read_source"]
