"""Reference mappings with hand-derived asymptotic sets."""

from __future__ import annotations

from dataclasses import dataclass, field

from .parser import parse_mapping
from .poly import PolynomialMapping


@dataclass(frozen=True)
class GoldenCase:
    name: str
    text: str
    facons: tuple[str, ...]  # realized facons
    components: tuple[str, ...]  # equations as printed by the classifier, sorted
    matched_type: int | None
    dominant: bool = True
    notes: str = ""
    tags: tuple[str, ...] = field(default=())

    def mapping(self) -> PolynomialMapping:
        return parse_mapping(self.text)


GOLDEN = [
    GoldenCase("triple-product", "dim 3\nF1 = x1\nF2 = x2\nF3 = x1*x2*x3",
               ("(3)[1]", "(3)[2]", "(3)[1,2]"), ("alpha1 = 0", "alpha2 = 0"), None,
               notes="degree 3: facon realization only, two planes"),
    GoldenCase("paraboloid", "dim 3\nF1 = x1\nF2 = x2*x3\nF3 = x2 + x1^2",
               ("(3)[2]", "(3)[1,2]"), ("alpha1^2 - alpha3 = 0",), 2),
    GoldenCase("two-planes", "dim 3\nF1 = x1*x2\nF2 = x2*x3\nF3 = x3",
               ("(1)[2]", "(1)[2,3]", "(2)[1,3]"), ("alpha2 = 0", "alpha3 = 0"), 3),
    GoldenCase("plane-and-paraboloid", "dim 3\nF1 = x1\nF2 = x2*x3\nF3 = x1*x2 + x1^2",
               ("(3)[2]", "(2)[1,3]", "(3)[1,2]"), ("alpha1 = 0", "alpha1^2 - alpha3 = 0"), 4),
    GoldenCase("three-planes", "dim 3\nF1 = x1*x2\nF2 = x2*x3\nF3 = x3*x1",
               ("(1)[2,3]", "(2)[1,3]", "(3)[1,2]"), ("alpha1 = 0", "alpha2 = 0", "alpha3 = 0"), 5),
    GoldenCase("two-facon-plane", "dim 3\nF1 = x1 - x2\nF2 = (x1 - x2)*x1\nF3 = (x1 - x3)*x3",
               ("(1,2)[3]", "(1,2,3)"), ("alpha1 = 0",), 1,
               notes="one plane reached through two facons"),
    GoldenCase("identity", "dim 3\nF1 = x1\nF2 = x2\nF3 = x3", (), (), None, notes="proper"),
    GoldenCase("triangular", "dim 3\nF1 = x1 + x2^2\nF2 = x2\nF3 = x3", (), (), None, notes="proper"),
    GoldenCase("not-dominant", "dim 3\nF1 = x1\nF2 = x2\nF3 = x1*x2", ("(3)", "(3)[1]", "(3)[2]", "(3)[1,2]"),
               ("alpha1*alpha2 - alpha3 = 0",), None, dominant=False),
]


def golden(name: str) -> GoldenCase:
    for case in GOLDEN:
        if case.name == name:
            return case
    raise KeyError(name)
