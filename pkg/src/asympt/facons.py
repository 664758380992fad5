"""Facons: which coordinates of a sequence blow up (I) and which settle to fixed values (J)."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb, perm

from .poly import StructureError


@dataclass(frozen=True, order=True)
class Facon:
    """``(I)[J]``: coordinates in ``inf_set`` diverge, those in ``fixed_set`` tend to constants.

    Indices are 1-based and stored sorted.  Coordinates in neither set are free.
    """

    inf_set: tuple[int, ...]
    fixed_set: tuple[int, ...]
    n: int

    def __post_init__(self):
        inf = tuple(sorted(set(self.inf_set)))
        fixed = tuple(sorted(set(self.fixed_set)))
        object.__setattr__(self, "inf_set", inf)
        object.__setattr__(self, "fixed_set", fixed)
        if not inf:
            raise StructureError("a facon needs at least one divergent coordinate")
        if set(inf) & set(fixed):
            raise StructureError(f"divergent and fixed sets overlap in {self}")
        if not all(1 <= k <= self.n for k in inf + fixed):
            raise StructureError(f"indices of {self} outside 1..{self.n}")

    @property
    def free_set(self) -> tuple[int, ...]:
        used = set(self.inf_set) | set(self.fixed_set)
        return tuple(k for k in range(1, self.n + 1) if k not in used)

    @property
    def case(self) -> str:
        """Which part of the count it belongs to: ``"full"``, ``"bare"`` or ``"partial"``."""
        if len(self.inf_set) + len(self.fixed_set) == self.n:
            return "full"
        if not self.fixed_set:
            return "bare"
        return "partial"

    def sort_key(self):
        return (len(self.inf_set) + len(self.fixed_set), self.inf_set, self.fixed_set)

    def __str__(self):
        body = "(" + ",".join(map(str, self.inf_set)) + ")"
        if self.fixed_set:
            body += "[" + ",".join(map(str, self.fixed_set)) + "]"
        return body

    def to_dict(self) -> dict:
        return {"inf": list(self.inf_set), "fixed": list(self.fixed_set)}

    @classmethod
    def parse(cls, text: str, n: int) -> "Facon":
        """Inverse of ``str``: ``"(1,2)[3]"`` or ``"(1)"``."""
        text = text.strip()
        if not text.startswith("(") or ")" not in text:
            raise StructureError(f"cannot read facon {text!r}")
        head, _, tail = text[1:].partition(")")
        inf = tuple(int(t) for t in head.split(",") if t.strip())
        fixed: tuple[int, ...] = ()
        tail = tail.strip()
        if tail:
            if not (tail.startswith("[") and tail.endswith("]")):
                raise StructureError(f"cannot read facon {text!r}")
            fixed = tuple(int(t) for t in tail[1:-1].split(",") if t.strip())
        return cls(inf, fixed, n)


def _check_dim(n: int):
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"dimension must be a positive integer, got {n!r}")


def enumerate_facons(n: int) -> list[Facon]:
    """Every admissible facon in dimension ``n``, ordered by ``|I u J|`` then lexicographically."""
    _check_dim(n)
    idx = range(1, n + 1)
    out = []
    for p in range(1, n + 1):
        for inf in combinations(idx, p):
            rest = [k for k in idx if k not in inf]
            # full: J is the whole complement
            out.append(Facon(inf, tuple(rest), n))
            if not rest:
                continue
            # bare: nothing fixed, some coordinate free
            out.append(Facon(inf, (), n))
            # partial: J nonempty, proper subset of the complement
            for q in range(1, len(rest)):
                for fixed in combinations(rest, q):
                    out.append(Facon(inf, fixed, n))
    return sorted(set(out), key=Facon.sort_key)


def facon_count_formula(n: int) -> int:
    """Closed-form count sum C(n,t) [t>=1] + sum C(n,t) [t<n] + sum n!/(n-t)! [2<=t<n]."""
    _check_dim(n)
    full = sum(comb(n, t) for t in range(1, n + 1))
    bare = sum(comb(n, t) for t in range(1, n))
    partial = sum(perm(n, t) for t in range(2, n))
    return full + bare + partial


def facon_count_by_cases(n: int) -> int:
    """Independent count of :func:`enumerate_facons` by splitting on ``|I u J|``.

    A partial facon is a set S of size s (2 <= s < n) split into nonempty I, J.
    """
    _check_dim(n)
    full = 2 ** n - 1
    bare = 2 ** n - 2
    partial = sum(comb(n, s) * (2 ** s - 2) for s in range(2, n))
    return full + bare + partial


@dataclass
class FaconGroup:
    label: str
    members: list[Facon]


GROUP_LABELS = ("I", "II", "III", "IV", "V", "VI")


def group_of(f: Facon) -> str:
    """Label of the n=3 group containing ``f``."""
    if f.n != 3:
        raise StructureError("groups are defined only for n = 3")
    p, q = len(f.inf_set), len(f.fixed_set)
    return {(3, 0): "I", (2, 0): "II", (1, 0): "III", (2, 1): "IV", (1, 1): "V", (1, 2): "VI"}[(p, q)]


def group_facons_n3(facons: list[Facon] | None = None) -> list[FaconGroup]:
    """Split the 19 facons of dimension 3 into groups I..VI (sizes 1, 3, 3, 3, 6, 3)."""
    full = enumerate_facons(3)
    if facons is None:
        facons = full
    if sorted(facons, key=Facon.sort_key) != full:
        raise StructureError("expected exactly the 19 facons of dimension 3")
    groups = {label: [] for label in GROUP_LABELS}
    for f in facons:
        groups[group_of(f)].append(f)
    return [FaconGroup(label, groups[label]) for label in GROUP_LABELS]
