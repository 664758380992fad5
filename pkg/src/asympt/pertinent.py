"""Pertinent variables: short combinations of coordinates that stay bounded along a facon.

Two sources of sequences are supported.  For a concrete mapping F the
branches come from solving "every component of F stays bounded" over the most
general Laurent ansatz of the facon.  Without a mapping (catalogue mode) the
branches are generic shapes where divergent coordinates share leading and
constant terms in every possible pattern.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .facons import Facon
from .implicit import GenericityError, implicitize_exact
from .laurent import (LimitValue, ParamField, SequenceAnsatz, facon_ansatz, limit, substitute,
                      varying_rank)
from .linalg import rank as exact_rank
from .poly import GaussianRational, Polynomial, PolynomialMapping, random_gaussian_rational
from .solver import SolverConfig, initial_branch, solve


class UnsupportedError(NotImplementedError):
    """Raised for dimensions or degrees outside the n = 3, d = 2 candidate list."""


FAMILIES = ("single", "pair", "scaled", "mixed", "product")


@dataclass(frozen=True)
class PertinentCandidate:
    """``family`` with 1-based ``indices``; ``nu`` is None while still unknown.

    single x_i; pair x_i + nu x_j; scaled (x_i + nu x_j) x_l; mixed x_i + nu x_j x_l;
    product x_i x_l (the nu = 0 corner of the scaled family).
    """

    family: str
    indices: tuple[int, ...]
    nu: GaussianRational | None = None

    @property
    def needs_nu(self) -> bool:
        return self.family in ("pair", "scaled", "mixed")

    def parts(self, n: int = 3) -> tuple[Polynomial, Polynomial | None]:
        """``(A, B)`` with candidate = A + nu * B."""
        x = [Polynomial.var(n, j) for j in range(n)]
        idx = [k - 1 for k in self.indices]
        if self.family == "single":
            return x[idx[0]], None
        if self.family == "product":
            return x[idx[0]] * x[idx[1]], None
        if self.family == "pair":
            return x[idx[0]], x[idx[1]]
        if self.family == "scaled":
            i, j, l = idx
            return x[i] * x[l], x[j] * x[l]
        if self.family == "mixed":
            i, j, l = idx
            return x[i], x[j] * x[l]
        raise ValueError(f"unknown family {self.family}")

    def with_nu(self, nu) -> "PertinentCandidate":
        return PertinentCandidate(self.family, self.indices, GaussianRational.coerce(nu))

    def polynomial(self, n: int = 3) -> Polynomial:
        a, b = self.parts(n)
        if b is None:
            return a
        if self.nu is None:
            raise ValueError(f"{self.symbolic_label()} has no value for nu yet")
        return a + b.scale(self.nu)

    def symbolic_label(self) -> str:
        ix = self.indices
        if self.family == "single":
            return f"x{ix[0]}"
        if self.family == "product":
            return f"x{ix[0]}*x{ix[1]}" if ix[0] != ix[1] else f"x{ix[0]}^2"
        if self.family == "pair":
            return f"x{ix[0]} + nu*x{ix[1]}"
        if self.family == "scaled":
            return f"(x{ix[0]} + nu*x{ix[1]})*x{ix[2]}"
        return f"x{ix[0]} + nu*x{ix[1]}*x{ix[2]}"

    def label(self) -> str:
        if not self.needs_nu or self.nu is None:
            return self.symbolic_label()
        ix = self.indices
        lin = (Polynomial.var(3, ix[0] - 1) + Polynomial.var(3, ix[1] - 1).scale(self.nu)).to_str()
        if self.family == "pair":
            return lin
        if self.family == "scaled":
            return f"({lin})*x{ix[2]}"
        return self.polynomial().to_str()

    def to_dict(self) -> dict:
        out = {"family": self.family, "indices": list(self.indices), "label": self.label()}
        if self.needs_nu:
            out["nu"] = None if self.nu is None else self.nu.to_str()
        return out


def candidate_pertinents(n: int = 3, d: int = 2, products: bool = False) -> list[PertinentCandidate]:
    """The closed candidate list: 3 singles, 6 pairs, 18 scaled products, 6 mixed products.

    ``products=True`` appends the six plain products x_i x_l.
    """
    if (n, d) != (3, 2):
        raise UnsupportedError(
            f"candidate pertinent variables are only tabulated for n = 3, d = 2 (got n = {n}, d = {d}); "
            "general families are future work")
    r = range(1, 4)
    out = [PertinentCandidate("single", (i,)) for i in r]
    out += [PertinentCandidate("pair", (i, j)) for i in r for j in r if i != j]
    out += [PertinentCandidate("scaled", (i, j, l)) for i in r for j in r if i != j for l in r]
    out += [PertinentCandidate("mixed", (i, j, l)) for i in r for j in r for l in r if len({i, j, l}) == 3]
    if products:
        out += [PertinentCandidate("product", (i, l)) for i in r for l in r if i <= l]
    return out


# ---------------------------------------------------------------------------
# evaluating candidates along a sequence


@dataclass
class Survivor:
    """A bounded candidate.  When ``nu_part`` is set, nu is still free and the
    limit is ``limit.value + nu * nu_part``."""

    candidate: PertinentCandidate
    limit: LimitValue
    nu_part: ParamField | None = None

    @property
    def key(self):
        return (self.candidate.family, self.candidate.indices)

    @property
    def nu_free(self) -> bool:
        return self.nu_part is not None

    def limit_for(self, nu) -> LimitValue:
        if self.nu_part is None:
            return self.limit
        return LimitValue.finite(self.limit.value + self.nu_part * nu)

    def label(self) -> str:
        return self.candidate.label()

    def to_dict(self, names) -> dict:
        if self.nu_part is None:
            return {"variable": self.label(), "limit": self.limit.to_str(names)}
        lim = f"{self.limit.to_str(names)} + nu*({self.nu_part.to_str(names)})"
        return {"variable": self.label(), "limit": lim, "nu": "any"}


def resolve_candidate(cand: PertinentCandidate, s: SequenceAnsatz) -> Survivor | str:
    """Decide whether ``cand`` stays bounded along ``s``.

    Returns a :class:`Survivor` (nu fixed by cancellation, or left free when
    both parts are bounded on their own) or the reason for rejection.  A
    cancelling nu must be a nonzero constant.
    """
    a_poly, b_poly = cand.parts(s.n)
    A = substitute(a_poly, s, floor=0)
    if b_poly is None:
        lv = limit(A)
        return "diverges" if lv.diverges else Survivor(cand, lv)
    B = substitute(b_poly, s, floor=0)
    pos = sorted({e for e in list(A.terms) + list(B.terms) if e > 0}, reverse=True)
    if not pos:
        return Survivor(cand, LimitValue.finite(A.coefficient(0)), B.coefficient(0))
    nu = None
    for e in pos:
        ae, be = A.coefficient(e), B.coefficient(e)
        if be.is_zero():
            if not ae.is_zero():
                return "diverges for every nu"
            continue
        val = -ae / be
        if nu is None:
            nu = val
        elif not (nu == val):
            return "no nu cancels every divergent order"
    if nu is None or nu.is_zero():
        return "only nu = 0 cancels"
    if not nu.is_constant():
        return "cancelling nu depends on the sequence"
    c = nu.constant_value()
    lim = A.coefficient(0) + B.coefficient(0) * c
    return Survivor(cand.with_nu(c), LimitValue.finite(lim))


@dataclass
class BranchOutcome:
    """One family of sequences for a facon together with what stays bounded along it."""

    facon: Facon
    ansatz: SequenceAnsatz
    label: str = ""
    mapping_limits: list[ParamField] | None = None
    rank: int = 0
    surviving: list[Survivor] = field(default_factory=list)
    discarded: list[tuple[PertinentCandidate, str]] = field(default_factory=list)
    conditions: list[Polynomial] = field(default_factory=list)
    mapping: PolynomialMapping | None = None

    @property
    def names(self):
        return self.ansatz.names

    def survivor(self, key) -> Survivor | None:
        for sv in self.surviving:
            if sv.key == key:
                return sv
        return None

    def fixed_limits(self) -> list[LimitValue]:
        """Limits of the survivors whose value does not involve a free nu."""
        return [sv.limit for sv in self.surviving if not sv.nu_free]

    def to_dict(self) -> dict:
        names = self.names
        out = {
            "facon": str(self.facon),
            "branch": self.label,
            "sequence": self.ansatz.to_str(),
            "rank": self.rank,
            "pertinent": [sv.to_dict(names) for sv in self.surviving],
        }
        if self.mapping_limits is not None:
            out["limits"] = [v.to_str(names) for v in self.mapping_limits]
        if self.conditions:
            out["nonzero"] = [p.to_str(names) for p in self.conditions]
        return out


def evaluate_candidates(outcome: BranchOutcome, candidates: list[PertinentCandidate]) -> BranchOutcome:
    surv, disc = [], []
    seen: list[Polynomial] = []
    for cand in candidates:
        got = resolve_candidate(cand, outcome.ansatz)
        if isinstance(got, str):
            disc.append((cand, got))
            continue
        if not got.nu_free:
            p = got.candidate.polynomial().monic()
            if p in seen:
                disc.append((cand, "same variable as an earlier candidate up to scaling"))
                continue
            seen.append(p)
        surv.append(got)
    outcome.surviving = surv
    outcome.discarded = disc
    return outcome


# ---------------------------------------------------------------------------
# concrete mapping: solve for the sequences that keep F bounded


@dataclass
class EngineConfig:
    weights: tuple[int, ...] = (1, 2)
    seed: int = 20240607
    solver: SolverConfig = field(default_factory=SolverConfig)
    fixed_rounds: int = 3


def _rng(cfg: EngineConfig, *tags) -> random.Random:
    return random.Random(":".join(str(t) for t in (cfg.seed,) + tags))


def realize_facon(F: PolynomialMapping, kappa: Facon, cfg: EngineConfig | None = None) -> list[BranchOutcome]:
    """All branches of sequences with facon ``kappa`` along which F stays bounded.

    Works for any degree; the ansatz depth grows with the degree.  Branches
    whose fixed coordinates cannot be made constant, whose free coordinates are
    forced constant, or whose free coordinates could be frozen without losing
    dimension (so a larger fixed set describes them) are dropped.
    """
    cfg = cfg or EngineConfig()
    if kappa.n != F.n:
        raise ValueError("facon and mapping dimensions differ")
    d = max(int(F.degree()), 1)
    out: list[BranchOutcome] = []
    seen_keys = []
    for weights in itertools.product(cfg.weights, repeat=len(kappa.inf_set)):
        rng = _rng(cfg, kappa, weights)
        ans = facon_ansatz(kappa, weights, depth=(d - 1) * max(weights) if d > 1 else max(weights))
        m = ans.m
        comps = [substitute(c, ans, floor=0) for c in F.components]
        eqs = [L.coefficient(e).num for L in comps for e in sorted(L.terms, reverse=True) if e > 0]
        lims0 = [L.coefficient(0) for L in comps]
        nonzero = [Polynomial.var(m, j) for j in ans.leading.values()]
        queue = [(b, 0) for b in solve(initial_branch(m, eqs, nonzero), cfg.solver).branches]
        tag = 0
        while queue:
            b, rounds = queue.pop(0)
            extra = [b.values[idx].num for idx in ans.fixed_const.values() if not b.values[idx].is_constant()]
            if extra:
                if rounds >= cfg.fixed_rounds:
                    continue
                nb = b.copy()
                nb.pending = extra
                queue.extend((k, rounds + 1) for k in solve(nb, cfg.solver).branches)
                continue
            if any(b.values[idx].is_constant() for idx in ans.free_const.values()):
                continue
            lims = [L.substitute(b.values) for L in lims0]
            rk = varying_rank(lims, rng)
            if any(varying_rank(lims + [b.values[idx]], rng) > rk for idx in ans.free_const.values()):
                continue
            try:
                key = (rk, implicitize_exact(lims, rng))
            except GenericityError:
                key = (rk, [v.to_str() for v in lims])
            if key in seen_keys:
                continue
            seen_keys.append(key)
            tag += 1
            spec = ans.specialize(b.values)
            out.append(BranchOutcome(
                facon=kappa, ansatz=spec, label=f"w={','.join(map(str, weights))}#{tag}",
                mapping_limits=lims, rank=rk, conditions=list(b.nonzero), mapping=F))
    return out


def survivors_for_facon(F: PolynomialMapping, kappa: Facon, cfg: EngineConfig | None = None,
                        products: bool = True) -> list[BranchOutcome]:
    """Branches keeping F bounded for facon ``kappa``, each with its surviving pertinent variables."""
    if F.n != 3 or F.degree() != 2:
        raise ValueError(f"pertinent analysis needs a degree-2 mapping of C^3 (got n = {F.n}, degree {F.degree()})")
    cands = candidate_pertinents(3, 2, products=products)
    return [evaluate_candidates(o, cands) for o in realize_facon(F, kappa, cfg)]


# ---------------------------------------------------------------------------
# catalogue mode: generic shapes without a mapping


def _set_partitions(items):
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def symbolic_branches(kappa: Facon, products: bool = True) -> list[BranchOutcome]:
    """Generic sequence shapes for ``kappa`` with their surviving candidates.

    Divergent coordinates are ``A_g k + B_h + c_i/k``: coordinates in the same
    leading class share ``A_g`` and those in the same constant class share
    ``B_h`` too.  Fixed coordinates are ``e_j/k``, free ones ``p_f + q_f/k``.
    """
    cands = candidate_pertinents(3, 2, products=products)
    out = []
    inf = list(kappa.inf_set)
    tag = 0
    for leading in sorted(_set_partitions(inf), key=lambda p: (len(p), sorted(map(sorted, p)))):
        leading = sorted(sorted(g) for g in leading)
        for subs in itertools.product(*[sorted(_set_partitions(g), key=len) for g in leading]):
            constant_classes = sorted(sorted(h) for part in subs for h in part)
            names = [f"A{g + 1}" for g in range(len(leading))]
            names += [f"B{h + 1}" for h in range(len(constant_classes))]
            names += [f"c{i}" for i in inf]
            names += [f"e{j}" for j in kappa.fixed_set]
            for f in kappa.free_set:
                names += [f"p{f}", f"q{f}"]
            m = len(names)
            P = {nm: ParamField.param(m, j) for j, nm in enumerate(names)}
            series = []
            for i in range(1, 4):
                if i in inf:
                    g = next(t for t, grp in enumerate(leading) if i in grp)
                    h = next(t for t, grp in enumerate(constant_classes) if i in grp)
                    series.append({1: P[f"A{g + 1}"], 0: P[f"B{h + 1}"], -1: P[f"c{i}"]})
                elif i in kappa.fixed_set:
                    series.append({-1: P[f"e{i}"]})
                else:
                    series.append({0: P[f"p{i}"], -1: P[f"q{i}"]})
            ans = SequenceAnsatz.from_series(names, series)
            ans.facon = kappa
            tag += 1
            label = "lead" + "".join("{" + ",".join(map(str, g)) + "}" for g in leading)
            label += " const" + "".join("{" + ",".join(map(str, h)) + "}" for h in constant_classes)
            o = evaluate_candidates(BranchOutcome(facon=kappa, ansatz=ans, label=label), cands)
            o.rank = varying_rank(o.fixed_limits(), random.Random(f"{kappa}:{label}"))
            out.append(o)
    return out


# ---------------------------------------------------------------------------
# restriction across several facons


@dataclass
class PertinentProfile:
    """Candidates kept across a set of facons, with their limit on each facon."""

    facons: list[Facon]
    members: list[PertinentCandidate]
    limits: list[list[LimitValue]]  # limits[t][r]: member r along facon t
    outcomes: list[BranchOutcome]
    viable: bool
    ranks: list[int]
    independent: int
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "facons": [str(f) for f in self.facons],
            "members": [c.label() for c in self.members],
            "limits": [[lv.to_str(o.names) for lv in row] for row, o in zip(self.limits, self.outcomes)],
            "ranks": self.ranks,
            "independent": self.independent,
            "viable": self.viable,
        }


def _common_survivors(outcomes: list[BranchOutcome]):
    """Candidates bounded on every outcome with one common nu.

    A nu fixed on some facon is imposed on the facons where it is free;
    candidates whose nu is free everywhere are not minimal and are dropped.
    """
    keys = []
    for o in outcomes:
        for sv in o.surviving:
            if sv.key not in keys:
                keys.append(sv.key)
    keep = []
    seen: list[Polynomial] = []
    for key in keys:
        hits = [o.survivor(key) for o in outcomes]
        if any(h is None for h in hits):
            continue
        nus = {h.candidate.nu for h in hits if not h.nu_free and h.candidate.nu is not None}
        if len(nus) > 1:
            continue
        if hits[0].candidate.needs_nu:
            if not nus:
                continue
            nu = nus.pop()
            cand = hits[0].candidate.with_nu(nu)
            row = [h.limit_for(nu) for h in hits]
        else:
            cand = hits[0].candidate
            row = [h.limit for h in hits]
        p = cand.polynomial().monic()
        if p in seen:
            continue
        seen.append(p)
        keep.append((cand, row))
    return keep


def _monomial_matrix(vectors: list[list[ParamField]], rng: random.Random, count: int = 24):
    """Rows of degree <= 2 monomials in the vector entries at random parameter points."""
    if not vectors or not vectors[0]:
        return []
    k = len(vectors[0])
    m = vectors[0][0].m
    pairs = [(a, b) for a in range(k) for b in range(a, k)]
    rows = []
    guard = 0
    while len(rows) < count and guard < 10 * count:
        guard += 1
        point = [random_gaussian_rational(rng, 1000) for _ in range(m)]
        try:
            v = [p.evaluate_exact(point) for p in vectors[0]]
        except ZeroDivisionError:
            continue
        rows.append([GaussianRational(1)] + v + [v[a] * v[b] for a, b in pairs])
    return rows


def _same_closure(per_facon: list[list[ParamField]], rng: random.Random) -> bool:
    """Do the parametrised sets (one per facon) satisfy the same relations of degree <= 2?"""
    mats = [_monomial_matrix([vec], rng) for vec in per_facon]
    ranks = [exact_rank(M) for M in mats]
    stacked = exact_rank([row for M in mats for row in M])
    return all(r == stacked for r in ranks)


def _x_jacobian_rank(polys: list[Polynomial], rng: random.Random) -> int:
    if not polys:
        return 0
    point = [random_gaussian_rational(rng, 1000) for _ in range(3)]
    rows = [[p.diff(j).evaluate_exact(point) for j in range(3)] for p in polys]
    return exact_rank(rows)


def joint_restrict(outcomes: list[BranchOutcome], same_stratum: bool = True, seed: int = 0) -> PertinentProfile:
    """Restrict pertinent variables across facons (one outcome per facon).

    Keeps candidates bounded on every facon whose limit on each facon is zero
    or varying.  With ``same_stratum`` the kept set is further cut to the
    largest prefix-greedy subset whose limit sets coincide on all facons, as
    they must when the facons describe one stratum.  The profile is viable when
    every facon sees at least two independent varying limits and at least
    three kept candidates are functionally independent.
    """
    if not outcomes:
        raise ValueError("joint_restrict needs at least one outcome")
    ref = outcomes[0].mapping
    if any(o.mapping != ref for o in outcomes):
        raise ValueError("outcomes refer to different mappings")
    rng = random.Random(f"joint:{seed}")
    common = _common_survivors(outcomes)
    notes = []
    kept = []
    for cand, row in common:
        if any(lv.value.is_constant() and not lv.value.is_zero() for lv in row):
            notes.append(f"{cand.label()}: tends to a nonzero constant")
            continue
        kept.append((cand, row))
    if same_stratum and len(outcomes) > 1:
        zero = [(c, r) for c, r in kept if all(lv.value.is_zero() for lv in r)]
        varying = [(c, r) for c, r in kept if not all(lv.value.is_zero() for lv in r)]
        classes: list[tuple[list[ParamField], list]] = []
        for cand, row in varying:
            vals = [lv.value for lv in row]
            for rep, members in classes:
                if all(a == b for a, b in zip(rep, vals)):
                    members.append((cand, row))
                    break
            else:
                classes.append((vals, [(cand, row)]))
        chosen = []
        for rep, members in classes:
            trial = chosen + [rep]
            per_facon = [[vec[t] for vec in trial] for t in range(len(outcomes))]
            if _same_closure(per_facon, rng):
                chosen.append(rep)
            else:
                notes.append(f"{members[0][0].label()}: limit sets differ between facons")
        chosen_ids = {id(r) for r in chosen}
        keep_var = [pair for rep, members in classes if id(rep) in chosen_ids for pair in members]
        order = {id(c): i for i, (c, _) in enumerate(kept)}
        kept = sorted(zero + keep_var, key=lambda pr: order[id(pr[0])])
    members = [c for c, _ in kept]
    limits = [[row[t] for _, row in kept] for t in range(len(outcomes))]
    ranks = [varying_rank(limits[t], rng) if limits[t] else 0 for t in range(len(outcomes))]
    independent = _x_jacobian_rank([c.polynomial() for c in members], rng)
    viable = all(r >= 2 for r in ranks) and independent >= 3
    return PertinentProfile(list(o.facon for o in outcomes), members, limits, list(outcomes), viable, ranks,
                            independent, notes)
