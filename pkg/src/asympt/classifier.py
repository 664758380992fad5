"""From facon branches to the geometry of the asymptotic set."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import __version__
from .facons import Facon, enumerate_facons
from .implicit import (GenericityError, classify_surface, equation_str, implicitize_exact, vanishes_on)
from .laurent import ParamField
from .pertinent import (BranchOutcome, EngineConfig, PertinentProfile, joint_restrict, realize_facon,
                        survivors_for_facon)
from .poly import Polynomial, PolynomialMapping, is_dominant

# (planes, paraboloids) -> position in the list of five configurations
CONFIGURATIONS = {(1, 0): 1, (0, 1): 2, (2, 0): 3, (1, 1): 4, (3, 0): 5}
CONFIGURATION_NAMES = {
    1: "plane",
    2: "paraboloid",
    3: "two planes",
    4: "plane and paraboloid",
    5: "three planes",
}


def target_names(n: int) -> list[str]:
    return [f"alpha{j + 1}" for j in range(n)]


@dataclass
class StratumDescription:
    facons: list[Facon]
    dimension: int
    limit_parametrization: list[ParamField]
    param_names: tuple[str, ...]
    implicit_equations: list[Polynomial]
    geom_type: str  # plane | paraboloid | lower-dimensional | unmatched
    detail: str = ""

    def equations_str(self) -> list[str]:
        names = target_names(len(self.limit_parametrization))
        return [equation_str(e, names) for e in self.implicit_equations]

    def to_dict(self) -> dict:
        return {
            "facons": [str(f) for f in self.facons],
            "dimension": self.dimension,
            "type": self.geom_type,
            "equations": self.equations_str(),
            "parametrization": [v.to_str(self.param_names) for v in self.limit_parametrization],
        }


def stratum_geometry(limits: list[ParamField], dimension: int, facons: list[Facon], names,
                     rng: random.Random) -> StratumDescription:
    """Implicit equations and shape of the set swept by ``limits``."""
    try:
        eqs = implicitize_exact(limits, rng)
    except GenericityError as exc:
        return StratumDescription(facons, dimension, limits, tuple(names), [], "unmatched", str(exc))
    n = len(limits)
    if dimension < n - 1:
        return StratumDescription(facons, dimension, limits, tuple(names), eqs, "lower-dimensional")
    if len(eqs) != 1:
        detail = "no relation of degree <= 2" if not eqs else f"{len(eqs)} independent relations"
        return StratumDescription(facons, dimension, limits, tuple(names), eqs, "unmatched", detail)
    shape = classify_surface(eqs[0])
    kind = shape.kind if shape.kind in ("plane", "paraboloid") else "unmatched"
    return StratumDescription(facons, dimension, limits, tuple(names), eqs, kind, shape.detail)


def profile_geometry(profile: PertinentProfile, seed: int = 0) -> StratumDescription | None:
    """Geometry of a profile built from outcomes that carry the mapping's limits."""
    o = profile.outcomes[0]
    if o.mapping_limits is None:
        return None
    return stratum_geometry(o.mapping_limits, o.rank, profile.facons, o.names, random.Random(f"geom:{seed}"))


@dataclass
class Component:
    equations: list[Polynomial]
    geom_type: str
    facons: list[Facon]
    strata: list[StratumDescription]
    profile: PertinentProfile | None = None

    def equation_str(self) -> str:
        names = target_names(self.equations[0].num_vars) if self.equations else []
        return "; ".join(equation_str(e, names) for e in self.equations)

    def to_dict(self) -> dict:
        out = {"equation": self.equation_str(), "type": self.geom_type, "facons": [str(f) for f in self.facons]}
        if self.profile is not None:
            out["pertinent"] = self.profile.to_dict()
        return out


@dataclass
class ClassifierConfig:
    seed: int = 20240607
    engine: EngineConfig | None = None
    pertinent: bool = True

    def engine_config(self) -> EngineConfig:
        return self.engine or EngineConfig(seed=self.seed)


@dataclass
class AsymptoticSetReport:
    mapping: PolynomialMapping
    dominant: bool
    mode: str  # classification | facon-realization | proper-by-degree
    facon_analysis: list[tuple[Facon, list[BranchOutcome]]]
    strata: list[StratumDescription]
    components: list[Component]
    matched_type: int | None
    seed: int
    notes: list[str] = field(default_factory=list)
    oracle_residual: float | None = None
    oracle: dict | None = None

    @property
    def realized_facons(self) -> list[Facon]:
        return [f for f, branches in self.facon_analysis if branches]

    def component_equations(self) -> list[list[Polynomial]]:
        return [c.equations for c in self.components]

    def to_dict(self) -> dict:
        fa = []
        for f, branches in self.facon_analysis:
            if not branches:
                continue
            fa.append({"facon": str(f), "branches": [b.to_dict() for b in branches]})
        out = {
            "mapping": self.mapping.to_str(),
            "dominant": self.dominant,
            "mode": self.mode,
            "facon_analysis": fa,
            "realized_facons": [str(f) for f in self.realized_facons],
            "components": [c.to_dict() for c in self.components],
            "lower_dimensional": [s.to_dict() for s in self.strata if s.geom_type == "lower-dimensional"],
            "matched_type": self.matched_type,
            "configuration": CONFIGURATION_NAMES.get(self.matched_type) if self.matched_type else None,
            "proper": not self.realized_facons,
            "oracle_residual": self.oracle_residual,
            "seed": self.seed,
            "version": __version__,
            "notes": self.notes,
        }
        if self.oracle is not None:
            out["oracle"] = self.oracle
        return out

    def to_text(self) -> str:
        lines = [f"mapping: {self.mapping.to_str()}", f"dominant: {str(self.dominant).lower()}"]
        if not self.realized_facons:
            lines.append("S_F empty (proper)")
        else:
            lines.append("realized facons: " + ", ".join(str(f) for f in self.realized_facons))
            for c in self.components:
                lines.append(f"component {c.equation_str()}  [{c.geom_type}]  facons {', '.join(map(str, c.facons))}")
            for s in self.strata:
                if s.geom_type == "lower-dimensional":
                    lines.append(f"lower-dimensional stratum ({', '.join(map(str, s.facons))}): "
                                 + "; ".join(s.equations_str()))
        if self.matched_type is not None:
            lines.append(f"matched type: {self.matched_type} ({CONFIGURATION_NAMES[self.matched_type]})")
        else:
            lines.append("matched type: none")
        if self.oracle_residual is not None:
            lines.append(f"oracle residual: {self.oracle_residual:.3e}")
        lines += [f"note: {n}" for n in self.notes]
        return "\n".join(lines)


def match_configuration(components: list[Component]) -> int | None:
    kinds = [c.geom_type for c in components]
    if any(k not in ("plane", "paraboloid") for k in kinds):
        return None
    return CONFIGURATIONS.get((kinds.count("plane"), kinds.count("paraboloid")))


def structural_checks(report: AsymptoticSetReport) -> list[str]:
    """Violations of the structural facts every report must satisfy (empty when sound).

    A surface component carries at most two facons and, when it carries two, is
    a plane; a paraboloid only appears alone or next to a single plane; every
    lower-dimensional stratum lies on some surface component.
    """
    out = []
    for c in report.components:
        if len(c.facons) > 2:
            out.append(f"component {c.equation_str()} carries {len(c.facons)} facons")
        if len(c.facons) == 2 and c.geom_type != "plane":
            out.append(f"two-facon component {c.equation_str()} is a {c.geom_type}")
        for st in c.strata:
            if not vanishes_on(c.equations, st.limit_parametrization):
                out.append(f"equation {c.equation_str()} does not vanish on its own stratum")
    kinds = sorted(c.geom_type for c in report.components)
    if "paraboloid" in kinds and kinds not in (["paraboloid"], ["paraboloid", "plane"]):
        out.append(f"paraboloid next to {kinds}")
    if report.components:
        for st in report.strata:
            if st.geom_type == "lower-dimensional" and not any(
                    c.equations and _contained(st, c) for c in report.components):
                out.append(f"stratum of {', '.join(map(str, st.facons))} lies on no surface component")
    return out


def _contained(stratum: StratumDescription, comp: Component) -> bool:
    return vanishes_on(comp.equations, stratum.limit_parametrization)


def classify_mapping(F: PolynomialMapping, cfg: ClassifierConfig | None = None) -> AsymptoticSetReport:
    """Realize every facon, turn the branches into strata and match the configuration."""
    cfg = cfg or ClassifierConfig()
    ecfg = cfg.engine_config()
    n = F.n
    deg = F.degree()
    dominant = is_dominant(F)
    notes = []
    if deg <= 1 and dominant:
        notes.append("affine isomorphism: proper, S_F empty")
        return AsymptoticSetReport(F, dominant, "proper-by-degree", [], [], [], None, cfg.seed, notes)
    full = n == 3 and deg == 2
    mode = "classification" if full else "facon-realization"
    if not full:
        notes.append(f"type matching needs a degree-2 mapping of C^3 (got n = {n}, degree {deg}); "
                     "facons and components are still reported")
    analysis = []
    for kappa in enumerate_facons(n):
        if full and cfg.pertinent:
            branches = survivors_for_facon(F, kappa, ecfg)
        else:
            branches = realize_facon(F, kappa, ecfg)
        analysis.append((kappa, branches))

    strata: list[StratumDescription] = []
    components: list[Component] = []
    rep_branch: dict[int, dict[Facon, BranchOutcome]] = {}
    for kappa, branches in analysis:
        for b in branches:
            rng = random.Random(f"{cfg.seed}:stratum:{kappa}:{b.label}")
            st = stratum_geometry(b.mapping_limits, b.rank, [kappa], b.names, rng)
            if st.dimension < n - 1:
                if not any(o.facons == st.facons and o.implicit_equations == st.implicit_equations
                           for o in strata):
                    strata.append(st)
                continue
            strata.append(st)
            if st.geom_type == "unmatched" and not st.implicit_equations:
                comp = Component([], "unmatched", [kappa], [st])
                components.append(comp)
                continue
            for ci, comp in enumerate(components):
                if comp.equations == st.implicit_equations:
                    if kappa not in comp.facons:
                        comp.facons.append(kappa)
                    comp.strata.append(st)
                    rep_branch[ci].setdefault(kappa, b)
                    break
            else:
                components.append(Component(list(st.implicit_equations), st.geom_type, [kappa], [st]))
                rep_branch[len(components) - 1] = {kappa: b}

    for st in strata:
        if st.geom_type != "lower-dimensional":
            continue
        hosts = [c for c in components if c.equations and _contained(st, c)]
        if not hosts:
            notes.append(f"lower-dimensional stratum of {', '.join(map(str, st.facons))} "
                         "not contained in any surface component")

    if full and cfg.pertinent:
        for ci, comp in enumerate(components):
            reps = list(rep_branch.get(ci, {}).values())
            if reps:
                comp.profile = joint_restrict(reps, same_stratum=True, seed=cfg.seed)

    order = sorted(range(len(components)), key=lambda i: components[i].equation_str())
    components = [components[i] for i in order]
    matched = None
    if full and dominant and components:
        matched = match_configuration(components)
        if matched is None:
            kinds = ", ".join(c.geom_type for c in components)
            notes.append(f"components ({kinds}) do not form one of the five configurations")
    if not dominant:
        notes.append("mapping is not dominant: no type matching")
    if full and dominant and not any(branches for _, branches in analysis):
        notes.append("no facon is realized: proper mapping, S_F empty")
    return AsymptoticSetReport(F, dominant, mode, analysis, strata, components, matched, cfg.seed, notes)
