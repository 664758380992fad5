"""Sweep of generic facon profiles and the asymptotic-set configurations they realize."""

from __future__ import annotations

import itertools
import json
import logging
import os
import random
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .classifier import (CONFIGURATION_NAMES, ClassifierConfig, classify_mapping, stratum_geometry,
                         structural_checks)
from .facons import Facon, enumerate_facons, group_of
from .iofiles import atomic_write_text
from .laurent import varying_rank
from .pertinent import PertinentProfile, joint_restrict, symbolic_branches
from .poly import Polynomial, PolynomialMapping, is_dominant

log = logging.getLogger(__name__)

# pairs of facon groups that may share the asymptotic set of one mapping
COMPATIBLE_GROUPS = (("I", "IV"), ("I", "V"), ("I", "VI"), ("II", "VI"), ("IV", "V"), ("IV", "VI"),
                     ("V", "VI"), ("VI", "VI"))
PERMUTATIONS = list(itertools.permutations(range(3)))


@dataclass
class CatalogueConfig:
    seed: int = 20240607
    witnesses_per_shape: int = 2  # classified witnesses per (profile, limit shape)


@dataclass
class Witness:
    type: int
    mapping: PolynomialMapping
    facons: list[Facon]  # facon set of the profile it came from
    members: list[Polynomial]
    components: list[dict]

    def to_dict(self) -> dict:
        return {
            "mapping": self.mapping.to_str(),
            "profile_facons": [str(f) for f in self.facons],
            "pertinent": [p.to_str() for p in self.members],
            "components": self.components,
        }


@dataclass
class CatalogueEntry:
    type: int
    witness: Witness
    profiles: int = 1  # how many swept profiles realized this type

    @property
    def name(self) -> str:
        return CONFIGURATION_NAMES[self.type]

    def to_dict(self) -> dict:
        return {"type": self.type, "name": self.name, "profiles": self.profiles, "witness": self.witness.to_dict()}


@dataclass
class Catalogue:
    n: int
    d: int
    entries: list[CatalogueEntry]
    profiles_swept: int = 0
    viable_profiles: int = 0
    classified: int = 0
    violations: list[str] = field(default_factory=list)
    seed: int = 20240607

    @property
    def types(self) -> list[int]:
        return [e.type for e in self.entries]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "degree": self.d,
            "version": __version__,
            "seed": self.seed,
            "types": [e.to_dict() for e in self.entries],
            "profiles_swept": self.profiles_swept,
            "viable_profiles": self.viable_profiles,
            "witnesses_classified": self.classified,
            "violations": self.violations,
        }

    def to_text(self) -> str:
        lines = [f"realizable asymptotic sets, n = {self.n}, degree {self.d}: {len(self.entries)} types"]
        lines.append(f"{'type':<5} {'configuration':<22} {'witness':<44} profile facons")
        for e in self.entries:
            w = e.witness
            lines.append(f"{e.type:<5} {e.name:<22} {w.mapping.to_str():<44} {', '.join(map(str, w.facons))}")
        if self.violations:
            lines += [f"violation: {v}" for v in self.violations]
        return "\n".join(lines)


def permute_polynomial(p: Polynomial, perm) -> Polynomial:
    """Rename x_{j+1} to x_{perm[j]+1}."""
    terms = {}
    for e, c in p.terms.items():
        new = [0] * len(e)
        for j, k in enumerate(e):
            new[perm[j]] = k
        terms[tuple(new)] = c
    return Polynomial(p.num_vars, terms)


def permute_facon(f: Facon, perm) -> Facon:
    return Facon(tuple(perm[i - 1] + 1 for i in f.inf_set), tuple(perm[j - 1] + 1 for j in f.fixed_set), f.n)


def facon_subsets(n: int = 3) -> list[list[Facon]]:
    """Singletons, compatible pairs, and the triple of fully split facons."""
    facons = enumerate_facons(n)
    out = [[f] for f in facons]
    allowed = {frozenset(p) if p[0] != p[1] else frozenset([p[0]]) for p in COMPATIBLE_GROUPS}
    for a, b in itertools.combinations(facons, 2):
        if frozenset([group_of(a), group_of(b)]) in allowed:
            out.append([a, b])
    out.append([f for f in facons if group_of(f) == "VI"])
    return out


def _orbit_key(facons: list[Facon], members: list[Polynomial]):
    keys = []
    for perm in PERMUTATIONS:
        fs = tuple(sorted(str(permute_facon(f, perm)) for f in facons))
        ms = tuple(sorted(permute_polynomial(p, perm).to_str() for p in members))
        keys.append((fs, ms))
    return min(keys)


def viable_profiles(n: int = 3, seed: int = 0) -> tuple[list[PertinentProfile], int]:
    """Viable generic profiles, one per orbit of coordinate permutations, and the sweep size."""
    branches = {f: symbolic_branches(f) for f in enumerate_facons(n)}
    seen = set()
    out = []
    swept = 0
    for subset in facon_subsets(n):
        for combo in itertools.product(*[branches[f] for f in subset]):
            swept += 1
            prof = joint_restrict(list(combo), same_stratum=False, seed=seed)
            if not prof.viable:
                continue
            key = _orbit_key(prof.facons, [c.polynomial() for c in prof.members])
            if key in seen:
                continue
            seen.add(key)
            out.append(prof)
    return out, swept


def _witness_pool(members: list[Polynomial], limits: list[list]):
    """Members and sums of two members, each with its limit on every facon of the profile."""
    pool = [(p, [row[r].value for row in limits]) for r, p in enumerate(members)]
    for (r, p), (s, q) in itertools.combinations(enumerate(members), 2):
        pool.append((p + q, [row[r].value + row[s].value for row in limits]))
    return pool, len(members)


def numeric_shape(row, rng: random.Random, points: int = 24) -> str:
    """Quick floating-point guess of the set swept by a limit triple.

    ``"plane"`` (one linear relation), ``"quadric"`` (no linear and one
    quadratic relation), ``"curve"`` (several linear relations) or ``"other"``.
    Used only to choose which witnesses are worth an exact classification.
    """
    m = row[0].m
    vals = []
    while len(vals) < points:
        pt = [complex(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(m)]
        try:
            v = [p.evaluate(pt) for p in row]
        except ZeroDivisionError:
            continue
        if all(np.isfinite(v)):
            vals.append(v)
    A = np.array(vals)
    cols = [np.ones(len(A)), A[:, 0], A[:, 1], A[:, 2]]
    lin = np.stack(cols, axis=1)
    quad = np.stack(cols + [A[:, a] * A[:, b] for a in range(3) for b in range(a, 3)], axis=1)

    def nullity(M):
        M = M / np.maximum(np.abs(M).max(axis=0), 1e-300)
        s = np.linalg.svd(M, compute_uv=False)
        return int((s <= 1e-9 * s[0]).sum())

    k = nullity(lin)
    if k == 1:
        return "plane"
    if k > 1:
        return "curve"
    return "quadric" if nullity(quad) == 1 else "other"


def profile_witnesses(prof: PertinentProfile, rng: random.Random):
    """Dominant triples built from the profile whose limits sweep a surface on every facon.

    Yields ``(mapping, shape)`` where shape is the surface type on the first facon;
    triples use at most one sum of two members.
    """
    members = [c.polynomial() for c in prof.members]
    pool, single = _witness_pool(members, prof.limits)
    nf = len(prof.facons)
    for tri in itertools.combinations(range(len(pool)), 3):
        if sum(i >= single for i in tri) > 1:
            continue
        G = PolynomialMapping(tuple(pool[i][0] for i in tri))
        if G.degree() != 2 or not is_dominant(G):
            continue
        rows = [[pool[i][1][t] for i in tri] for t in range(nf)]
        shape = numeric_shape(rows[0], rng)
        if shape not in ("plane", "quadric"):
            continue
        if any(varying_rank(row, rng) != 2 for row in rows):
            continue
        if shape == "quadric":
            shape = stratum_geometry(rows[0], 2, prof.facons[:1], prof.outcomes[0].names, rng).geom_type
            if shape != "paraboloid":
                continue
        yield G, shape


def catalogue(n: int = 3, d: int = 2, cfg: CatalogueConfig | None = None) -> Catalogue:
    """Realizable configurations of asymptotic sets, each with a witness mapping.

    Every viable generic profile proposes witness mappings built from its
    pertinent variables; a witness counts when its classification matches one
    of the five configurations and it realizes every facon of the profile.
    The reported witness of a type comes from the profile with the most facons.
    """
    if (n, d) != (3, 2):
        raise ValueError("the catalogue is available for n = 3, degree 2 only")
    cfg = cfg or CatalogueConfig()
    profiles, swept = viable_profiles(n, cfg.seed)
    ccfg = ClassifierConfig(seed=cfg.seed, pertinent=False)
    reports = {}
    found: dict[int, list[Witness]] = {}
    violations = []
    for prof in profiles:
        rng = random.Random(f"{cfg.seed}:witness:{[str(f) for f in prof.facons]}")
        budget = {"plane": cfg.witnesses_per_shape, "paraboloid": cfg.witnesses_per_shape}
        for G, shape in profile_witnesses(prof, rng):
            if budget[shape] == 0:
                if not any(budget.values()):
                    break
                continue
            budget[shape] -= 1
            key = G.to_str()
            if key not in reports:
                rep = classify_mapping(G, ccfg)
                reports[key] = rep
                violations += [f"{key}: {v}" for v in structural_checks(rep)]
            rep = reports[key]
            if rep.matched_type is None or not set(prof.facons) <= set(rep.realized_facons):
                continue
            comps = [{"equation": c.equation_str(), "type": c.geom_type, "facons": [str(f) for f in c.facons]}
                     for c in rep.components]
            members = [c.polynomial() for c in prof.members]
            found.setdefault(rep.matched_type, []).append(Witness(rep.matched_type, G, prof.facons, members, comps))
    entries = []
    for t in sorted(found):
        ws = found[t]
        best = max(ws, key=lambda w: len(w.facons))  # first among the largest
        entries.append(CatalogueEntry(t, best, len({tuple(map(str, w.facons)) for w in ws})))
    return Catalogue(n, d, entries, swept, len(profiles), len(reports), violations, cfg.seed)


# ---------------------------------------------------------------------------
# cache


def default_cache_dir() -> Path:
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "asympt"


def cache_path(n: int, d: int, cache_dir: Path | None = None) -> Path:
    return Path(cache_dir or default_cache_dir()) / f"catalogue-n{n}-d{d}-v{__version__}.json"


def cached_catalogue(n: int = 3, d: int = 2, cfg: CatalogueConfig | None = None, cache_dir: Path | None = None,
                     refresh: bool = False) -> tuple[str, bool]:
    """Catalogue JSON text, from the cache when possible.  Returns ``(text, hit)``.

    A cache file that does not parse or belongs to another key is regenerated.
    """
    cfg = cfg or CatalogueConfig()
    path = cache_path(n, d, cache_dir)
    if path.exists() and not refresh:
        try:
            text = path.read_text()
            data = json.loads(text)
            if data.get("version") == __version__ and (data.get("n"), data.get("degree")) == (n, d) \
                    and data.get("seed") == cfg.seed:
                return text, True
            log.warning("catalogue cache %s does not match this request; regenerating", path)
        except (OSError, ValueError) as exc:
            log.warning("catalogue cache %s is unreadable (%s); regenerating", path, exc)
    text = json.dumps(catalogue(n, d, cfg).to_dict(), indent=2) + "\n"
    atomic_write_text(path, text)
    return text, False
