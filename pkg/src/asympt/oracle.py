"""Numeric evidence for the asymptotic set: track preimage branches to infinity and fit quadrics.

For each anchored coordinate ``x_i = t`` with ``|t|`` running through the radius
schedule, two random linear conditions ``L . F(x) = a`` cut the preimage down to
finitely many points.  Those whose image stays bounded are followed from one
radius to the next by Newton continuation, and their images are extrapolated
to ``t = infinity`` (polynomial extrapolation in ``1/t``).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .facons import Facon
from .implicit import target_monomials
from .poly import Polynomial, PolynomialMapping

# Newton and tracking run in extended precision: balancing branches evaluate
# differences of terms of size R^2 whose sum stays bounded.
CDTYPE = np.clongdouble


@dataclass
class ProbeConfig:
    radius_start: float = 1e2
    radius_factor: float = 10.0
    steps: int = 4
    image_bound: float = 1e3
    samples_per_radius: int = 400  # Newton starts per anchored coordinate
    seed: int = 20240607
    fit_tolerance: float = 1e-6

    def __post_init__(self):
        if not self.radius_start >= 10:
            raise ValueError("radius_start must be >= 10")
        if not self.radius_factor >= 2:
            raise ValueError("radius_factor must be >= 2")
        if not (isinstance(self.steps, int) and self.steps >= 2):
            raise ValueError("steps must be an integer >= 2")
        if not (0 < self.image_bound < math.inf):
            raise ValueError("image_bound must be positive and finite")
        if not (isinstance(self.samples_per_radius, int) and self.samples_per_radius >= 1):
            raise ValueError("samples_per_radius must be a positive integer")
        if not (0 < self.fit_tolerance <= 1e-2):
            raise ValueError("fit_tolerance must lie in (0, 1e-2]")

    @property
    def radii(self) -> list[float]:
        return [self.radius_start * self.radius_factor ** k for k in range(self.steps)]


@dataclass
class ProbeCloud:
    points: np.ndarray  # (N, 3) complex, extrapolated limit points
    provenance: list[str]
    preimages: np.ndarray  # (N, 3) complex, preimage at the largest radius
    errors: np.ndarray  # extrapolation error estimate per point
    possibly_proper: bool = False
    stats: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.points)

    def signatures(self) -> list[str]:
        return sorted(set(self.provenance))

    def subset(self, sig: str) -> np.ndarray:
        idx = [k for k, s in enumerate(self.provenance) if s == sig]
        return self.points[idx]

    def to_jsonl(self) -> str:
        lines = []
        for p, sig in zip(self.points, self.provenance):
            alpha = [float(v) for z in p for v in (z.real, z.imag)]
            lines.append(json.dumps({"alpha": alpha, "sig": sig}))
        return "\n".join(lines) + ("\n" if lines else "")


def _ld(q) -> np.longdouble:
    return np.longdouble(int(q.numerator)) / np.longdouble(int(q.denominator))


def _coeff_array(p: Polynomial) -> np.ndarray:
    """Coefficients in extended precision (exact up to its rounding)."""
    terms = p.sorted_terms()
    out = np.zeros(len(terms), dtype=CDTYPE)
    for k, (_, c) in enumerate(terms):
        out[k] = _ld(c.re) + 1j * _ld(c.im)
    return out


class _Compiled:
    """A polynomial mapping as exponent/coefficient arrays for vectorized evaluation."""

    def __init__(self, F: PolynomialMapping):
        self.n = F.n
        self.comps = []
        for c in F.components:
            if c.is_zero():
                self.comps.append((np.zeros((0, F.n), dtype=int), np.zeros(0, dtype=complex)))
                continue
            exps = np.array([e for e, _ in c.sorted_terms()], dtype=int)
            self.comps.append((exps, _coeff_array(c)))
        self.grads = [[_Compiled._one(c.diff(j)) for j in range(F.n)] for c in F.components]

    @staticmethod
    def _one(p: Polynomial):
        if p.is_zero():
            return np.zeros((0, p.num_vars), dtype=int), np.zeros(0, dtype=complex)
        return np.array([e for e, _ in p.sorted_terms()], dtype=int), _coeff_array(p)

    @staticmethod
    def _eval(poly, X):
        exps, coeffs = poly
        if len(coeffs) == 0:
            return np.zeros(X.shape[0], dtype=X.dtype)
        mons = np.prod(X[:, None, :] ** exps[None, :, :], axis=2)
        return mons @ coeffs.astype(X.dtype)

    def values(self, X) -> np.ndarray:
        return np.stack([self._eval(c, X) for c in self.comps], axis=1)

    def magnitudes(self, X) -> np.ndarray:
        """Sum of absolute term values per component (the scale of rounding errors)."""
        A = np.abs(X)
        return np.stack([self._eval((e, np.abs(c)), A) if len(c) else np.zeros(len(X)) for e, c in self.comps],
                        axis=1)

    def jacobian(self, X) -> np.ndarray:
        return np.stack([np.stack([self._eval(g, X) for g in row], axis=1) for row in self.grads], axis=1)


def _newton(comp: _Compiled, X, anchor: int, L, a, iters: int = 40, tol: float = 1e-15):
    """Solve ``L @ F(X) = a`` for the two non-anchored coordinates, row by row."""
    free = [j for j in range(comp.n) if j != anchor]
    X = X.copy()
    ok = np.zeros(X.shape[0], dtype=bool)
    for _ in range(iters):
        with np.errstate(all="ignore"):
            Fv = comp.values(X)
            res = Fv @ L.T - a
            J = np.einsum("rk,nkj->nrj", L, comp.jacobian(X))[:, :, free]
            det = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
            d0 = (J[:, 1, 1] * res[:, 0] - J[:, 0, 1] * res[:, 1]) / det
            d1 = (-J[:, 1, 0] * res[:, 0] + J[:, 0, 0] * res[:, 1]) / det
        step = np.stack([d0, d1], axis=1)
        bad = ~np.isfinite(step).all(axis=1)
        step[bad] = 0
        X[:, free] -= step
        scale = 1 + np.abs(X[:, free]).max(axis=1)
        ok = (np.abs(step).max(axis=1) <= tol * scale) & ~bad
        if ok.all():
            break
    with np.errstate(all="ignore"):
        res = comp.values(X) @ L.T - a
        scale = 1 + comp.magnitudes(X).max(axis=1)
    ok = ok & np.isfinite(res).all(axis=1) & (np.abs(res).max(axis=1) <= 1e-12 * scale)
    return X, ok


def _extrapolate(h: np.ndarray, Y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Neville extrapolation of ``Y[k]`` (values at ``h[k]``) to ``h = 0``.

    Returns the estimate from all nodes and its difference from the estimate
    without the coarsest node.
    """
    def neville(hs, ys):
        P = [y.copy() for y in ys]
        m = len(hs)
        for level in range(1, m):
            for i in range(m - level):
                j = i + level
                P[i] = (hs[j] * P[i] - hs[i] * P[i + 1]) / (hs[j] - hs[i])
        return P[0]

    full = neville(list(h), list(Y))
    fine = neville(list(h[1:]), list(Y[1:]))
    return full, np.abs(full - fine).max(axis=-1)


def _signature(paths: np.ndarray, factor: float, anchor: int) -> list[str]:
    """``(I)[J]`` per tracked point: I grows with the radius, J tends to zero."""
    last = np.abs(paths[-1])
    prev = np.abs(paths[-2])
    with np.errstate(all="ignore"):
        rate = np.log(np.maximum(last, 1e-300) / np.maximum(prev, 1e-300)) / math.log(factor)
    out = []
    n = paths.shape[2]
    for row_rate, row_abs in zip(rate, last):
        inf = [j + 1 for j in range(n) if j == anchor or row_rate[j] > 0.25]
        fixed = [j + 1 for j in range(n) if j + 1 not in inf and (row_rate[j] < -0.25 or row_abs[j] < 1e-9)]
        out.append(str(Facon(tuple(inf), tuple(fixed), n)))
    return out


def sample_asymptotic(F: PolynomialMapping, cfg: ProbeConfig | None = None) -> ProbeCloud:
    """Bounded images of diverging preimage branches, extrapolated to infinity."""
    cfg = cfg or ProbeConfig()
    if F.n != 3:
        raise ValueError("the probe works on mappings of C^3")
    comp = _Compiled(F)
    radii = np.array(cfg.radii)
    ss = np.random.SeedSequence(cfg.seed)
    children = ss.spawn(F.n + 1)
    base = np.random.default_rng(children[-1])
    L = (base.standard_normal((2, 3)) + 1j * base.standard_normal((2, 3))).astype(CDTYPE)
    phase = np.exp(1j * base.uniform(0, 2 * np.pi))
    points, sigs, pre, errs = [], [], [], []
    stats = {"starts": 0, "converged": 0, "bounded": 0, "tracked": 0, "kept": 0}
    for anchor in range(F.n):
        rng = np.random.default_rng(children[anchor])
        N = cfg.samples_per_radius
        a = (rng.standard_normal((N, 2)) + 1j * rng.standard_normal((N, 2))).astype(CDTYPE)
        t0 = radii[0] * phase
        # balanced starts: each other coordinate ~ t, ~ 1 or ~ 1/t, sometimes t plus a small offset
        X = np.zeros((N, 3), dtype=CDTYPE)
        X[:, anchor] = t0
        for j in range(3):
            if j == anchor:
                continue
            z = rng.standard_normal(N) + 1j * rng.standard_normal(N)
            kind = rng.integers(0, 4, N)
            X[:, j] = np.where(kind == 0, z * t0, np.where(kind == 1, z, np.where(kind == 2, z / t0, t0 + z / t0)))
        stats["starts"] += N
        X, ok = _newton(comp, X, anchor, L, a)
        stats["converged"] += int(ok.sum())
        img = comp.values(X)
        ok &= np.abs(img).max(axis=1) <= cfg.image_bound
        X, a = X[ok], a[ok]
        # the same branch may be found from several starts
        if len(X):
            z = np.concatenate([X / (1 + np.abs(X)), a], axis=1)
            key = np.round(np.concatenate([z.real, z.imag], axis=1), 8)
            _, first = np.unique(key, axis=0, return_index=True)
            first = np.sort(first)
            X, a = X[first], a[first]
        stats["bounded"] += len(X)
        paths = [X.copy()]
        alive = np.ones(len(X), dtype=bool)
        cur, prev, r_cur, r_prev = X, None, radii[0], None
        for k in range(1, len(radii)):
            sub = 8
            for s in range(1, sub + 1):
                r = radii[k - 1] * (radii[k] / radii[k - 1]) ** (s / sub)
                if prev is None:
                    nxt = cur * (r / r_cur)  # first step: coordinates scale like t
                    nxt[:, [j for j in range(3) if j != anchor]] = cur[:, [j for j in range(3) if j != anchor]]
                else:
                    nxt = cur + (cur - prev) * ((r - r_cur) / (r_cur - r_prev))  # secant predictor in t
                nxt[:, anchor] = r * phase
                new, ok = _newton(comp, nxt, anchor, L, a)
                alive &= ok
                prev, cur, r_prev, r_cur = cur, new, r_cur, r
            paths.append(cur.copy())
        paths = np.array(paths)  # (steps, M, 3)
        if paths.shape[1] == 0:
            continue
        images = np.array([comp.values(P) for P in paths])  # (steps, M, 3)
        alive &= (np.abs(images[-1]).max(axis=1) <= cfg.image_bound)
        # the branch must really leave every ball, not merely the anchor coordinate
        norms = np.sqrt((np.abs(paths) ** 2).sum(axis=2))
        alive &= (norms >= radii[:, None] * (1 - 1e-9)).all(axis=0)
        stats["tracked"] += int(alive.sum())
        h = 1.0 / radii
        limit, err = _extrapolate(h, images)
        keep = alive & (err <= cfg.fit_tolerance) & np.isfinite(limit).all(axis=1)
        keep &= np.abs(limit).max(axis=1) <= cfg.image_bound
        stats["kept"] += int(keep.sum())
        sig = _signature(paths[:, keep], cfg.radius_factor, anchor)
        points.append(limit[keep].astype(complex))
        pre.append(paths[-1][keep].astype(complex))
        errs.append(err[keep].astype(float))
        sigs += sig
    P = np.concatenate(points) if points else np.zeros((0, 3), dtype=complex)
    pre_all = np.concatenate(pre) if pre else np.zeros((0, 3), dtype=complex)
    err_all = np.concatenate(errs) if errs else np.zeros(0)
    return ProbeCloud(P, sigs, pre_all, err_all, possibly_proper=len(P) == 0, stats=stats)


# ---------------------------------------------------------------------------
# fitting


MONOMIALS = target_monomials(3, 2)  # 10 exponents, graded-lex descending
LINEAR = [k for k, e in enumerate(MONOMIALS) if sum(e) <= 1]


def monomial_matrix(points: np.ndarray, columns=None) -> np.ndarray:
    exps = np.array([MONOMIALS[k] for k in (columns if columns is not None else range(len(MONOMIALS)))])
    return np.prod(points[:, None, :] ** exps[None, :, :], axis=2)


@dataclass
class FitResult:
    signature: str
    coefficients: np.ndarray  # unit norm, over the 10 monomials of degree <= 2
    residual: float
    degree: int
    points: int
    ambiguous: bool = False
    warning: str = ""

    def equation_str(self, digits: int = 6) -> str:
        """Fitted equation scaled so its largest coefficient is 1."""
        names = ("alpha1", "alpha2", "alpha3")
        if not np.any(self.coefficients):
            return "(no fit)"
        k = int(np.argmax(np.abs(self.coefficients)))
        c = self.coefficients / self.coefficients[k]
        terms = []
        for coef, e in zip(c, MONOMIALS):
            re, im = round(coef.real, digits) + 0.0, round(coef.imag, digits) + 0.0
            if re == 0 and im == 0:
                continue
            mon = "*".join(f"{nm}^{p}" if p > 1 else nm for nm, p in zip(names, e) if p)
            val = f"{re:g}" if im == 0 else f"({re:g}{im:+g}i)"
            if mon and val in ("1", "-1"):
                val = val[:-1]
            elif mon:
                val += "*"
            terms.append(val + mon)
        return " + ".join(terms).replace("+ -", "- ") + " = 0"

    def to_dict(self) -> dict:
        return {
            "signature": self.signature,
            "equation": self.equation_str(),
            "residual": self.residual,
            "degree": self.degree,
            "points": self.points,
            "ambiguous": self.ambiguous,
            "warning": self.warning,
        }


def _fit_block(points: np.ndarray, columns) -> tuple[np.ndarray, float, bool]:
    M = monomial_matrix(points, columns)
    _, s, vh = np.linalg.svd(M, full_matrices=False)
    v = vh[-1].conj()
    res = float(s[-1] / math.sqrt(len(points)))
    # two near-null directions; the floor catches exactly repeated relations (s[-1] == 0)
    ambiguous = len(s) > 1 and s[-2] <= max(10 * s[-1], 1e-12 * s[0])
    full = np.zeros(len(MONOMIALS), dtype=complex)
    full[list(columns)] = v
    return full, res, bool(ambiguous)


def fit_implicit(cloud: ProbeCloud, max_degree: int = 2, tolerance: float = 1e-6,
                 min_points: int = 30) -> list[FitResult]:
    """One fitted equation per provenance cluster.

    A linear fit is tried first and kept when its residual is below
    ``tolerance``; otherwise all monomials of degree <= ``max_degree`` are used.
    Residual = smallest singular value / sqrt(point count) for a unit vector.
    """
    out = []
    for sig in cloud.signatures():
        pts = cloud.subset(sig)
        if len(pts) < min_points:
            out.append(FitResult(sig, np.zeros(len(MONOMIALS), dtype=complex), math.inf, 0, len(pts), True,
                                 f"only {len(pts)} points (need {min_points})"))
            continue
        vec, res, amb = _fit_block(pts, LINEAR)
        degree = 1
        if (res > tolerance or amb) and max_degree >= 2:
            vec2, res2, amb2 = _fit_block(pts, range(len(MONOMIALS)))
            if res <= tolerance and amb2:
                pass  # the plane explains the cluster; quadrics through it are not unique
            else:
                vec, res, amb, degree = vec2, res2, amb2, 2
        warning = "two smallest singular values within a factor 10" if amb else ""
        out.append(FitResult(sig, vec, res, degree, len(pts), amb, warning))
    return out


# ---------------------------------------------------------------------------
# comparison with a symbolic report


def _numeric_equation(eq: Polynomial):
    exps = np.array([e for e, _ in eq.sorted_terms()], dtype=int)
    coeffs = np.array([complex(c) for _, c in eq.sorted_terms()])
    return exps, coeffs


def _eval_equation(eq, points: np.ndarray) -> np.ndarray:
    exps, coeffs = eq
    return np.prod(points[:, None, :] ** exps[None, :, :], axis=2) @ coeffs


@dataclass
class CrosscheckResult:
    max_residual: float
    p99_residual: float
    points: int
    owners: dict[str, int]
    unwitnessed: list[str]
    vacuous: bool = False
    flags: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.flags

    def to_dict(self) -> dict:
        return {
            "max_residual": self.max_residual,
            "p99_residual": self.p99_residual,
            "points": self.points,
            "owners": self.owners,
            "unwitnessed": self.unwitnessed,
            "vacuous": self.vacuous,
            "flags": self.flags,
        }


def crosscheck(components: list[tuple[str, list[Polynomial]]], cloud: ProbeCloud, tolerance: float = 1e-6,
               min_owned: int = 10) -> CrosscheckResult:
    """Distance-like residuals between the cloud and the reported components.

    ``components`` pairs a label with the equations cutting the component out.
    Each point's residual is the smallest, over components, of the largest
    absolute value of that component's equations at the point.
    """
    if not components or len(cloud) == 0:
        flags = []
        if components and len(cloud) == 0:
            flags.append("cloud is empty but the report has components")
        if not components and len(cloud):
            flags.append(f"report has no component but the cloud has {len(cloud)} points")
        return CrosscheckResult(0.0 if not len(cloud) else math.inf, 0.0 if not len(cloud) else math.inf,
                                len(cloud), {}, [c for c, _ in components], vacuous=not flags, flags=flags)
    per = []
    for label, eqs in components:
        vals = np.stack([np.abs(_eval_equation(_numeric_equation(e), cloud.points)) for e in eqs], axis=1)
        per.append(vals.max(axis=1))
    per = np.stack(per, axis=1)  # (N, components)
    best = per.min(axis=1)
    owners = {label: int((per[:, k] <= tolerance).sum()) for k, (label, _) in enumerate(components)}
    unwitnessed = [label for label, count in owners.items() if count < min_owned]
    mx = float(best.max())
    p99 = float(np.percentile(best, 99))
    flags = []
    if mx > tolerance:
        flags.append(f"max residual {mx:.2e} above {tolerance:.0e}")
    flags += [f"unwitnessed component {u}" for u in unwitnessed]
    return CrosscheckResult(mx, p99, len(cloud), owners, unwitnessed, flags=flags)


def report_components(report) -> list[tuple[str, list[Polynomial]]]:
    return [(c.equation_str(), c.equations) for c in report.components if c.equations]
