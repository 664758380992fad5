import json

import numpy as np
import pytest

from asympt.classifier import classify_mapping
from asympt.golden import golden
from asympt.oracle import (MONOMIALS, ProbeCloud, ProbeConfig, crosscheck, fit_implicit, report_components,
                           sample_asymptotic)
from asympt.poly import variables

a1, a2, a3 = variables(3)


def cloud_of(points, sig="(s)"):
    pts = np.asarray(points, dtype=complex)
    return ProbeCloud(pts, [sig] * len(pts), pts, np.zeros(len(pts)))


def unit(vec):
    v = np.asarray(vec, dtype=complex)
    return v / np.linalg.norm(v)


def angle(u, v):
    return float(np.arccos(min(1.0, abs(np.vdot(unit(u), unit(v))))))


def coefficient_vector(terms):
    v = np.zeros(len(MONOMIALS), dtype=complex)
    for e, c in terms.items():
        v[MONOMIALS.index(e)] = c
    return v


@pytest.fixture(scope="module")
def clouds():
    return {name: sample_asymptotic(golden(name).mapping(), ProbeConfig())
            for name in ("triple-product", "paraboloid", "two-planes", "plane-and-paraboloid")}


@pytest.mark.parametrize("kwargs", [
    {"radius_start": 5}, {"radius_factor": 1.5}, {"steps": 1}, {"image_bound": float("inf")},
    {"samples_per_radius": 0}, {"fit_tolerance": 0.0}, {"fit_tolerance": 0.1},
])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        ProbeConfig(**kwargs)


def test_radius_schedule():
    assert ProbeConfig(radius_start=10, radius_factor=2, steps=3).radii == [10, 20, 40]


def test_triple_product_cloud(clouds):
    cloud = clouds["triple-product"]
    assert len(cloud) > 100
    assert np.all(np.abs(cloud.points).max(axis=1) <= 1e3)
    on_plane = np.minimum(np.abs(cloud.points[:, 0]), np.abs(cloud.points[:, 1]))
    assert on_plane.max() < 1e-6
    rep = classify_mapping(golden("triple-product").mapping())
    cc = crosscheck(report_components(rep), cloud)
    assert cc.passed and cc.max_residual < 1e-6
    assert all(n >= 10 for n in cc.owners.values())


def test_paraboloid_fit(clouds):
    (fit,) = fit_implicit(clouds["paraboloid"])
    assert fit.degree == 2 and fit.residual < 1e-6
    assert angle(fit.coefficients, coefficient_vector({(2, 0, 0): 1, (0, 0, 1): -1})) < 1e-6
    assert fit.equation_str() == "-alpha1^2 + alpha3 = 0"


def test_preimages_leave_every_ball(clouds):
    cloud = clouds["two-planes"]
    radius = ProbeConfig().radii[-1]
    assert np.all(np.linalg.norm(cloud.preimages, axis=1) >= radius * (1 - 1e-9))


@pytest.mark.parametrize("name", ["identity", "triangular"])
def test_proper_controls(name):
    cloud = sample_asymptotic(golden(name).mapping(), ProbeConfig(radius_start=1e4, image_bound=1e3))
    assert len(cloud) == 0
    assert cloud.possibly_proper
    assert fit_implicit(cloud) == []


def test_plane_fit():
    rng = np.random.default_rng(0)
    pts = np.zeros((60, 3), dtype=complex)
    pts[:, 1:] = rng.normal(size=(60, 2)) + 1j * rng.normal(size=(60, 2))
    (fit,) = fit_implicit(cloud_of(pts))
    assert fit.degree == 1 and fit.residual < 1e-8
    assert angle(fit.coefficients, coefficient_vector({(1, 0, 0): 1})) < 1e-8


def test_synthetic_paraboloid_fit():
    rng = np.random.default_rng(1)
    z = rng.normal(size=(80, 2)) + 1j * rng.normal(size=(80, 2))
    pts = np.stack([z[:, 0], z[:, 1], z[:, 0] ** 2], axis=1)
    (fit,) = fit_implicit(cloud_of(pts))
    assert fit.residual < 1e-6 and fit.degree == 2
    assert angle(fit.coefficients, coefficient_vector({(2, 0, 0): 1, (0, 0, 1): -1})) < 1e-6


def test_random_cloud_has_no_fit():
    rng = np.random.default_rng(2)
    pts = rng.normal(size=(100, 3)) + 1j * rng.normal(size=(100, 3))
    (fit,) = fit_implicit(cloud_of(pts))
    assert fit.residual > 1e-6


def test_small_clusters_are_flagged():
    (fit,) = fit_implicit(cloud_of(np.ones((5, 3))))
    assert fit.ambiguous and "only 5 points" in fit.warning


def test_ambiguous_fit_on_a_line():
    t = np.linspace(-1, 1, 50)
    pts = np.stack([t, 2 * t, np.zeros_like(t)], axis=1)
    (fit,) = fit_implicit(cloud_of(pts))
    assert fit.ambiguous


def test_crosscheck_mismatch(clouds):
    wrong = classify_mapping(golden("paraboloid").mapping())
    cc = crosscheck(report_components(wrong), clouds["two-planes"])
    assert not cc.passed
    assert cc.max_residual > 1e-3


def test_crosscheck_unwitnessed_component(clouds):
    comps = [("alpha1 = 0", [a1]), ("alpha2 = 0", [a2]), ("alpha3 = 7", [a3 - 7])]
    cc = crosscheck(comps, clouds["triple-product"])
    assert cc.unwitnessed == ["alpha3 = 7"]
    assert not cc.passed


def test_crosscheck_vacuous():
    empty = cloud_of(np.zeros((0, 3)))
    cc = crosscheck([], empty)
    assert cc.vacuous and cc.passed
    assert not crosscheck([("alpha1 = 0", [a1])], empty).passed


def test_scaling_consistency():
    F = golden("plane-and-paraboloid").mapping()
    one = {f.signature: f for f in fit_implicit(sample_asymptotic(F, ProbeConfig(radius_start=1e2)))}
    two = {f.signature: f for f in fit_implicit(sample_asymptotic(F, ProbeConfig(radius_start=2e2)))}
    shared = [s for s in one if s in two and one[s].points >= 30 and two[s].points >= 30]
    assert shared
    for s in shared:
        assert angle(one[s].coefficients, two[s].coefficients) < 1e-3


def test_seed_determinism():
    F = golden("two-planes").mapping()
    c1 = sample_asymptotic(F, ProbeConfig(seed=11, samples_per_radius=100))
    c2 = sample_asymptotic(F, ProbeConfig(seed=11, samples_per_radius=100))
    assert np.array_equal(c1.points, c2.points)
    assert c1.provenance == c2.provenance
    assert c1.to_jsonl() == c2.to_jsonl()


def test_jsonl_export(clouds):
    lines = clouds["paraboloid"].to_jsonl().splitlines()
    rec = json.loads(lines[0])
    assert set(rec) == {"alpha", "sig"}
    assert len(rec["alpha"]) == 6
