"""Checks, classification runs and the gallery sweep.

A semi-symmetry condition is *satisfied* at a point when the derivation
residual is below ``1e-5 * max|W| * max|T2| + 1e-8``; the absolute floor
keeps the test meaningful when both tensors vanish (flat entries).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..algmodel import BRANCH_TEXT, linear_relation, spread
from ..contact import (
    CheckResult,
    ContactManifold,
    check_axioms,
    contact_frame,
    extract_kappa_mu,
    verify_structure_identities,
)
from ..curvzoo import PRESET_NAMES, CurvatureContext, CurvaturePreset, derive_on_curvature, derive_on_ricci, w_tilde
from .manifest import Manifest, gallery_paths, load_manifest
from .report import ENGINE, SCHEMA, check_dict, num, point
from .sampling import DEFAULT_POINTS, DEFAULT_SEED, sample_points

__all__ = [
    "ENGINE",
    "REL_THRESHOLD",
    "ABS_FLOOR",
    "ClassificationResult",
    "EntryReport",
    "GalleryReport",
    "condition_residual",
    "classify_manifold",
    "check_manifest",
    "run_gallery",
]

REL_THRESHOLD = 1e-5
ABS_FLOOR = 1e-8
FLAT_TOL = 1e-8
MU_ZERO_TOL = 1e-8
ROOT_TOL = 1e-6
SPREAD_TOL = 1e-5
CONDITION_NAMES = ("wr", "wh", "ws")


def _preset(preset) -> CurvaturePreset:
    if isinstance(preset, CurvaturePreset):
        return preset
    if isinstance(preset, str):
        return CurvaturePreset.named(preset)
    return CurvaturePreset.explicit(*preset)


def condition_residual(ctx: CurvatureContext, preset, condition: str) -> tuple[float, float]:
    """(max |derivation|, max|W| * max|T2|) at one point."""
    W = w_tilde(ctx, _preset(preset)).components
    if condition == "ws":
        inner = ctx.S
        D = derive_on_ricci(W, inner)
    elif condition in ("wr", "wh"):
        inner = ctx.R if condition == "wr" else w_tilde(ctx, "conharmonic").components
        D = derive_on_curvature(W, inner)
    else:
        raise ValueError(f"unknown condition {condition!r}")
    return float(np.max(np.abs(D))), float(np.max(np.abs(W)) * np.max(np.abs(inner)))


@dataclass(frozen=True)
class PointSurvey:
    points: tuple
    kappa: np.ndarray
    mu: np.ndarray
    sasakian: np.ndarray
    certificate: np.ndarray
    riemann_max: np.ndarray
    h_max: np.ndarray

    @property
    def all_sasakian(self) -> bool:
        return bool(self.sasakian.all())

    @property
    def flat(self) -> bool:
        return bool(self.riemann_max.max() < FLAT_TOL)


def survey(M: ContactManifold, points: Sequence) -> PointSurvey:
    ks, ms, sas, cert, rmax, hmax = [], [], [], [], [], []
    for p in points:
        km = extract_kappa_mu(M, p)
        fr = contact_frame(M, p)
        ks.append(km.kappa)
        ms.append(km.mu if km.mu is not None else np.nan)
        sas.append(km.sasakian)
        cert.append(km.residual)
        rmax.append(float(np.max(np.abs(fr.geometry.R))))
        hmax.append(float(np.max(np.abs(fr.h))))
    return PointSurvey(tuple(tuple(p) for p in points), *(np.array(v) for v in (ks, ms, sas, cert, rmax, hmax)))


@dataclass(frozen=True)
class ClassificationResult:
    manifold: str
    preset: str
    condition: str
    max_residual: float
    worst_point: tuple | None
    satisfied: bool
    branch: str
    verdict: str
    contradiction: bool
    relation_derived: tuple[float, float, float]
    relation_printed: tuple[float, float, float]
    forbidden_derived: bool
    forbidden_printed: bool
    theorem_counterexample: bool

    def as_dict(self) -> dict:
        return {
            "preset": self.preset,
            "condition": self.condition,
            "max_residual": num(self.max_residual),
            "worst_point": point(self.worst_point),
            "satisfied": self.satisfied,
            "branch": self.branch,
            "verdict": self.verdict,
            "contradiction": self.contradiction,
            "relation_derived": [num(v) for v in self.relation_derived],
            "relation_printed": [num(v) for v in self.relation_printed],
            "forbidden_derived": self.forbidden_derived,
            "forbidden_printed": self.forbidden_printed,
            "theorem_counterexample": self.theorem_counterexample,
        }


def _on_relation(rel, kappa, mu) -> bool:
    pi, rho, sigma = rel
    scale = max(1.0, abs(pi) + abs(rho) + abs(sigma))
    ok = (np.abs(mu) < MU_ZERO_TOL) | (np.abs(pi * kappa + rho * mu - sigma) < ROOT_TOL * scale)
    return bool(ok.all())


def _degenerate(rel) -> bool:
    return all(abs(v) < 1e-14 for v in rel)


def classify_manifold(
    M: ContactManifold,
    preset,
    condition: str,
    points: Sequence,
    sv: PointSurvey | None = None,
) -> ClassificationResult:
    preset = _preset(preset)
    condition = condition.lower()
    if condition not in CONDITION_NAMES:
        raise ValueError(f"condition must be one of {CONDITION_NAMES}")
    sv = sv or survey(M, points)
    worst, worst_p, satisfied = 0.0, None, True
    for p in points:
        res, scale = condition_residual(CurvatureContext.from_frame(contact_frame(M, p)), preset, condition)
        if res > worst or worst_p is None:
            worst, worst_p = res, tuple(p)
        if res > REL_THRESHOLD * scale + ABS_FLOOR:
            satisfied = False
    rel_d = linear_relation(condition, preset, "derived")
    rel_p = linear_relation(condition, preset, "printed")

    kappa, mu = sv.kappa, np.nan_to_num(sv.mu)
    nonconstant = max(spread(kappa), spread(mu)) > SPREAD_TOL
    mu_zero = bool(np.all(np.abs(mu) < MU_ZERO_TOL))

    def forbidden(rel) -> bool:
        return satisfied and nonconstant and not mu_zero and not _on_relation(rel, kappa, mu)

    contradiction = False
    if sv.all_sasakian:
        branch, verdict = "sasakian", "Sasakian: theorem hypotheses not met"
    elif not satisfied:
        branch = "violated"
    elif sv.flat:
        branch = "flat"
    elif mu_zero:
        branch = "qphi_commutes"
    elif _degenerate(rel_d):
        branch = "no_constraint"
    elif _on_relation(rel_d, kappa, mu):
        branch = "relation"
        contradiction = nonconstant
    else:
        branch = "forbidden"
    if branch != "sasakian":
        verdict = BRANCH_TEXT.get(branch, "satisfied off the zero set of the relation")
    counterexample = bool(
        satisfied and not sv.all_sasakian and not sv.flat and spread(kappa) > SPREAD_TOL
    )
    return ClassificationResult(
        M.name,
        preset.label,
        condition,
        worst,
        worst_p,
        satisfied,
        branch,
        verdict,
        contradiction,
        tuple(float(v) for v in rel_d),
        tuple(float(v) for v in rel_p),
        forbidden(rel_d),
        forbidden(rel_p),
        counterexample,
    )


# --------------------------------------------------------------------------
# entry checks

@dataclass
class EntryReport:
    name: str
    seed: int
    points: int
    rescale: float
    expected: tuple[str, ...]
    checks: list[CheckResult] = field(default_factory=list)
    kappa_range: tuple[float, float] = (0.0, 0.0)
    mu_range: tuple[float, float] | None = None
    sasakian: bool = False
    classification: list[ClassificationResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks) and not any(c.forbidden_derived for c in self.classification)

    @property
    def findings(self) -> list[str]:
        out = []
        for c in self.checks:
            if not c.passed:
                rel = "<=" if c.lower_bound else ">="
                out.append(f"check {c.name} failed: {c.max_residual:.3e} {rel} {c.tolerance:g}")
        for c in self.classification:
            if c.forbidden_printed:
                out.append(f"{c.preset}/{c.condition}: satisfied off the printed relation with nonconstant kappa, mu")
            if c.theorem_counterexample:
                out.append(f"{c.preset}/{c.condition}: satisfied with nonconstant kappa (theorem conclusion fails)")
            if c.forbidden_derived:
                out.append(f"{c.preset}/{c.condition}: satisfied off the derived relation (engine inconsistency)")
        return out

    def as_dict(self) -> dict:
        return {
            "manifold": self.name,
            "seed": self.seed,
            "points": self.points,
            "rescale": num(self.rescale),
            "expected": list(self.expected),
            "passed": self.passed,
            "sasakian": self.sasakian,
            "kappa_range": [num(v) for v in self.kappa_range],
            "mu_range": None if self.mu_range is None else [num(v) for v in self.mu_range],
            "checks": [check_dict(c) for c in self.checks],
            "classification": [c.as_dict() for c in self.classification],
            "findings": self.findings,
        }


def _property_checks(M: ContactManifold, expected, sv: PointSurvey, points) -> list[CheckResult]:
    out = []
    pts = sv.points

    def worst(values, name, tol):
        values = np.asarray(values, float)
        i = int(np.argmax(values))
        return CheckResult(name, float(values[i]), tol, pts[i])

    for prop in expected:
        if prop == "sasakian":
            out.append(worst(np.maximum(np.abs(1.0 - sv.kappa), sv.h_max), "expected_sasakian", 1e-7))
        elif prop == "flat":
            out.append(worst(sv.riemann_max, "expected_flat", FLAT_TOL))
        elif prop == "generalized_kmu":
            vals = np.where(sv.sasakian, np.inf, sv.certificate)
            out.append(worst(vals, "expected_generalized_kmu", 1e-6))
        elif prop == "kmu_constant":
            mu = np.nan_to_num(sv.mu)
            s = max(float(np.ptp(sv.kappa)), float(np.ptp(mu)))
            out.append(CheckResult("expected_kmu_constant", s, SPREAD_TOL, None))
        elif prop == "nonconstant_kmu":
            gap = float(np.ptp(sv.kappa))
            out.append(CheckResult("expected_nonconstant_kmu", gap, 1e-3, None, lower_bound=True))
    return out


def _conformal_check(M: ContactManifold, points) -> CheckResult:
    worst, wp = -1.0, None
    for p in points:
        ctx = CurvatureContext.from_frame(contact_frame(M, p))
        v = w_tilde(ctx, "conformal").max_abs()
        if v > worst:
            worst, wp = v, tuple(p)
    return CheckResult("conformal_vanishing", worst, 1e-6, wp)


def check_manifest(
    manifest: Manifest,
    n: int = DEFAULT_POINTS,
    seed: int = DEFAULT_SEED,
    tol: float | None = None,
    identities: bool = True,
    classify: bool = False,
) -> EntryReport:
    M = manifest.manifold
    points = sample_points(M.chart, n, seed)
    tol = M.tol("axioms", 1e-6) if tol is None else tol
    tol_fd = M.tol("fd", 1e-4)
    rep = EntryReport(M.name, seed, n, manifest.rescale, manifest.expected)
    axioms = check_axioms(M, points, tol, tol_fd)
    rep.checks.extend(axioms.checks)
    if not axioms.passed:
        return rep
    sv = survey(M, points)
    rep.sasakian = sv.all_sasakian
    rep.kappa_range = (float(sv.kappa.min()), float(sv.kappa.max()))
    if not np.isnan(sv.mu).all():
        rep.mu_range = (float(np.nanmin(sv.mu)), float(np.nanmax(sv.mu)))
    rep.checks.extend(_property_checks(M, manifest.expected, sv, points))
    rep.checks.append(_conformal_check(M, points))
    if identities:
        ident = verify_structure_identities(M, points, tol_fd, tol, M.tol("reconstruction", 1e-5))
        rep.checks.extend(ident.checks)
    if classify:
        for preset in PRESET_NAMES:
            for cond in CONDITION_NAMES:
                rep.classification.append(classify_manifold(M, preset, cond, points, sv))
    return rep


@dataclass
class GalleryReport:
    entries: list[EntryReport]
    seed: int
    points: int

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def as_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "engine": ENGINE,
            "kind": "gallery",
            "seed": self.seed,
            "points": self.points,
            "passed": self.passed,
            "entries": [e.as_dict() for e in self.entries],
        }


def run_gallery(
    name_filter: str | None = None,
    n: int = DEFAULT_POINTS,
    seed: int = DEFAULT_SEED,
    classify: bool = True,
) -> GalleryReport:
    entries = []
    for path in gallery_paths():
        manifest = load_manifest(path)
        if name_filter and name_filter not in manifest.name:
            continue
        entries.append(check_manifest(manifest, n, seed, classify=classify))
    if name_filter and not entries:
        raise ValueError(f"no gallery entry matches {name_filter!r}")
    return GalleryReport(entries, seed, n)
