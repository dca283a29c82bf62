"""Checks run on the point-algebraic model: scalar collapses and closed forms."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..algmodel import (
    CONDITIONS,
    RELATIONS,
    SEED,
    XI,
    ModelPoint,
    condition_scalar,
    condition_target,
    draw_model_points,
    fit_constants,
    g_class_coverage,
    model_curvature,
)
from ..contact import CheckResult
from ..curvzoo import (
    CurvaturePreset,
    conharmonic_xi_slice_closed_form,
    w_tilde,
    w_tilde_kmu_closed_form,
    xi_slice_closed_form,
    xi_xi_slice_closed_form,
)
from .report import ENGINE, SCHEMA, check_dict

__all__ = ["FIT_TOL", "ZERO_TOL", "ModelReport", "closed_form_residuals", "run_model_suite"]

FIT_TOL = 1e-9
ZERO_TOL = 1e-10
CLOSED_FORM_TOL = 1e-12
SLICE_TOL = 1e-9
CLOSED_FORM_DRAWS = 100


def closed_form_residuals(points) -> dict[str, float]:
    """Max deviation of the generic tensor from the (kappa, mu) closed forms."""
    out = {"w_tilde": 0.0, "xi_slice": 0.0, "xi_xi_slice": 0.0, "conharmonic_xi_slice": 0.0}
    for mp in points:
        ctx = model_curvature(mp)
        a, b, c = mp.abc
        W = w_tilde(ctx, CurvaturePreset.explicit(a, b, c)).components
        closed = w_tilde_kmu_closed_form(ctx, a, b, c, mp.kappa, mp.mu).components
        out["w_tilde"] = max(out["w_tilde"], float(np.max(np.abs(W - closed))))
        T = np.einsum("lijk,i->ljk", W, XI)
        out["xi_slice"] = max(out["xi_slice"], float(np.max(np.abs(T - xi_slice_closed_form(ctx, a, b, c, mp.kappa, mp.mu)))))
        TT = np.einsum("ljk,k->lj", T, XI)
        out["xi_xi_slice"] = max(
            out["xi_xi_slice"], float(np.max(np.abs(TT - xi_xi_slice_closed_form(ctx, a, b, c, mp.kappa, mp.mu))))
        )
        H = np.einsum("lijk,i->ljk", w_tilde(ctx, "conharmonic").components, XI)
        out["conharmonic_xi_slice"] = max(
            out["conharmonic_xi_slice"],
            float(np.max(np.abs(H - conharmonic_xi_slice_closed_form(ctx, mp.kappa, mp.mu)))),
        )
    return out


@dataclass
class ModelReport:
    draws: int
    seed: int
    fits: dict
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "engine": ENGINE,
            "kind": "model",
            "seed": self.seed,
            "draws": self.draws,
            "passed": self.passed,
            "fits": self.fits,
            "checks": [check_dict(c) for c in self.checks],
        }


def _zero_set_mismatch(points, cond: str, rel: str) -> tuple[int, ModelPoint | None]:
    bad, first = 0, None
    for mp in points:
        lhs = abs(condition_scalar(mp, cond)) < ZERO_TOL
        tgt = abs(2.0 * (1.0 - mp.kappa) * condition_target(mp, cond, rel)) < ZERO_TOL
        if lhs != tgt:
            bad += 1
            first = first or mp
    return bad, first


def _mp_tuple(mp: ModelPoint | None):
    return None if mp is None else (mp.kappa, mp.mu, mp.alpha, mp.beta, mp.gamma)


def run_model_suite(draws: int = 1000, seed: int = SEED, relations=RELATIONS) -> ModelReport:
    """Collapse fits (lhs = c * tr(h^2) * target) for each condition, plus closed-form checks.

    Worst points of model checks are reported as (kappa, mu, alpha, beta, gamma).
    """
    if draws < 1:
        raise ValueError("need at least one draw")
    points = draw_model_points(draws, seed)
    fits = fit_constants(points)
    rep = ModelReport(draws, seed, fits)
    for cond in CONDITIONS:
        for rel in relations:
            f = fits[cond][rel]
            resid = f["max_residual"] if abs(f["c"]) > 1e-12 else float("inf")
            rep.checks.append(CheckResult(f"collapse_{cond}_{rel}", resid, FIT_TOL, None))
            n_bad, first = _zero_set_mismatch(points, cond, rel)
            rep.checks.append(CheckResult(f"zero_set_{cond}_{rel}", float(n_bad), 0.5, _mp_tuple(first)))
    cf = closed_form_residuals(points[:CLOSED_FORM_DRAWS])
    rep.checks.append(CheckResult("closed_form_w_tilde", cf["w_tilde"], CLOSED_FORM_TOL, None))
    for name in ("xi_slice", "xi_xi_slice", "conharmonic_xi_slice"):
        rep.checks.append(CheckResult(f"closed_form_{name}", cf[name], SLICE_TOL, None))
    for cls, v in g_class_coverage(points[:CLOSED_FORM_DRAWS]).items():
        rep.checks.append(CheckResult(f"class_{cls}", v, FIT_TOL, None))
    return rep
