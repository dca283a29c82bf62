"""Manifold-free model of a generalized (kappa, mu) point.

The model lives on an orthonormal h-eigenframe {xi, e, phi e} with g = I,
h = diag(0, theta, -theta) and theta = sqrt(1 - kappa).  R and S come from
the (kappa, mu) closed forms, so every semi-symmetry condition reduces to a
polynomial in (kappa, mu, alpha, beta, gamma) that can be checked exactly.

Each condition is collapsed to a scalar as lhs = tr(h o D), with D the
xi-slice of the derivation contracted over its last pair of arguments.  Two
scalar targets are available per condition: the relation as printed in the
source derivation and the relation obtained from the exact expansion; the
fitted form is ``lhs = c * tr(h^2) * target``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Sequence

import numpy as np

from .contact import kmu_ricci, kmu_riemann
from .curvzoo import (
    CurvatureContext,
    CurvaturePreset,
    derive_on_curvature,
    derive_on_ricci,
    resolve_preset,
    w_tilde,
)

__all__ = [
    "CONDITIONS",
    "RELATIONS",
    "SEED",
    "ModelPoint",
    "ClassificationVerdict",
    "model_curvature",
    "condition_scalar",
    "condition_target",
    "wr_condition",
    "wh_condition",
    "ws_condition",
    "linear_relation",
    "printed_wr_operator",
    "printed_wh_operator",
    "printed_ws_form",
    "printed_ws_operator",
    "draw_model_points",
    "fit_constants",
    "load_constants",
    "dichotomy_check",
    "G_CLASSES",
    "g_class_coverage",
]

CONDITIONS = ("wr", "wh", "ws")
RELATIONS = ("printed", "derived")
SEED = 0x5EED

PHI = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]])
XI = np.array([1.0, 0.0, 0.0])


@dataclass(frozen=True)
class ModelPoint:
    kappa: float
    mu: float
    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        if not self.kappa < 1.0:
            raise ValueError("the model needs kappa < 1")

    @property
    def theta(self) -> float:
        return float(np.sqrt(1.0 - self.kappa))

    @property
    def h(self) -> np.ndarray:
        return np.diag([0.0, self.theta, -self.theta])

    @property
    def abc(self) -> tuple[float, float, float]:
        return self.alpha, self.beta, self.gamma

    def with_abc(self, alpha, beta, gamma) -> "ModelPoint":
        return ModelPoint(self.kappa, self.mu, alpha, beta, gamma)


def model_curvature(mp: ModelPoint) -> CurvatureContext:
    g = np.eye(3)
    h = mp.h
    R = kmu_riemann(g, XI, XI, h, mp.kappa, mp.mu)
    S = kmu_ricci(g, XI, h, mp.kappa, mp.mu)
    return CurvatureContext(R, S, g, S.copy(), 2.0 * (mp.kappa - mp.mu), g, XI, XI, h)


# --------------------------------------------------------------------------
# scalar collapses

def _slice_operator(mp: ModelPoint, condition: str) -> np.ndarray:
    """D[a, y]: the vector D(e_y) from the xi-slice of the condition."""
    ctx = model_curvature(mp)
    W = w_tilde(ctx, mp.abc).components
    if condition == "ws":
        return derive_on_ricci(W, ctx.S)[0, :, 0, :].T
    if condition == "wr":
        inner = ctx.R
    elif condition == "wh":
        inner = w_tilde(ctx, "conharmonic").components
    else:
        raise ValueError(f"unknown condition {condition!r}")
    D = derive_on_curvature(W, inner)
    return np.einsum("ayii->ay", D[:, 0, :, 0, :, :])


def condition_scalar(mp: ModelPoint, condition: str) -> float:
    return float(np.trace(mp.h @ _slice_operator(mp, condition)))


def condition_target(mp: ModelPoint, condition: str, relation: str = "printed") -> float:
    k, m, a, b, c = mp.kappa, mp.mu, mp.alpha, mp.beta, mp.gamma
    if relation == "printed":
        if condition == "wr":
            return (b + 1) * m * (m - 3 * k)
        if condition == "wh":
            return m * ((a + b + 2) * m - (a + 3 * b + 4) * k)
    elif relation == "derived":
        if condition == "wr":
            return m * ((a - b - 1) * k - (a + b + 1) * m + c)
        if condition == "wh":
            return m * (a - b) * (k - m)
    else:
        raise ValueError(f"relation must be one of {RELATIONS}")
    if condition == "ws":
        return ((2 * b + 1) * m + k - c) * m
    raise ValueError(f"unknown condition {condition!r}")


def _condition(mp: ModelPoint, condition: str, relation: str, constants: dict | None) -> tuple[float, float]:
    consts = constants or load_constants()
    c = consts["fits"][condition][relation]["c"]
    lhs = condition_scalar(mp, condition)
    return lhs, c * 2.0 * (1.0 - mp.kappa) * condition_target(mp, condition, relation)


def wr_condition(mp: ModelPoint, relation: str = "printed", constants: dict | None = None) -> tuple[float, float]:
    return _condition(mp, "wr", relation, constants)


def wh_condition(mp: ModelPoint, relation: str = "printed", constants: dict | None = None) -> tuple[float, float]:
    return _condition(mp, "wh", relation, constants)


def ws_condition(mp: ModelPoint, relation: str = "printed", constants: dict | None = None) -> tuple[float, float]:
    return _condition(mp, "ws", relation, constants)


def linear_relation(condition: str, preset, relation: str = "printed", n: int = 1) -> tuple[float, float, float]:
    """(pi, rho, sigma) with the non-mu factor of the target equal to pi*kappa + rho*mu - sigma.

    ``preset`` may carry an r-dependent gamma; r = 2(kappa - mu) is
    substituted, so the relation stays linear.
    """
    if isinstance(preset, str):
        preset = CurvaturePreset.named(preset, n)
    elif not isinstance(preset, CurvaturePreset):
        preset = CurvaturePreset.explicit(*preset)
    a, b, g0, gr = preset.alpha, preset.beta, preset.gamma0, preset.gamma_r
    if condition == "ws":
        return 1 - 2 * gr, 2 * b + 1 + 2 * gr, g0
    if relation == "printed":
        if condition == "wr":
            return -3 * (b + 1), b + 1, 0.0
        if condition == "wh":
            return -(a + 3 * b + 4), a + b + 2, 0.0
    elif relation == "derived":
        if condition == "wr":
            return a - b - 1 + 2 * gr, -(a + b + 1) - 2 * gr, -g0
        if condition == "wh":
            return a - b, -(a - b), 0.0
    raise ValueError(f"unknown condition/relation {condition!r}/{relation!r}")


# --------------------------------------------------------------------------
# printed intermediate expansions, encoded as written

def _frame_ops(mp: ModelPoint):
    E = np.eye(3)
    return E, np.outer(XI, XI), mp.h


def printed_wr_operator(mp: ModelPoint) -> np.ndarray:
    """The operator Y -> (left side of the printed traced W.R relation) as a matrix."""
    k, m, a, b, c = mp.kappa, mp.mu, mp.alpha, mp.beta, mp.gamma
    I, P, h = _frame_ops(mp)
    Q = kmu_ricci(I, XI, h, k, m)
    p = 2 * k * a + k + c - b * m
    q = a * m + b * m + k + m - c
    c1 = k * (3 * ((2 * a + 1) * k - b * m + c) + 2 * q - (a + 1) * (2 * k + m) + p - (b + 1) * (2 * k + m))
    return (
        c1 * (P - I)
        - 3 * k * (b + 1) * m * h
        - 2 * k * p * P
        + p * Q
        - (b + 1) * m * Q @ h
        - p * m * h
        - (b + 1) * m**2 * h @ h
        - q * m * I
    )


def printed_wh_operator(mp: ModelPoint) -> np.ndarray:
    k, m, a, b, c = mp.kappa, mp.mu, mp.alpha, mp.beta, mp.gamma
    I, P, h = _frame_ops(mp)
    A = P - I
    q = a * m + b * m + k + m - c
    return (
        3 * k * (((2 * a + 1) * k - b * m + c) * A - (b + 1) * m * h)
        - k * ((-(a + b + 1) * m - k + c) * A - (b + 1) * m * h + (a + 1) * (2 * k + m) * A)
        - (m - k)
        * (
            -q * (P + I)
            + (a + 1) * (2 * k + m) * P
            - (a + 1) * m * h
            - (a + 1) * (2 * k + m) * P
            - (b + 1) * (2 * k + m) * (I - P)
        )
        - (2 * k * a + k + c - b * m) * (m - k) * A
        + (b + 1) * m * (m - k) * h
    )


def printed_ws_form(mp: ModelPoint) -> np.ndarray:
    """F[y, u, v]: the printed expansion of S(W(xi,Y)U, V) + S(U, W(xi,Y)V)."""
    k, m, a, b, c = mp.kappa, mp.mu, mp.alpha, mp.beta, mp.gamma
    I, _, h = _frame_ops(mp)
    S = kmu_ricci(I, XI, h, k, m)
    e = XI
    Sh = S @ h  # Sh[v, y] = S(d_v, h d_y)
    K0 = -(a + b + 1) * m - k + c
    c1 = 2 * k + m
    F = np.zeros((3, 3, 3))
    for y in range(3):
        for u in range(3):
            for v in range(3):
                gyu, gyv = I[y, u], I[y, v]
                F[y, u, v] = (
                    K0 * (2 * k * e[v] * gyu - e[u] * S[v, y] + 2 * k * e[u] * gyv - e[v] * S[u, y])
                    + 2 * (a + 1) * k * m * e[v] * h[u, y]
                    - (b + 1) * m * e[u] * Sh[v, y]
                    + 2 * (a + 1) * k * m * e[u] * h[v, y]
                    - (b + 1) * m * e[v] * Sh[u, y]
                    + (a + 1) * c1 * e[u] * (2 * k * e[v] * e[y] - S[v, y])
                    + (a + 1) * c1 * e[v] * (2 * k * e[u] * e[y] - S[u, y])
                    + 2 * k * (b + 1) * c1 * (gyu - e[u] * e[y]) * e[v]
                    + 2 * k * (b + 1) * c1 * (gyv - e[v] * e[y]) * e[u]
                )
    return F


def printed_ws_operator(mp: ModelPoint) -> np.ndarray:
    """Matrix of Y -> printed U = xi specialization, with the stray "gY" read as Y."""
    k, m, a, b, c = mp.kappa, mp.mu, mp.alpha, mp.beta, mp.gamma
    I, P, h = _frame_ops(mp)
    return (
        ((a + b + 1) * m + k - c) * (m * h - m * I + (2 * k + m) * P - 2 * k * I)
        + 2 * (a + 1) * k * m * h
        - (b + 1) * m**2 * ((k - 1) * (P - I) - h)
        + (a + 1) * (2 * k + m) * (2 * k * P + m * I - m * h - (2 * k + m) * P)
        + 2 * k * (b + 1) * (2 * k + m) * (I - P)
    )


# --------------------------------------------------------------------------
# draws and fitted constants

_FORCED = ("mu0", "wr_printed", "wh_printed", "ws", "wr_derived", "wh_derived")


def draw_model_points(n: int, seed: int = SEED, forced_fraction: float = 0.25) -> list[ModelPoint]:
    """Seeded draws; a fraction is pushed onto the zero set of one of the relations."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        k = rng.uniform(-2.0, 0.9)
        m = rng.uniform(-3.0, 3.0)
        a, b, c = rng.uniform(-2.0, 2.0, 3)
        if rng.uniform() < forced_fraction:
            kind = _FORCED[i % len(_FORCED)]
            if kind == "mu0":
                m = 0.0
            elif kind == "wr_printed":
                m = 3 * k
            elif kind == "wh_printed" and abs(a + b + 2) > 0.1:
                m = (a + 3 * b + 4) * k / (a + b + 2)
            elif kind == "ws":
                c = (2 * b + 1) * m + k
            elif kind == "wr_derived":
                c = (a + b + 1) * m - (a - b - 1) * k
            elif kind == "wh_derived":
                m = k
        out.append(ModelPoint(float(k), float(m), float(a), float(b), float(c)))
    return out


def fit_constants(points: Sequence[ModelPoint]) -> dict:
    """Least-squares c in lhs = c * tr(h^2) * target, per condition and relation."""
    fits: dict = {}
    for cond in CONDITIONS:
        lhs = np.array([condition_scalar(mp, cond) for mp in points])
        fits[cond] = {}
        for rel in RELATIONS:
            t = np.array([2.0 * (1.0 - mp.kappa) * condition_target(mp, cond, rel) for mp in points])
            denom = float(t @ t)
            c = float(lhs @ t / denom) if denom > 0 else 0.0
            resid = np.abs(lhs - c * t)
            zeros_lhs = np.abs(lhs) < 1e-10
            zeros_t = np.abs(t) < 1e-10
            fits[cond][rel] = {
                "c": c,
                "max_residual": float(resid.max()),
                "zero_set_mismatches": int(np.count_nonzero(zeros_lhs != zeros_t)),
            }
    return fits


CONSTANTS_VERSION = 1


def build_constants(draws: int = 1000, seed: int = SEED) -> dict:
    return {
        "version": CONSTANTS_VERSION,
        "form": "lhs = c * tr(h^2) * target",
        "seed": seed,
        "draws": draws,
        "fits": fit_constants(draw_model_points(draws, seed)),
    }


_CONSTANTS: dict | None = None


def load_constants() -> dict:
    global _CONSTANTS
    if _CONSTANTS is None:
        text = resources.files("contactcurv.data").joinpath("collapse_constants.json").read_text()
        _CONSTANTS = json.loads(text)
    return _CONSTANTS


# --------------------------------------------------------------------------
# dichotomy

@dataclass(frozen=True)
class ClassificationVerdict:
    branch: str  # flat | violated | qphi_commutes | relation | no_constraint
    text: str
    contradiction: bool = False
    relation: tuple[float, float, float] | None = None
    max_condition: float = 0.0
    details: dict = field(default_factory=dict, compare=False)


BRANCH_TEXT = {
    "flat": "flat",
    "violated": "condition not satisfied",
    "qphi_commutes": "mu = 0 branch: Q phi = phi Q",
    "relation": "relation branch: kappa, mu must be constant",
    "no_constraint": "condition holds identically: no constraint on kappa, mu",
}


def spread(values: Iterable[float]) -> float:
    v = np.asarray(list(values), float)
    scale = max(1.0, float(np.max(np.abs(v))))
    return float((v.max() - v.min()) / scale)


def dichotomy_check(
    path: Sequence,
    preset,
    condition: str,
    relation: str = "printed",
    tol: float = 1e-10,
    spread_tol: float = 1e-5,
) -> ClassificationVerdict:
    """Apply the theorem's case split to a path of (kappa, mu) samples.

    ``relation="printed"`` evaluates the printed scalar condition, so the
    verdict is the one the printed argument would reach; ``"derived"`` uses
    the exact collapse.
    """
    pts = [(p.kappa, p.mu) if isinstance(p, ModelPoint) else (float(p[0]), float(p[1])) for p in path]
    if not pts:
        raise ValueError("empty path")
    kappas = np.array([k for k, _ in pts])
    mus = np.array([m for _, m in pts])
    if np.all(np.abs(kappas) < tol) and np.all(np.abs(mus) < tol):
        return ClassificationVerdict("flat", BRANCH_TEXT["flat"])
    values = []
    for k, m in pts:
        abc = resolve_preset(preset, 2.0 * (k - m))
        values.append(condition_target(ModelPoint(k, m, *abc), condition, relation))
    worst = float(np.max(np.abs(values)))
    rel = linear_relation(condition, preset, relation)
    if worst > tol:
        return ClassificationVerdict("violated", BRANCH_TEXT["violated"], False, rel, worst)
    if np.all(np.abs(mus) < tol):
        return ClassificationVerdict("qphi_commutes", BRANCH_TEXT["qphi_commutes"], False, rel, worst)
    if all(abs(x) < 1e-14 for x in rel):
        return ClassificationVerdict("no_constraint", BRANCH_TEXT["no_constraint"], False, rel, worst)
    s = max(spread(kappas), spread(mus))
    return ClassificationVerdict(
        "relation", BRANCH_TEXT["relation"], s > spread_tol, rel, worst, {"spread": s}
    )


# --------------------------------------------------------------------------
# G-classes: (outer tensor, inner condition)

G_CLASSES = {
    "G1": ("riemann", "wh"),
    "G2": ("conformal", "wh"),
    "G3": ("concircular", "wh"),
    "G4": ("conharmonic", "wh"),
    "G5": ("riemann", "wr"),
    "G6": ("conformal", "wr"),
    "G7": ("concircular", "wr"),
    "G8": ("conharmonic", "wr"),
}


def g_class_coverage(points: Sequence[ModelPoint]) -> dict[str, float]:
    """Max |class condition via named preset - collapse with substituted (alpha, beta, gamma)|."""
    out = {}
    for cls, (preset, cond) in G_CLASSES.items():
        worst = 0.0
        for mp in points:
            ctx = model_curvature(mp)
            W = w_tilde(ctx, preset).components
            inner = ctx.R if cond == "wr" else w_tilde(ctx, "conharmonic").components
            D = np.einsum("ayii->ay", derive_on_curvature(W, inner)[:, 0, :, 0, :, :])
            direct = float(np.trace(mp.h @ D))
            sub = condition_scalar(mp.with_abc(*resolve_preset(preset, ctx.r)), cond)
            worst = max(worst, abs(direct - sub))
        out[cls] = worst
    return out
