"""The three-parameter curvature family W(alpha, beta, gamma) and derivations.

    W(U,V)Z = R(U,V)Z + alpha [S(V,Z) U - S(U,Z) V]
                      + beta  [g(V,Z) QU - g(U,Z) QV]
                      + gamma [g(V,Z) U - g(U,Z) V]

Components follow :mod:`contactcurv.geometry`: ``W[l, i, j, k] = W^l_ijk``.
Named presets may have an r-dependent gamma, so a preset is stored as
``(alpha, beta, gamma0, gamma_r)`` with ``gamma = gamma0 + gamma_r * r``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .geometry import TensorValue, inverse3

__all__ = [
    "PRESET_NAMES",
    "CurvaturePreset",
    "CurvatureContext",
    "preset_coefficients",
    "resolve_preset",
    "w_tilde",
    "w_tilde_kmu_closed_form",
    "xi_slice_closed_form",
    "xi_xi_slice_closed_form",
    "conharmonic_closed_form",
    "conharmonic_xi_slice_closed_form",
    "wedge",
    "derive_on_curvature",
    "derive_on_ricci",
]

PRESET_NAMES = (
    "riemann",
    "conharmonic",
    "conformal",
    "concircular",
    "projective",
    "m_projective",
    "w1",
    "w2",
    "w4",
)


@dataclass(frozen=True)
class CurvaturePreset:
    alpha: float
    beta: float
    gamma0: float
    gamma_r: float = 0.0
    name: Optional[str] = None

    @classmethod
    def named(cls, name: str, n: int = 1, reading: str = "odd") -> "CurvaturePreset":
        return _preset(name, n, reading)

    @classmethod
    def explicit(cls, alpha: float, beta: float, gamma: float) -> "CurvaturePreset":
        return cls(float(alpha), float(beta), float(gamma), 0.0, None)

    def coefficients(self, r: float) -> tuple[float, float, float]:
        return self.alpha, self.beta, self.gamma0 + self.gamma_r * r

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        return f"abc({self.alpha:g},{self.beta:g},{self.gamma0:g})"


def _preset(name: str, n: int, reading: str) -> CurvaturePreset:
    if n < 1:
        raise ValueError("n must be at least 1")
    if name not in PRESET_NAMES:
        raise ValueError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")
    if name in ("w1", "w2", "w4"):
        # "n - 1" in these items is read with n the manifold dimension 2n+1 by default
        if reading not in ("odd", "literal"):
            raise ValueError("reading must be 'odd' (dimension 2n+1) or 'literal'")
        dim = 2 * n + 1 if reading == "odd" else n
        if dim == 1:
            raise ValueError(f"preset {name} is undefined for n = 1 under the literal reading")
        c = 1.0 / (dim - 1)
        table = {"w1": (c, 0.0, 0.0, 0.0), "w2": (0.0, -c, 0.0, 0.0), "w4": (0.0, 0.0, -c, 0.0)}
        return CurvaturePreset(*table[name], name=name)
    conh = -1.0 / (2 * n - 1)
    table = {
        "riemann": (0.0, 0.0, 0.0, 0.0),
        "conharmonic": (conh, conh, 0.0, 0.0),
        "conformal": (conh, conh, 0.0, 1.0 / (2 * n * (2 * n - 1))),
        "concircular": (0.0, 0.0, 0.0, -1.0 / (2 * n * (2 * n + 1))),
        "projective": (-1.0 / (2 * n), 0.0, 0.0, 0.0),
        "m_projective": (-1.0 / (4 * n), -1.0 / (4 * n), 0.0, 0.0),
    }
    return CurvaturePreset(*table[name], name=name)


def preset_coefficients(name: str, n: int = 1, r: float = 0.0, reading: str = "odd") -> tuple[float, float, float]:
    return _preset(name, n, reading).coefficients(r)


PresetLike = Union[str, CurvaturePreset, tuple]


def resolve_preset(preset: PresetLike, r: float, n: int = 1) -> tuple[float, float, float]:
    if isinstance(preset, str):
        return preset_coefficients(preset, n, r)
    if isinstance(preset, CurvaturePreset):
        return preset.coefficients(r)
    a, b, c = preset
    return float(a), float(b), float(c)


@dataclass(frozen=True)
class CurvatureContext:
    R: np.ndarray
    S: np.ndarray
    g: np.ndarray
    Q: Optional[np.ndarray] = None
    r: Optional[float] = None
    ginv: Optional[np.ndarray] = None
    eta: Optional[np.ndarray] = None
    xi: Optional[np.ndarray] = None
    h: Optional[np.ndarray] = None
    point: Optional[tuple] = None

    def __post_init__(self):
        ginv = inverse3(self.g) if self.ginv is None else self.ginv
        object.__setattr__(self, "ginv", ginv)
        if self.Q is None:
            object.__setattr__(self, "Q", ginv @ self.S)
        if self.r is None:
            object.__setattr__(self, "r", float(np.trace(self.Q)))

    @classmethod
    def from_frame(cls, fr) -> "CurvatureContext":
        pg = fr.geometry
        return cls(pg.R, pg.S, pg.g, pg.Q, pg.r, pg.ginv, fr.eta, fr.xi, fr.h, fr.point)

    @classmethod
    def from_geometry(cls, pg) -> "CurvatureContext":
        return cls(pg.R, pg.S, pg.g, pg.Q, pg.r, pg.ginv, point=pg.point)

    def tensor(self, comps: np.ndarray, signature=("u", "d", "d", "d")) -> TensorValue:
        return TensorValue(self.point, tuple(signature), comps, self.g)


def wedge(g: np.ndarray, A: np.ndarray) -> np.ndarray:
    """Components of (U, V, Z) -> g(V,Z) A U - g(U,Z) A V."""
    return np.einsum("jk,li->lijk", g, A) - np.einsum("ik,lj->lijk", g, A)


def _w_components(ctx: CurvatureContext, alpha: float, beta: float, gamma: float) -> np.ndarray:
    I = np.eye(3)
    W = ctx.R.copy()
    if alpha:
        W += alpha * (np.einsum("jk,li->lijk", ctx.S, I) - np.einsum("ik,lj->lijk", ctx.S, I))
    if beta:
        W += beta * wedge(ctx.g, ctx.Q)
    if gamma:
        W += gamma * wedge(ctx.g, I)
    return W


def w_tilde(ctx: CurvatureContext, preset: PresetLike, n: int = 1) -> TensorValue:
    alpha, beta, gamma = resolve_preset(preset, ctx.r, n)
    return ctx.tensor(_w_components(ctx, alpha, beta, gamma))


def _require_contact(ctx: CurvatureContext):
    if ctx.eta is None or ctx.xi is None or ctx.h is None:
        raise ValueError("closed forms need eta, xi and h in the context")
    return ctx.g, ctx.eta, ctx.xi, ctx.h


def w_tilde_kmu_closed_form(ctx, alpha, beta, gamma, kappa, mu) -> TensorValue:
    g, eta, xi, h = _require_contact(ctx)
    I = np.eye(3)
    gh = (g @ h).T  # gh[k, j] = g(h d_j, d_k)
    c0 = -(alpha + beta + 1) * mu - kappa + gamma
    c1 = 2 * kappa + mu
    W = (
        c0 * wedge(g, I)
        + (alpha + 1) * mu * (np.einsum("kj,li->lijk", gh, I) - np.einsum("ki,lj->lijk", gh, I))
        + (beta + 1) * mu * wedge(g, h)
        + (alpha + 1) * c1 * (np.einsum("j,k,li->lijk", eta, eta, I) - np.einsum("i,k,lj->lijk", eta, eta, I))
        + (beta + 1) * c1 * np.einsum("jki,l->lijk", np.einsum("jk,i->jki", g, eta) - np.einsum("ik,j->jki", g, eta), xi)
    )
    return ctx.tensor(W)


def xi_slice_closed_form(ctx, alpha, beta, gamma, kappa, mu) -> np.ndarray:
    """T[l, j, k] = W(xi, d_j) d_k from the closed-form slice."""
    g, eta, xi, h = _require_contact(ctx)
    I = np.eye(3)
    gh = (g @ h).T
    c0 = -(alpha + beta + 1) * mu - kappa + gamma
    c1 = 2 * kappa + mu
    return (
        c0 * (np.einsum("jk,l->ljk", g, xi) - np.einsum("k,lj->ljk", eta, I))
        + (alpha + 1) * mu * np.einsum("kj,l->ljk", gh, xi)
        - (beta + 1) * mu * np.einsum("k,lj->ljk", eta, h)
        + (alpha + 1) * c1 * (np.einsum("j,k,l->ljk", eta, eta, xi) - np.einsum("k,lj->ljk", eta, I))
        + (beta + 1) * c1 * np.einsum("jk,l->ljk", g - np.outer(eta, eta), xi)
    )


def xi_xi_slice_closed_form(ctx, alpha, beta, gamma, kappa, mu) -> np.ndarray:
    """T[l, j] = W(xi, d_j) xi."""
    _, eta, xi, h = _require_contact(ctx)
    c = (2 * alpha + 1) * kappa - beta * mu + gamma
    return c * (np.outer(xi, eta) - np.eye(3)) - (beta + 1) * mu * h


def conharmonic_closed_form(ctx, kappa, mu) -> TensorValue:
    return ctx.tensor((mu - kappa) * wedge(ctx.g, np.eye(3)))


def conharmonic_xi_slice_closed_form(ctx, kappa, mu) -> np.ndarray:
    g, eta, xi, _ = _require_contact(ctx)
    return (mu - kappa) * (np.einsum("jk,l->ljk", g, xi) - np.einsum("k,lj->ljk", eta, np.eye(3)))


def _arr(t) -> np.ndarray:
    return t.components if isinstance(t, TensorValue) else np.asarray(t, float)


def derive_on_curvature(T1, T2, g=None) -> np.ndarray:
    """(T1.T2)[a, x, y, u, v, z], the vector T1(X,Y) acting as a derivation on T2(U,V)Z."""
    A, B = _arr(T1), _arr(T2)
    return (
        np.einsum("axym,muvz->axyuvz", A, B)
        - np.einsum("amvz,mxyu->axyuvz", B, A)
        - np.einsum("aumz,mxyv->axyuvz", B, A)
        - np.einsum("auvm,mxyz->axyuvz", B, A)
    )


def derive_on_ricci(T1, S, g=None) -> np.ndarray:
    """(T1.S)[x, y, u, v] = -S(T1(X,Y)U, V) - S(U, T1(X,Y)V)."""
    A, S = _arr(T1), _arr(S)
    return -np.einsum("mv,mxyu->xyuv", S, A) - np.einsum("um,mxyv->xyuv", S, A)
