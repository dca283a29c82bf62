"""Pointwise Riemannian geometry on a 3-dimensional chart.

Every quantity is computed at a single point from Taylor jets of the metric
components, so Christoffel symbols and curvature carry no truncation error.
Index conventions (all arrays are plain numpy):

    gamma[k, i, j]   = Gamma^k_ij
    R[l, i, j, k]    = R^l_ijk,   R(d_i, d_j) d_k = R^l_ijk d_l
    Rlow[i, j, k, l] = g(R(d_i, d_j) d_k, d_l)
    S[j, k]          = R^i_ijk
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .expr import Expr, evaluate, parse_expr
from .jet import Jet3, eval_jet, jeinsum, jtrace_einsum, stack

__all__ = [
    "Chart",
    "MetricField",
    "TensorValue",
    "SingularMetricError",
    "PointGeometry",
    "inverse3",
    "point_geometry",
    "clear_geometry_cache",
    "christoffel",
    "riemann",
    "ricci_scalar",
    "covariant_derivative",
    "contract",
    "raise_index",
    "lower_index",
]

FD_STEP = 1e-4
DET_FLOOR = 1e-12


class SingularMetricError(ValueError):
    pass


@dataclass(frozen=True)
class Chart:
    """Coordinate box ``box[i] = (lo, hi)`` with excluded loci ``f(x, y, z) = 0``."""

    name: str
    box: tuple[tuple[float, float], ...]
    exclude: tuple[Expr, ...] = ()
    coordinates: tuple[str, str, str] = ("x", "y", "z")

    def __post_init__(self):
        if len(self.box) != 3:
            raise ValueError("chart box needs three intervals")
        for name, (lo, hi) in zip(self.coordinates, self.box):
            if not (np.isfinite(lo) and np.isfinite(hi)) or not lo < hi:
                raise ValueError(f"degenerate domain interval for {name}: [{lo}, {hi}]")

    @property
    def lower(self) -> np.ndarray:
        return np.array([b[0] for b in self.box], float)

    @property
    def upper(self) -> np.ndarray:
        return np.array([b[1] for b in self.box], float)

    def contains(self, p) -> bool:
        p = np.asarray(p, float)
        return bool(np.all(p >= self.lower) and np.all(p <= self.upper))

    def locus_distance(self, p) -> float:
        """First-order distance estimate |f|/|grad f| to the nearest excluded locus."""
        best = np.inf
        for f in self.exclude:
            try:
                j = eval_jet(f, p, 1)
            except ValueError:
                return 0.0
            grad = np.linalg.norm(j.gradient)
            value = abs(float(j.value))
            best = min(best, value / grad if grad > 0 else (np.inf if value > 0 else 0.0))
        return best


@dataclass(frozen=True)
class MetricField:
    """Symmetric 3x3 array of expressions ``g_ij``."""

    components: tuple[tuple[Expr, ...], ...]

    @classmethod
    def from_strings(cls, rows: Sequence[Sequence[str]]) -> "MetricField":
        return cls(tuple(tuple(parse_expr(s) for s in row) for row in rows))

    def jet(self, p, order: int = 3) -> Jet3:
        return stack([stack([eval_jet(e, p, order) for e in row]) for row in self.components])

    def value(self, p) -> np.ndarray:
        return np.array([[evaluate(e, p) for e in row] for row in self.components])

    def symmetry_residual(self, p) -> float:
        g = self.value(p)
        return float(np.max(np.abs(g - g.T)))

    def is_positive_definite(self, p) -> bool:
        g = self.value(p)
        minors = [g[0, 0], np.linalg.det(g[:2, :2]), np.linalg.det(g)]
        return all(m > 0 for m in minors)


@dataclass(frozen=True)
class TensorValue:
    """Components of a tensor at a point.  ``signature`` lists ``"u"``/``"d"`` per slot."""

    point: tuple[float, float, float]
    signature: tuple[str, ...]
    components: np.ndarray
    metric: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        comps = np.asarray(self.components, float)
        if comps.shape != (3,) * len(self.signature):
            raise ValueError(f"components of shape {comps.shape} do not fit signature {self.signature}")
        if any(s not in ("u", "d") for s in self.signature):
            raise ValueError("signature entries must be 'u' or 'd'")
        object.__setattr__(self, "components", comps)

    @property
    def rank(self) -> int:
        return len(self.signature)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.components))) if self.components.size else 0.0

    def _with(self, signature, components) -> "TensorValue":
        return TensorValue(self.point, tuple(signature), components, self.metric)


def _letters(n: int) -> str:
    return "abcdefghijkl"[:n]


def contract(t: TensorValue, slot_a: int, slot_b: int) -> TensorValue:
    """Trace over an (up, down) pair of slots."""
    if slot_a == slot_b or {t.signature[slot_a], t.signature[slot_b]} != {"u", "d"}:
        raise ValueError("contraction needs one up and one down slot")
    idx = list(_letters(t.rank))
    idx[slot_b] = idx[slot_a]
    keep = [i for k, i in enumerate(idx) if k not in (slot_a, slot_b)]
    comps = np.einsum(f"{''.join(idx)}->{''.join(keep)}", t.components)
    sig = [s for k, s in enumerate(t.signature) if k not in (slot_a, slot_b)]
    return t._with(sig, comps)


def _move_slot(t: TensorValue, slot: int, matrix: np.ndarray, new: str) -> TensorValue:
    comps = np.moveaxis(np.tensordot(matrix, t.components, axes=([1], [slot])), 0, slot)
    sig = list(t.signature)
    sig[slot] = new
    return t._with(sig, comps)


def raise_index(t: TensorValue, slot: int, g: np.ndarray | None = None) -> TensorValue:
    g = t.metric if g is None else g
    if g is None:
        raise ValueError("raising an index needs the metric")
    if t.signature[slot] != "d":
        raise ValueError(f"slot {slot} is already up")
    return _move_slot(t, slot, inverse3(np.asarray(g, float)), "u")


def lower_index(t: TensorValue, slot: int, g: np.ndarray | None = None) -> TensorValue:
    g = t.metric if g is None else g
    if g is None:
        raise ValueError("lowering an index needs the metric")
    if t.signature[slot] != "u":
        raise ValueError(f"slot {slot} is already down")
    return _move_slot(t, slot, np.asarray(g, float), "d")


# --------------------------------------------------------------------------
# 3x3 inversion, numeric and jet-valued

def _cofactors(a):
    return [
        [a[1][1] * a[2][2] - a[1][2] * a[2][1], a[0][2] * a[2][1] - a[0][1] * a[2][2], a[0][1] * a[1][2] - a[0][2] * a[1][1]],
        [a[1][2] * a[2][0] - a[1][0] * a[2][2], a[0][0] * a[2][2] - a[0][2] * a[2][0], a[0][2] * a[1][0] - a[0][0] * a[1][2]],
        [a[1][0] * a[2][1] - a[1][1] * a[2][0], a[0][1] * a[2][0] - a[0][0] * a[2][1], a[0][0] * a[1][1] - a[0][1] * a[1][0]],
    ]


def inverse3(g: np.ndarray) -> np.ndarray:
    """Inverse of a 3x3 matrix by the adjugate formula."""
    adj = np.array(_cofactors(g), float)
    det = float(g[0, 0] * adj[0, 0] + g[0, 1] * adj[1, 0] + g[0, 2] * adj[2, 0])
    if abs(det) < DET_FLOOR:
        raise SingularMetricError(f"metric determinant {det:.3e} below {DET_FLOOR}")
    return adj / det


def _inverse_jet(g: Jet3) -> Jet3:
    a = [[g[i, j] for j in range(3)] for i in range(3)]
    adj = _cofactors(a)
    det = a[0][0] * adj[0][0] + a[0][1] * adj[1][0] + a[0][2] * adj[2][0]
    if abs(float(det.value)) < DET_FLOOR:
        raise SingularMetricError(f"metric determinant {float(det.value):.3e} below {DET_FLOOR}")
    inv_det = det.reciprocal()
    return stack([stack([adj[i][j] * inv_det for j in range(3)]) for i in range(3)])


# --------------------------------------------------------------------------
# curvature pipeline

def christoffel_jet(g: Jet3, ginv: Jet3) -> Jet3:
    dg = g.grad()  # dg[l, i, j] = d_l g_ij
    a = jtrace_einsum("ijl->ijl", dg) + jtrace_einsum("jil->ijl", dg) - jtrace_einsum("lij->ijl", dg)
    return jeinsum("kl,ijl->kij", ginv, a) * 0.5


def riemann_jet(gamma: Jet3) -> Jet3:
    dgam = gamma.grad()  # dgam[i, l, j, k] = d_i Gamma^l_jk
    return (
        jtrace_einsum("iljk->lijk", dgam)
        - jtrace_einsum("jlik->lijk", dgam)
        + jeinsum("lim,mjk->lijk", gamma, gamma)
        - jeinsum("ljm,mik->lijk", gamma, gamma)
    )


@dataclass(frozen=True)
class PointGeometry:
    """Metric and curvature data at one point, plus the jets they came from."""

    point: tuple[float, float, float]
    g: np.ndarray
    ginv: np.ndarray
    gamma: np.ndarray
    R: np.ndarray
    Rlow: np.ndarray
    S: np.ndarray
    Q: np.ndarray
    r: float
    g_jet: Jet3 = field(repr=False)
    ginv_jet: Jet3 = field(repr=False)
    gamma_jet: Jet3 = field(repr=False)


@functools.lru_cache(maxsize=4096)
def _point_geometry(m: MetricField, p: tuple[float, float, float]) -> PointGeometry:
    gj = m.jet(p, 3)
    ginvj = _inverse_jet(gj)
    gamj = christoffel_jet(gj, ginvj)
    R = riemann_jet(gamj).value
    g = gj.value
    ginv = ginvj.value
    Rlow = np.einsum("lm,mijk->ijkl", g, R)
    S = np.einsum("iijk->jk", R)
    Q = ginv @ S
    r = float(np.trace(Q))
    return PointGeometry(p, g, ginv, gamj.value, R, Rlow, S, Q, r, gj, ginvj, gamj)


def point_geometry(m: MetricField, p) -> PointGeometry:
    return _point_geometry(m, tuple(float(v) for v in p))


def clear_geometry_cache() -> None:
    _point_geometry.cache_clear()


def christoffel(m: MetricField, p) -> TensorValue:
    pg = point_geometry(m, p)
    return TensorValue(pg.point, ("u", "d", "d"), pg.gamma, pg.g)


def riemann(m: MetricField, p) -> tuple[TensorValue, TensorValue]:
    """The (1,3) curvature tensor and its fully lowered (0,4) form."""
    pg = point_geometry(m, p)
    return (
        TensorValue(pg.point, ("u", "d", "d", "d"), pg.R, pg.g),
        TensorValue(pg.point, ("d", "d", "d", "d"), pg.Rlow, pg.g),
    )


def ricci_scalar(m: MetricField, p) -> tuple[TensorValue, float]:
    pg = point_geometry(m, p)
    return TensorValue(pg.point, ("d", "d"), pg.S, pg.g), pg.r


def covariant_derivative(
    field_fn: Callable[[np.ndarray], np.ndarray],
    variance: Sequence[str],
    p,
    m: MetricField,
    step: float = FD_STEP,
) -> TensorValue:
    """``(nabla T)[i, ...] = nabla_i T`` with partials by central differences.

    ``field_fn`` maps a point to the component array of the field there.
    """
    p = np.asarray(p, float)
    variance = tuple(variance)
    base = np.asarray(field_fn(p), float)
    partials = []
    for i in range(3):
        e = np.zeros(3)
        e[i] = step
        try:
            plus, minus = field_fn(p + e), field_fn(p - e)
        except ValueError as exc:
            raise ValueError(f"field evaluation failed on the stencil around {p.tolist()}: {exc}") from exc
        partials.append((np.asarray(plus) - np.asarray(minus)) / (2 * step))
    out = np.array(partials)
    gamma = point_geometry(m, p).gamma
    rank = len(variance)
    letters = _letters(rank)
    for slot, kind in enumerate(variance):
        src = letters[:slot] + "z" + letters[slot + 1:]
        if kind == "u":
            out = out + np.einsum(f"{letters[slot]}yz,{src}->y{letters}", gamma, base)
        else:
            out = out - np.einsum(f"zy{letters[slot]},{src}->y{letters}", gamma, base)
    pg = point_geometry(m, p)
    return TensorValue(pg.point, ("d",) + variance, out, pg.g)
