"""Manifold manifests: TOML files describing (g, eta) on a coordinate box.

    name = "heisenberg"
    [metric]            # upper triangle; missing off-diagonal entries are 0
    xx = "1/4 + y^2/4"
    ...
    [eta]
    x = "-y/2"
    y = "0"
    z = "1/2"
    [domain]
    x = [-1.0, 1.0]
    y = [-1.0, 1.0]
    z = [-1.0, 1.0]
    exclude = ["z"]     # loci f = 0 kept away from sample points
    [expected]
    properties = ["sasakian"]
    [tolerance]
    axioms = 1e-6

A structure whose phi squares to -c^2 (I - eta x xi) with c != 1 is
rescaled on load (g -> c^2 g, eta -> c eta) and the factor is recorded.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from ..contact import ContactManifold, DegenerateFormError, structure_scale
from ..expr import BinOp, Num, ParseError, parse_expr
from ..geometry import Chart, MetricField

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

__all__ = ["Manifest", "ManifestError", "PROPERTIES", "load_manifest", "parse_manifest", "gallery_paths"]

PROPERTIES = ("sasakian", "flat", "generalized_kmu", "kmu_constant", "nonconstant_kmu")
_PAIRS = ("xx", "xy", "xz", "yy", "yz", "zz")
_AXES = ("x", "y", "z")


class ManifestError(ValueError):
    pass


@dataclass(frozen=True)
class Manifest:
    manifold: ContactManifold
    expected: tuple[str, ...] = ()
    rescale: float = 1.0
    source: str = ""
    tolerance: dict = field(default_factory=dict)

    @property
    def name(self) -> str:
        return self.manifold.name


def _expr(text, where: str):
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        text = repr(float(text))
    if not isinstance(text, str):
        raise ManifestError(f"{where}: expected an expression string, got {type(text).__name__}")
    try:
        return parse_expr(text)
    except ParseError as exc:
        raise ManifestError(f"{where}: {exc}") from exc


def _section(data: dict, key: str, where: str) -> dict:
    if key not in data:
        raise ManifestError(f"{where}: missing [{key}] section")
    if not isinstance(data[key], dict):
        raise ManifestError(f"{where}: [{key}] must be a table")
    return data[key]


def _scaled(e, factor: float):
    return e if factor == 1.0 else BinOp("*", Num(factor), e)


def parse_manifest(data: dict, source: str = "<manifest>") -> Manifest:
    if "name" not in data or not isinstance(data["name"], str) or not data["name"]:
        raise ManifestError(f"{source}: missing manifold name")
    name = data["name"]
    metric = _section(data, "metric", source)
    eta_tab = _section(data, "eta", source)
    domain = _section(data, "domain", source)

    comps = {}
    for key in ("xx", "yy", "zz"):
        if key not in metric:
            raise ManifestError(f"{source}: metric component {key} missing")
    for key, text in metric.items():
        k = key if key in _PAIRS else key[::-1]
        if k not in _PAIRS:
            raise ManifestError(f"{source}: unknown metric component {key!r}")
        if k in comps:
            raise ManifestError(f"{source}: metric component {k} given twice")
        comps[k] = _expr(text, f"{source}: metric.{key}")
    zero = Num(0.0)
    rows = [[None] * 3 for _ in range(3)]
    for i, a in enumerate(_AXES):
        for j, b in enumerate(_AXES):
            k = a + b if i <= j else b + a
            rows[i][j] = comps.get(k, zero)

    eta = []
    for a in _AXES:
        if a not in eta_tab:
            raise ManifestError(f"{source}: eta component {a} missing")
        eta.append(_expr(eta_tab[a], f"{source}: eta.{a}"))

    box = []
    for a in _AXES:
        iv = domain.get(a)
        if not (isinstance(iv, list) and len(iv) == 2 and all(isinstance(v, (int, float)) for v in iv)):
            raise ManifestError(f"{source}: domain.{a} must be a [lo, hi] pair")
        lo, hi = float(iv[0]), float(iv[1])
        if not lo < hi:
            raise ManifestError(f"{source}: domain.{a} = [{lo}, {hi}] is empty or degenerate")
        box.append((lo, hi))
    exclude = tuple(_expr(t, f"{source}: domain.exclude[{i}]") for i, t in enumerate(domain.get("exclude", [])))

    expected = tuple(data.get("expected", {}).get("properties", []))
    for p in expected:
        if p not in PROPERTIES:
            raise ManifestError(f"{source}: unknown expected property {p!r}")
    tolerance = {k: float(v) for k, v in data.get("tolerance", {}).items()}

    chart = Chart(name, tuple(box), exclude)
    M = ContactManifold(name, chart, MetricField(tuple(tuple(r) for r in rows)), tuple(eta), tolerance)
    center = tuple(float(v) for v in (chart.lower + chart.upper) / 2)
    try:
        if not M.metric.is_positive_definite(center):
            raise ManifestError(f"{source}: metric is not positive definite at the domain centre {center}")
        c = structure_scale(M, center)
    except (DegenerateFormError, ValueError) as exc:
        if isinstance(exc, ManifestError):
            raise
        raise ManifestError(f"{source}: structure cannot be evaluated at the domain centre: {exc}") from exc
    factor = 1.0
    if abs(c - 1.0) > 1e-9:
        factor = c
        rows = [[_scaled(e, c * c) for e in row] for row in rows]
        eta = [_scaled(e, c) for e in eta]
        M = ContactManifold(name, chart, MetricField(tuple(tuple(r) for r in rows)), tuple(eta), tolerance)
    return Manifest(M, expected, factor, source, tolerance)


def load_manifest(path) -> Manifest:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ManifestError(f"cannot read {path}: {exc}") from exc
    try:
        data = tomllib.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, tomllib.TOMLDecodeError) as exc:
        raise ManifestError(f"{path}: {exc}") from exc
    return parse_manifest(data, str(path.name))


def gallery_paths() -> list[Path]:
    root = resources.files("contactcurv.harness").joinpath("gallery")
    return sorted(Path(str(p)) for p in root.iterdir() if p.name.endswith(".toml"))


def point_array(points) -> np.ndarray:
    return np.asarray(points, float).reshape(-1, 3)
