"""Deterministic low-discrepancy sample points inside a chart."""

from __future__ import annotations

import numpy as np
from scipy.stats import qmc

from ..geometry import Chart

__all__ = ["DEFAULT_POINTS", "DEFAULT_SEED", "LOCUS_MARGIN", "sample_points", "DomainTooThinError"]

DEFAULT_POINTS = 50
DEFAULT_SEED = 0x5EED
LOCUS_MARGIN = 1e-3
_BATCH = 64
_MAX_CANDIDATES = 200_000


class DomainTooThinError(ValueError):
    pass


def sample_points(
    chart: Chart, n: int = DEFAULT_POINTS, seed: int = DEFAULT_SEED, max_candidates: int = _MAX_CANDIDATES
) -> list[tuple[float, float, float]]:
    """First ``n`` points of a scrambled Halton sequence in the box that keep clear of excluded loci."""
    if n < 1:
        raise ValueError("need at least one sample point")
    halton = qmc.Halton(d=3, scramble=True, seed=seed)
    lo, hi = chart.lower, chart.upper
    out: list[tuple[float, float, float]] = []
    drawn = 0
    while len(out) < n:
        if drawn >= max_candidates:
            raise DomainTooThinError(
                f"only {len(out)} of {n} points placed after {drawn} candidates in chart {chart.name!r}"
            )
        batch = qmc.scale(halton.random(_BATCH), lo, hi)
        drawn += _BATCH
        for p in batch:
            if chart.locus_distance(p) >= LOCUS_MARGIN:
                out.append(tuple(float(v) for v in p))
                if len(out) == n:
                    break
    return out
