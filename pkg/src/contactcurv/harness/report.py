"""Deterministic JSON and text rendering of harness reports.

JSON keeps insertion order (the field order is part of the format) and
carries ``schema: 1``; non-finite numbers are written as strings so the
output stays strict JSON.
"""

from __future__ import annotations

import json

import numpy as np

from .. import __version__
from ..contact import CheckResult

__all__ = ["ENGINE", "SCHEMA", "num", "point", "check_dict", "to_json", "to_text"]

ENGINE = f"contactcurv {__version__}"
SCHEMA = 1


def num(v):
    if v is None:
        return None
    v = float(v)
    if np.isfinite(v):
        return v
    return "inf" if v > 0 else ("-inf" if v < 0 else "nan")


def point(p):
    return None if p is None else [float(v) for v in p]


def check_dict(c: CheckResult) -> dict:
    return {
        "name": c.name,
        "max_residual": num(c.max_residual),
        "tolerance": num(c.tolerance),
        "bound": "lower" if c.lower_bound else "upper",
        "passed": c.passed,
        "worst_point": point(c.worst_point) if not c.passed else None,
    }


def to_json(report: dict) -> str:
    return json.dumps(report, indent=2, allow_nan=False) + "\n"


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if v is None:
        return "-"
    return f"{v:.3e}"


def _checks_text(checks, indent="  ") -> list[str]:
    lines = []
    for c in checks:
        mark = "PASS" if c["passed"] else "FAIL"
        rel = ">" if c.get("bound") == "lower" else "<"
        line = f"{indent}{mark} {c['name']:<34} {_fmt(c['max_residual']):>10} (need {rel} {_fmt(c['tolerance'])})"
        if c.get("worst_point") is not None:
            line += " at (" + ", ".join(f"{x:.6g}" for x in c["worst_point"]) + ")"
        lines.append(line)
    return lines


def _classification_text(rows, indent="  ") -> list[str]:
    lines = []
    for c in rows:
        flag = "satisfied" if c["satisfied"] else "not satisfied"
        line = f"{indent}{c['preset']:<13} {c['condition']}  {flag:<13} res {_fmt(c['max_residual'])}  {c['verdict']}"
        if c.get("contradiction"):
            line += "  [contradiction]"
        lines.append(line)
    return lines


def _entry_text(e: dict) -> list[str]:
    head = f"{e['manifold']}: {'PASS' if e['passed'] else 'FAIL'}  ({e['points']} points, seed {e['seed']}"
    if e.get("rescale", 1.0) != 1.0:
        head += f", rescaled by {e['rescale']:g}"
    head += ")"
    lines = [head]
    kr = e.get("kappa_range")
    if kr:
        line = f"  kappa in [{kr[0]:.6g}, {kr[1]:.6g}]"
        if e.get("mu_range"):
            line += f", mu in [{e['mu_range'][0]:.6g}, {e['mu_range'][1]:.6g}]"
        elif e.get("sasakian"):
            line += ", Sasakian (mu undefined)"
        lines.append(line)
    lines += _checks_text(e.get("checks", []))
    if e.get("classification"):
        lines.append("  classification:")
        lines += _classification_text(e["classification"], "    ")
    for f in e.get("findings", []):
        lines.append(f"  finding: {f}")
    return lines


def to_text(report: dict) -> str:
    lines = [f"{report.get('engine', ENGINE)}  schema {report.get('schema', SCHEMA)}"]
    kind = report.get("kind")
    if kind == "gallery":
        for e in report["entries"]:
            lines += _entry_text(e)
        lines.append(f"gallery: {'PASS' if report['passed'] else 'FAIL'}")
    elif kind == "model":
        lines.append(f"model suite: {report['draws']} draws, seed {report['seed']}")
        for cond, rels in report["fits"].items():
            for rel, f in rels.items():
                lines.append(
                    f"  fit {cond}/{rel}: c = {f['c']:.12g}, max residual {f['max_residual']:.3e}, "
                    f"zero-set mismatches {f['zero_set_mismatches']}"
                )
        lines += _checks_text(report["checks"])
        lines.append(f"model: {'PASS' if report['passed'] else 'FAIL'}")
    elif kind == "classify":
        c = report["classification"]
        lines.append(
            f"{report['manifold']}: {report['preset']} {report['condition']}: {'PASS' if report['passed'] else 'FAIL'}"
            f"  ({report['points']} points, seed {report['seed']})"
        )
        lines += _checks_text(report["checks"])
        if c is not None:
            lines += _classification_text([c])
            lines.append(f"  relation (derived) pi, rho, sigma = {c['relation_derived']}")
            lines.append(f"  relation (printed) pi, rho, sigma = {c['relation_printed']}")
            if c["theorem_counterexample"]:
                lines.append("  finding: satisfied with nonconstant kappa (theorem conclusion fails)")
    else:
        lines += _entry_text(report)
    return "\n".join(lines) + "\n"
