"""Command-line entry point: ``contactcurv check|classify|gallery|model|report``.

Exit codes: 0 when every check passes, 1 when a check fails, 2 for input
errors (unreadable or malformed manifests, bad arguments).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from ..algmodel import SEED as MODEL_SEED
from ..contact import CheckResult, DegenerateFormError, check_axioms
from ..curvzoo import PRESET_NAMES, CurvaturePreset
from ..expr import DomainError
from ..geometry import SingularMetricError
from .manifest import ManifestError, load_manifest
from .modelsuite import run_model_suite
from .report import ENGINE, SCHEMA, check_dict, to_json, to_text
from .runner import CONDITION_NAMES, check_manifest, classify_manifold, run_gallery, survey
from .sampling import DEFAULT_POINTS, DEFAULT_SEED, DomainTooThinError, sample_points

__all__ = ["main", "build_parser"]

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
CERTIFICATE_TOL = 1e-6


class InputError(Exception):
    pass


def _positive_int(text: str) -> int:
    v = int(text, 0)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _seed(text: str) -> int:
    return int(text, 0)  # accepts 0x5EED


def _abc(text: str) -> CurvaturePreset:
    try:
        a, b, c = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected three comma-separated numbers alpha,beta,gamma") from None
    return CurvaturePreset.explicit(a, b, c)


def build_parser() -> argparse.ArgumentParser:
    out = argparse.ArgumentParser(add_help=False)
    out.add_argument("--format", choices=("text", "json"), default="text")
    out.add_argument("--output", "-o", type=Path, help="write the report here instead of stdout")

    sampling = argparse.ArgumentParser(add_help=False)
    sampling.add_argument("--points", type=_positive_int, default=DEFAULT_POINTS)
    sampling.add_argument("--seed", type=_seed, default=DEFAULT_SEED)

    p = argparse.ArgumentParser(prog="contactcurv", description="Curvature checks on 3-dimensional contact metric manifolds.")
    p.add_argument("--version", action="version", version=ENGINE)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[out, sampling], help="axioms and structure identities for one manifest")
    c.add_argument("manifest", type=Path)
    c.add_argument("--tol", type=float, default=None, help="axiom tolerance (default from manifest, else 1e-6)")

    c = sub.add_parser("classify", parents=[out, sampling], help="one (preset, condition) classification run")
    c.add_argument("manifest", type=Path)
    g = c.add_mutually_exclusive_group(required=True)
    g.add_argument("--preset", choices=PRESET_NAMES)
    g.add_argument("--abc", type=_abc, metavar="ALPHA,BETA,GAMMA")
    c.add_argument("--condition", required=True, type=str.lower, choices=CONDITION_NAMES)

    c = sub.add_parser("gallery", parents=[out, sampling], help="run every built-in manifest")
    c.add_argument("--filter", dest="name_filter", default=None)
    c.add_argument("--no-classify", dest="classify", action="store_false")

    c = sub.add_parser("model", parents=[out], help="scalar-collapse and closed-form suites on the algebraic model")
    c.add_argument("--draws", type=_positive_int, default=1000)
    c.add_argument("--seed", type=_seed, default=MODEL_SEED)

    c = sub.add_parser("report", parents=[sampling], help="full gallery report, or re-render a saved JSON report")
    c.add_argument("input", nargs="?", type=Path, help="saved JSON report to render")
    c.add_argument("--format", choices=("text", "json"), default="json")
    c.add_argument("--output", "-o", type=Path)
    return p


def _load(path: Path):
    try:
        return load_manifest(path)
    except ManifestError as exc:
        raise InputError(str(exc)) from exc


def _cmd_check(args) -> dict:
    m = _load(args.manifest)
    rep = check_manifest(m, args.points, args.seed, args.tol, identities=True)
    return {"schema": SCHEMA, "engine": ENGINE, "kind": "check", **rep.as_dict()}


def _cmd_classify(args) -> dict:
    m = _load(args.manifest)
    M = m.manifold
    preset = CurvaturePreset.named(args.preset) if args.preset else args.abc
    points = sample_points(M.chart, args.points, args.seed)
    axioms = check_axioms(M, points, M.tol("axioms", 1e-6), M.tol("fd", 1e-4))
    checks = list(axioms.checks)
    result = None
    if axioms.passed:
        sv = survey(M, points)
        i = int(np.argmax(sv.certificate))
        cert = CheckResult("kmu_certificate", float(sv.certificate[i]), CERTIFICATE_TOL, sv.points[i])
        checks.append(cert)
        if cert.passed:
            result = classify_manifold(M, preset, args.condition, points, sv)
    passed = all(c.passed for c in checks) and not (result and result.forbidden_derived)
    return {
        "schema": SCHEMA,
        "engine": ENGINE,
        "kind": "classify",
        "manifold": M.name,
        "seed": args.seed,
        "points": args.points,
        "preset": preset.label,
        "condition": args.condition,
        "passed": passed,
        "checks": [check_dict(c) for c in checks],
        "classification": None if result is None else result.as_dict(),
    }


def _cmd_gallery(args) -> dict:
    try:
        return run_gallery(args.name_filter, args.points, args.seed, classify=args.classify).as_dict()
    except ValueError as exc:
        if args.name_filter and "no gallery entry" in str(exc):
            raise InputError(str(exc)) from exc
        raise


def _cmd_model(args) -> dict:
    return run_model_suite(args.draws, args.seed).as_dict()


def _cmd_report(args) -> dict:
    if args.input is None:
        return run_gallery(None, args.points, args.seed).as_dict()
    try:
        data = json.loads(args.input.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read report {args.input}: {exc}") from exc
    if not isinstance(data, dict) or data.get("schema") != SCHEMA or "passed" not in data:
        raise InputError(f"{args.input}: not a schema {SCHEMA} report")
    return data


COMMANDS = {
    "check": _cmd_check,
    "classify": _cmd_classify,
    "gallery": _cmd_gallery,
    "model": _cmd_model,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        report = COMMANDS[args.command](args)
    except (InputError, DomainTooThinError) as exc:
        print(f"contactcurv: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (DomainError, DegenerateFormError, SingularMetricError) as exc:
        print(f"contactcurv: error: structure cannot be evaluated: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = to_json(report) if args.format == "json" else to_text(report)
    if args.output is not None:
        try:
            args.output.write_text(text)
        except OSError as exc:
            print(f"contactcurv: error: cannot write {args.output}: {exc}", file=sys.stderr)
            return EXIT_INPUT
    else:
        sys.stdout.write(text)
    return EXIT_OK if report["passed"] else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
