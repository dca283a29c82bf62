"""Manifests, the built-in gallery, sampling, classification runs and reports."""

from .manifest import Manifest, ManifestError, gallery_paths, load_manifest, parse_manifest
from .runner import (
    ClassificationResult,
    EntryReport,
    GalleryReport,
    check_manifest,
    classify_manifold,
    condition_residual,
    run_gallery,
)
from .sampling import DomainTooThinError, sample_points

__all__ = [
    "Manifest",
    "ManifestError",
    "gallery_paths",
    "load_manifest",
    "parse_manifest",
    "ClassificationResult",
    "EntryReport",
    "GalleryReport",
    "check_manifest",
    "classify_manifold",
    "condition_residual",
    "run_gallery",
    "DomainTooThinError",
    "sample_points",
]
