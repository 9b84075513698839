"""Exact intersection theory for small-diagonal decompositions of hypersurfaces
and Calabi-Yau complete intersections."""
from __future__ import annotations

from .chern import BundleSpec, compute_q
from .decomp import cy_pipeline, hyp_pipeline
from .ring import Rational, TruncPoly, make_ring
from .schubert import GrassCtx, compute_p, fano

__all__ = [
    "BundleSpec",
    "GrassCtx",
    "Rational",
    "TruncPoly",
    "compute_p",
    "compute_q",
    "cy_pipeline",
    "fano",
    "hyp_pipeline",
    "make_ring",
]

__version__ = "0.1.0"
