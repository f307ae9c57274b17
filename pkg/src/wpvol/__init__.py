"""Exact Weil-Petersson volumes and super volumes over Q[pi^2].

Volumes come from recursions solved by inverting complex-shift operators,
so every coefficient is an exact rational multiple of a power of pi^2.
"""
from .checks import CheckResult, NotApplicable
from .poly import MultiPoly, SparsePoly
from .recursion import (
    ENGINE_VERSION,
    UnstableError,
    VolumeKey,
    VolumeTable,
    compute_super_volume,
    compute_volume,
    is_stable,
)
from .render import render_latex, render_text
from .ring import PI2, RingElem

__version__ = "0.1.0"

__all__ = [
    "CheckResult",
    "NotApplicable",
    "MultiPoly",
    "SparsePoly",
    "ENGINE_VERSION",
    "UnstableError",
    "VolumeKey",
    "VolumeTable",
    "compute_volume",
    "compute_super_volume",
    "is_stable",
    "render_text",
    "render_latex",
    "PI2",
    "RingElem",
]
