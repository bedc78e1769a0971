"""Numerical laboratory for f'' + A f = 0 on the unit disc.

The subpackages are layered: :mod:`geometry` and :mod:`jets` underneath,
:mod:`blaschke` and :mod:`ode` on top of them, then the closed forms in
:mod:`gallery`, the auxiliary field in :mod:`auxfield`, the diagnostics in
:mod:`measures` and the constructions in :mod:`interpolation`.
"""

from . import auxfield, blaschke, gallery, geometry, interpolation, jets, measures, ode, records
from ._kernels import backend
from .blaschke import FiniteBlaschke
from .gallery import get_entry, verify_entry
from .geometry import (
    DiscPoint, PathSpec, SampleGrid, build_avoiding_path, make_grid, mobius_involution,
    pseudo_hyperbolic,
)
from .jets import Analytic, Jet
from .ode import NumericalAbort, SolutionBasis, propagate_basis, reduction_basis, second_solution
from .records import AuditRow

__version__ = "0.1.0"

__all__ = [
    "Analytic", "AuditRow", "DiscPoint", "FiniteBlaschke", "Jet", "NumericalAbort", "PathSpec",
    "SampleGrid", "SolutionBasis", "auxfield", "backend", "blaschke", "build_avoiding_path",
    "gallery", "geometry", "get_entry", "interpolation", "jets", "make_grid", "measures",
    "mobius_involution", "ode", "propagate_basis", "pseudo_hyperbolic", "records",
    "reduction_basis", "second_solution", "verify_entry",
]
