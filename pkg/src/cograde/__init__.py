"""Change-of-grading functors, graded Hom/Ext and homological dimensions over prime fields."""

from ._kernels import USING_NUMBA
from .abgroups import DimValue, FgAbGroup, GroupMorphism
from .cog import RegradeContext, pull, push
from .complexes import Complex, check_dualizing
from .graded import GradedAlgebra, GradedMap, GradedModule
from .homalg import ext, ext_enriched, hom_graded, injdim, projdim
from .linalg import Field

__version__ = "0.1.0"

__all__ = [
    "USING_NUMBA",
    "DimValue",
    "FgAbGroup",
    "GroupMorphism",
    "RegradeContext",
    "push",
    "pull",
    "Complex",
    "check_dualizing",
    "GradedAlgebra",
    "GradedMap",
    "GradedModule",
    "ext",
    "ext_enriched",
    "hom_graded",
    "injdim",
    "projdim",
    "Field",
]
