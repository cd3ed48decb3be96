"""Combinatorial flow categories for Khovanov and grid homology."""
from ._core import BACKEND
from .complexes import (
    ComplexError,
    GradedChainComplex,
    HomologyTable,
    homology,
    homology_gf2,
    smith_normal_form,
    verify_d_squared,
)

__version__ = "0.1.0"
