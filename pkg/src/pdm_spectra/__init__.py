"""Bound-state spectra of one-dimensional heterostructures with a
position-dependent effective mass.

Two independent solvers are provided: poles of the reflection coefficient of
a step discretization (:mod:`pdm_spectra.multistep`) and roots of the exact
matching determinant built from closed-form inner solutions
(:mod:`pdm_spectra.analytic`).  Units are hbar^2 / (2 M0) = 1.
"""

from .analytic import det_x, solve_transcendental, wavefunction
from .closedform import isotonic_levels, poschl_teller_levels, singular_levels
from .errors import SpectraError
from .multistep import find_poles, scan
from .orderings import parse_ordering
from .profiles import build_model, discretize
from .tables import reproduce_table

__all__ = [
    "SpectraError",
    "build_model",
    "det_x",
    "discretize",
    "find_poles",
    "isotonic_levels",
    "parse_ordering",
    "poschl_teller_levels",
    "reproduce_table",
    "scan",
    "singular_levels",
    "solve_transcendental",
    "wavefunction",
]
