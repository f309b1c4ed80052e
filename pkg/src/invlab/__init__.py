"""Inversions in simply generated labelled trees: exact counts, limit laws, sampling."""

from .enumeration import LabelledTree, count_inversions, enumerate_trees
from .errors import BudgetError, FamilyError, InvlabError, NotAdmissibleError, RejectionCapError
from .family import DegreeWeightSequence, FamilyConstants, builtin, resolve, solve_constants
from .invpoly import InvPolynomial, MomentTable, global_moments, inversion_polynomial, inversion_polynomials
from .limitlaws import airy_moments, rayleigh_moment, ygamma_pmf
from .localdist import Pmf, local_distribution, local_factorial_moment
from .sampler import RngStream, SampleSummary, monte_carlo_global, monte_carlo_local, sample_tree

__version__ = "0.1.0"

__all__ = [
    "LabelledTree", "count_inversions", "enumerate_trees",
    "BudgetError", "FamilyError", "InvlabError", "NotAdmissibleError", "RejectionCapError",
    "DegreeWeightSequence", "FamilyConstants", "builtin", "resolve", "solve_constants",
    "InvPolynomial", "MomentTable", "global_moments", "inversion_polynomial", "inversion_polynomials",
    "airy_moments", "rayleigh_moment", "ygamma_pmf",
    "Pmf", "local_distribution", "local_factorial_moment",
    "RngStream", "SampleSummary", "monte_carlo_global", "monte_carlo_local", "sample_tree",
]
