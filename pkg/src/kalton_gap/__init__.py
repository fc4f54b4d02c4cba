"""Exact Chebyshev distances from set functions to finitely-additive measures,
and finite-m lower bounds on Kalton's constant."""

from .additivity import (DefectReport, additivity_defect, modularity_defect,
                         shift_to_additive, weak_modularity_defect)
from .bounds import BoundRow, bounds_table
from .core import (BlockStructure, GroundSet, Measure, SetFunction, SymmetricSetFunction,
                   expand, profile_of, symmetrize)
from .family import (CandidateMatrix, FamilyParams, closed_form_xj, instantiate_matrix,
                     lower_bound_a, make_fkn, matrix_is_one_additive)
from .projection import (DistanceCertificate, SolveOptions, chebyshev_distance,
                         fkn_separation_oracle, symmetric_distance, verify_certificate)
from .search import SearchConfig, SearchResult, canonical_sign, enumerate_candidates, run_search

__version__ = "0.1.0"
