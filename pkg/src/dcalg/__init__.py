"""Exact computations with quivers with relations: algebras, resolutions, A-infinity
minimal models, Koszul duals, derived quotients and Ginzburg dgas."""

from .quiver import Arrow, Polynomial, PresentationError, WeightedQuiverPresentation
from .algebra import (AlgebraElement, TruncatedAlgebra, WeightOverflow, build_truncated_algebra,
                      certify_finite, corner_algebra, multiply, normal_form, quotient_by_idempotent_ideal)
from .dsl import DslError, InputDocument, parse, to_text
from .chain import (BlockContraction, ComplexError, ProjectiveComplex, cohomology, end_dga, ext_table,
                    resolve_simple, verify_complex)
from .ainfty import (AInfinityStructure, check_stasheff, massey_product, transfer_minimal_model)
from .koszul import (FreeDga, FreeDgaPresentation, Generator, KoszulError, bar_construction,
                     cobar_construction, double_dual_check, free_dga_cohomology, koszul_dual)
from .derived_quotient import (DerivedQuotientError, derived_contraction_algebra, dq_cohomology,
                               drinfeld_model, eta_periodicity_check, marked_relations, relative_tor_dims)
from .ginzburg import (Superpotential, contraction_subquiver, cyclic_derivative, ginzburg_dga,
                       jacobi_algebra, match_presentations)

__version__ = "0.1.0"
