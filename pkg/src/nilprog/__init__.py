"""Exact arithmetic for polynomial sequences in nilpotent groups and the torus nilsystems built from them."""
from .binomial import (BinomialPoly, binom, binomial_product_expand, evaluate,
                       monomial_to_binomial)
from .config import SuiteConfig
from .errors import (ClosedFormMismatch, CommutationUnsafe, ConfigInvalid, DepthExceeded,
                     DimensionOverflow, DomainViolation, NilprogError, SpecMismatch,
                     ValidationMismatch, WeightViolation)
from .hallpetresco import (HPSequence, MultiIndexExpansion, dark_expand, grid_expand, hp_commutator,
                           hp_eval, hp_extract, hp_inverse, hp_level, hp_mul, lattice_decompose,
                           power_decompose)
from .nilgroup import (FreeNilpotent, GroupElement, NilGroupSpec, Unitriangular, commutator,
                       hall_basis, inverse, mul, nested_commutator, power, root, unitriangular,
                       weight)
from .nilsystem import (OccupancyReport, TorusMap, TorusSystem, check_intertwining,
                        example_group_mul, factor_project, iterate_closed_form, occupancy,
                        progression_orbit)
from .spans import SpanCheck, filtration_span_check
from .suites import SuiteReport, explain, run_suite
from .torus import TorusWord, torus_equal

__version__ = "0.1.0"
