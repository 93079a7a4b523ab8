"""Sorting, selection and max-finding when comparisons carry known prices.

Each pair of elements has a public cost; learning its direction costs that
much.  Algorithms act on a :class:`ProbeState`, return their answer with a
certificate (the probed edges), and are scored by total probe cost.
"""

from pricedsort.boolean import (
    BooleanParams,
    boolean_find_max,
    boolean_selection,
    boolean_sort_repeated_max,
    standard_find_max,
    standard_find_min,
    standard_selection,
)
from pricedsort.bounds import BOUNDS, bound, expected_extensions, harmonic
from pricedsort.certificates import (
    Certificate,
    Maximal,
    MaximalSet,
    MaxTree,
    Rank,
    Sort,
    brute_force_min_certificate,
    min_rank_certificate_cost,
    min_sort_certificate_cost,
    verify_maximal,
    verify_maximal_set,
    verify_rank,
    verify_sort,
)
from pricedsort.errors import (
    ConfigError,
    ForbiddenComparisonError,
    InvalidCertificateError,
    ParameterError,
    SizeError,
)
from pricedsort.extensions import Poset, balanced_pair_sort, count_linear_extensions, precedence_counts
from pricedsort.instance import CostModel, CostVariant, Instance, RngStream, generate_instance
from pricedsort.oracle import ProbeState, Relation
from pricedsort.poset import exhaustive_maximal_set, poset_find_all_maximal, poset_find_maximal
from pricedsort.uniform import (
    UniformParams,
    uniform_find_max,
    uniform_rank_certificate,
    uniform_selection,
    uniform_sort,
)

__all__ = [name for name in dir() if not name.startswith("_")]
