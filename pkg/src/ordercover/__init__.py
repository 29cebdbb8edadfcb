"""Order-systems covering ternary order constraints, tight extremal
sequences, exact small-case minimisation, and triplet-covering tree sets."""

from .core import (
    ALL_PATTERNS,
    BETWEEN,
    MIDDLE_CLASSES,
    NONBETWEEN,
    Ordering,
    OrderSystem,
    VerificationReport,
    between_satisfies,
    middle_class_deficiency,
    nonbetween_satisfies,
    parse_patterns,
    pattern_satisfies,
    pattern_words,
    relabel_system,
    relative_order,
    restrict_ordering,
    restrict_system,
    reverse,
    verify_system,
)
from .sequences import (
    CapacityError,
    GuaranteeCheckReport,
    MonotoneSubsequence,
    PointSequence,
    build_tight_sequence,
    es_guarantee_check,
    has_monotone_of_length,
    longest_monotone_subsequence,
    random_permutation_grid,
)
from .constructions import (
    BoundPair,
    bet_bounds,
    construct_bet_system,
    construct_etp_system,
    construct_nbet_system,
    etp_bounds,
    nbet_exact,
    phylo_bounds,
)
from .search import (
    SearchResult,
    SmallValuesTable,
    min_system_size,
    minimal_size_table,
    verify_reference_witnesses,
)
from .phylo import (
    CATERPILLAR_PATTERNS,
    NewickParseError,
    TreeNode,
    TreeSet,
    caterpillar_from_ordering,
    construct_ept_set,
    is_consistent,
    leaf,
    leaf_labels,
    leaf_order,
    nbet_from_trees,
    newick_parse,
    newick_serialize,
    node,
    parse_tree_set,
    serialize_tree_set,
    verify_ept,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
