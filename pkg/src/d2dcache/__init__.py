"""Optimal one-shot D2D coded caching with uncoded placement.

Bit-exact simulation of the leader-pruned XOR delivery scheme, exact load
formulas, and the permutation-based converse machinery.
"""

from .analysis import (
    LoadPoint,
    average_load,
    ji_d2d_load,
    load_at_memory,
    memory_load_curve,
    per_demand_load,
    shared_link_load,
    worst_case_load,
)
from .combinatorics import binom, compositions_of_demands, lower_convex_envelope
from .converse import (
    accumulate_coefficients,
    average_converse,
    b_t_coefficient,
    lemma1_bound,
    prune_permutation,
    r_t_s,
    worst_case_converse,
)
from .demand import (
    composition_of,
    n_distinct,
    n_distinct_excluding,
    select_leaders,
    type_cardinality,
    worst_case_demand,
)
from .scheme import (
    SystemParams,
    decode_user,
    encode_user,
    man_placement,
    measure_load,
    simulate,
    split_subpieces,
)

__version__ = "0.1.0"
