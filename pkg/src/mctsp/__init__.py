"""Approximate Pareto curves for multi-criteria TSP variants.

The package pairs three tour-construction algorithms (tree doubling,
tree-plus-matching, cycle-cover patching) with exhaustive brute-force
oracles, so every guarantee formula can be checked empirically on small
instances with exact rational arithmetic.
"""

from .errors import (
    CapExceededError,
    FormulaDomainError,
    MalformedInputError,
    McTspError,
    ParameterError,
    SchemaError,
    StructuralError,
)
from .graph import (
    CycleCover,
    Instance,
    Matching,
    Multigraph,
    SpanningTree,
    Tour,
    WeightVector,
    euler_circuit,
    odd_vertices,
    shortcut_walk,
    total_weight,
    validate_tour,
)
from .pareto import (
    CoverageFactor,
    ParetoItem,
    ParetoSet,
    amplify,
    coverage_beta,
    dominates,
    filter_dominated,
    grid_select,
)
from .instances import (
    GenSpec,
    check_weight_ratio_bounds,
    generate,
    infer_gamma,
    instance_digest,
    read_instance,
    validate_gamma,
    write_instance,
)
from .oracles import (
    FFactorSpec,
    GadgetGraph,
    approx_oracle,
    gadget_matching_front,
    oracle_cycle_covers,
    oracle_matchings,
    oracle_spanning_trees,
    oracle_tours,
    tutte_reduce,
)
from .algorithms import (
    christofides_multi,
    cycle_cover_patch,
    patch_cover,
    tree_doubling,
)
from .analysis import (
    RatioModel,
    RatioReport,
    emit_curves,
    ratio_bound,
    run_experiment,
)

__version__ = "0.1.0"
