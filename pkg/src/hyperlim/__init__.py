"""Finite-scale hypergraph limit computations.

Exact homomorphism counting and densities for k-uniform hypergraphs
(k <= 4), step hypergraphons with exact and Monte-Carlo density
integrals, W-random sampling, hyperpartition/regularity diagnostics, and
removal experiments. Counts and densities on finite objects are exact
rationals; hypergraphon values are floats.
"""

from .core import (
    BudgetError,
    FormatError,
    MAX_ARITY,
    SubsetIndexing,
    SymmetricTupleView,
    UniformHypergraph,
    complete_hypergraph,
    edge_density,
    parse_hypergraph,
    serialize_hypergraph,
    simplicial_support,
    subset_indexing,
    symmetric_membership,
)
from .homomorphism import (
    HomCount,
    HomImageSet,
    disjoint_union,
    enumerate_hom_images,
    hom_count,
    hom_count_brute,
    hom_density,
)
from .hypergraphon import (
    DensityEstimate,
    INDICATOR,
    LatentSample,
    PROJECTED,
    StepHypergraphon,
    constant_hypergraphon,
    exact_density,
    exact_density_grouped,
    mc_density,
    parse_hypergraphon,
    parse_latents,
    project,
    sample_w_random,
    serialize_hypergraphon,
    serialize_latents,
)
from .regularity import (
    CylinderIntersection,
    DEFAULT_DENSITY_GRID,
    Hyperpartition,
    IndependenceResult,
    RegularityReport,
    cell_approximation,
    cell_counts,
    cell_density,
    cell_profile,
    check_regularity_family,
    check_regularity_sampled,
    cylinder_membership,
    equitability,
    extract_step_hypergraphon,
    independence_test,
    induce_cells,
    latent_hyperpartition,
    parse_hyperpartition,
    random_hyperpartition,
    regularity_deviation,
    sampled_cylinder_family,
    serialize_hyperpartition,
)
from .removal import (
    RemovalResult,
    exact_hitting_set,
    greedy_hitting_set,
    removal_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetError",
    "CylinderIntersection",
    "DEFAULT_DENSITY_GRID",
    "DensityEstimate",
    "FormatError",
    "HomCount",
    "HomImageSet",
    "Hyperpartition",
    "INDICATOR",
    "IndependenceResult",
    "LatentSample",
    "MAX_ARITY",
    "PROJECTED",
    "RegularityReport",
    "RemovalResult",
    "StepHypergraphon",
    "SubsetIndexing",
    "SymmetricTupleView",
    "UniformHypergraph",
    "cell_approximation",
    "cell_counts",
    "cell_density",
    "cell_profile",
    "check_regularity_family",
    "check_regularity_sampled",
    "complete_hypergraph",
    "constant_hypergraphon",
    "cylinder_membership",
    "disjoint_union",
    "edge_density",
    "enumerate_hom_images",
    "equitability",
    "exact_density",
    "exact_density_grouped",
    "exact_hitting_set",
    "extract_step_hypergraphon",
    "greedy_hitting_set",
    "hom_count",
    "hom_count_brute",
    "hom_density",
    "independence_test",
    "induce_cells",
    "latent_hyperpartition",
    "mc_density",
    "parse_hypergraph",
    "parse_hypergraphon",
    "parse_hyperpartition",
    "parse_latents",
    "project",
    "random_hyperpartition",
    "regularity_deviation",
    "removal_experiment",
    "sample_w_random",
    "sampled_cylinder_family",
    "serialize_hypergraph",
    "serialize_hypergraphon",
    "serialize_hyperpartition",
    "serialize_latents",
    "simplicial_support",
    "subset_indexing",
    "symmetric_membership",
]
