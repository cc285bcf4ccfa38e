"""Lagrangian subspaces, graph charts, spectral flow and the Maslov index in R^{2n}."""

from .charts import (
    ChartValue,
    ComplementaryPair,
    GapReport,
    GraphMap,
    chart,
    chart_inverse,
    gap_inequality_report,
    graph_map,
    is_transverse,
)
from .errors import (
    AdmissibilityError,
    ConvergenceError,
    FredlagError,
    InvalidInputError,
    NumericalError,
    TransversalityError,
)
from .maslov import (
    LagrangianPath,
    MaslovResult,
    PartitionCertificate,
    coherence_check,
    find_partition,
    generator_loop,
    homotopy_perturb,
    maslov_index,
    torus_loop,
)
from .perturbation import (
    RankTracked,
    TransportResult,
    complementary_perturbation,
    find_common_complement,
    polar_unitary,
    sqrt_psd,
    transitive_unitary,
)
from .spectral_flow import CrossingReport, SymmetricPath, spectral_flow
from .symplectic import (
    LagrangianFrame,
    PairData,
    SymplecticSpace,
    apply_unitary,
    det_squared_winding,
    intersection_dim,
    lagrangian_from_basis,
    minimum_gap,
    omega,
    pair_data,
    random_lagrangian,
    random_unitary_J,
    reduced_min_modulus,
)

__version__ = "0.1.0"

__all__ = [
    "CrossingReport",
    "SymmetricPath",
    "spectral_flow",
    "ChartValue",
    "ComplementaryPair",
    "GapReport",
    "GraphMap",
    "chart",
    "chart_inverse",
    "gap_inequality_report",
    "graph_map",
    "is_transverse",
    "AdmissibilityError",
    "ConvergenceError",
    "FredlagError",
    "InvalidInputError",
    "NumericalError",
    "TransversalityError",
    "LagrangianPath",
    "MaslovResult",
    "PartitionCertificate",
    "coherence_check",
    "find_partition",
    "generator_loop",
    "homotopy_perturb",
    "maslov_index",
    "torus_loop",
    "RankTracked",
    "TransportResult",
    "complementary_perturbation",
    "find_common_complement",
    "polar_unitary",
    "sqrt_psd",
    "transitive_unitary",
    "LagrangianFrame",
    "PairData",
    "SymplecticSpace",
    "apply_unitary",
    "det_squared_winding",
    "intersection_dim",
    "lagrangian_from_basis",
    "minimum_gap",
    "omega",
    "pair_data",
    "random_lagrangian",
    "random_unitary_J",
    "reduced_min_modulus",
]
