"""Graded persistence diagrams, persistence landscapes and their Wasserstein stability."""

from .grading import (
    GradedDiagram,
    GradedRank,
    Staircase,
    graded_diagram,
    graded_from_diagram,
    graded_rank,
    realizability_check,
    staircase_decompose,
    unary,
)
from .landscape import (
    Landscape,
    StepFunction,
    derivative,
    integrate,
    landscape_eval,
    landscape_from_graded,
)
from .modules import (
    Barcode,
    Grid,
    MapChain,
    NotRealizableError,
    RankTable,
    SignedDiagram,
    diagram_from_rank,
    extend_to_grid,
    rank_from_barcode,
    rank_from_mapchain,
)
from .poset import GridInterval, IntervalFunction, mobius_convolve, mobius_value, zeta_convolve
from .transport import (
    CostParams,
    Coupling,
    coordinate_geodesic_path,
    coupling_cost,
    signed_wasserstein,
    triangle_counterexample,
    verify_stability,
    wasserstein,
)

__version__ = "0.1.0"
