"""Exact computer algebra for flat connections on iterated Laurent series fields.

The package computes, over towers k((t1))...((tn)) with exact rational
coefficients: truncated series arithmetic with certified precision windows,
exact valuation-aware linear algebra, flat connections and their functorial
operations, cyclic vectors and Newton polygons, windowed Tate-style operator
indices, de Rham cohomology dimensions, cube multicomplex checks and graded
epsilon-line degrees, together with a CLI for file-driven computations.
"""

from .connection import (
    Connection,
    FlatnessReport,
    KummerCover,
    induct,
    kummer_pullback,
    rank1_from_form,
    regular_representation,
)
from .derham import (
    BinaryMultiComplex,
    CohomologyReport,
    FormTuple,
    MultiComplexReport,
    build_multicomplex,
    check_multicomplex,
    cohomology_dims,
    standard_forms,
    swap_connection,
    swap_variables,
)
from .dmodule import (
    NewtonPolygon,
    ScalarOperator,
    connection_irregularity,
    find_cyclic_vector,
    newton_polygon,
    to_scalar_operator,
    wronskian,
)
from .epsilon import (
    DetReport,
    EpsilonReport,
    GradedLine,
    SignConvention,
    consistent_signs,
    epsilon_degree,
    epsilon_det_rel,
    verify_duality,
    verify_induction,
)
from .linalg import (
    SeriesMatrix,
    WindowMatrix,
    inverse,
    rank_kernel_det,
    solve,
    window_matrix,
)
from .series import (
    OneForm,
    TowerElement,
    TowerField,
    exterior_derivative,
    residue,
    set_working_precision,
    working_precision,
)
from .specfile import SpecFile, parse_specfile, render_specfile
from .tate import (
    DirectionalProfile,
    IndexReport,
    Lattice,
    MatrixDiffOp,
    calkin_iso_check,
    directional_kernel_profile,
    operator_index,
)

__all__ = [
    "BinaryMultiComplex",
    "CohomologyReport",
    "Connection",
    "DetReport",
    "DirectionalProfile",
    "EpsilonReport",
    "FlatnessReport",
    "FormTuple",
    "GradedLine",
    "IndexReport",
    "KummerCover",
    "Lattice",
    "MatrixDiffOp",
    "MultiComplexReport",
    "NewtonPolygon",
    "OneForm",
    "ScalarOperator",
    "SeriesMatrix",
    "SignConvention",
    "SpecFile",
    "TowerElement",
    "TowerField",
    "WindowMatrix",
    "build_multicomplex",
    "calkin_iso_check",
    "check_multicomplex",
    "cohomology_dims",
    "connection_irregularity",
    "consistent_signs",
    "directional_kernel_profile",
    "epsilon_degree",
    "epsilon_det_rel",
    "exterior_derivative",
    "find_cyclic_vector",
    "induct",
    "inverse",
    "kummer_pullback",
    "newton_polygon",
    "operator_index",
    "parse_specfile",
    "rank1_from_form",
    "rank_kernel_det",
    "regular_representation",
    "render_specfile",
    "residue",
    "set_working_precision",
    "solve",
    "standard_forms",
    "swap_connection",
    "swap_variables",
    "to_scalar_operator",
    "verify_duality",
    "verify_induction",
    "window_matrix",
    "working_precision",
    "wronskian",
]
