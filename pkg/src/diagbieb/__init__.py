"""Bieberbach groups of diagonal type via characteristic matrices over C2^2."""

from .charmatrix import (
    ClosureMatrix,
    GenMatrix,
    MatrixError,
    ValidityReport,
    canonicalize,
    closure,
    is_valid,
    validate,
)
from .diffuse import (
    DeltaPWitness,
    DiffuseClassification,
    PipelineTrace,
    b1_zero_subgroup,
    betti1,
    classify,
    classify_c22,
    deltap_witness,
    nondiffuse_pipeline,
)
from .examples import EXAMPLES, get_example
from .matrixfile import MatrixFileError, parse_matrix, serialize_matrix
from .reduction import (
    MinimalityCertificate,
    ReductionTrace,
    deletable_columns,
    delete_column,
    is_col_irreducible,
    minimality_certificate,
    reduce_fully,
    renormalize_holonomy,
)
from .search import (
    SearchDigest,
    VasquezReport,
    build_lower_bound_matrix,
    certify_lower_bound,
    enumerate_bieberbach,
    exhaustive_reducibility,
    k4_counting_check,
    n_d_report,
)

__version__ = "0.1.0"
