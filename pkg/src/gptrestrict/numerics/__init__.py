from .linalg import (
    Matrix,
    Solution,
    StructuralError,
    Vector,
    as_matrix,
    as_vector,
    dot,
    identity,
    in_span,
    matvec,
    nullspace,
    rank,
    rref,
    solve_linear,
    to_fraction,
    transpose,
    vecmat,
)
from .lp import (
    FarkasCertificate,
    LinearProgram,
    LpOutcome,
    check_duality,
    lp_solve,
    verify_ray,
)
from .surd import NormExpression, compare, as_exact
