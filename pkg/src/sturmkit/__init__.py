"""Numerical toolkit for Sturm comparison: exact propagation, zero counting, disconjugacy, verdicts."""

from .errors import (
    DomainError,
    ExpressionError,
    InternalConsistencyError,
    NumericError,
    PotentialError,
    PreconditionError,
    SturmkitError,
)
from .oscillate import (
    ZeroSet,
    check_interlacing,
    count_zeros,
    first_conjugate_point,
    is_disconjugate,
    locate_zeros,
    zero_free_direction,
)
from .potential import (
    Interval,
    Piece,
    PiecewisePotential,
    build_delta_construction,
    build_large_M_construction,
    build_theorem1_q2,
    eval_potential,
    parse_potential_spec,
    rescale_to_standard,
    serialize_potential,
)
from .propagate import (
    IVP,
    State,
    Trajectory,
    integrate_numeric,
    propagate_exact,
    solve,
    transfer_matrix,
    variational_solution,
    wronskian,
)
from .sct import SctVerdict, check_lemma2, consecutive_zeros, converse_counterexample, sct_verdict
from .theorem1 import Theorem1Report, epsilon0, find_lambda_threshold, verify_theorem1
from .zero_motion import ZeroTrack, check_identity, dt0_dlambda, track_zero

__version__ = "0.1.0"
