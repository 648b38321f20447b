"""Inner functions in weighted spaces of analytic functions on the disk.

The modules cover Hilbert spaces with diagonal weights (``spaces``,
``engine``, ``zerosets``, ``extra``), the coefficient spaces l^p
(``lp``) and finite matrices (``operators``).
"""
from .engine import (
    ZeroConfig,
    closed_form_one_point,
    gram_schmidt_kernels,
    norm_sequence,
    projection_distance,
    solve_inner,
)
from .errors import (
    CertificationError,
    ConvergenceError,
    DivergenceError,
    DomainError,
    GramDegeneracyError,
    InconclusiveError,
    RkInnerError,
)
from .extra import extra_zero_lower_bound, scan_extra_zeros
from .lp import dual_infimum_norm, lp_inner_function, lp_zero_set_trace, metric_project
from .operators import check_inner, krylov_inner, make_example_operator
from .spaces import KernelNode, WeightSequence, make_named_space, space_from_spec
from .zerosets import shapiro_shields, zero_set_certificate

__version__ = "0.1.0"

__all__ = [
    "CertificationError",
    "ConvergenceError",
    "DivergenceError",
    "DomainError",
    "GramDegeneracyError",
    "InconclusiveError",
    "KernelNode",
    "RkInnerError",
    "WeightSequence",
    "ZeroConfig",
    "check_inner",
    "closed_form_one_point",
    "dual_infimum_norm",
    "extra_zero_lower_bound",
    "gram_schmidt_kernels",
    "krylov_inner",
    "lp_inner_function",
    "lp_zero_set_trace",
    "make_example_operator",
    "make_named_space",
    "metric_project",
    "norm_sequence",
    "projection_distance",
    "scan_extra_zeros",
    "shapiro_shields",
    "solve_inner",
    "space_from_spec",
    "zero_set_certificate",
]
