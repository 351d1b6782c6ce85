"""PPT-relaxed simulation errors for bidirectional teleportation."""

from .analytic import (
    Regime,
    PiecewiseParams,
    build_isotropic_lp,
    build_no_resource_lp,
    build_werner_lp,
    gadc_error,
    isotropic_error,
    no_resource_error,
    werner_error,
)
from .channels import ChoiOperator, swap_channel_choi, teleportation_choi, validate
from .qmat import DimensionError, LabeledOperator, NotPSDError
from .sdp import LpProblem, SolverError, SolverOptions, check_feasible, solve_lp, solve_sdp
from .simerr import (
    ErrorReport,
    channel_box_error,
    channel_fidelity,
    diamond_distance,
    eppt_bcqt,
    eppt_bipartite,
    eppt_infid_bipartite,
    eppt_multipartite,
    eppt_swap,
)
from .states import ResourceState

__version__ = "0.1.0"

__all__ = [
    "ChoiOperator", "DimensionError", "ErrorReport", "LabeledOperator", "LpProblem",
    "NotPSDError", "PiecewiseParams", "Regime", "ResourceState", "SolverError",
    "SolverOptions", "build_isotropic_lp", "build_no_resource_lp", "build_werner_lp",
    "channel_box_error", "channel_fidelity", "check_feasible", "diamond_distance",
    "eppt_bcqt", "eppt_bipartite", "eppt_infid_bipartite", "eppt_multipartite",
    "eppt_swap", "gadc_error", "isotropic_error", "no_resource_error", "solve_lp",
    "solve_sdp", "swap_channel_choi", "teleportation_choi", "validate", "werner_error",
]
