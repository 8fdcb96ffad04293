from pilab.painleve.bvp import (
    BvpConfig,
    GridSolution,
    assemble_system,
    boundary_profile,
    continue_in_t,
    dispersionless_root,
    leading_order_guess,
    solve_pole_free,
    sweep_pole_free,
)
from pilab.painleve.analysis import (
    AsymptoticFit,
    FlowCheck,
    flow_residual,
    sample,
    verify_asymptotics,
    verify_time_flow,
)

__all__ = [
    "BvpConfig", "GridSolution", "assemble_system", "boundary_profile", "continue_in_t",
    "dispersionless_root", "leading_order_guess", "solve_pole_free", "sweep_pole_free",
    "AsymptoticFit", "FlowCheck", "flow_residual", "sample", "verify_asymptotics",
    "verify_time_flow",
]
