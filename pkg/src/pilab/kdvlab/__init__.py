"""Small-dispersion KdV near a gradient catastrophe."""

from pilab.kdvlab.initial import InitialDataSpec, build_initial_data, check_monotone, solve_P
from pilab.kdvlab.hopf import (
    CriticalPoint,
    breaking_time,
    critical_point,
    hopf_field,
    hopf_solve,
    inverse_scaling_map,
    k_constant,
    scaling_map,
)
from pilab.kdvlab.evolve import KdVField, kdv_evolve, kdv_evolve_many, tail_ratio
from pilab.kdvlab.compare import (
    DEFAULT_WINDOW,
    ComparisonReport,
    compare_double_scaling,
    fit_rate,
    painleve_slices,
)

__all__ = [
    "InitialDataSpec", "build_initial_data", "check_monotone", "solve_P",
    "CriticalPoint", "breaking_time", "critical_point", "hopf_field", "hopf_solve",
    "inverse_scaling_map", "k_constant", "scaling_map",
    "KdVField", "kdv_evolve", "kdv_evolve_many", "tail_ratio",
    "DEFAULT_WINDOW", "ComparisonReport", "compare_double_scaling", "fit_rate",
    "painleve_slices",
]
