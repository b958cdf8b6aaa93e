from ._core import (
    InvalidParameter,
    InvalidPartition,
    Rng,
    UnsupportedDimension,
    argmax_probability_2gauss,
    double_estimator,
    ensemble_estimator,
    monte_carlo_estimator_stats,
    normal_cdf,
    normal_pdf,
    optimal_split,
    single_estimator,
    student_t_sf,
    true_q,
    wde_mse_2gauss,
    wde_statistics,
    weighted_double_estimator,
)

__all__ = [
    "InvalidParameter",
    "InvalidPartition",
    "Rng",
    "UnsupportedDimension",
    "argmax_probability_2gauss",
    "double_estimator",
    "ensemble_estimator",
    "monte_carlo_estimator_stats",
    "normal_cdf",
    "normal_pdf",
    "optimal_split",
    "single_estimator",
    "student_t_sf",
    "true_q",
    "wde_mse_2gauss",
    "wde_statistics",
    "weighted_double_estimator",
]
