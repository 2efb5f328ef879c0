"""Linear-regime permutation recovery under Gaussian noise."""

from ._permlin import (
    DomainError,
    Error,
    NumericalError,
    ParameterError,
    RefusalError,
    __version__,
    check_linear_regime,
    conditional_covariance,
    construct_covariance,
    helmert_q,
    is_positive_definite,
    linear_decode,
    map_decode,
    n2_params,
    origin_uniformity,
    perr_geometric,
    perr_simulation,
    posterior_table,
    projection_matrix,
    region_sample,
    sort_permutation,
    spectrum_closed_form,
    sym_eigen,
)

__all__ = [
    "DomainError",
    "Error",
    "NumericalError",
    "ParameterError",
    "RefusalError",
    "__version__",
    "check_linear_regime",
    "conditional_covariance",
    "construct_covariance",
    "helmert_q",
    "is_positive_definite",
    "linear_decode",
    "map_decode",
    "n2_params",
    "origin_uniformity",
    "perr_geometric",
    "perr_simulation",
    "posterior_table",
    "projection_matrix",
    "region_sample",
    "sort_permutation",
    "spectrum_closed_form",
    "sym_eigen",
]
