"""Quasi-birth-and-death processes from bivariate orthogonal polynomials.

Five model families on planar domains (square, quadrant, parabolic region,
triangle) give block tridiagonal transition or generator matrices whose
spectral structure is fully explicit: invariant measures, transition
probabilities by the Karlin-McGregor integral, recurrence classification,
stochastic LU factorizations and urn representations.
"""

from .errors import (
    QbdPolyError,
    DomainError,
    UsageError,
    NumericError,
    ModelIntegrityError,
)
from .families import (
    FAMILY_KINDS,
    PARAM_NAMES,
    PRODUCT_JACOBI,
    PRODUCT_LAGUERRE,
    PARABOLIC,
    TRIANGLE01,
    TRIANGLE00,
    FamilySpec,
    family_spec,
    block_coefficients,
    eval_basis,
    norm_diagonal,
    domain_quadrature,
)
from .blockmat import (
    flat_index,
    unflatten,
    truncation_size,
    build_axis,
    truncate,
    combine_dense,
    structural_checks,
    propagator_power,
    propagator_exponential,
)
from .qbd import (
    DISCRETE,
    CONTINUOUS,
    QbdModel,
    TauBounds,
    combine,
    tau_bounds,
    empirical_tau_bounds,
    invariant_pi,
    invariant_measure,
    deficit_vector,
    stationarity_residual,
    classify_recurrence,
)
from .spectral import TransitionQuery, km_entry, spectral_cross_check
from .simulate import (
    discrete_paths,
    continuous_finals,
    sample_continuous_path,
    estimate_empirical,
)
from .factorize import (
    triangle_lu,
    verify_factorization,
    urn_table,
    urn_consistency_check,
)

__version__ = "0.1.0"
