"""Soft finite element methods for second-order elliptic eigenvalue problems.

Implements Galerkin FEM together with its softened variants: gradient-jump
penalties on the stiffness and mass bilinear forms and blended
Gauss-Legendre/Gauss-Lobatto mass quadrature, plus the closed-form
references, metrics, and batch experiments that benchmark them.
"""

from .assembly import (
    ConfigError,
    Method,
    MethodConfig,
    SymmetricSystem,
    assemble_mass,
    assemble_penalty,
    assemble_stiffness,
    build_system,
    build_system_2d,
    dump_matrix,
    half_bandwidth,
    kronecker_forms,
    load_matrix,
)
from .eigensolve import (
    NotPositiveDefiniteError,
    NumericalFailureError,
    Spectrum,
    b_orthonormality_error,
    rayleigh_residuals,
    solve_gevp,
    trace_consistency,
)
from .elements import ReferenceElement, eval_basis, eval_basis_deriv, reference_element
from .mesh import (
    BOUNDARY,
    DiffusionField,
    DofMap,
    Interface,
    Mesh1D,
    TensorMesh2D,
    dof_map,
    element_kappa_minima,
    interfaces,
    uniform_mesh_1d,
    uniform_mesh_2d,
)
from .metrics import (
    ErrorReport,
    StiffnessReport,
    condition_number,
    eigenfunction_errors,
    eigenvalue_errors,
    fit_order,
    nodal_function_errors,
    reduction_ratios,
)
from .oracle import (
    GSFEM_ETA_M_MONOTONE_LIMIT,
    SUPERCONVERGENCE_BOUNDS,
    ExactEigenpair,
    ParameterTriple,
    analytic_eigenvalue_gsfembq,
    analytic_eigenvector,
    analytic_spectrum_gsfembq,
    exact_spectrum_1d,
    exact_spectrum_2d,
    optimal_params,
    spectrum_is_monotone,
    stiffness_ratio_formula,
    stiffness_ratio_limit_family,
    taylor_leading_coefficients,
)
from .benchmarks import (
    ETA_M_MAX_T2,
    PARAMS_T2,
    PARAMS_T4,
    TABLE_IDS,
    coercive_eta_k,
    resolve_method_config,
)
from .experiments import (
    CellCheck,
    ExperimentConfig,
    MissingReferenceError,
    ReferenceSpectrum,
    TableReport,
    eigenfunction_energies,
    find_eta_m_max,
    generate_reference,
    load_config,
    load_reference,
    reproduce_table,
    run_convergence,
    run_spectrum,
    validate_config,
)
from .quadrature import Family, QuadratureRule, gauss_legendre, gauss_lobatto

__version__ = "0.1.0"
