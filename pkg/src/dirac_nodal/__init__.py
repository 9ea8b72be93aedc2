"""Dirac system with integral-type nonlocal boundary conditions: forward and inverse nodal problems."""
from .asymptotics import (
    AsymptoticNodalModel,
    characteristic_asymptotic,
    eigenvalue_asymptotic,
    fundamental_asymptotic,
    nodal_asymptotic,
    synthesize_nodal_data,
)
from .forward import (
    FundamentalPair,
    NodalSet,
    Spectrum,
    boundary_U,
    boundary_V,
    characteristic,
    eigenvalues,
    fundamental_pair,
    nodal_data,
    nodal_points,
    phi1,
)
from .inverse import (
    NodalData,
    PsiEstimate,
    ReconstructionResult,
    differentiate_psi1,
    estimate_psi,
    estimate_psi1,
    estimate_psi2,
    reconstruct,
    reconstruct_from_psi,
    select_sequence,
)
from .numerics import Grid, LimitFit, extrapolate_limit, integrate_ode, quadrature, refine_root
from .problem import (
    DerivedConstants,
    DiracProblem,
    Func1D,
    build_problem,
    derived_constants,
    example1_problem,
    load_problem,
    omega,
)

__version__ = "0.1.0"
