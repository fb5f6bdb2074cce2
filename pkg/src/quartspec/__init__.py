"""Spectra of fourth-order problems with distributional coefficients.

The package regularizes y'''' + (tau2 y')' + (tau1 y)' + tau1 y' + tau0 y
= lambda y through antiderivative substitutions, integrates the resulting
first-order system in a scaled gauge, and extracts eigenvalues and weight
numbers of three boundary value problems together with their sharp
asymptotic predictions.
"""

from .asymptotics import (
    AsymptoticConstants,
    RemainderReport,
    SectorContext,
    a_end_tables,
    c_constants,
    constants_from_primitives,
    make_constants,
    omega_order,
    predict_beta,
    predict_lambda,
    predict_rho3,
    reduced_char,
    remainder_analysis,
)
from .cli import RunConfig, load_coefficients, main, run
from .coefficients import (
    DEFAULT_GRID,
    CoefficientSet,
    Primitives,
    SET_PRESETS,
    build_primitives,
    component_samples,
    eval_primitive,
    preset_set,
)
from .integrator import (
    DEFAULT_TOL,
    FundamentalWithDerivative,
    IntegrationError,
    ScaledMatrixSolution,
    integrate_compound_many,
    integrate_fundamental,
    integrate_fundamental_many,
    integrate_with_lambda_derivative,
    liouville_defect,
)
from .regularization import assemble_F, quasi_chain, system_rhs
from .spectral import (
    CompletenessError,
    ContourError,
    SpectralDatum,
    char_fn,
    char_fn_plus,
    char_many,
    char_pair_many,
    count_zeros,
    count_zeros_stable,
    find_eigenvalues,
    sector_root,
    weight_numbers,
)

__version__ = "0.1.0"

__all__ = [
    "AsymptoticConstants",
    "CoefficientSet",
    "CompletenessError",
    "ContourError",
    "DEFAULT_GRID",
    "DEFAULT_TOL",
    "FundamentalWithDerivative",
    "IntegrationError",
    "Primitives",
    "RemainderReport",
    "RunConfig",
    "ScaledMatrixSolution",
    "SET_PRESETS",
    "SectorContext",
    "SpectralDatum",
    "a_end_tables",
    "assemble_F",
    "build_primitives",
    "c_constants",
    "char_fn",
    "char_fn_plus",
    "char_many",
    "char_pair_many",
    "component_samples",
    "constants_from_primitives",
    "count_zeros",
    "count_zeros_stable",
    "eval_primitive",
    "find_eigenvalues",
    "integrate_compound_many",
    "integrate_fundamental",
    "integrate_fundamental_many",
    "integrate_with_lambda_derivative",
    "liouville_defect",
    "load_coefficients",
    "main",
    "make_constants",
    "omega_order",
    "predict_beta",
    "predict_lambda",
    "predict_rho3",
    "preset_set",
    "quasi_chain",
    "reduced_char",
    "remainder_analysis",
    "run",
    "sector_root",
    "system_rhs",
    "weight_numbers",
]
