"""Numerical laboratory for banded Hessenberg/Toeplitz symbols.

Given the constant coefficients of the symbol a(z) = 1/z + a_0 + ... +
a_p z^p, the package computes the branch system of a(z) = lam, the
spectral cuts, the recurrence polynomials and their zeros, the Nikishin
chain of orthogonality measures, second-type functions with their Widom
closed forms, generalized spectra of the truncated sections, and the
closed-form cubic case, with a verification suite tying every piece to
an independent oracle.
"""

from .asymptotics import (
    SpectrumReport,
    StrongLimit,
    ToeplitzSection,
    bnk,
    counting_compare,
    gen_spectrum,
    hp_error_order,
    orthogonality_second_kind,
    orthogonality_with_psi_zeros,
    psi_zeros,
    ratio_rate,
    second_kind_scale,
    strong_limit_check,
    widom_psi,
    widom_psi_scaled,
)
from .branches import (
    BranchValues,
    boundary_values,
    branch_derivative,
    conformal_map,
    jacobi_perron,
    log_derivative_identity_residual,
    pair_minus,
    rho_density,
    rho_measure,
    s_density,
    s_measure,
    solve_branches,
    solve_grid,
)
from .cubic import (
    CubicParams,
    cubic_build,
    cubic_rho1_density,
    cubic_rho2_density,
    cubic_z0,
)
from .nikishin import (
    NikishinSystem,
    build_system,
    gkj,
    mu_density,
    orthogonality_residual,
    orthogonality_scale,
    product_measure,
    psi_iterated,
    psi_values,
)
from .polyseq import (
    CompanionTable,
    HessenbergSection,
    MonicPolySeq,
    MultiIndex,
    eval_Q,
    eval_Q_with_derivative,
    gen_Q,
    gen_companion,
    moments,
    multi_index,
    zeros_Q,
)
from .quadrature import (
    FixedRule,
    MeasureHandle,
    QuadResult,
    build_fixed_rule,
    cauchy_transform,
    integrate,
    rule_apply,
)
from .symbol import (
    CriticalStructure,
    Cut,
    SymbolCoeffs,
    build_symbol,
    critical_polynomial,
    critical_structure,
    eval_symbol,
)
from .verify import CheckResult, run_suite

__version__ = "0.1.0"
