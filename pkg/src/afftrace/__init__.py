"""Numerical laboratory for affine fractional Sobolev trace principles.

The package evaluates every closed-form constant of the sharp trace
inequalities on the half-space, builds the Poisson and non-Poisson
extensions of boundary data, computes the affine energy and the weighted
norms that enter the trace quotients, verifies the inequalities and
their equality cases at desk scale, and estimates sharp constants by
optimizing the quotients over extremal families.

Layout
------
``constants``
    Closed forms: derived exponents, conformal and fractional trace
    constants, Riesz and affine normalizers, the sharp product constants
    of the weighted affine trace inequality, HLS and fractional Sobolev
    constants, and their cross-identities.
``sampling``
    Boundary grids, weighted half-line quadrature, sampled fields.
``spectral``
    Discrete Fourier transforms, fractional Laplacian, homogeneous
    Sobolev norms of either sign, duality pairings.
``extension``
    Poisson and non-Poisson half-space extensions and the radial
    profiles behind the non-Poisson multiplier.
``affine``
    Directional gradients, the affine energy, weighted norms, and the
    arithmetic-geometric split of the gradient.
``inequalities``
    Trace quotients, equality-case checks, and the verification corpus.
``search``
    Derivative-free maximization of trace quotients over families.
``oracle``
    Slow brute-force reference implementations used only for checking.
``cli``
    Command line front end.
"""

from .errors import (
    AffTraceError,
    ConditioningError,
    DegenerateEnergyError,
    DomainError,
    ParameterError,
    RangeError,
    ResolutionError,
    SearchFailure,
    UsageError,
)
from .constants import (
    ConstantTable,
    HaddadConstants,
    Params,
    affine_normalizer,
    assembled_sharp_display,
    constant_table,
    derive_params,
    escobar_constant,
    frac_sobolev_constant,
    gamma,
    haddad_constants,
    haddad_display_values,
    hls_constant,
    kappa,
    ln_gamma,
    omega,
    poisson_trace_constant,
    xiao_constant,
)

__version__ = "0.1.0"

__all__ = [
    "AffTraceError",
    "ConditioningError",
    "ConstantTable",
    "DegenerateEnergyError",
    "DomainError",
    "HaddadConstants",
    "ParameterError",
    "Params",
    "RangeError",
    "ResolutionError",
    "SearchFailure",
    "UsageError",
    "affine_normalizer",
    "assembled_sharp_display",
    "constant_table",
    "derive_params",
    "escobar_constant",
    "frac_sobolev_constant",
    "gamma",
    "haddad_constants",
    "haddad_display_values",
    "hls_constant",
    "kappa",
    "ln_gamma",
    "omega",
    "poisson_trace_constant",
    "xiao_constant",
]
