"""Steady-state photon statistics of a dissipative single-atom microlaser.

Excited two-level atoms cross an optical cavity strictly one at a time
(fixed flight time, Poissonian arrivals); cavity and atomic damping act
during the whole cycle.  The package computes the steady-state photon
number distribution by a continued-fraction recursion, its moments, a
lossless-flight reference model, and cross-validates everything against a
brute-force Monte-Carlo integration of the underlying master equation.
"""

from .coefficients import (
    FractionTerms,
    coeff_A,
    coeff_F,
    coeff_X,
    coeff_Y,
    coeff_Z,
    fraction_terms,
)
from .params import (
    DimensionlessParams,
    MicrolaserParams,
    SingleAtomRegimeViolation,
    from_dimensionless,
    pump_parameter,
    to_dimensionless,
    validate,
)
from .steady_state import (
    ContinuedFractionSingular,
    FieldMoments,
    PhotonDistribution,
    SolveResult,
    TruncationNotConverged,
    continued_fraction,
    fixed_truncation_distribution,
    lossless_baseline,
    moments,
    photon_distribution,
    solve,
)

__all__ = [
    "DimensionlessParams",
    "MicrolaserParams",
    "SingleAtomRegimeViolation",
    "from_dimensionless",
    "to_dimensionless",
    "pump_parameter",
    "validate",
    "FractionTerms",
    "coeff_A",
    "coeff_F",
    "coeff_X",
    "coeff_Y",
    "coeff_Z",
    "fraction_terms",
    "ContinuedFractionSingular",
    "TruncationNotConverged",
    "PhotonDistribution",
    "FieldMoments",
    "SolveResult",
    "continued_fraction",
    "photon_distribution",
    "fixed_truncation_distribution",
    "lossless_baseline",
    "moments",
    "solve",
]

__version__ = "0.1.0"
