"""Rigorous-error evaluation of the q-gamma family and numerical checks of its
complete-monotonicity inequalities."""

from .certificates import (
    CertificateReport,
    CMReport,
    Family,
    FamilyId,
    certify_signs,
    family_series,
    finite_difference_cm,
    series_coefficient,
)
from .core import (
    Branch,
    ConvergenceError,
    DomainError,
    Eval,
    QParam,
    RangeError,
    TruncationPolicy,
    lngamma_q,
    log_q_pochhammer,
    psi_q,
    psi_q_deriv,
)
from .means import (
    aq_const,
    best_a,
    best_b,
    integral_psi_mean,
    mean_psi,
    psi_q_inverse,
    sharp_constants,
    stolarsky_E,
)
from .theorems import (
    FunctionId,
    GridSpec,
    TheoremId,
    TheoremReport,
    kershaw_bounds,
    theorem_function,
    verify_theorem,
)

__version__ = "0.1.0"
