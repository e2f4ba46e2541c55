"""Guaranteed functional upper bounds on the energy-norm error for thin
obstacle and Signorini problems, with built-in benchmark families."""

from .constants import ConstantSet, assemble_constants
from .errors import (
    ConditionViolationError,
    EvaluationError,
    IncompleteConstantsError,
    InternalDefectError,
    InvalidParameterError,
    NotAdmissibleError,
    NotEquilibratedError,
    ThinboundError,
    UnsupportedFieldError,
)
from .fields import (
    FluxField,
    MultiplierField,
    ScalarField,
    add_fields,
    check_admissible,
    constant_flux,
    flux_from_gradient,
    multiplier_from_jump,
    piecewise_x1_field,
    polynomial_field,
    scale_field,
    shift_flux,
    zero_scalar_field,
)
from .geometry import MINUS, PLUS, Domain2D, build_domain, triangulate
from .majorants import (
    MajorantReport,
    QuadConfig,
    energy_error,
    majorant_M,
    majorant_M4,
    majorant_M5,
    majorant_M12,
    majorant_basic,
    minimize_majorant,
    optimal_alpha,
    optimal_lambda,
    optimize_betas,
)
from .paperbench import (
    build_example,
    exact_field,
    exact_flux,
    exact_jump,
    exact_multiplier,
    exact_solution,
    reproduce,
)
from .poly2d import Poly2
from .signorini import (
    SignoriniDomain,
    assemble_signorini_constants,
    majorant_signorini,
    majorant_signorini_poincare,
    signorini_energy_error,
    unit_square_contact_domain,
)

__version__ = "0.1.0"
