"""Berry connections, curvature and quantum geometric tensors of oscillator families in phase space."""

from .classical import (
    ActionVector,
    bohr_sommerfeld,
    classical_metric,
    classical_metric_montecarlo,
    semiclassical_quantum_metric,
)
from .connection import a_field_gho, a_field_nosc, a_field_numeric
from .errors import AccuracyWarning, DegeneracyError, IntegrationError, ModelDomainError
from .geometry import (
    SCHEMA,
    GeometryResult,
    berry_connection,
    curvature_from_connection,
    metric_appendix_check,
    qgt_abelian,
    qgt_nonabelian,
)
from .models import (
    DegenerateLevel,
    ModelSpec,
    NormalModeData,
    ParameterPoint,
    enumerate_level,
    load_model,
    model_from_config,
    normal_modes,
)
from .quadrature import FDSpec, QuadratureSpec
from .validation import validate_level, validate_state
from .wigner import cross_wigner, weyl_transform_numeric, wigner_diagonal, wigner_fock, wigner_level_matrix

__version__ = "0.1.0"

__all__ = [
    "AccuracyWarning",
    "ActionVector",
    "DegeneracyError",
    "DegenerateLevel",
    "FDSpec",
    "GeometryResult",
    "IntegrationError",
    "ModelDomainError",
    "ModelSpec",
    "NormalModeData",
    "ParameterPoint",
    "QuadratureSpec",
    "SCHEMA",
    "a_field_gho",
    "a_field_nosc",
    "a_field_numeric",
    "berry_connection",
    "bohr_sommerfeld",
    "classical_metric",
    "classical_metric_montecarlo",
    "cross_wigner",
    "curvature_from_connection",
    "enumerate_level",
    "load_model",
    "metric_appendix_check",
    "model_from_config",
    "normal_modes",
    "qgt_abelian",
    "qgt_nonabelian",
    "semiclassical_quantum_metric",
    "validate_level",
    "validate_state",
    "weyl_transform_numeric",
    "wigner_diagonal",
    "wigner_fock",
    "wigner_level_matrix",
]
