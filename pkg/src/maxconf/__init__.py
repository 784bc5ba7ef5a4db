"""Maximum-confidence discrimination of quantum states and quantum sequences."""

from .confidence import (
    MaxConfidenceResult,
    Measurement,
    baseline_mcm_measurement,
    confidence,
    is_mcm,
    max_confidence,
    max_confidences,
    mcm_residuals,
    success_probability,
)
from .ensemble import Ensemble, SequenceEnsemble, average_state, pure_state_ensemble, random_ensemble, tensor, validate
from .errors import MaxConfError
from .optimizer import OptimizationCertificate, certify, check_certificate, lower_bound, solve_dual, solve_primal
from .sequence import (
    FactorizationReport,
    product_measurement,
    sequence_max_confidence,
    sequence_p_g,
)

__version__ = "0.1.0"

__all__ = [
    "Ensemble",
    "FactorizationReport",
    "MaxConfError",
    "MaxConfidenceResult",
    "Measurement",
    "OptimizationCertificate",
    "SequenceEnsemble",
    "average_state",
    "baseline_mcm_measurement",
    "certify",
    "check_certificate",
    "confidence",
    "is_mcm",
    "lower_bound",
    "max_confidence",
    "max_confidences",
    "mcm_residuals",
    "product_measurement",
    "pure_state_ensemble",
    "random_ensemble",
    "sequence_max_confidence",
    "sequence_p_g",
    "solve_dual",
    "solve_primal",
    "success_probability",
    "tensor",
    "validate",
]
