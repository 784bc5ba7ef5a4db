"""Confidence of measurement outcomes and maximum-confidence measurements.

The maximum confidence of outcome ``x`` is the largest eigenvalue of
``S (eta_x rho_x) S`` with ``S`` the inverse square root of the average state
on its support. Equivalently it is the smallest ``q`` with
``q rho_0 - eta_x rho_x`` positive semidefinite; a measurement operator
attains it exactly when it lives on the kernel of that operator.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .ensemble import Ensemble, average_state, check_valid
from .errors import DimMismatch, UndefinedConfidence
from .linalg import RANK_TOL, Projector

EPS_DENOMINATOR = 1e-12
COMPLETENESS_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Measurement:
    """An inconclusive operator plus one conclusive operator per state."""

    inconclusive: np.ndarray
    outcomes: tuple

    def __post_init__(self):
        inc = linalg.as_operator(self.inconclusive)
        outs = tuple(linalg.as_operator(m) for m in self.outcomes)
        if any(m.shape != inc.shape for m in outs):
            raise DimMismatch("measurement operators act on different dimensions")
        object.__setattr__(self, "inconclusive", inc)
        object.__setattr__(self, "outcomes", outs)

    @classmethod
    def from_outcomes(cls, outcomes: Sequence) -> "Measurement":
        """Complete a list of conclusive operators with ``M_? = I - sum M_i``."""
        outs = [linalg.as_operator(m) for m in outcomes]
        dim = outs[0].shape[0]
        return cls(np.eye(dim) - sum(outs), tuple(outs))

    @property
    def dim(self) -> int:
        return self.inconclusive.shape[0]

    @property
    def n(self) -> int:
        return len(self.outcomes)

    def completeness_residual(self) -> float:
        total = self.inconclusive + sum(self.outcomes)
        return float(np.max(np.abs(total - np.eye(self.dim))))

    def problems(self, tol: float = COMPLETENESS_TOL) -> list[str]:
        """Names of the measurement axioms that fail: ``psd:<i>``, ``completeness``."""
        out = []
        for name, m in [("?", self.inconclusive)] + list(enumerate(self.outcomes)):
            if not linalg.is_hermitian(m) or not linalg.is_psd(m, tol):
                out.append(f"psd:{name}")
        if self.completeness_residual() > tol:
            out.append("completeness")
        return out

    def is_valid(self, tol: float = COMPLETENESS_TOL) -> bool:
        return not self.problems(tol)


@dataclass(frozen=True, eq=False)
class MaxConfidenceResult:
    """Maximum confidence of one outcome, with its projectors and witness.

    ``value`` is clamped to [0, 1]; ``raw_value`` is the unclamped eigenvalue
    used for every derived operator.
    """

    value: float
    raw_value: float
    pi_support: Projector
    pi_kernel: Projector
    witness: np.ndarray


@dataclass(frozen=True)
class McmMembershipReport:
    residuals: tuple
    passed: tuple
    tol: float

    @property
    def all_passed(self) -> bool:
        return all(self.passed)

    def __bool__(self) -> bool:
        return self.all_passed


def _trace_product(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.real(np.sum(a * b.T)))


def success_probability(e: Ensemble, m: Measurement) -> float:
    if m.n != e.n:
        raise DimMismatch(f"measurement has {m.n} outcomes, ensemble {e.n} states")
    return float(sum(p * _trace_product(s, mi) for p, s, mi in zip(e.priors, e.states, m.outcomes)))


def confidence(e: Ensemble, m: Measurement, x: int) -> float:
    """Probability that state ``x`` was prepared given outcome ``x`` fired."""
    rho0 = average_state(e)
    denom = _trace_product(rho0, m.outcomes[x])
    if denom <= EPS_DENOMINATOR:
        raise UndefinedConfidence(f"outcome {x} has probability {denom:.3g} under the average state")
    return float(e.priors[x] * _trace_product(e.states[x], m.outcomes[x]) / denom)


def max_confidence(e: Ensemble, x: int, rank_tol: float = RANK_TOL) -> MaxConfidenceResult:
    rho0 = average_state(e)
    return _max_confidence(rho0, e.priors[x] * e.states[x], rank_tol)


def _max_confidence(rho0: np.ndarray, weighted: np.ndarray, rank_tol: float) -> MaxConfidenceResult:
    s = linalg.pinv_sqrt(rho0, rank_tol)
    w, v = linalg.eig_hermitian(s @ weighted @ s)
    raw = float(w[-1])
    top = s @ v[:, -1]
    witness = np.outer(top, top.conj())
    gap_op = raw * rho0 - weighted
    pi = linalg.support_projector(gap_op, rank_tol)
    kernel = linalg.Projector(np.eye(rho0.shape[0]) - pi.operator, rho0.shape[0] - pi.rank)
    return MaxConfidenceResult(min(max(raw, 0.0), 1.0), raw, pi, kernel, witness)


def max_confidences(e: Ensemble, rank_tol: float = RANK_TOL) -> list[MaxConfidenceResult]:
    rho0 = average_state(e)
    return [_max_confidence(rho0, p * s, rank_tol) for p, s in zip(e.priors, e.states)]


def baseline_mcm_measurement(e: Ensemble, rank_tol: float = RANK_TOL) -> Measurement:
    """Maximum-confidence measurement built from normalized witness operators.

    Each witness is compressed onto the support of the average state, and all
    are scaled by the same constant so the conclusive operators sum to at
    most the identity.
    """
    rho0 = average_state(e)
    pi = linalg.support_projector(rho0, rank_tol).operator
    compressed = [pi @ r.witness @ pi for r in max_confidences(e, rank_tol)]
    total = sum(float(np.trace(c).real) for c in compressed)
    outcomes = [c / total for c in compressed]
    return Measurement.from_outcomes(outcomes)


def mcm_residuals(e: Ensemble, m: Measurement, rank_tol: float = RANK_TOL) -> list[float]:
    rho0 = average_state(e)
    res = []
    for r, p, s, mi in zip(max_confidences(e, rank_tol), e.priors, e.states, m.outcomes):
        res.append(_trace_product(r.raw_value * rho0 - p * s, mi))
    return res


def is_mcm(e: Ensemble, m: Measurement, tol: float = 1e-9, rank_tol: float = RANK_TOL) -> McmMembershipReport:
    """Per-outcome residuals ``Tr[(C_i rho_0 - eta_i rho_i) M_i]``; outcome passes iff residual <= tol."""
    check_valid(e)
    if m.n != e.n:
        raise DimMismatch(f"measurement has {m.n} outcomes, ensemble {e.n} states")
    res = mcm_residuals(e, m, rank_tol)
    return McmMembershipReport(tuple(res), tuple(r <= tol for r in res), tol)


def in_dual_set(e: Ensemble, x: int, a, tol: float = 1e-9, rank_tol: float = RANK_TOL) -> bool:
    """Whether ``a`` lies in the dual cone of the outcome-``x`` membership set."""
    k = max_confidence(e, x, rank_tol).pi_kernel.operator
    return linalg.is_psd(k @ linalg.as_hermitian(a) @ k, tol)
