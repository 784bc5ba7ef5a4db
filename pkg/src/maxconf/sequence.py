"""Discrimination of quantum sequences drawn from a product of ensembles.

Joint quantities can be computed two ways: ``"product"`` multiplies the
per-step values, ``"direct"`` works on the flattened joint ensemble (only
allowed up to ``dim_cap`` joint dimensions). ``"both"`` does both and reports
the deviation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg, optimizer
from .confidence import Measurement, in_dual_set, max_confidence, mcm_residuals
from .ensemble import SequenceEnsemble
from .errors import DimCapExceeded, DimMismatch, NotInMembershipSet, PartNotConverged
from .linalg import RANK_TOL
from .optimizer import DualSolution

DIRECT_DIM_CAP = 16
SEQUENCE_TOL = 1e-5
STEP_TOL = 1e-9
MEMBERSHIP_TOL = 1e-8
MODES = ("product", "direct", "both")


@dataclass(frozen=True)
class FactorizationReport:
    quantity: str
    index: tuple | None
    per_step: tuple
    product: float | None
    direct: float | None = None
    details: dict = field(default_factory=dict)

    @property
    def deviation(self) -> float | None:
        if self.product is None or self.direct is None:
            return None
        return abs(self.direct - self.product)

    def to_dict(self) -> dict:
        return {
            "quantity": self.quantity,
            "index": None if self.index is None else [c + 1 for c in self.index],
            "per_step": list(self.per_step),
            "product": self.product,
            "direct": self.direct,
            "deviation": self.deviation,
            **self.details,
        }


@dataclass(frozen=True, eq=False)
class SequenceMeasurement(Measurement):
    """Measurement on the joint space whose conclusive outcomes are indexed by joint indices."""

    shape: tuple = ()

    def outcome(self, index: Sequence[int]) -> np.ndarray:
        return self.outcomes[int(np.ravel_multi_index(tuple(index), self.shape))]


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


def _check_cap(seq: SequenceEnsemble, dim_cap: int) -> None:
    if seq.dim > dim_cap:
        raise DimCapExceeded(f"joint dimension {seq.dim} exceeds cap {dim_cap}")


def sequence_max_confidence(seq: SequenceEnsemble, index: Sequence[int], mode: str = "both",
                            dim_cap: int = DIRECT_DIM_CAP, rank_tol: float = RANK_TOL) -> FactorizationReport:
    _check_mode(mode)
    index = tuple(index)
    flat = seq.flat_index(index)
    if mode != "product":
        _check_cap(seq, dim_cap)
    per_step = tuple(max_confidence(s, c, rank_tol).raw_value for s, c in zip(seq.steps, index))
    product = float(np.prod(per_step)) if mode != "direct" else None
    direct = max_confidence(seq.joint, flat, rank_tol).raw_value if mode != "product" else None
    return FactorizationReport("max_confidence", index, per_step, product, direct)


def product_measurement(parts: Sequence[Measurement]) -> SequenceMeasurement:
    if not parts:
        raise DimMismatch("need at least one step measurement")
    shape = tuple(p.n for p in parts)
    outcomes = []
    for idx in np.ndindex(*shape):
        outcomes.append(linalg.kron(*[p.outcomes[c] for p, c in zip(parts, idx)]))
    dim = int(np.prod([p.dim for p in parts]))
    inconclusive = np.eye(dim) - sum(outcomes)
    return SequenceMeasurement(inconclusive, tuple(outcomes), shape)


def check_product_measurement(seq: SequenceEnsemble, parts: Sequence[Measurement]) -> None:
    if len(parts) != seq.length:
        raise DimMismatch(f"{len(parts)} measurements for {seq.length} steps")
    for l, (p, s) in enumerate(zip(parts, seq.steps)):
        if p.dim != s.dim or p.n != s.n:
            raise DimMismatch(f"step {l}: measurement shape ({p.dim}, {p.n}) vs ensemble ({s.dim}, {s.n})")


def sequence_p_g(seq: SequenceEnsemble, tol: float = STEP_TOL, mode: str = "both",
                 dim_cap: int = DIRECT_DIM_CAP, max_iter: int = 500, gap_tol: float = optimizer.GAP_TOL,
                 slack_tol: float = optimizer.SLACK_TOL, rank_tol: float = RANK_TOL) -> FactorizationReport:
    _check_mode(mode)
    if mode != "product":
        _check_cap(seq, dim_cap)
    certs = [optimizer.certify(s, tol, gap_tol, slack_tol, max_iter, rank_tol) for s in seq.steps]
    per_step = tuple(c.p_g for c in certs)
    details = {"per_step_certified": [c.certified for c in certs], "per_step_gap": [c.gap for c in certs]}
    product = float(np.prod(per_step)) if mode != "direct" else None
    direct = None
    if mode != "product":
        joint = optimizer.certify(seq.joint, tol, gap_tol, slack_tol, max_iter, rank_tol)
        direct = joint.p_g
        details.update(direct_certified=joint.certified, direct_gap=joint.gap, direct_dual=joint.q_g)
    return FactorizationReport("p_g", None, per_step, product, direct, details)


def confidence_gap_operator(seq: SequenceEnsemble, index: Sequence[int], rank_tol: float = RANK_TOL) -> np.ndarray:
    """``C_x rho_0 - eta_x rho_x`` on the joint space, built from per-step pieces.

    Uses the odd-parity sum/difference expansion, so each term is a product
    of per-step ``C rho_0 +- eta rho`` operators.
    """
    xs, ys = [], []
    for step, c in zip(seq.steps, index):
        rho0 = sum(p * s for p, s in zip(step.priors, step.states))
        xs.append(max_confidence(step, c, rank_tol).raw_value * rho0)
        ys.append(step.priors[c] * step.states[c])
    return linalg.plus_minus_decomposition(xs, ys, 1)


def check_lemma_ppee(seq: SequenceEnsemble, index: Sequence[int], e, tol: float = 1e-8,
                     membership_tol: float = MEMBERSHIP_TOL, rank_tol: float = RANK_TOL) -> bool:
    """Check that a joint-outcome operator is confined by the per-step kernel projectors.

    For ``E`` in the joint membership set of ``index`` (verified first), tests
    ``K (P E P) K == P E P`` where ``K`` is the product of per-step kernel
    projectors and ``P`` the support projector of the joint average state.
    """
    index = tuple(index)
    flat = seq.flat_index(index)
    e = linalg.as_hermitian(e)
    if e.shape != (seq.dim, seq.dim):
        raise DimMismatch(f"operator shape {e.shape} vs joint dimension {seq.dim}")
    joint = seq.joint
    if not linalg.is_psd(e, membership_tol):
        raise NotInMembershipSet("operator is not positive semidefinite")
    residual = mcm_residuals(joint, _single_outcome(joint.n, flat, e), rank_tol)[flat]
    if residual > membership_tol:
        raise NotInMembershipSet(f"membership residual {residual:.3g} > {membership_tol:.1e}")
    k = linalg.kron(*[max_confidence(s, c, rank_tol).pi_kernel.operator for s, c in zip(seq.steps, index)])
    p = linalg.support_projector(seq.average_state(), rank_tol).operator
    pep = p @ e @ p
    return float(np.max(np.abs(k @ pep @ k - pep))) <= tol


def _single_outcome(n: int, flat: int, e: np.ndarray) -> Measurement:
    zero = np.zeros_like(e)
    outs = tuple(e if i == flat else zero for i in range(n))
    return Measurement(zero, outs)


def dual_tensor_certificate(parts: Sequence[DualSolution], seq: SequenceEnsemble | None = None,
                            tol: float = 1e-8, rank_tol: float = RANK_TOL) -> DualSolution:
    """Product of per-step dual certificates.

    With ``seq`` given, each part must also satisfy the support condition for
    its step; the joint operator's feasibility is recorded in ``converged``.
    """
    if not parts:
        raise DimMismatch("need at least one dual solution")
    for l, part in enumerate(parts):
        if not part.converged:
            raise PartNotConverged(f"step {l} dual solve did not converge")
    if seq is not None:
        if len(parts) != seq.length:
            raise DimMismatch(f"{len(parts)} parts for {seq.length} steps")
        for l, (part, step) in enumerate(zip(parts, seq.steps)):
            if not optimizer.check_dual_support(step, part.certificate, tol, rank_tol):
                raise PartNotConverged(f"step {l} certificate has weight off the average-state support")
    h = linalg.kron(*[p.certificate for p in parts])
    value = float(np.prod([np.trace(p.certificate).real for p in parts]))
    feasible = True
    if seq is not None:
        feasible = dual_feasible(seq.joint, h, tol, rank_tol)
    iterations = sum(p.iterations for p in parts)
    return DualSolution(value, h, iterations, (), feasible)


def dual_feasible(e, h, tol: float = 1e-8, rank_tol: float = RANK_TOL) -> bool:
    if not linalg.is_psd(h, tol):
        return False
    for x in range(e.n):
        if not in_dual_set(e, x, h - e.priors[x] * e.states[x], tol, rank_tol):
            return False
    return True
