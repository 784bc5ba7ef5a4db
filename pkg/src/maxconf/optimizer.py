"""Best success probability over maximum-confidence measurements, with a dual certificate.

Primal: maximize ``sum_i eta_i Tr(rho_i M_i)`` over measurements whose every
conclusive operator attains its maximum confidence. Such an ``M_i`` is exactly
a PSD operator living on the kernel ``K_i`` of ``C_i rho_0 - eta_i rho_i``, so
it is parameterized as ``M_i = B_i G_i B_i^dagger`` with ``B_i`` an orthonormal
basis of ``K_i`` and ``G_i >= 0``; the only coupling is ``sum_i M_i <= I``.

Dual: minimize ``Tr H`` over ``H >= 0`` with ``B_i^dagger (H - eta_i rho_i) B_i >= 0``.

Both are solved by :mod:`maxconf._barrier`. The pair is certified by the
duality gap and the complementary-slackness residuals
``Tr(M_? H)`` and ``Tr[M_i (H - eta_i rho_i)]``, which sum to the gap.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _barrier, linalg
from .confidence import (
    COMPLETENESS_TOL,
    Measurement,
    max_confidences,
    mcm_residuals,
    success_probability,
)
from .ensemble import Ensemble, average_state, check_valid
from .linalg import RANK_TOL

SOLVE_TOL = 1e-9
GAP_TOL = 1e-6
SLACK_TOL = 1e-6
FEAS_TOL = 1e-9
INITIAL_PRIMAL_MASS = 0.5


@dataclass(frozen=True, eq=False)
class PrimalSolution:
    value: float
    measurement: Measurement
    iterations: int = 0
    history: tuple = ()


@dataclass(frozen=True, eq=False)
class DualSolution:
    value: float
    certificate: np.ndarray
    iterations: int = 0
    history: tuple = ()
    converged: bool = True


@dataclass(frozen=True, eq=False)
class OptimizationCertificate:
    primal: PrimalSolution
    dual: DualSolution
    gap: float
    slackness: tuple
    certified: bool
    gap_tol: float = GAP_TOL
    slack_tol: float = SLACK_TOL
    checks: dict = field(default_factory=dict)

    @property
    def p_g(self) -> float:
        return self.primal.value

    @property
    def q_g(self) -> float:
        return self.dual.value


def kernel_bases(e: Ensemble, rank_tol: float = RANK_TOL) -> list[np.ndarray]:
    """Orthonormal bases (as columns) of the kernels of ``C_i rho_0 - eta_i rho_i``."""
    return [r.pi_kernel.basis() for r in max_confidences(e, rank_tol)]


def _herm_from_coords(coords: np.ndarray, basis: np.ndarray) -> np.ndarray:
    return np.tensordot(coords, basis, axes=1)


def solve_primal(e: Ensemble, tol: float = SOLVE_TOL, max_iter: int = _barrier.MAX_ITER,
                 rank_tol: float = RANK_TOL) -> PrimalSolution:
    check_valid(e)
    dim, n = e.dim, e.n
    bases = kernel_bases(e, rank_tol)
    sizes = [b.shape[1] for b in bases]
    offsets = np.cumsum([0] + [k * k for k in sizes])
    nvar = int(offsets[-1])

    lmis = []
    cost = np.zeros(nvar)
    x0 = np.zeros(nvar)
    completeness = np.zeros((nvar, dim, dim), dtype=complex)
    for i, (b, k) in enumerate(zip(bases, sizes)):
        if k == 0:
            # empty kernel: outcome frozen at zero
            continue
        hb = linalg.hermitian_basis(k)
        sl = slice(offsets[i], offsets[i + 1])
        block = np.zeros((nvar, k, k), dtype=complex)
        block[sl] = hb
        lmis.append(_barrier.AffineLMI(np.zeros((k, k), dtype=complex), block))
        completeness[sl] = -np.einsum("ab,kbc,dc->kad", b, hb, b.conj())
        reward = e.priors[i] * b.conj().T @ e.states[i] @ b
        cost[sl] = -np.real(np.einsum("kab,ba->k", hb, reward))
        x0[offsets[i] : offsets[i] + k] = INITIAL_PRIMAL_MASS / (n * k)
    lmis.append(_barrier.AffineLMI(np.eye(dim, dtype=complex), completeness))

    res = _barrier.minimize(cost, lmis, x0, tol, max_iter)

    outcomes = []
    for i, (b, k) in enumerate(zip(bases, sizes)):
        if k == 0:
            outcomes.append(np.zeros((dim, dim), dtype=complex))
            continue
        g = _herm_from_coords(res.x[offsets[i] : offsets[i + 1]], linalg.hermitian_basis(k))
        m = b @ g @ b.conj().T
        outcomes.append((m + m.conj().T) / 2)
    meas = Measurement.from_outcomes(outcomes)
    value = float(success_probability(e, meas))
    return PrimalSolution(value, meas, res.iterations, tuple(-h for h in res.history))


def repair_dual(e: Ensemble, h: np.ndarray, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Make ``h`` exactly dual feasible without moving weight off the average state's support.

    Compresses onto the support ``P`` of the average state (never increases
    the trace, keeps feasibility), then adds ``t * P`` with the smallest
    ``t >= 0`` that clears any negative eigenvalue left by rounding.
    """
    rho0 = average_state(e)
    p = linalg.support_projector(rho0, rank_tol).operator
    h = p @ linalg.as_hermitian(h) @ p
    h = (h + h.conj().T) / 2
    vb = linalg.support_projector(rho0, rank_tol).basis()
    shift = max(0.0, -float(np.linalg.eigvalsh(vb.conj().T @ h @ vb)[0]))
    for b, prior, state in zip(kernel_bases(e, rank_tol), e.priors, e.states):
        # only the part of each kernel inside the support can go negative
        sub = b.conj().T @ p @ b
        w, v = np.linalg.eigh((sub + sub.conj().T) / 2)
        inside = b @ v[:, w > 0.5]
        if inside.shape[1] == 0:
            continue
        block = inside.conj().T @ (h - prior * state) @ inside
        shift = max(shift, -float(np.linalg.eigvalsh((block + block.conj().T) / 2)[0]))
    return h + shift * p


def solve_dual(e: Ensemble, tol: float = SOLVE_TOL, max_iter: int = _barrier.MAX_ITER,
               rank_tol: float = RANK_TOL) -> DualSolution:
    check_valid(e)
    dim = e.dim
    hb = linalg.hermitian_basis(dim)
    lmis = [_barrier.AffineLMI(np.zeros((dim, dim), dtype=complex), hb)]
    for b, prior, state in zip(kernel_bases(e, rank_tol), e.priors, e.states):
        if b.shape[1] == 0:
            continue
        const = -prior * b.conj().T @ state @ b
        basis = np.einsum("ba,kbc,cd->kad", b.conj(), hb, b)
        lmis.append(_barrier.AffineLMI(const, basis))
    cost = np.real(np.einsum("kaa->k", hb))
    x0 = np.zeros(dim * dim)
    x0[:dim] = 1 + float(np.max(e.priors))

    res = _barrier.minimize(cost, lmis, x0, tol, max_iter)
    h = repair_dual(e, _herm_from_coords(res.x, hb), rank_tol)
    return DualSolution(float(np.trace(h).real), h, res.iterations, tuple(res.history))


def solve_minimum_error(e: Ensemble):
    """Minimum-error discrimination without the confidence constraint is not provided."""
    raise NotImplementedError("minimum-error discrimination is outside the scope of maxconf")


@dataclass(frozen=True)
class CertificateCheck:
    """Outcome of re-checking a measurement/operator pair; ``checks`` maps name to pass flag."""

    checks: dict
    primal_value: float
    dual_value: float
    gap: float
    slackness: tuple
    membership: tuple

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    @property
    def failed(self) -> list[str]:
        return [k for k, ok in self.checks.items() if not ok]


def slackness_residuals(e: Ensemble, m: Measurement, h: np.ndarray) -> tuple:
    """``(Tr(M_? H), Tr[M_1 (H - eta_1 rho_1)], ...)``."""
    out = [float(np.real(np.trace(m.inconclusive @ h)))]
    for mi, prior, state in zip(m.outcomes, e.priors, e.states):
        out.append(float(np.real(np.trace(mi @ (h - prior * state)))))
    return tuple(out)


def check_certificate(e: Ensemble, m: Measurement, h, gap_tol: float = GAP_TOL,
                      slack_tol: float = SLACK_TOL, feas_tol: float = FEAS_TOL,
                      rank_tol: float = RANK_TOL) -> CertificateCheck:
    """Re-verify a primal/dual pair from the operators alone (no solving)."""
    check_valid(e)
    h = linalg.as_operator(h)
    checks = {}
    checks["dimensions"] = m.dim == e.dim and m.n == e.n and h.shape == (e.dim, e.dim)
    if not checks["dimensions"]:
        return CertificateCheck(checks, float("nan"), float("nan"), float("nan"), (), ())
    checks["measurement_psd"] = all(
        linalg.is_hermitian(x) and linalg.is_psd(x, feas_tol) for x in (m.inconclusive, *m.outcomes)
    )
    checks["completeness"] = m.completeness_residual() <= COMPLETENESS_TOL
    membership = tuple(mcm_residuals(e, m, rank_tol))
    checks["membership"] = all(r <= slack_tol for r in membership)
    herm = linalg.is_hermitian(h)
    checks["dual_psd"] = herm and linalg.is_psd(h, feas_tol)
    feasible = herm
    if herm:
        for r, prior, state in zip(max_confidences(e, rank_tol), e.priors, e.states):
            k = r.pi_kernel.operator
            feasible = feasible and linalg.is_psd(k @ (h - prior * state) @ k, feas_tol)
    checks["dual_feasibility"] = bool(feasible)
    p = float(success_probability(e, m))
    q = float(np.real(np.trace(h)))
    gap = q - p
    checks["gap"] = -gap_tol <= gap <= gap_tol
    slack = slackness_residuals(e, m, h)
    checks["slackness"] = all(abs(s) <= slack_tol for s in slack)
    return CertificateCheck(checks, p, q, float(gap), slack, membership)


def certify(e: Ensemble, tol: float = SOLVE_TOL, gap_tol: float = GAP_TOL, slack_tol: float = SLACK_TOL,
            max_iter: int = _barrier.MAX_ITER, rank_tol: float = RANK_TOL) -> OptimizationCertificate:
    primal = solve_primal(e, tol, max_iter, rank_tol)
    dual = solve_dual(e, tol, max_iter, rank_tol)
    chk = check_certificate(e, primal.measurement, dual.certificate, gap_tol, slack_tol, rank_tol=rank_tol)
    return OptimizationCertificate(
        primal, dual, chk.gap, chk.slackness, chk.passed, gap_tol, slack_tol, dict(chk.checks)
    )


def lower_bound(e: Ensemble, rank_tol: float = RANK_TOL) -> float:
    """Smallest nonzero eigenvalue of the average state divided by the number of states."""
    return float(linalg.smallest_nonzero_eigenvalue(average_state(e), rank_tol) / e.n)


def check_dual_support(e: Ensemble, h, tol: float = 1e-8, rank_tol: float = RANK_TOL) -> bool:
    p = linalg.support_projector(average_state(e), rank_tol).operator
    h = linalg.as_operator(h)
    return float(np.max(np.abs(p @ h @ p - h))) <= tol
