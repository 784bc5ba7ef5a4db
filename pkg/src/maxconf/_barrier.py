"""Log-barrier Newton method for small linear matrix inequality problems.

Solves ``min c.x`` subject to ``A_j(x) = C_j + sum_k x_k B_jk >= 0`` for a
handful of Hermitian affine maps ``A_j``, by minimizing
``c.x - mu * sum_j logdet A_j(x)`` for ``mu = 1, 1/10, 1/100, ...``.

After centering at ``mu`` the objective is within ``mu * nu`` of optimal,
where ``nu`` is the total matrix size of all constraints.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SolverStall

MU_START = 1.0
MU_FACTOR = 10.0
MU_FLOOR = 1e-13
NEWTON_TOL = 1e-11
# below this (relative to the objective) a Newton decrement is rounding noise
DECREMENT_FLOOR = 1e-15
MAX_ITER = 500


@dataclass
class AffineLMI:
    """``const + sum_k x[k] * basis[k]``; ``basis`` has shape (num_vars, m, m)."""

    const: np.ndarray
    basis: np.ndarray

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.const + np.tensordot(x, self.basis, axes=1)

    @property
    def size(self) -> int:
        return self.const.shape[0]


@dataclass
class BarrierResult:
    x: np.ndarray
    objective: float
    mu: float
    bound: float
    iterations: int
    history: list = field(default_factory=list)


def _cholesky_ok(a: np.ndarray) -> bool:
    try:
        np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        return False
    return True


def _feasible(lmis, x) -> bool:
    return all(_cholesky_ok(lmi(x)) for lmi in lmis)


def _logdet(a: np.ndarray) -> float:
    ch = np.linalg.cholesky(a)
    return 2.0 * float(np.sum(np.log(np.abs(np.diag(ch)))))


def _phi(c, lmis, x, mu) -> float:
    return float(c @ x) - mu * sum(_logdet(lmi(x)) for lmi in lmis)


def _derivatives(c, lmis, x, mu):
    grad = c.astype(float).copy()
    hess = np.zeros((len(x), len(x)))
    for lmi in lmis:
        w = np.linalg.inv(lmi(x))
        wb = np.einsum("ab,kbc->kac", w, lmi.basis)
        grad -= mu * np.real(np.einsum("kaa->k", wb))
        hess += mu * np.real(np.einsum("kab,lba->kl", wb, wb))
    return grad, (hess + hess.T) / 2


def _newton_step(grad, hess):
    d = np.sqrt(np.maximum(np.diag(hess), 1e-300))
    scaled = hess / np.outer(d, d)
    try:
        step = -np.linalg.solve(scaled, grad / d) / d
    except np.linalg.LinAlgError:
        step = -np.linalg.lstsq(scaled, grad / d, rcond=None)[0] / d
    return step


def minimize(c, lmis, x0, tol: float, max_iter: int = MAX_ITER, mu0: float = MU_START) -> BarrierResult:
    """Follow the central path until ``mu * nu <= tol``.

    ``x0`` must be strictly feasible. Every recorded iterate is strictly
    feasible, so its objective is a valid bound for the problem. Raises
    :class:`SolverStall` if ``max_iter`` Newton steps are not enough.
    """
    c = np.asarray(c, dtype=float)
    x = np.asarray(x0, dtype=float).copy()
    if not _feasible(lmis, x):
        raise ValueError("starting point is not strictly feasible")
    nu = sum(lmi.size for lmi in lmis)
    history = [float(c @ x)]
    if len(x) == 0:
        return BarrierResult(x, 0.0, 0.0, 0.0, 0, history)

    stage = 0
    mu = mu0
    iterations = 0
    while True:
        while True:
            grad, hess = _derivatives(c, lmis, x, mu)
            step = _newton_step(grad, hess)
            decrement = float(-grad @ step)
            if decrement <= max(2 * NEWTON_TOL * mu, DECREMENT_FLOOR * max(1.0, abs(float(c @ x)))):
                break
            if iterations >= max_iter:
                raise SolverStall(f"iteration cap {max_iter} reached while centering at mu={mu:.1e} (target tol {tol:.1e})")
            iterations += 1
            if decrement < 0.1 * mu and _feasible(lmis, x + step):
                # inside the quadratic-convergence region a full step is safe
                x = x + step
                history.append(float(c @ x))
                continue
            f0 = _phi(c, lmis, x, mu)
            t = 1.0
            while True:
                trial = x + t * step
                if _feasible(lmis, trial) and _phi(c, lmis, trial, mu) <= f0 - 0.25 * t * decrement:
                    break
                t *= 0.5
                if t < 1e-12:
                    trial = None
                    break
            if trial is None:
                # no representable progress left at this mu
                break
            x = trial
            history.append(float(c @ x))
        if mu * nu <= tol * (1 + 1e-9):
            break
        if mu <= MU_FLOOR:
            raise SolverStall(f"barrier parameter floor reached with bound {mu * nu:.2e} > tol {tol:.1e}")
        stage += 1
        # recomputed from mu0 so repeated division does not drift upward
        mu = mu0 / MU_FACTOR**stage
    return BarrierResult(x, float(c @ x), mu, mu * nu, iterations, history)
