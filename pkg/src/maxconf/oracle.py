"""Brute-force bounds on the optimal success probability for tiny ensembles.

Deliberately independent of :mod:`maxconf.confidence` and
:mod:`maxconf.optimizer`: maximum confidences are found by bisection on
``q rho_0 - eta rho >= 0``, primal candidates by random sampling plus
coordinate ascent on scale factors, dual candidates by random sampling and
by a cutting-plane LP over sampled vector cuts. Dual feasibility is restored
by eigenvalue clipping and by lifting the negative part of each violated
constraint. Only
:mod:`maxconf.linalg` primitives are shared.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from . import linalg
from .ensemble import Ensemble, check_valid, pure_state_ensemble
from .errors import ScaleCapExceeded

MAX_DIM = 4
MAX_STATES = 3
ASCENT_STEP = 0.05
ASCENT_SWEEPS = 200
ASCENT_MIN_STEP = 1e-6
CUT_ROUNDS = 100
CUT_BOX = 2.0
CUT_GAP = 1e-7


@dataclass(frozen=True)
class OracleBounds:
    best_primal: float
    best_dual: float

    @property
    def interval(self) -> tuple[float, float]:
        return (self.best_primal, self.best_dual)

    @property
    def width(self) -> float:
        return self.best_dual - self.best_primal

    def contains(self, value: float, slack: float = 1e-7) -> bool:
        return self.best_primal - slack <= value <= self.best_dual + slack


def _bisect_confidence(rho0, weighted, support):
    """Smallest q with q rho_0 - weighted >= 0 on the support of rho_0."""
    r0 = support.conj().T @ rho0 @ support
    w = support.conj().T @ weighted @ support

    def ok(q):
        return np.linalg.eigvalsh(q * r0 - w)[0] >= 0

    lo, hi = 0.0, 1.0
    while not ok(hi):
        hi *= 2
    for _ in range(200):
        mid = (lo + hi) / 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-15 * max(hi, 1):
            break
    return hi


def _kernels(e: Ensemble):
    rho0 = sum(p * s for p, s in zip(e.priors, e.states))
    support = linalg.support_projector(rho0).basis()
    kernels = []
    for p, s in zip(e.priors, e.states):
        q = _bisect_confidence(rho0, p * s, support)
        proj = linalg.kernel_projector(q * rho0 - p * s)
        kernels.append((proj.operator, proj.basis()))
    return kernels


def _random_psd(rng, dim):
    rank = int(rng.integers(1, dim + 1))
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    return g @ g.conj().T


def _random_hermitian(rng, dim):
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (a + a.conj().T) / 2


def _random_unit(rng, dim):
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def _lam_max(a):
    return float(np.linalg.eigvalsh(a)[-1])


def _ascend(ops, rewards, scales):
    """Grow each scale factor in turn while the operators still fit under the identity."""
    scales = scales.copy()
    step = ASCENT_STEP
    while step >= ASCENT_MIN_STEP:
        for _ in range(ASCENT_SWEEPS):
            moved = False
            for i in range(len(ops)):
                if rewards[i] <= 0:
                    continue
                trial = scales.copy()
                trial[i] += step
                if _lam_max((trial[:, None, None] * ops).sum(axis=0)) <= 1:
                    scales = trial
                    moved = True
            if not moved:
                break
        step /= 2
    return scales


def _primal_value(ops, rewards, scales):
    return float(np.dot(scales, rewards))


def _primal_candidate(fs, kernels, priors, states):
    ops = np.array([k @ f @ k for k, f in zip(kernels, fs)])
    # unit-norm operators; the sampled norms become the starting scale factors
    norms = np.array([_lam_max(m) for m in ops])
    live = norms > 1e-12
    if not live.any():
        return 0.0
    ops, norms = ops[live], norms[live]
    ops = ops / norms[:, None, None]
    rewards = np.array([p * np.real(np.trace(s @ m)) for p, s, m in zip(priors[live], np.asarray(states)[live], ops)])
    scales = norms / _lam_max(np.tensordot(norms, ops, axes=1))
    scales = _ascend(ops, rewards, scales)
    return _primal_value(ops, rewards, scales)


def _dual_repair(k, kernels, priors, states):
    """Trace of a feasible operator obtained from ``k`` by adding PSD pieces.

    Negative eigenvalues of ``k`` are clipped, then the negative part of each
    constraint block is added back inside that block's kernel.
    """
    w, v = np.linalg.eigh(k)
    h = (v * np.maximum(w, 0)) @ v.conj().T
    for (_, basis), p, s in zip(kernels, priors, states):
        if basis.shape[1] == 0:
            continue
        block = basis.conj().T @ (h - p * s) @ basis
        w, u = np.linalg.eigh((block + block.conj().T) / 2)
        if w[0] < 0:
            lift = basis @ u
            h = h + (lift * np.maximum(-w, 0)) @ lift.conj().T
    return float(np.trace(h).real), h


def _cut_row(hb, u):
    return np.real(np.einsum("a,kab,b->k", u.conj(), hb, u))


def _cutting_plane_dual(e, kernels, samples, rng):
    """Outer LP approximation of the dual cone by sampled vector cuts.

    Each cut is ``u^dagger H u >= 0`` or, for ``u`` in a kernel,
    ``u^dagger (H - eta rho) u >= 0``. After each LP the most violated
    eigenvectors are added as new cuts; every LP solution is repaired and
    scored, so the returned value is always that of a feasible operator.
    """
    dim = e.dim
    hb = linalg.hermitian_basis(dim)
    blocks = [(b, p * s) for (_, b), p, s in zip(kernels, e.priors, e.states) if b.shape[1]]
    rows, rhs = [], []

    def add(u, weighted=None):
        rows.append(_cut_row(hb, u))
        rhs.append(0.0 if weighted is None else float(np.real(u.conj() @ weighted @ u)))

    per = max(samples // (1 + len(blocks)), 1)
    for _ in range(per):
        add(_random_unit(rng, dim))
    for b, w in blocks:
        for _ in range(per):
            add(b @ _random_unit(rng, b.shape[1]), w)

    cost = np.real(np.einsum("kaa->k", hb))
    best_val, best_h = np.inf, None
    for _ in range(CUT_ROUNDS):
        res = linprog(cost, A_ub=-np.array(rows), b_ub=-np.array(rhs),
                      bounds=[(-CUT_BOX, CUT_BOX)] * len(cost), method="highs")
        if res.status != 0:
            break
        k = np.tensordot(res.x, hb, axes=1)
        val, h = _dual_repair(k, kernels, e.priors, e.states)
        if val < best_val:
            best_val, best_h = val, h
        if best_val - res.fun <= CUT_GAP:
            break
        ev, vecs = np.linalg.eigh(k)
        for j in np.flatnonzero(ev < 0):
            add(vecs[:, j])
        for b, w in blocks:
            blk = b.conj().T @ (k - w) @ b
            ev, vecs = np.linalg.eigh((blk + blk.conj().T) / 2)
            for j in np.flatnonzero(ev < 0):
                add(b @ vecs[:, j], w)
    return best_h, best_val


def oracle_bounds(e: Ensemble, samples: int = 2000, seed=0) -> OracleBounds:
    """Sandwich the optimum between sampled feasible primal and dual values."""
    check_valid(e)
    if e.dim > MAX_DIM or e.n > MAX_STATES:
        raise ScaleCapExceeded(f"oracle limited to dim <= {MAX_DIM}, n <= {MAX_STATES}; got {e.dim}, {e.n}")
    rng = np.random.default_rng(seed)
    kernels = _kernels(e)
    projectors = [k[0] for k in kernels]
    priors, states, dim = e.priors, e.states, e.dim

    half = max(samples // 2, 1)
    best_p, best_fs = 0.0, None
    for _ in range(half):
        fs = [_random_psd(rng, dim) for _ in range(e.n)]
        val = _primal_candidate(fs, projectors, priors, states)
        if val > best_p:
            best_p, best_fs = val, fs
    sigma = 0.3
    for _ in range(samples - half):
        if best_fs is None:
            break
        fs = []
        for f in best_fs:
            scale = np.linalg.norm(f)
            g = f + sigma * scale * _random_hermitian(rng, dim)
            w, v = np.linalg.eigh(g)
            fs.append((v * np.maximum(w, 0)) @ v.conj().T)
        val = _primal_candidate(fs, projectors, priors, states)
        if val > best_p:
            best_p, best_fs = val, fs
            sigma *= 1.3
        else:
            sigma = max(sigma * 0.95, 1e-4)

    rho0 = sum(p * s for p, s in zip(priors, states))
    start = max(_bisect_confidence(rho0, p * s, np.eye(dim)) for p, s in zip(priors, states)) * rho0
    best_d = _dual_repair(start, kernels, priors, states)[0]
    global_dual = max(samples // 5, 1)
    for _ in range(global_dual):
        weights = rng.dirichlet(np.ones(e.n)) * e.n
        k = sum(w * p * s for w, p, s in zip(weights, priors, states))
        k = k + rng.exponential(0.05) * _random_psd(rng, dim) / dim
        val, h = _dual_repair(k, kernels, priors, states)
        if val < best_d:
            best_d = val
    _, val = _cutting_plane_dual(e, kernels, samples - global_dual, rng)
    if val < best_d:
        best_d = val
    return OracleBounds(best_p, best_d)


@dataclass(frozen=True)
class Fixture:
    name: str
    ensemble: Ensemble
    expected: dict


def theta_pair(theta: float) -> Ensemble:
    """Equal-prior pure states ``cos(theta/2)|0> +- sin(theta/2)|1>``."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return pure_state_ensemble([[c, s], [c, -s]])


def fixture_suite() -> list[Fixture]:
    a = Ensemble(np.array([0.5, 0.5]), (np.diag([1.0, 0.0]), np.eye(2) / 2))
    fixtures = [
        Fixture("A", a, {"C": (2 / 3, 1.0), "p_g": 0.75, "lower_bound": 0.125, "baseline_success": 5 / 16}),
        Fixture(
            "orthogonal",
            Ensemble(np.array([0.5, 0.5]), (np.diag([1.0, 0.0]), np.diag([0.0, 1.0]))),
            {"C": (1.0, 1.0), "p_g": 1.0, "lower_bound": 0.25, "baseline_success": 0.5},
        ),
        Fixture(
            "single",
            Ensemble(np.array([1.0]), (np.diag([0.7, 0.3]),)),
            {"C": (1.0,), "p_g": 1.0, "lower_bound": 0.3},
        ),
    ]
    for label, theta in (("pi/6", np.pi / 6), ("pi/3", np.pi / 3), ("pi/2", np.pi / 2)):
        fixtures.append(
            Fixture(
                f"theta={label}",
                theta_pair(theta),
                {
                    "C": (1.0, 1.0),
                    "p_g": 1 - np.cos(theta),
                    "lower_bound": (1 - np.cos(theta)) / 4,
                    "baseline_success": np.sin(theta) ** 2 / 2,
                },
            )
        )
    fixtures.append(
        Fixture("A-embedded-dim3", a.embed(3), {"C": (2 / 3, 1.0), "p_g": 0.75, "lower_bound": 0.125,
                                                 "baseline_success": 5 / 16})
    )
    return fixtures
