"""Ensembles of quantum states and their tensor products.

Indices are 0-based throughout the Python API. Joint indices of a sequence
ensemble are flattened row-major with step 0 most significant, matching
:func:`maxconf.linalg.kron`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from . import linalg
from .errors import BadRank, DimMismatch, InvalidEnsemble

PRIOR_SUM_TOL = 1e-9
TRACE_TOL = 1e-9
PSD_TOL = 1e-9
MIN_GENERATED_PRIOR = 0.01


@dataclass(frozen=True)
class Violation:
    kind: str
    index: int | None
    message: str

    def __str__(self) -> str:
        where = "" if self.index is None else f" (state {self.index})"
        return f"{self.kind}{where}: {self.message}"


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Prior probabilities and density operators on one Hilbert space.

    Construction only checks shapes; use :func:`validate` for the physical
    constraints (positive priors summing to one, unit-trace PSD states).
    """

    priors: np.ndarray
    states: tuple

    def __post_init__(self):
        priors = np.asarray(self.priors, dtype=float).reshape(-1)
        states = tuple(linalg.as_operator(s) for s in self.states)
        if len(priors) != len(states):
            raise DimMismatch(f"{len(priors)} priors but {len(states)} states")
        if states and len({s.shape for s in states}) != 1:
            raise DimMismatch("states act on different dimensions")
        priors.setflags(write=False)
        for s in states:
            s.setflags(write=False)
        object.__setattr__(self, "priors", priors)
        object.__setattr__(self, "states", states)

    @property
    def n(self) -> int:
        return len(self.states)

    @property
    def dim(self) -> int:
        return self.states[0].shape[0] if self.states else 0

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other) -> bool:
        if not isinstance(other, Ensemble):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.priors, other.priors)
            and all(np.array_equal(a, b) for a, b in zip(self.states, other.states))
        )

    __hash__ = None

    def allclose(self, other: "Ensemble", atol: float = 1e-12) -> bool:
        return (
            self.n == other.n
            and self.dim == other.dim
            and np.allclose(self.priors, other.priors, rtol=0, atol=atol)
            and all(np.allclose(a, b, rtol=0, atol=atol) for a, b in zip(self.states, other.states))
        )

    def embed(self, dim: int) -> "Ensemble":
        """Same ensemble placed in the top-left block of a larger space."""
        if dim < self.dim:
            raise DimMismatch(f"cannot embed dimension {self.dim} into {dim}")
        states = []
        for s in self.states:
            big = np.zeros((dim, dim), dtype=complex)
            big[: self.dim, : self.dim] = s
            states.append(big)
        return Ensemble(self.priors, tuple(states))


def validate(e: Ensemble) -> list[Violation]:
    """Every broken invariant of ``e``; empty iff ``e`` is a valid ensemble."""
    out: list[Violation] = []
    if e.n == 0:
        return [Violation("EmptyEnsemble", None, "ensemble has no states")]
    for i, p in enumerate(e.priors):
        if not np.isfinite(p):
            out.append(Violation("NonFinitePrior", i, f"prior {p!r}"))
        elif p == 0:
            out.append(Violation("ZeroPriorViolation", i, "priors must be strictly positive"))
        elif p < 0:
            out.append(Violation("NegativePriorViolation", i, f"prior {p:.6g} < 0"))
    total = float(np.sum(e.priors))
    if abs(total - 1) > PRIOR_SUM_TOL:
        out.append(Violation("PriorsSumViolation", None, f"priors sum to {total:.12g}"))
    for i, s in enumerate(e.states):
        dev = linalg.hermitian_deviation(s)
        if dev > linalg.HERMITIAN_TOL:
            out.append(Violation("NotHermitianViolation", i, f"deviation {dev:.3g}"))
            continue
        lo = linalg.min_eigenvalue(s)
        if lo < -PSD_TOL:
            out.append(Violation("NotPSDViolation", i, f"smallest eigenvalue {lo:.3g}"))
        tr = float(np.trace(s).real)
        if abs(tr - 1) > TRACE_TOL:
            out.append(Violation("TraceViolation", i, f"trace {tr:.12g} != 1"))
    return out


def check_valid(e: Ensemble) -> Ensemble:
    problems = validate(e)
    if problems:
        raise InvalidEnsemble("; ".join(map(str, problems)), problems)
    return e


def average_state(e: Ensemble) -> np.ndarray:
    check_valid(e)
    return sum(p * s for p, s in zip(e.priors, e.states))


def _average_unchecked(e: Ensemble) -> np.ndarray:
    return sum(p * s for p, s in zip(e.priors, e.states))


@dataclass(frozen=True, eq=False)
class SequenceEnsemble:
    """Independent draws from each step ensemble, viewed as product states."""

    steps: tuple

    def __post_init__(self):
        steps = tuple(self.steps)
        if not steps:
            raise InvalidEnsemble("a sequence needs at least one step")
        for s in steps:
            check_valid(s)
        object.__setattr__(self, "steps", steps)

    @property
    def length(self) -> int:
        return len(self.steps)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(s.n for s in self.steps)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(s.dim for s in self.steps)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    def indices(self):
        """Joint indices in flattening order."""
        return list(itertools.product(*(range(n) for n in self.shape)))

    def flat_index(self, index: Sequence[int]) -> int:
        index = tuple(index)
        if len(index) != self.length or any(not 0 <= c < n for c, n in zip(index, self.shape)):
            raise IndexError(f"joint index {index} out of range for shape {self.shape}")
        return int(np.ravel_multi_index(index, self.shape))

    def joint_prior(self, index: Sequence[int]) -> float:
        return float(np.prod([s.priors[c] for s, c in zip(self.steps, index)]))

    def joint_state(self, index: Sequence[int]) -> np.ndarray:
        return linalg.kron(*[s.states[c] for s, c in zip(self.steps, index)])

    @cached_property
    def joint(self) -> Ensemble:
        """The flattened ensemble on the full tensor-product space."""
        idx = self.indices()
        priors = [self.joint_prior(c) for c in idx]
        return Ensemble(np.array(priors), tuple(self.joint_state(c) for c in idx))

    def average_state(self) -> np.ndarray:
        return linalg.kron(*[_average_unchecked(s) for s in self.steps])


def tensor(ensembles: Sequence[Ensemble]) -> SequenceEnsemble:
    return SequenceEnsemble(tuple(ensembles))


def random_ensemble(dim: int, n: int, rank: int, seed=None) -> Ensemble:
    """Random ensemble with flat-Dirichlet priors and rank-``rank`` states.

    Priors are clamped to at least 0.01 and renormalized. Each state is
    ``G G^dagger / Tr(G G^dagger)`` with ``G`` a dim x rank matrix of standard
    complex Gaussians.
    """
    if dim < 1 or n < 1:
        raise ValueError("dim and n must be positive")
    if not 1 <= rank <= dim:
        raise BadRank(f"rank {rank} outside [1, {dim}]")
    rng = np.random.default_rng(seed)
    priors = np.maximum(rng.dirichlet(np.ones(n)), MIN_GENERATED_PRIOR)
    priors = priors / priors.sum()
    states = []
    for _ in range(n):
        g = (rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))) / np.sqrt(2)
        rho = g @ g.conj().T
        rho = (rho + rho.conj().T) / 2
        states.append(rho / np.trace(rho).real)
    return Ensemble(priors, tuple(states))


def pure_state_ensemble(vectors: Sequence, priors: Sequence[float] | None = None) -> Ensemble:
    kets = [np.asarray(v, dtype=complex) for v in vectors]
    kets = [v / np.linalg.norm(v) for v in kets]
    if priors is None:
        priors = np.full(len(kets), 1 / len(kets))
    return Ensemble(np.asarray(priors, dtype=float), tuple(linalg.projector_onto(v) for v in kets))
