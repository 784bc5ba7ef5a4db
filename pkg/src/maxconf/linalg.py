"""Dense Hermitian operator algebra.

Operators are plain complex ``numpy`` arrays. Functions that need a Hermitian
input symmetrize it first, after checking that it is Hermitian to within
``HERMITIAN_TOL`` (max-entry deviation).

Kronecker products use numpy's row-major convention: the left factor is the
most significant index, so step 1 of a sequence is the leftmost factor.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import reduce
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DimMismatch, NotHermitian, NotPSD

HERMITIAN_TOL = 1e-9
RANK_TOL = 1e-8


class EigenSystem(NamedTuple):
    """Eigenvalues in ascending order; ``eigenvectors[:, k]`` pairs with ``eigenvalues[k]``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


@dataclass(frozen=True)
class Projector:
    operator: np.ndarray
    rank: int

    @property
    def dim(self) -> int:
        return self.operator.shape[0]

    def basis(self) -> np.ndarray:
        """Orthonormal basis of the range, one column per dimension."""
        if self.rank == 0:
            return np.zeros((self.dim, 0), dtype=complex)
        _, vecs = np.linalg.eigh(self.operator)
        return vecs[:, -self.rank :]


def as_operator(a) -> np.ndarray:
    """Return ``a`` as a finite square complex matrix (scalars become 1x1)."""
    m = np.asarray(a, dtype=complex)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimMismatch(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def hermitian_deviation(a) -> float:
    m = as_operator(a)
    return float(np.max(np.abs(m - m.conj().T), initial=0.0))


def as_hermitian(a, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Validate and symmetrize: returns ``(A + A^dagger) / 2``."""
    m = as_operator(a)
    dev = float(np.max(np.abs(m - m.conj().T), initial=0.0))
    if dev > tol:
        raise NotHermitian(f"matrix deviates from Hermitian by {dev:.3g} > {tol:.3g}")
    return (m + m.conj().T) / 2


def is_hermitian(a, tol: float = HERMITIAN_TOL) -> bool:
    return hermitian_deviation(a) <= tol


def eig_hermitian(a) -> EigenSystem:
    h = as_hermitian(a)
    w, v = np.linalg.eigh(h)
    return EigenSystem(w, v)


def min_eigenvalue(a) -> float:
    return float(np.linalg.eigvalsh(as_hermitian(a))[0])


def is_psd(a, tol: float = 1e-9) -> bool:
    """True iff the smallest eigenvalue is at least ``-tol``."""
    return min_eigenvalue(a) >= -tol


def rank_cutoff(eigenvalues: np.ndarray, rank_tol: float = RANK_TOL) -> float:
    """Eigenvalues strictly above this count as nonzero."""
    top = float(eigenvalues[-1]) if len(eigenvalues) else 0.0
    return rank_tol * max(top, 1.0)


def _check_psd(w: np.ndarray, rank_tol: float) -> None:
    cut = rank_cutoff(w, rank_tol)
    if w[0] < -cut:
        raise NotPSD(f"smallest eigenvalue {w[0]:.3g} below -{cut:.3g}")


def support_projector(a, rank_tol: float = RANK_TOL) -> Projector:
    w, v = eig_hermitian(a)
    _check_psd(w, rank_tol)
    keep = w > rank_cutoff(w, rank_tol)
    vs = v[:, keep]
    return Projector(vs @ vs.conj().T, int(keep.sum()))


def kernel_projector(a, rank_tol: float = RANK_TOL) -> Projector:
    supp = support_projector(a, rank_tol)
    dim = supp.dim
    return Projector(np.eye(dim) - supp.operator, dim - supp.rank)


def pinv_sqrt(rho, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Inverse of the positive square root of ``rho`` on its support, zero on its kernel."""
    w, v = eig_hermitian(rho)
    _check_psd(w, rank_tol)
    keep = w > rank_cutoff(w, rank_tol)
    vs = v[:, keep]
    return (vs * (1.0 / np.sqrt(w[keep]))) @ vs.conj().T


def smallest_nonzero_eigenvalue(rho, rank_tol: float = RANK_TOL) -> float:
    w = np.linalg.eigvalsh(as_hermitian(rho))
    nz = w[w > rank_cutoff(w, rank_tol)]
    if nz.size == 0:
        raise NotPSD("operator has no nonzero eigenvalue")
    return float(nz[0])


def kron(*ops) -> np.ndarray:
    """Kronecker product of one or more operators, leftmost factor most significant."""
    if not ops:
        raise DimMismatch("kron needs at least one factor")
    return reduce(np.kron, (as_operator(o) for o in ops))


def parity_vectors(length: int, parity: int):
    """All bit vectors of ``length`` whose sum has the given parity (mod 2)."""
    for bits in itertools.product((0, 1), repeat=length):
        if sum(bits) % 2 == parity:
            yield bits


def plus_minus_decomposition(xs: Sequence, ys: Sequence, parity: int) -> np.ndarray:
    """Expand ``kron(*xs) + (-1)**parity * kron(*ys)`` as a sum of products of sums.

    Computes ``2**(1-L) * sum_b kron_l (X_l + (-1)**b_l Y_l)`` over bit vectors
    ``b`` with ``sum(b) % 2 == parity``; every term is a tensor product of
    per-slot sums and differences.
    """
    if len(xs) != len(ys) or len(xs) == 0:
        raise DimMismatch("operator lists must have equal, nonzero length")
    if parity not in (0, 1):
        raise ValueError("parity must be 0 or 1")
    xs = [as_operator(x) for x in xs]
    ys = [as_operator(y) for y in ys]
    for l, (x, y) in enumerate(zip(xs, ys)):
        if x.shape != y.shape:
            raise DimMismatch(f"slot {l}: shapes {x.shape} and {y.shape} differ")
    plus = [x + y for x, y in zip(xs, ys)]
    minus = [x - y for x, y in zip(xs, ys)]
    total = None
    for bits in parity_vectors(len(xs), parity):
        term = kron(*[minus[l] if b else plus[l] for l, b in enumerate(bits)])
        total = term if total is None else total + term
    return total / 2 ** (len(xs) - 1)


def hermitian_basis(k: int) -> np.ndarray:
    """Orthonormal (Hilbert-Schmidt) real basis of k x k Hermitian matrices, shape (k*k, k, k)."""
    basis = []
    for j in range(k):
        e = np.zeros((k, k), dtype=complex)
        e[j, j] = 1.0
        basis.append(e)
    s = 1 / np.sqrt(2)
    for j in range(k):
        for l in range(j + 1, k):
            e = np.zeros((k, k), dtype=complex)
            e[j, l] = e[l, j] = s
            basis.append(e)
            e = np.zeros((k, k), dtype=complex)
            e[j, l] = -1j * s
            e[l, j] = 1j * s
            basis.append(e)
    return np.array(basis).reshape(k * k, k, k)


def ket(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def projector_onto(vec) -> np.ndarray:
    v = np.asarray(vec, dtype=complex)
    return np.outer(v, v.conj())
