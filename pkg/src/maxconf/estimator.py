"""scikit-learn style wrapper around the certified optimizer.

``X`` is a stack of density operators with shape ``(n_states, dim, dim)`` and
``sample_weight`` the priors. ``fit`` solves for the best
maximum-confidence measurement; ``transform`` maps any stack of states to
outcome probabilities ``[P(?), P(1), ..., P(n)]``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import optimizer
from .confidence import max_confidences, success_probability
from .ensemble import Ensemble, check_valid
from .errors import DimMismatch
from .linalg import RANK_TOL

INCONCLUSIVE = -1


def _as_states(X) -> np.ndarray:
    X = np.asarray(X, dtype=complex)
    if X.ndim == 2:
        X = X[None]
    if X.ndim != 3 or X.shape[1] != X.shape[2]:
        raise DimMismatch(f"expected shape (n_states, dim, dim), got {X.shape}")
    return X


class MaxConfidenceDiscriminator(TransformerMixin, BaseEstimator):
    """Best measurement among those attaining every maximum confidence.

    Parameters mirror the optimizer's tolerances. Fitted attributes:
    ``measurement_``, ``certificate_``, ``confidences_``, ``p_g_``,
    ``n_states_`` and ``dim_``.
    """

    def __init__(self, tol=optimizer.SOLVE_TOL, gap_tol=optimizer.GAP_TOL, slack_tol=optimizer.SLACK_TOL,
                 max_iter=500, rank_tol=RANK_TOL):
        self.tol = tol
        self.gap_tol = gap_tol
        self.slack_tol = slack_tol
        self.max_iter = max_iter
        self.rank_tol = rank_tol

    def fit(self, X, y=None, sample_weight=None):
        states = _as_states(X)
        n = len(states)
        priors = np.full(n, 1.0 / n) if sample_weight is None else np.asarray(sample_weight, dtype=float)
        e = check_valid(Ensemble(priors, tuple(states)))
        cert = optimizer.certify(e, self.tol, self.gap_tol, self.slack_tol, self.max_iter, self.rank_tol)
        self.ensemble_ = e
        self.certificate_ = cert
        self.measurement_ = cert.primal.measurement
        self.confidences_ = np.array([r.value for r in max_confidences(e, self.rank_tol)])
        self.p_g_ = cert.p_g
        self.n_states_ = n
        self.dim_ = e.dim
        return self

    def transform(self, X):
        check_is_fitted(self, "measurement_")
        states = _as_states(X)
        if states.shape[1] != self.dim_:
            raise DimMismatch(f"states have dimension {states.shape[1]}, fitted on {self.dim_}")
        ops = (self.measurement_.inconclusive, *self.measurement_.outcomes)
        return np.real(np.einsum("sab,oba->so", states, np.array(ops)))

    def predict(self, X):
        """Most likely outcome per state; ``-1`` when the inconclusive outcome dominates."""
        probs = self.transform(X)
        best = np.argmax(probs, axis=1) - 1
        return np.where(best < 0, INCONCLUSIVE, best)

    def score(self, X=None, y=None, sample_weight=None):
        """Success probability of the fitted measurement on ``(X, sample_weight)``.

        With no arguments this is the optimum on the fitted ensemble.
        """
        check_is_fitted(self, "measurement_")
        if X is None:
            return self.p_g_
        states = _as_states(X)
        n = len(states)
        priors = np.full(n, 1.0 / n) if sample_weight is None else np.asarray(sample_weight, dtype=float)
        return success_probability(check_valid(Ensemble(priors, tuple(states))), self.measurement_)
