"""Scikit-learn compatible wrapper around the confidence correction.

Rows of ``X`` are dual-head predictions laid out as
``[y_cont, p_0, ..., p_{n_bins-1}]``; ``transform`` maps them to corrected
steering values. The transformer is stateless apart from hyperparameters,
so it composes with pipelines, ``clone``, and grid search.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .binning import make_space
from .correction import (
    CorrectionConfig,
    DualHeadOutput,
    correct,
    summarize,
)


class SteeringCorrector(BaseEstimator, TransformerMixin):
    """Applies the four-case confidence-guided correction row by row.

    Parameters mirror the correction config; ``random_state`` seeds the
    sampling cases, and a fresh generator is created per ``transform``
    call so repeated calls on the same input give identical output.
    """

    def __init__(
        self,
        n_bins: int = 11,
        tau: float = 0.9,
        low_conf: float = 0.5,
        entropy_gate: float = 1.5,
        sample_count: int = 32,
        epsilon: float = 1e-12,
        random_state: int = 0,
    ):
        self.n_bins = n_bins
        self.tau = tau
        self.low_conf = low_conf
        self.entropy_gate = entropy_gate
        self.sample_count = sample_count
        self.epsilon = epsilon
        self.random_state = random_state

    def fit(self, X=None, y=None):
        """Validate hyperparameters and build the bin lattice."""
        self.space_ = make_space(self.n_bins)
        self.config_ = CorrectionConfig(
            tau=self.tau,
            low_conf=self.low_conf,
            entropy_gate=self.entropy_gate,
            sample_count=self.sample_count,
            epsilon=self.epsilon,
            rng_seed=self.random_state,
        )
        if X is not None:
            self._check_X(X)
        return self

    def _check_X(self, X) -> np.ndarray:
        X = check_array(X, dtype=float, ensure_2d=True)
        if X.shape[1] != 1 + self.n_bins:
            raise ValueError(
                f"X must have 1 + n_bins = {1 + self.n_bins} columns "
                f"([y_cont, p_0..p_{self.n_bins - 1}]), got {X.shape[1]}"
            )
        return X

    def _outcomes(self, X):
        check_is_fitted(self, "space_")
        X = self._check_X(X)
        rng = np.random.default_rng(self.random_state)
        for row in X:
            out = DualHeadOutput(y_cont=float(row[0]), probs=row[1:])
            yield correct(out, self.space_, self.config_, rng)

    def transform(self, X) -> np.ndarray:
        """Corrected steering value per row."""
        return np.array([o.y_final for o in self._outcomes(X)])

    def predict(self, X) -> np.ndarray:
        """Alias of :meth:`transform` for predictor-shaped composition."""
        return self.transform(X)

    def correction_cases(self, X) -> np.ndarray:
        """Case label ("Case1".."Case4") fired for each row."""
        return np.array([o.case_id.value for o in self._outcomes(X)])

    def confidence_summaries(self, X) -> list:
        """Per-row confidence signals without applying any correction."""
        check_is_fitted(self, "space_")
        X = self._check_X(X)
        return [
            summarize(DualHeadOutput(y_cont=float(r[0]), probs=r[1:]), self.space_, self.config_)
            for r in X
        ]
