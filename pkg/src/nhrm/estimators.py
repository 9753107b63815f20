"""scikit-learn style adapters around the phase classifier and the field map."""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .ep_finder import PhaseRegion, TOL_BOUNDARY, classify_phase, locate_eps
from .field import assign_charges, field_f
from .lattice import ModelParams, Momentum, make_variant


class PhaseDiagramClassifier(ClassifierMixin, BaseEstimator):
    """Label rows ``(delta, gamma/2J)`` with their phase region.

    The labels follow from a closed-form rule, so ``fit`` only records the
    label set and input width; ``y`` is accepted and ignored.
    """

    def __init__(self, tol: float = TOL_BOUNDARY):
        self.tol = tol

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        if X.shape[1] != 2:
            raise ValueError(f"expected 2 features (delta, gamma/2J), got {X.shape[1]}")
        self.n_features_in_ = 2
        self.classes_ = np.array([r.value for r in PhaseRegion])
        return self

    def predict(self, X):
        check_is_fitted(self, "classes_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        return np.array([classify_phase(d, g, self.tol).value for d, g in X], dtype=object)


class AuxiliaryFieldTransformer(TransformerMixin, BaseEstimator):
    """Map momenta ``(kx, ky)`` (or ``(kx,)`` for chains) to ``F(k)``.

    ``fit`` builds the model and locates its EPs with charges
    (``exceptional_points_``).  EP momenta map to ``(0, 0)``.
    """

    def __init__(self, j=1.0, delta=1.0 / math.sqrt(2.0), gamma=math.sqrt(3.0), g=1.0,
                 variant="base2d", t_d=0.0, v_pot=0.0, n_chains=None):
        self.j = j
        self.delta = delta
        self.gamma = gamma
        self.g = g
        self.variant = variant
        self.t_d = t_d
        self.v_pot = v_pot
        self.n_chains = n_chains

    def fit(self, X=None, y=None):
        n_chains = self.n_chains
        if n_chains is None:
            n_chains = 16 if self.variant == "base2d" else 1
        self.params_ = ModelParams(
            j=float(self.j), delta=float(self.delta), gamma=float(self.gamma), g=float(self.g),
            n_chains=n_chains, variant=make_variant(self.variant, self.t_d, self.v_pot),
        )
        eps = locate_eps(self.params_)
        self.exceptional_points_ = assign_charges(self.params_, eps) if eps else []
        self.n_features_in_ = 1 if self.params_.is_chain else 2
        return self

    def transform(self, X):
        check_is_fitted(self, "params_")
        X = check_array(X, dtype=float)
        if X.shape[1] not in (1, 2) or (X.shape[1] == 1 and not self.params_.is_chain):
            raise ValueError(f"expected {self.n_features_in_} momentum columns, got {X.shape[1]}")
        out = np.empty((len(X), 2))
        for i, row in enumerate(X):
            k = Momentum(row[0], row[1] if len(row) > 1 else 0.0)
            out[i] = field_f(self.params_, k).f
        return out
