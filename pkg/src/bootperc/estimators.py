"""scikit-learn compatible wrappers around the engine and the L_c search."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .engine import closure_array, make_nr_family
from .experiments import critical_length
from .scaling import ScalingPoint, lambda_, scaling_fit
from .validation import check_grids, check_probabilities, check_spec


class BootstrapClosure(TransformerMixin, BaseEstimator):
    """Maps each initial grid to its bootstrap closure.

    ``predict`` returns whether each grid percolates. ``fit`` only validates
    the parameters; the dynamics have nothing to learn.
    """

    def __init__(self, a=(1, 1), r=2, geometry="cube", method="auto"):
        self.a = a
        self.r = r
        self.geometry = geometry
        self.method = method

    def fit(self, X=None, y=None):
        if self.geometry not in ("cube", "torus"):
            raise ValueError(f"unknown geometry {self.geometry!r}")
        self.spec_ = check_spec(self.a, self.r)
        self.family_ = make_nr_family(self.spec_)
        if X is not None:
            self.grid_shape_ = check_grids(X, self.spec_.d).shape[1:]
        return self

    def transform(self, X):
        check_is_fitted(self, "family_")
        X = check_grids(X, self.spec_.d)
        torus = self.geometry == "torus"
        return np.stack([closure_array(x, self.family_, torus, self.method) for x in X])

    def predict(self, X):
        out = self.transform(X)
        return out.reshape(len(out), -1).all(axis=1)


class CriticalLengthEstimator(RegressorMixin, BaseEstimator):
    """Estimates L_c at each training density and fits a scaling law.

    ``fit(P)`` takes densities (shape ``(n,)`` or ``(n, 1)``); afterwards
    ``critical_lengths_`` holds the Monte Carlo estimates and
    ``predict(P)`` evaluates the fitted law. ``i`` defaults to
    ``r - (a_2 + ... + a_d)``.
    """

    def __init__(
        self, a=(1, 1), r=2, trials_per_probe=1000, seed=0, geometry="cube",
        model="pure_power", i=None, batch=None,
    ):
        self.a = a
        self.r = r
        self.trials_per_probe = trials_per_probe
        self.seed = seed
        self.geometry = geometry
        self.model = model
        self.i = i
        self.batch = batch

    def _index(self):
        return self.i if self.i is not None else max(self.spec_.r - sum(self.spec_.a[1:]), 1)

    def _lam(self, p):
        a = self.spec_.a
        a1, a2 = a[0], a[1] if len(a) > 1 else a[0]
        return lambda_(p, self._index(), a1, a2)

    def fit(self, X, y=None):
        self.spec_ = check_spec(self.a, self.r)
        P = check_probabilities(X)
        self.results_ = [
            critical_length(self.spec_, p, self.trials_per_probe, self.seed, self.geometry, self.batch)
            for p in P
        ]
        self.critical_lengths_ = np.array([res.lc if res.lc is not None else -1 for res in self.results_])
        self.points_ = [
            ScalingPoint(p, res.lc, self._lam(p)) for p, res in zip(P, self.results_) if res.lc is not None
        ]
        self.fit_ = scaling_fit(self.points_, self.model) if len(self.points_) >= 3 else None
        return self

    def predict(self, X):
        check_is_fitted(self, "fit_")
        if self.fit_ is None:
            raise ValueError("need at least 3 resolved critical lengths to predict")
        P = check_probabilities(X)
        lam = [self._lam(p) for p in P]
        return np.exp(self.fit_.predict_log_lc(P, lam))

    def score(self, X, y=None, sample_weight=None):
        """R^2 of ``log L_c`` on the training estimates when ``y`` is omitted."""
        if y is None:
            y = self.critical_lengths_
        from sklearn.metrics import r2_score

        return r2_score(np.log(y), np.log(self.predict(X)), sample_weight=sample_weight)
