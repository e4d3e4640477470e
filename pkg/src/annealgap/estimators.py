"""scikit-learn style front ends for the numerical routines.

Hyperparameters live in ``__init__`` (so ``get_params``/``set_params`` and
``clone`` work); everything learned or computed is stored on trailing
underscore attributes during ``fit``.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .catalysis import fit_exponential, fit_power_law
from .doublewell import build_well, solve_well
from .pathfinder import build_graph, ridge_axis, shortest_schedule
from .spectrum import pspin_summary, saddle_search, scan_landscape

__all__ = [
    "GapTransformer",
    "DoubleWellGapTransformer",
    "SaddleEstimator",
    "ScalingLawRegressor",
    "ScheduleOptimizer",
]


def _spin_sizes(X):
    X = check_array(X, ensure_2d=False)
    js = np.asarray(X, dtype=float).ravel()
    if np.any(np.abs(2 * js - np.round(2 * js)) > 1e-12) or np.any(js <= 0):
        raise ValueError("spin sizes must be positive half-integers")
    return js


class GapTransformer(TransformerMixin, BaseEstimator):
    """Map control points (Gamma, kappa) to low-lying gaps of the p-spin model.

    ``transform`` returns columns ``[Delta01, Delta02]`` (or just Delta01 when
    ``n_levels == 2``).
    """

    def __init__(self, j=10, p=3, n_levels=3):
        self.j = j
        self.p = p
        self.n_levels = n_levels

    def fit(self, X, y=None):
        X = check_array(X)
        if X.shape[1] != 2:
            raise ValueError("expected two columns: Gamma, kappa")
        self.n_features_in_ = 2
        self.dim_ = int(round(2 * self.j)) + 1
        return self

    def transform(self, X):
        check_is_fitted(self, "dim_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} columns, got {X.shape[1]}")
        rows = []
        for g, k in X:
            s = pspin_summary(self.j, self.p, float(g), float(k), k=self.n_levels)
            rows.append([s.delta01, s.delta02][: self.n_levels - 1])
        return np.array(rows)


class DoubleWellGapTransformer(TransformerMixin, BaseEstimator):
    """Gap ratio of scale-free double wells.

    Rows are ``(xi, beta)`` for symmetric wells or ``(xi1, xi2, beta1, beta2)``.
    """

    def __init__(self, n_points=4001):
        self.n_points = n_points

    def fit(self, X, y=None):
        X = check_array(X)
        if X.shape[1] not in (2, 4):
            raise ValueError("expected 2 (xi, beta) or 4 (xi1, xi2, beta1, beta2) columns")
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} columns, got {X.shape[1]}")
        out = np.empty((X.shape[0], 1))
        for i, row in enumerate(X):
            well = build_well(row[0], beta1=row[1]) if len(row) == 2 else build_well(*row)
            out[i, 0] = solve_well(well, 2, self.n_points).gap_ratio
        return out


class SaddleEstimator(BaseEstimator):
    """Locate the maximum-minimum-gap saddle for each spin size in ``X``.

    ``predict`` returns rows ``(Gamma_c, kappa_c, Delta_c)``.
    """

    def __init__(self, p=3, n_kappa=60, n_gamma=141):
        self.p = p
        self.n_kappa = n_kappa
        self.n_gamma = n_gamma

    def _search(self, j):
        return saddle_search(j, self.p, kappa_grid=np.linspace(0.02, 1.0, self.n_kappa),
                             n_gamma=self.n_gamma)

    def fit(self, X, y=None):
        js = _spin_sizes(X)
        self.saddles_ = {float(j): self._search(j) for j in js}
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "saddles_")
        rows = []
        for j in _spin_sizes(X):
            r = self.saddles_.get(float(j)) or self._search(j)
            rows.append((r.gamma_c, r.kappa_c, r.gap))
        return np.array(rows)


class ScalingLawRegressor(RegressorMixin, BaseEstimator):
    """Least-squares fit of ``y = c x^e`` (``kind="power"``) or ``y = c exp(e x)``."""

    def __init__(self, kind="power"):
        self.kind = kind

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        if X.shape[1] != 1:
            raise ValueError("expected a single feature")
        if self.kind == "power":
            self.fit_ = fit_power_law(X[:, 0], y)
        elif self.kind == "exponential":
            self.fit_ = fit_exponential(X[:, 0], y)
        else:
            raise ValueError(f"unknown kind {self.kind!r}")
        self.exponent_ = self.fit_.exponent
        self.coefficient_ = self.fit_.coefficient
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "fit_")
        X = check_array(X)
        return self.fit_.predict(X[:, 0])


class ScheduleOptimizer(BaseEstimator):
    """Optimal raster schedule and total adiabatic time per spin size."""

    def __init__(self, raster=201, p=3, convention="destination", n_band=0):
        self.raster = raster
        self.p = p
        self.convention = convention
        self.n_band = n_band

    def _solve(self, j):
        land = scan_landscape(j, self.p, ridge_axis(self.raster, n_band=self.n_band),
                              np.linspace(0.0, 1.0, self.raster), k=2)
        return shortest_schedule(build_graph(land, self.convention))

    def fit(self, X, y=None):
        js = _spin_sizes(X)
        self.paths_ = {float(j): self._solve(j) for j in js}
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "paths_")
        return np.array([(self.paths_.get(float(j)) or self._solve(j)).total_time
                         for j in _spin_sizes(X)])
