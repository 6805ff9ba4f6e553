"""Scikit-learn style estimator wrappers around the interpolation core.

Both estimators fit on uniformly spaced 1-D sample positions and predict
at arbitrary positions inside the (mirror-extended) sampled range, so
they compose with pipelines, grid search and friends.
"""

import numbers

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted

from dibsi.domains import SubdomainSet, load_domain
from dibsi.interpolation import SampleSequence, interpolate_bsi, interpolate_dibsi

UNIFORMITY_RTOL = 1e-9


def _validate_positions(X):
    X = check_array(X, ensure_2d=False, dtype=np.float64)
    if X.ndim == 2:
        if X.shape[1] != 1:
            raise ValueError(
                f"positions must be 1-D or a single column, got shape {X.shape}"
            )
        X = X[:, 0]
    return X


def _as_sample_sequence(X, y):
    if len(X) < 2:
        raise ValueError("need at least two samples to infer the step")
    diffs = np.diff(X)
    step = float(np.median(diffs))
    if step <= 0:
        raise ValueError("positions must be strictly increasing")
    if np.max(np.abs(diffs - step)) > UNIFORMITY_RTOL * max(abs(step), 1.0):
        raise ValueError("positions must be uniformly spaced")
    return SampleSequence(y, step, k_offset=0, origin=float(X[0]))


class BSplineInterpolator(RegressorMixin, BaseEstimator):
    """Standard B-spline interpolation as a regressor.

    Parameters
    ----------
    order : int, default 3
        B-spline order of the generating kernel.
    """

    def __init__(self, order=3):
        self.order = order

    def fit(self, X, y):
        X = _validate_positions(X)
        y = check_array(y, ensure_2d=False, dtype=np.float64)
        if y.ndim != 1 or len(y) != len(X):
            raise ValueError("y must be 1-D and aligned with X")
        if not isinstance(self.order, numbers.Integral) or self.order < 0:
            raise ValueError(f"order must be a nonnegative integer, got {self.order!r}")
        samples = _as_sample_sequence(X, y)
        self.interpolant_ = self._solve(samples)
        self.n_features_in_ = 1
        return self

    def _solve(self, samples):
        return interpolate_bsi(samples, int(self.order))

    def predict(self, X):
        check_is_fitted(self, "interpolant_")
        X = _validate_positions(X)
        return self.interpolant_.evaluate(X)


class DomainInformedInterpolator(BSplineInterpolator):
    """Domain-informed B-spline interpolation as a regressor.

    Parameters
    ----------
    domain : SubdomainSet or path
        Inhomogeneous domain description, or a path to a saved domain
        manifest.
    order : int, default 3
        B-spline order of the generating kernel.
    gamma : float, default 10.0
        Logistic shaping parameter for the residual weights.
    """

    def __init__(self, domain=None, order=3, gamma=10.0):
        super().__init__(order=order)
        self.domain = domain
        self.gamma = gamma

    def _solve(self, samples):
        if self.domain is None:
            raise ValueError("domain must be provided before fitting")
        if isinstance(self.domain, SubdomainSet):
            dom = self.domain
        else:
            dom = load_domain(self.domain)
        return interpolate_dibsi(samples, dom, int(self.order),
                                 gamma=self.gamma)
