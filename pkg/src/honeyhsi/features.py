"""Supervised (LDA) and unsupervised (PCA) linear feature extraction.

Both extractors follow the scikit-learn estimator protocol (fit /
transform / get_params) so they compose with pipelines and grid search,
but the numerics run on the in-package kernels.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .errors import ArgumentError, FitError, ShapeError
from .linalg import cholesky, eig_symmetric, solve_lower_triangular, solve_upper_triangular
from .validation import as_matrix, as_samples, check_is_fitted


def _labels_array(y):
    return np.asarray([str(label) for label in y], dtype=object)


class LinearDiscriminantExtractor(BaseEstimator, TransformerMixin):
    """Class-independent linear discriminant projection.

    Fitting builds the prior-weighted within-class scatter and the
    between-class scatter of the class means, shrinks the within-class
    scatter by ``shrinkage * trace/d`` on the diagonal, and solves the
    generalized eigenproblem through a Cholesky whitening so the inner
    solve stays symmetric. Projection multiplies raw features by the
    leading eigenvectors; no centering is applied.

    Attributes after fit: ``projection_`` (d, m), ``eigenvalues_`` (m,),
    ``classes_``, ``class_means_`` (C, d), ``global_mean_`` (d,),
    ``class_priors_`` (C,).
    """

    def __init__(self, n_components=15, shrinkage=1e-6):
        self.n_components = n_components
        self.shrinkage = shrinkage

    def fit(self, X, y):
        X = as_matrix(X, "X")
        y = _labels_array(y)
        if y.shape[0] != X.shape[0]:
            raise ShapeError("X and y disagree on sample count")
        classes = np.array(sorted(set(y)), dtype=object)
        n_classes = classes.size
        if n_classes < 2:
            raise FitError("discriminant fit needs at least 2 classes")
        if not 1 <= self.n_components <= n_classes - 1:
            raise ArgumentError(
                f"n_components={self.n_components} outside 1..{n_classes - 1} "
                f"for {n_classes} classes"
            )
        n, d = X.shape
        global_mean = X.mean(axis=0)
        within = np.zeros((d, d))
        between = np.zeros((d, d))
        class_means = np.empty((n_classes, d))
        priors = np.empty(n_classes)
        for j, label in enumerate(classes):
            block = X[y == label]
            if block.shape[0] < 1:
                raise FitError(f"class {label!r} has no instances")
            mu = block.mean(axis=0)
            class_means[j] = mu
            priors[j] = block.shape[0] / n
            centered = block - mu
            # prior * (scatter / n_j) collapses to scatter / n
            within += centered.T @ centered / n
            gap = mu - global_mean
            between += np.outer(gap, gap)
        within_reg = within + self.shrinkage * (np.trace(within) / d) * np.eye(d)
        lower = cholesky(within_reg)
        whitened = solve_lower_triangular(lower, between)
        whitened = solve_lower_triangular(lower, whitened.T).T
        whitened = 0.5 * (whitened + whitened.T)
        eig = eig_symmetric(whitened)
        m = self.n_components
        eigenvalues = np.maximum(eig.eigenvalues[:m], 0.0)
        back = solve_upper_triangular(lower.T, eig.eigenvectors[:, :m])
        back /= np.linalg.norm(back, axis=0)
        # contiguous copy so a JSON round-trip reproduces transforms bit for bit
        self.projection_ = np.ascontiguousarray(back)
        self.eigenvalues_ = eigenvalues
        self.classes_ = classes
        self.class_means_ = class_means
        self.global_mean_ = global_mean
        self.class_priors_ = priors
        self.within_scatter_ = within
        self.between_scatter_ = between
        return self

    def transform(self, X):
        check_is_fitted(self, "projection_")
        arr, single = as_samples(X, self.projection_.shape[0], "X")
        out = arr @ self.projection_
        return out[0] if single else out

    def to_json(self):
        return {
            "kind": "lda",
            "version": 1,
            "d": int(self.projection_.shape[0]),
            "m": int(self.projection_.shape[1]),
            "projection": self.projection_.tolist(),
            "eigenvalues": self.eigenvalues_.tolist(),
            "class_names": [str(c) for c in self.classes_],
            "class_means": self.class_means_.tolist(),
            "global_mean": self.global_mean_.tolist(),
            "class_priors": self.class_priors_.tolist(),
            "shrinkage": float(self.shrinkage),
        }

    @classmethod
    def from_json(cls, doc):
        model = cls(n_components=doc["m"], shrinkage=doc.get("shrinkage", 1e-6))
        model.projection_ = np.array(doc["projection"], dtype=float)
        model.eigenvalues_ = np.array(doc["eigenvalues"], dtype=float)
        model.classes_ = np.array(doc["class_names"], dtype=object)
        model.class_means_ = np.array(doc["class_means"], dtype=float)
        model.global_mean_ = np.array(doc["global_mean"], dtype=float)
        model.class_priors_ = np.array(doc["class_priors"], dtype=float)
        return model


class PrincipalComponentExtractor(BaseEstimator, TransformerMixin):
    """PCA on the sample covariance (N-1 divisor) via the Jacobi eigensolver.

    Attributes after fit: ``components_`` (d, m) with orthonormal columns,
    ``explained_variance_`` (m,) descending, ``mean_`` (d,).
    """

    def __init__(self, n_components=15):
        self.n_components = n_components

    def fit(self, X, y=None):
        X = as_matrix(X, "X")
        n, d = X.shape
        if n < 2:
            raise FitError("covariance fit needs at least 2 instances")
        if not 1 <= self.n_components <= d:
            raise ArgumentError(
                f"n_components={self.n_components} outside 1..{d}"
            )
        mean = X.mean(axis=0)
        centered = X - mean
        cov = centered.T @ centered / (n - 1)
        cov = 0.5 * (cov + cov.T)
        eig = eig_symmetric(cov)
        m = self.n_components
        self.components_ = np.ascontiguousarray(eig.eigenvectors[:, :m])
        self.explained_variance_ = np.maximum(eig.eigenvalues[:m], 0.0)
        self.mean_ = mean
        self.total_variance_ = float(np.trace(cov))
        return self

    def transform(self, X):
        check_is_fitted(self, "components_")
        arr, single = as_samples(X, self.components_.shape[0], "X")
        out = (arr - self.mean_) @ self.components_
        return out[0] if single else out

    def to_json(self):
        return {
            "kind": "pca",
            "version": 1,
            "d": int(self.components_.shape[0]),
            "m": int(self.components_.shape[1]),
            "components": self.components_.tolist(),
            "explained_variance": self.explained_variance_.tolist(),
            "mean": self.mean_.tolist(),
        }

    @classmethod
    def from_json(cls, doc):
        model = cls(n_components=doc["m"])
        model.components_ = np.array(doc["components"], dtype=float)
        model.explained_variance_ = np.array(doc["explained_variance"], dtype=float)
        model.mean_ = np.array(doc["mean"], dtype=float)
        return model


def extractor_from_json(doc):
    kind = doc.get("kind")
    if kind == "lda":
        return LinearDiscriminantExtractor.from_json(doc)
    if kind == "pca":
        return PrincipalComponentExtractor.from_json(doc)
    raise ArgumentError(f"unknown extractor kind {kind!r}")
