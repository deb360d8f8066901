"""KNN and soft-margin SVM classifiers plus the image-level majority vote.

The SVM dual is solved by sequential minimal optimization with maximal-
violating-pair working-set selection; multiclass goes through one-vs-one
voting. All tie-breaks are total and documented so predictions are
reproducible bit for bit.
"""

from collections import Counter
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .errors import ArgumentError, ConvergenceError, FitError, ShapeError
from .validation import as_matrix, as_samples, check_is_fitted

_SV_EPS = 1e-12


def resolve_gamma(gamma, X):
    """Turn the "auto" gamma into 1 / (d * mean per-feature variance)."""
    if gamma == "auto":
        X = np.asarray(X, dtype=float)
        var = float(X.var(axis=0).mean())
        if var <= 0.0:
            var = 1.0
        return 1.0 / (X.shape[1] * var)
    value = float(gamma)
    if value <= 0.0:
        raise ArgumentError(f"gamma must be positive, got {value}")
    return value


def kernel_matrix(kind, gamma, a, b):
    """Gram matrix k(a_i, b_j) for the linear or rbf kernel."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if kind == "linear":
        return a @ b.T
    if kind == "rbf":
        sq = (
            np.sum(a * a, axis=1)[:, None]
            + np.sum(b * b, axis=1)[None, :]
            - 2.0 * (a @ b.T)
        )
        np.maximum(sq, 0.0, out=sq)
        return np.exp(-gamma * sq)
    raise ArgumentError(f"unknown kernel {kind!r}")


@dataclass
class BinarySvmModel:
    """Support vectors with signed dual coefficients alpha_n * y_n."""

    support_vectors: np.ndarray  # (n_sv, d)
    dual_coefs: np.ndarray  # (n_sv,)
    bias: float
    kernel: str
    gamma: float | None
    c: float

    def decision(self, x):
        arr, single = as_samples(x, self.support_vectors.shape[1], "x")
        gram = kernel_matrix(self.kernel, self.gamma, arr, self.support_vectors)
        values = gram @ self.dual_coefs + self.bias
        return float(values[0]) if single else values


def fit_binary_svm(X, y, kernel="linear", c=1.0, gamma=None, tol=1e-3, max_iter=1_000_000):
    """Solve the soft-margin SVM dual by SMO.

    y must be +/-1. Each step updates the maximal-violating pair; the loop
    stops once every multiplier satisfies the KKT conditions within ``tol``.
    The bias is averaged over free support vectors (midpoint of the
    violation interval when none are free).
    """
    X = as_matrix(X, "X")
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.shape[0] != X.shape[0]:
        raise ShapeError("y must be one +/-1 label per row of X")
    if not np.all(np.abs(y) == 1.0):
        raise ArgumentError("labels must be +1 or -1")
    if np.all(y > 0) or np.all(y < 0):
        raise FitError("training data contains a single class")
    if c <= 0.0:
        raise ArgumentError(f"c must be positive, got {c}")
    n = X.shape[0]
    gram = kernel_matrix(kernel, gamma, X, X)
    alpha = np.zeros(n)
    grad = -np.ones(n)  # gradient of the dual objective 0.5 a'Qa - sum(a)
    snap = 1e-12 + 1e-14 * c
    pos = y > 0
    for _ in range(max_iter):
        crit = -y * grad
        up = np.where(pos, alpha < c, alpha > 0.0)
        low = np.where(pos, alpha > 0.0, alpha < c)
        up_idx = np.flatnonzero(up)
        low_idx = np.flatnonzero(low)
        i = up_idx[np.argmax(crit[up_idx])]
        j = low_idx[np.argmin(crit[low_idx])]
        gap = crit[i] - crit[j]
        if gap < tol:
            break
        curvature = gram[i, i] + gram[j, j] - 2.0 * gram[i, j]
        if curvature <= 0.0:
            curvature = 1e-12
        cap_i = c - alpha[i] if y[i] > 0 else alpha[i]
        cap_j = alpha[j] if y[j] > 0 else c - alpha[j]
        delta = min(gap / curvature, cap_i, cap_j)
        alpha[i] += y[i] * delta
        alpha[j] -= y[j] * delta
        for idx in (i, j):
            if alpha[idx] < snap:
                alpha[idx] = 0.0
            elif alpha[idx] > c - snap:
                alpha[idx] = c
        grad += delta * y * (gram[:, i] - gram[:, j])
    else:
        crit = -y * grad
        up = np.where(pos, alpha < c, alpha > 0.0)
        low = np.where(pos, alpha > 0.0, alpha < c)
        gap = crit[up].max() - crit[low].min()
        raise ConvergenceError(
            f"SMO did not converge in {max_iter} pair updates; max violation {gap:.3e}"
        )
    crit = -y * grad
    free = (alpha > 0.0) & (alpha < c)
    if np.any(free):
        bias = float(crit[free].mean())
    else:
        up = np.where(pos, alpha < c, alpha > 0.0)
        low = np.where(pos, alpha > 0.0, alpha < c)
        bias = float(0.5 * (crit[up].max() + crit[low].min()))
    keep = np.abs(alpha * y) > _SV_EPS
    return BinarySvmModel(
        support_vectors=X[keep].copy(),
        dual_coefs=(alpha * y)[keep],
        bias=bias,
        kernel=kernel,
        gamma=gamma,
        c=c,
    )


def svm_decision(model, x):
    """Kernel expansion sum_n dual_coefs[n] k(sv_n, x) + bias."""
    return model.decision(x)


class PairwiseSvmClassifier(BaseEstimator, ClassifierMixin):
    """One-vs-one SVM: one binary machine per unordered class pair.

    Prediction lets every pair model vote for its winner (positive decision
    votes the lexicographically smaller class of the pair). Vote ties go to
    the tied class with the larger summed |decision| over all its pair
    games, then to class-name order.
    """

    def __init__(self, kernel="linear", c=1.0, gamma="auto", tol=1e-3, max_iter=1_000_000):
        self.kernel = kernel
        self.c = c
        self.gamma = gamma
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y):
        X = as_matrix(X, "X")
        labels = np.asarray([str(v) for v in y], dtype=object)
        if labels.shape[0] != X.shape[0]:
            raise ShapeError("X and y disagree on sample count")
        classes = sorted(set(labels))
        if len(classes) < 2:
            raise FitError("need at least 2 classes")
        self.classes_ = np.array(classes, dtype=object)
        self.gamma_ = resolve_gamma(self.gamma, X) if self.kernel == "rbf" else None
        self.pair_models_ = {}
        for a_pos in range(len(classes)):
            for b_pos in range(a_pos + 1, len(classes)):
                a, b = classes[a_pos], classes[b_pos]
                mask = (labels == a) | (labels == b)
                pair_y = np.where(labels[mask] == a, 1.0, -1.0)
                try:
                    model = fit_binary_svm(
                        X[mask],
                        pair_y,
                        kernel=self.kernel,
                        c=self.c,
                        gamma=self.gamma_,
                        tol=self.tol,
                        max_iter=self.max_iter,
                    )
                except (FitError, ConvergenceError) as exc:
                    raise type(exc)(f"pair ({a}, {b}): {exc}") from exc
                self.pair_models_[(a, b)] = model
        return self

    def decision_table(self, X):
        """Decision values for every pair model, keyed by class pair."""
        check_is_fitted(self, "pair_models_")
        d = next(iter(self.pair_models_.values())).support_vectors.shape[1]
        arr, single = as_samples(X, d, "X")
        table = {
            pair: model.decision(arr) for pair, model in self.pair_models_.items()
        }
        return table, single

    def predict(self, X):
        table, single = self.decision_table(X)
        n = next(iter(table.values())).shape[0]
        class_index = {c: k for k, c in enumerate(self.classes_)}
        votes = np.zeros((n, len(self.classes_)), dtype=int)
        magnitude = np.zeros((n, len(self.classes_)))
        for (a, b), values in table.items():
            winner_a = values > 0.0
            votes[:, class_index[a]] += winner_a
            votes[:, class_index[b]] += ~winner_a
            magnitude[:, class_index[a]] += np.abs(values)
            magnitude[:, class_index[b]] += np.abs(values)
        out = np.empty(n, dtype=object)
        for r in range(n):
            best_votes = votes[r].max()
            tied = np.flatnonzero(votes[r] == best_votes)
            if tied.size > 1:
                best_mag = magnitude[r, tied].max()
                tied = tied[magnitude[r, tied] == best_mag]
            out[r] = self.classes_[tied[0]]  # classes_ sorted: name order
        return out[0] if single else out

    def to_json(self):
        check_is_fitted(self, "pair_models_")
        pairs = []
        for (a, b), model in sorted(self.pair_models_.items()):
            pairs.append(
                {
                    "positive": a,
                    "negative": b,
                    "support_vectors": model.support_vectors.tolist(),
                    "dual_coefs": model.dual_coefs.tolist(),
                    "bias": model.bias,
                }
            )
        return {
            "kind": "svm",
            "version": 1,
            "kernel": self.kernel,
            "c": float(self.c),
            "gamma": self.gamma_,
            "class_names": [str(c) for c in self.classes_],
            "pair_models": pairs,
        }

    @classmethod
    def from_json(cls, doc):
        clf = cls(kernel=doc["kernel"], c=doc["c"], gamma=doc["gamma"] or "auto")
        clf.classes_ = np.array(doc["class_names"], dtype=object)
        clf.gamma_ = doc["gamma"]
        clf.pair_models_ = {}
        for pair in doc["pair_models"]:
            clf.pair_models_[(pair["positive"], pair["negative"])] = BinarySvmModel(
                support_vectors=np.array(pair["support_vectors"], dtype=float),
                dual_coefs=np.array(pair["dual_coefs"], dtype=float),
                bias=float(pair["bias"]),
                kernel=doc["kernel"],
                gamma=doc["gamma"],
                c=float(doc["c"]),
            )
        return clf


class KnnClassifier(BaseEstimator, ClassifierMixin):
    """K-nearest-neighbors with Euclidean distance and uniform votes.

    Distance ties at the k-th neighbor resolve in training-set order; vote
    ties go to the class with the smallest summed distance among its
    voting neighbors, then to class-name order.
    """

    def __init__(self, k=5, chunk_size=512):
        self.k = k
        self.chunk_size = chunk_size

    def fit(self, X, y):
        X = as_matrix(X, "X")
        labels = np.asarray([str(v) for v in y], dtype=object)
        if labels.shape[0] != X.shape[0]:
            raise ShapeError("X and y disagree on sample count")
        if X.shape[0] == 0:
            raise FitError("training set is empty")
        if self.k < 1:
            raise ArgumentError(f"k must be >= 1, got {self.k}")
        self.train_points_ = X.copy()
        self.train_labels_ = labels
        self.classes_ = np.array(sorted(set(labels)), dtype=object)
        return self

    def _predict_row(self, distances):
        k = min(self.k, distances.shape[0])
        kth = np.partition(distances, k - 1)[k - 1]
        candidates = np.flatnonzero(distances <= kth)
        # stable sort keeps training-set order among equal distances
        order = np.argsort(distances[candidates], kind="stable")
        chosen = candidates[order[:k]]
        counts = Counter(self.train_labels_[chosen])
        best = max(counts.values())
        tied = [label for label, count in counts.items() if count == best]
        if len(tied) == 1:
            return tied[0]
        sums = {
            label: float(distances[chosen][self.train_labels_[chosen] == label].sum())
            for label in tied
        }
        smallest = min(sums.values())
        return min(label for label, s in sums.items() if s == smallest)

    def predict(self, X):
        check_is_fitted(self, "train_points_")
        arr, single = as_samples(X, self.train_points_.shape[1], "X")
        train = self.train_points_
        train_sq = np.sum(train * train, axis=1)
        out = np.empty(arr.shape[0], dtype=object)
        for start in range(0, arr.shape[0], self.chunk_size):
            block = arr[start : start + self.chunk_size]
            sq = (
                np.sum(block * block, axis=1)[:, None]
                + train_sq[None, :]
                - 2.0 * (block @ train.T)
            )
            np.maximum(sq, 0.0, out=sq)
            distances = np.sqrt(sq)
            for r in range(block.shape[0]):
                out[start + r] = self._predict_row(distances[r])
        return out[0] if single else out

    def to_json(self):
        check_is_fitted(self, "train_points_")
        return {
            "kind": "knn",
            "version": 1,
            "k": int(self.k),
            "train_points": self.train_points_.tolist(),
            "train_labels": [str(v) for v in self.train_labels_],
            "class_names": [str(c) for c in self.classes_],
        }

    @classmethod
    def from_json(cls, doc):
        clf = cls(k=doc["k"])
        clf.train_points_ = np.array(doc["train_points"], dtype=float)
        clf.train_labels_ = np.array(doc["train_labels"], dtype=object)
        clf.classes_ = np.array(doc["class_names"], dtype=object)
        return clf


def classifier_from_json(doc):
    kind = doc.get("kind")
    if kind == "svm":
        return PairwiseSvmClassifier.from_json(doc)
    if kind == "knn":
        return KnnClassifier.from_json(doc)
    raise ArgumentError(f"unknown classifier kind {kind!r}")


def majority_vote(predictions):
    """Most frequent class in a list; ties break to the smallest class name."""
    labels = list(predictions)
    if not labels:
        raise ArgumentError("majority vote needs at least one prediction")
    counts = Counter(str(v) for v in labels)
    best = max(counts.values())
    return min(label for label, count in counts.items() if count == best)
