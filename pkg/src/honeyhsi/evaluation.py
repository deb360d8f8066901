"""Balanced-accuracy metrics and the acquisition-based cross-validation
protocol for the instance-level and image-level scenarios."""

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .classify import majority_vote
from .dataset import make_folds, slice_fold
from .errors import ArgumentError
from .pipeline import fit_pipeline, prepare_dataset

SCENARIO_INSTANCE = "instance"
SCENARIO_IMAGE = "image"


@dataclass(frozen=True)
class ConfusionMatrix:
    """Rows are true classes, columns predicted, in class_names order."""

    class_names: tuple
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 2 or counts.shape[0] != counts.shape[1]:
            raise ArgumentError("confusion counts must be square")
        if counts.shape[0] != len(self.class_names):
            raise ArgumentError("confusion size must match class names")
        if np.any(counts < 0):
            raise ArgumentError("confusion counts must be nonnegative")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "class_names", tuple(self.class_names))

    @classmethod
    def from_pairs(cls, class_names, true_labels, predicted_labels):
        class_names = tuple(class_names)
        index = {c: i for i, c in enumerate(class_names)}
        counts = np.zeros((len(class_names), len(class_names)), dtype=np.int64)
        for truth, pred in zip(true_labels, predicted_labels, strict=True):
            counts[index[str(truth)], index[str(pred)]] += 1
        return cls(class_names=class_names, counts=counts)

    @property
    def total(self):
        return int(self.counts.sum())


def class_recall(cm, class_index):
    """Diagonal over row sum; None when the class has no true instances."""
    row = cm.counts[class_index]
    denom = int(row.sum())
    if denom == 0:
        return None
    return float(row[class_index]) / denom


def class_specificity(cm, class_index):
    """One-vs-rest TN/(TN+FP); None when no other-class instances exist."""
    counts = cm.counts
    col = int(counts[:, class_index].sum())
    row = int(counts[class_index].sum())
    tp = int(counts[class_index, class_index])
    fp = col - tp
    tn = cm.total - row - fp
    denom = tn + fp
    if denom == 0:
        return None
    return float(tn) / denom


def balanced_accuracy(cm):
    """Mean recall over classes that have at least one true instance."""
    recalls = [
        r
        for r in (class_recall(cm, i) for i in range(len(cm.class_names)))
        if r is not None
    ]
    if not recalls:
        raise ArgumentError("confusion matrix has no populated rows")
    return float(sum(recalls) / len(recalls))


@dataclass(frozen=True)
class CvReport:
    """Per-fold balanced accuracies for one scenario plus their spread."""

    scenario: str
    fold_scores: tuple
    mean: float
    std_dev: float
    per_fold_confusions: tuple
    fold_warnings: tuple

    @classmethod
    def from_scores(cls, scenario, scores, confusions, warnings, sample_std=False):
        scores = tuple(float(s) for s in scores)
        mean = sum(scores) / len(scores)
        divisor = len(scores) - 1 if sample_std else len(scores)
        variance = sum((s - mean) ** 2 for s in scores) / divisor
        return cls(
            scenario=scenario,
            fold_scores=scores,
            mean=mean,
            std_dev=math.sqrt(variance),
            per_fold_confusions=tuple(confusions),
            fold_warnings=tuple(warnings),
        )

    def to_json_doc(self, config=None):
        doc = {
            "scenario": self.scenario,
            "foldScores": list(self.fold_scores),
            "mean": self.mean,
            "stdDev": self.std_dev,
            "foldWarnings": [list(w) for w in self.fold_warnings],
            "perFoldConfusions": [
                {
                    "classNames": list(cm.class_names),
                    "counts": cm.counts.tolist(),
                }
                for cm in self.per_fold_confusions
            ],
        }
        if config is not None:
            doc["config"] = config.to_dict()
        return doc


def evaluate_fold(ds, fold, config):
    """Fit on the fold's train slice only and score both scenarios.

    Returns (bundle, instance confusion, image confusion, warnings).
    """
    train, test = slice_fold(ds, fold)
    bundle = fit_pipeline(train, config)
    warnings = []
    missing = sorted(set(test.class_labels) - set(train.class_labels))
    if missing:
        warnings.append(
            f"fold {fold.fold_index}: classes absent from training slice: {', '.join(missing)}"
        )
    predictions = [str(p) for p in bundle.predict(test.bands)]
    instance_cm = ConfusionMatrix.from_pairs(ds.class_names, test.class_labels, predictions)
    by_image = {}
    for image_id, truth, pred in zip(test.image_ids, test.class_labels, predictions):
        by_image.setdefault(image_id, (truth, []))[1].append(pred)
    image_truths, image_preds = [], []
    for image_id in sorted(by_image):
        truth, votes = by_image[image_id]
        image_truths.append(truth)
        image_preds.append(majority_vote(votes))
    image_cm = ConfusionMatrix.from_pairs(ds.class_names, image_truths, image_preds)
    return bundle, instance_cm, image_cm, warnings


def run_cv(ds, config, sample_std=False, n_jobs=1):
    """Run the 20-fold acquisition cross-validation.

    Returns (instance-scenario report, image-scenario report). Folds are
    independent; with n_jobs > 1 they run in parallel processes and are
    reassembled in fold order.
    """
    if len(ds) == 0:
        raise ArgumentError("dataset is empty")
    # Class transformation is dataset preparation: applied once, up front.
    ds = prepare_dataset(ds, config)
    folds = make_folds()
    if n_jobs != 1:
        from joblib import Parallel, delayed

        results = Parallel(n_jobs=n_jobs)(
            delayed(evaluate_fold)(ds, fold, config) for fold in folds
        )
    else:
        results = [evaluate_fold(ds, fold, config) for fold in folds]
    instance_scores, image_scores = [], []
    instance_cms, image_cms, warnings = [], [], []
    for _, instance_cm, image_cm, fold_warnings in results:
        instance_scores.append(balanced_accuracy(instance_cm))
        image_scores.append(balanced_accuracy(image_cm))
        instance_cms.append(instance_cm)
        image_cms.append(image_cm)
        warnings.append(tuple(fold_warnings))
    instance_report = CvReport.from_scores(
        SCENARIO_INSTANCE, instance_scores, instance_cms, warnings, sample_std
    )
    image_report = CvReport.from_scores(
        SCENARIO_IMAGE, image_scores, image_cms, warnings, sample_std
    )
    return instance_report, image_report


def write_report_json(path, instance_report, image_report, config):
    doc = {
        "config": config.to_dict(),
        "scenarios": {
            SCENARIO_INSTANCE: instance_report.to_json_doc(),
            SCENARIO_IMAGE: image_report.to_json_doc(),
        },
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(doc, handle, indent=2, sort_keys=True)
        handle.write("\n")


def write_fold_scores_csv(path, reports):
    """Flat fold-score table for plotting: scenario,fold,balanced_accuracy."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["scenario", "fold", "balanced_accuracy"])
        for report in reports:
            for fold_index, score in enumerate(report.fold_scores):
                writer.writerow([report.scenario, fold_index, repr(score)])
