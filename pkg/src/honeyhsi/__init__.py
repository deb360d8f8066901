"""Hyperspectral honey classification pipeline.

t-test-driven class transformation, LDA/PCA feature extraction, KNN and
SMO-based SVM classification, and acquisition-based 20-fold
cross-validation with balanced accuracy, for both single-spectrum and
whole-image prediction.
"""

from .classify import (
    KnnClassifier,
    PairwiseSvmClassifier,
    fit_binary_svm,
    majority_vote,
    svm_decision,
)
from .dataset import (
    FoldSpec,
    LabeledDataset,
    SpectralInstance,
    brand_pair_p_value,
    load_csv,
    make_folds,
    parse_sample_csv,
    slice_fold,
    transform_classes,
    write_csv,
)
from .evaluation import (
    ConfusionMatrix,
    CvReport,
    balanced_accuracy,
    class_recall,
    class_specificity,
    run_cv,
)
from .features import LinearDiscriminantExtractor, PrincipalComponentExtractor
from .linalg import (
    EigenResult,
    cholesky,
    eig_symmetric,
    matmul,
    solve_lower_triangular,
    student_t_sf,
)
from .pipeline import ModelBundle, PipelineConfig, fit_pipeline, predict_sample

__version__ = "0.1.0"

__all__ = [
    "ConfusionMatrix",
    "CvReport",
    "EigenResult",
    "FoldSpec",
    "KnnClassifier",
    "LabeledDataset",
    "LinearDiscriminantExtractor",
    "ModelBundle",
    "PairwiseSvmClassifier",
    "PipelineConfig",
    "PrincipalComponentExtractor",
    "SpectralInstance",
    "balanced_accuracy",
    "brand_pair_p_value",
    "class_recall",
    "class_specificity",
    "cholesky",
    "eig_symmetric",
    "fit_binary_svm",
    "fit_pipeline",
    "load_csv",
    "majority_vote",
    "make_folds",
    "matmul",
    "parse_sample_csv",
    "predict_sample",
    "run_cv",
    "slice_fold",
    "solve_lower_triangular",
    "student_t_sf",
    "svm_decision",
    "transform_classes",
    "write_csv",
]
