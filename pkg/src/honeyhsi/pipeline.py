"""Pipeline configuration, fitting, and bundle persistence.

A bundle is one trained extractor+classifier pair plus metadata, stored as
a versioned JSON document. Serialization is deterministic (sorted keys,
shortest round-trip float repr) so identical fits produce identical bytes.
"""

import json
from dataclasses import asdict, dataclass

from .classify import KnnClassifier, PairwiseSvmClassifier, classifier_from_json, majority_vote
from .dataset import transform_classes
from .errors import ArgumentError
from .features import (
    LinearDiscriminantExtractor,
    PrincipalComponentExtractor,
    extractor_from_json,
)

BUNDLE_VERSION = 1

EXTRACTORS = ("none", "pca", "lda")
CLASSIFIERS = ("knn", "svm-linear", "svm-rbf")


@dataclass(frozen=True)
class PipelineConfig:
    """Flags selecting and parameterizing one pipeline variant."""

    extractor: str = "lda"
    components: int = 15
    classifier: str = "svm-rbf"
    k: int = 5
    c: float = 1.0
    gamma: object = "auto"  # "auto" or positive float
    alpha: float = 0.05
    class_transform: bool = False

    def __post_init__(self):
        if self.extractor not in EXTRACTORS:
            raise ArgumentError(f"extractor must be one of {EXTRACTORS}, got {self.extractor!r}")
        if self.classifier not in CLASSIFIERS:
            raise ArgumentError(f"classifier must be one of {CLASSIFIERS}, got {self.classifier!r}")
        if self.components < 1:
            raise ArgumentError(f"components must be >= 1, got {self.components}")
        if self.k < 1:
            raise ArgumentError(f"k must be >= 1, got {self.k}")
        if self.c <= 0:
            raise ArgumentError(f"c must be positive, got {self.c}")
        if self.gamma != "auto":
            if not isinstance(self.gamma, (int, float)) or self.gamma <= 0:
                raise ArgumentError(f"gamma must be 'auto' or a positive number, got {self.gamma!r}")
        if not 0.0 < self.alpha < 1.0:
            raise ArgumentError(f"alpha must lie in (0, 1), got {self.alpha}")

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, doc):
        known = {f: doc[f] for f in cls.__dataclass_fields__ if f in doc}
        unknown = set(doc) - set(cls.__dataclass_fields__)
        if unknown:
            raise ArgumentError(f"unknown config keys: {sorted(unknown)}")
        return cls(**known)


def build_extractor(config):
    if config.extractor == "none":
        return None
    if config.extractor == "lda":
        return LinearDiscriminantExtractor(n_components=config.components)
    return PrincipalComponentExtractor(n_components=config.components)


def build_classifier(config):
    if config.classifier == "knn":
        return KnnClassifier(k=config.k)
    kernel = "linear" if config.classifier == "svm-linear" else "rbf"
    return PairwiseSvmClassifier(kernel=kernel, c=config.c, gamma=config.gamma)


@dataclass
class ModelBundle:
    """A trained pipeline ready for prediction and persistence."""

    band_count: int
    class_names: tuple
    extractor: object  # fitted extractor or None
    classifier: object  # fitted classifier
    config: PipelineConfig

    def predict(self, X):
        features = self.extractor.transform(X) if self.extractor is not None else X
        return self.classifier.predict(features)

    def to_json_doc(self):
        return {
            "kind": "model-bundle",
            "version": BUNDLE_VERSION,
            "band_count": int(self.band_count),
            "class_names": [str(c) for c in self.class_names],
            "extractor": self.extractor.to_json() if self.extractor is not None else None,
            "classifier": self.classifier.to_json(),
            "config": self.config.to_dict(),
        }

    def to_json_bytes(self):
        return (
            json.dumps(self.to_json_doc(), sort_keys=True, separators=(",", ":"))
            + "\n"
        ).encode("utf-8")

    def save(self, path):
        with open(path, "wb") as handle:
            handle.write(self.to_json_bytes())

    @classmethod
    def from_json_doc(cls, doc):
        if doc.get("kind") != "model-bundle":
            raise ArgumentError("not a model bundle document")
        if doc.get("version") != BUNDLE_VERSION:
            raise ArgumentError(f"unsupported bundle version {doc.get('version')!r}")
        extractor_doc = doc.get("extractor")
        return cls(
            band_count=int(doc["band_count"]),
            class_names=tuple(doc["class_names"]),
            extractor=extractor_from_json(extractor_doc) if extractor_doc else None,
            classifier=classifier_from_json(doc["classifier"]),
            config=PipelineConfig.from_dict(doc["config"]),
        )

    @classmethod
    def load(cls, path):
        with open(path, "rb") as handle:
            return cls.from_json_doc(json.loads(handle.read().decode("utf-8")))

    def info(self):
        """Metadata block served by the HTTP service and CLI."""
        return {
            "version": BUNDLE_VERSION,
            "bandCount": int(self.band_count),
            "classNames": [str(c) for c in self.class_names],
            "extractor": self.config.extractor,
            "components": int(self.config.components) if self.extractor is not None else None,
            "classifier": self.config.classifier,
        }


def fit_pipeline(train_ds, config):
    """Fit the configured extractor and classifier on one dataset slice.

    Never touches anything outside ``train_ds``; cross-validation calls
    this once per fold so test instances cannot leak into the fit.
    """
    extractor = build_extractor(config)
    X = train_ds.bands
    y = list(train_ds.class_labels)
    if extractor is not None:
        extractor.fit(X, y)
        X = extractor.transform(X)
    classifier = build_classifier(config).fit(X, y)
    return ModelBundle(
        band_count=train_ds.band_count,
        class_names=train_ds.class_names,
        extractor=extractor,
        classifier=classifier,
        config=config,
    )


def prepare_dataset(ds, config):
    """Apply the optional t-test class transformation ahead of fitting."""
    if config.class_transform:
        return transform_classes(ds, alpha=config.alpha)
    return ds


def predict_sample(bundle, sample):
    """Per-row predictions plus the majority-vote image class when the
    sample rows share a single image id."""
    predictions = [str(p) for p in bundle.predict(sample.bands)]
    image_class = majority_vote(predictions) if sample.single_image else None
    return predictions, image_class
