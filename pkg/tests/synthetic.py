"""Synthetic dataset builders shared across the test suite."""

import numpy as np

from honeyhsi.dataset import LabeledDataset


def blob_dataset(
    n_classes=5,
    images_per_acquisition=1,
    instances_per_image=25,
    bands=16,
    separation=6.0,
    noise=0.5,
    seed=0,
):
    """Gaussian-blob dataset with the acquisition/image structure of the
    real data: every class appears in all six acquisitions."""
    rng = np.random.default_rng(seed)
    centers = rng.normal(scale=separation, size=(n_classes, bands))
    rows, origins, brands, acqs, image_ids = [], [], [], [], []
    for c in range(n_classes):
        origin = f"class{c:02d}"
        for acq in range(1, 7):
            for img in range(images_per_acquisition):
                image_id = f"{origin}_a{acq}_i{img}"
                for _ in range(instances_per_image):
                    rows.append(centers[c] + rng.normal(scale=noise, size=bands))
                    origins.append(origin)
                    brands.append("B1")
                    acqs.append(acq)
                    image_ids.append(image_id)
    return LabeledDataset(
        bands=np.vstack(rows),
        origins=tuple(origins),
        brands=tuple(brands),
        acquisitions=tuple(acqs),
        image_ids=tuple(image_ids),
        class_labels=tuple(origins),
    )


def two_brand_dataset(rows_a, rows_b):
    """Two brands under one origin from explicit instance matrices."""
    rows_a = np.atleast_2d(np.asarray(rows_a, dtype=float))
    rows_b = np.atleast_2d(np.asarray(rows_b, dtype=float))
    n = rows_a.shape[0] + rows_b.shape[0]
    brands = ("A",) * rows_a.shape[0] + ("B",) * rows_b.shape[0]
    return LabeledDataset(
        bands=np.vstack([rows_a, rows_b]),
        origins=("Origin",) * n,
        brands=brands,
        acquisitions=(1,) * n,
        image_ids=tuple(f"{b}{i}" for i, b in enumerate(brands)),
        class_labels=("Origin",) * n,
    )


def brand_pair_dataset(diffs, n_instances=4, base_seed=0):
    """Two brands under one origin whose band-wise mean spectra differ by
    roughly ``diffs`` (up to float rounding of the mean)."""
    diffs = np.asarray(diffs, dtype=float)
    bands = diffs.size
    rng = np.random.default_rng(base_seed)
    base = rng.normal(size=bands)
    rows_a = base + rng.normal(scale=0.3, size=(n_instances, bands))
    rows_b = (base - diffs) + rng.normal(scale=0.3, size=(n_instances, bands))
    return two_brand_dataset(rows_a, rows_b)


def multi_brand_origin_dataset(offsets, bands=32, band_noise=0.3, seed=0):
    """One origin with one brand per entry of ``offsets``; each brand's mean
    spectrum sits at base + offset + per-band noise, so the paired t-test
    p-value between brands is driven by their offset difference."""
    rng = np.random.default_rng(seed)
    base = rng.normal(size=bands)
    rows, brands_col, image_ids = [], [], []
    for b, offset in enumerate(offsets):
        brand = f"C{b + 1}"
        mean = base + offset + rng.normal(scale=band_noise, size=bands)
        for i in range(3):
            rows.append(mean + rng.normal(scale=0.05, size=bands))
            brands_col.append(brand)
            image_ids.append(f"{brand}_{i}")
    n = len(rows)
    return LabeledDataset(
        bands=np.vstack(rows),
        origins=("Rewarewa",) * n,
        brands=tuple(brands_col),
        acquisitions=(1,) * n,
        image_ids=tuple(image_ids),
        class_labels=("Rewarewa",) * n,
    )
