"""Spectral data model, CSV ingestion, t-test class transformation, and
acquisition-based fold generation.

A dataset is columnar (one (n, d) band matrix plus parallel label arrays)
and immutable after construction. The reference CSV schema is

    origin,brand,acquisition,image_id,b001,b002,...,b128[,class]

with acquisition in 1..6 and the optional trailing ``class`` column holding
an already-transformed class label.
"""

import csv
import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import ArgumentError, BandCountError, MissingLabelError, ParseError
from .linalg import student_t_sf

ACQUISITIONS = (1, 2, 3, 4, 5, 6)
_META_COLUMNS = ("origin", "brand", "acquisition", "image_id")


@dataclass(frozen=True)
class SpectralInstance:
    """One reflectance spectrum with its identity labels."""

    bands: np.ndarray
    origin: str
    brand: str
    acquisition: int
    image_id: str
    class_label: str


@dataclass(frozen=True)
class FoldSpec:
    """One train/test split of the six acquisition numbers."""

    fold_index: int
    train_acquisitions: tuple
    test_acquisitions: tuple


@dataclass(frozen=True)
class LabeledDataset:
    """Immutable collection of spectral instances with a class map."""

    bands: np.ndarray  # (n, d) float64
    origins: tuple
    brands: tuple
    acquisitions: tuple
    image_ids: tuple
    class_labels: tuple
    class_names: tuple = field(default=None)

    def __post_init__(self):
        bands = np.asarray(self.bands, dtype=np.float64)
        if bands.ndim != 2:
            raise ArgumentError("bands must be a 2-D matrix")
        if not np.all(np.isfinite(bands)):
            raise ArgumentError("bands contain non-finite values")
        bands.setflags(write=False)
        object.__setattr__(self, "bands", bands)
        n = bands.shape[0]
        for name in ("origins", "brands", "acquisitions", "image_ids", "class_labels"):
            column = tuple(getattr(self, name))
            if len(column) != n:
                raise ArgumentError(f"{name} has {len(column)} entries, expected {n}")
            object.__setattr__(self, name, column)
        if any(a not in ACQUISITIONS for a in self.acquisitions):
            raise ArgumentError("acquisitions must lie in 1..6")
        names = tuple(sorted(set(self.class_labels)))
        object.__setattr__(self, "class_names", names)
        # Every image must carry a single origin/brand/acquisition identity.
        seen = {}
        for i, img in enumerate(self.image_ids):
            key = (self.origins[i], self.brands[i], self.acquisitions[i])
            if seen.setdefault(img, key) != key:
                raise ArgumentError(
                    f"image_id {img!r} spans multiple origin/brand/acquisition identities"
                )

    def __len__(self):
        return self.bands.shape[0]

    @property
    def band_count(self):
        return self.bands.shape[1]

    def instance(self, i):
        return SpectralInstance(
            bands=self.bands[i],
            origin=self.origins[i],
            brand=self.brands[i],
            acquisition=self.acquisitions[i],
            image_id=self.image_ids[i],
            class_label=self.class_labels[i],
        )

    def instances(self):
        return [self.instance(i) for i in range(len(self))]

    def select(self, mask):
        """New dataset made of the rows where mask is True."""
        mask = np.asarray(mask, dtype=bool)
        idx = np.flatnonzero(mask)
        pick = lambda col: tuple(col[i] for i in idx)
        return LabeledDataset(
            bands=self.bands[idx],
            origins=pick(self.origins),
            brands=pick(self.brands),
            acquisitions=pick(self.acquisitions),
            image_ids=pick(self.image_ids),
            class_labels=pick(self.class_labels),
        )

    def with_class_labels(self, labels):
        return LabeledDataset(
            bands=self.bands,
            origins=self.origins,
            brands=self.brands,
            acquisitions=self.acquisitions,
            image_ids=self.image_ids,
            class_labels=tuple(labels),
        )


def _band_column_names(count):
    return [f"b{i:03d}" for i in range(1, count + 1)]


def _parse_header(header):
    """Validate the header and return (band_count, has_class_column)."""
    if header is None:
        raise ParseError("empty file: missing header row")
    header = [h.strip() for h in header]
    if len(header) < 5:
        raise ParseError("header must contain origin,brand,acquisition,image_id and band columns")
    if tuple(header[:4]) != _META_COLUMNS:
        raise ParseError(
            f"header must start with {','.join(_META_COLUMNS)}, got {','.join(header[:4])}"
        )
    rest = header[4:]
    has_class = rest and rest[-1] == "class"
    band_names = rest[:-1] if has_class else rest
    if not band_names:
        raise ParseError("header contains no band columns")
    expected = _band_column_names(len(band_names))
    for pos, (got, want) in enumerate(zip(band_names, expected)):
        if got != want:
            raise ParseError(
                f"band column {pos + 5} is named {got!r}, expected {want!r}",
                column=got,
            )
    return len(band_names), bool(has_class)


def load_csv(path):
    """Load a labeled dataset from a CSV file.

    The effective class label comes from the trailing ``class`` column when
    present, otherwise from the origin.
    """
    origins, brands, acquisitions, image_ids, class_labels = [], [], [], [], []
    rows = []
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        band_count, has_class = _parse_header(header)
        width = 4 + band_count + (1 if has_class else 0)
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != width:
                raise ParseError(
                    f"row {line_no}: has {len(row)} columns, expected {width}",
                    row=line_no,
                )
            origin, brand, acq_text, image_id = (cell.strip() for cell in row[:4])
            if not origin:
                raise ParseError(f"row {line_no}: empty origin", row=line_no, column="origin")
            try:
                acquisition = int(acq_text)
            except ValueError:
                raise ParseError(
                    f"row {line_no}: acquisition {acq_text!r} is not an integer",
                    row=line_no,
                    column="acquisition",
                ) from None
            if acquisition not in ACQUISITIONS:
                raise ParseError(
                    f"row {line_no}: acquisition {acquisition} outside 1..6",
                    row=line_no,
                    column="acquisition",
                )
            band_cells = row[4 : 4 + band_count]
            bands = np.empty(band_count)
            for j, cell in enumerate(band_cells):
                try:
                    bands[j] = float(cell)
                except ValueError:
                    raise ParseError(
                        f"row {line_no}: band b{j + 1:03d} value {cell!r} is not numeric",
                        row=line_no,
                        column=f"b{j + 1:03d}",
                    ) from None
                if not math.isfinite(bands[j]):
                    raise ParseError(
                        f"row {line_no}: band b{j + 1:03d} is not finite",
                        row=line_no,
                        column=f"b{j + 1:03d}",
                    )
            label = row[4 + band_count].strip() if has_class else origin
            if has_class and not label:
                raise ParseError(f"row {line_no}: empty class", row=line_no, column="class")
            origins.append(origin)
            brands.append(brand)
            acquisitions.append(acquisition)
            image_ids.append(image_id)
            class_labels.append(label)
            rows.append(bands)
    if not rows:
        raise ParseError("file contains no data rows")
    return LabeledDataset(
        bands=np.vstack(rows),
        origins=tuple(origins),
        brands=tuple(brands),
        acquisitions=tuple(acquisitions),
        image_ids=tuple(image_ids),
        class_labels=tuple(class_labels),
    )


def write_csv(ds, path, include_class=True):
    """Write a dataset back out in the ingestion schema."""
    band_names = _band_column_names(ds.band_count)
    header = list(_META_COLUMNS) + band_names + (["class"] if include_class else [])
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for i in range(len(ds)):
            row = [
                ds.origins[i],
                ds.brands[i],
                str(ds.acquisitions[i]),
                ds.image_ids[i],
            ]
            row.extend(repr(float(v)) for v in ds.bands[i])
            if include_class:
                row.append(ds.class_labels[i])
            writer.writerow(row)


def _brand_mean_spectrum(ds, origin, brand):
    mask = [o == origin and b == brand for o, b in zip(ds.origins, ds.brands)]
    idx = np.flatnonzero(mask)
    if idx.size == 0:
        raise MissingLabelError(f"brand {brand!r} not present under origin {origin!r}")
    return ds.bands[idx].mean(axis=0)


def brand_pair_p_value(ds, origin, brand_a, brand_b):
    """Two-sided paired t-test p-value between two brands' mean spectra.

    Pairs the band-wise mean reflectances of the two brands under the same
    origin (df = bands - 1). A zero-variance difference vector short-circuits
    to 1.0 when the means coincide and 0.0 otherwise.
    """
    mean_a = _brand_mean_spectrum(ds, origin, brand_a)
    mean_b = _brand_mean_spectrum(ds, origin, brand_b)
    diffs = mean_a - mean_b
    n = diffs.size
    sd = float(diffs.std(ddof=1))
    if sd == 0.0:
        return 1.0 if float(diffs.mean()) == 0.0 else 0.0
    stat = float(diffs.mean()) / (sd / math.sqrt(n))
    return 2.0 * student_t_sf(abs(stat), n - 1)


class _UnionFind:
    def __init__(self, items):
        self.parent = {item: item for item in items}

    def find(self, item):
        root = item
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[item] != root:
            self.parent[item], item = root, self.parent[item]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def brand_groups(ds, alpha):
    """Group brands under each origin by statistical indistinguishability.

    Brands whose pairwise p-value is >= alpha are merged transitively.
    Returns {origin: [sorted brand group, ...]} with groups ordered by their
    lexicographically smallest brand.
    """
    if not 0.0 < alpha < 1.0:
        raise ArgumentError(f"alpha must lie in (0, 1), got {alpha}")
    per_origin = {}
    for origin, brand in zip(ds.origins, ds.brands):
        per_origin.setdefault(origin, set()).add(brand)
    groups = {}
    for origin in sorted(per_origin):
        brands = sorted(per_origin[origin])
        uf = _UnionFind(brands)
        for brand_a, brand_b in combinations(brands, 2):
            if brand_pair_p_value(ds, origin, brand_a, brand_b) >= alpha:
                uf.union(brand_a, brand_b)
        clusters = {}
        for brand in brands:
            clusters.setdefault(uf.find(brand), []).append(brand)
        groups[origin] = sorted(
            (sorted(cluster) for cluster in clusters.values()), key=lambda g: g[0]
        )
    return groups


def transform_classes(ds, alpha=0.05):
    """Split origins into (brand group, origin) classes via the paired t-test.

    An origin whose brands all merge into one group keeps its origin label;
    otherwise each group is relabeled "<smallest brand>_<origin>". Returns a
    new dataset; the input is untouched.
    """
    groups = brand_groups(ds, alpha)
    label_of = {}
    for origin, clusters in groups.items():
        if len(clusters) == 1:
            for brand in clusters[0]:
                label_of[(origin, brand)] = origin
        else:
            for cluster in clusters:
                label = f"{cluster[0]}_{origin}"
                for brand in cluster:
                    label_of[(origin, brand)] = label
    new_labels = [
        label_of[(origin, brand)] for origin, brand in zip(ds.origins, ds.brands)
    ]
    return ds.with_class_labels(new_labels)


def make_folds():
    """All 20 train/test splits of the six acquisitions, 3 vs 3,
    in lexicographic order of the training triple."""
    folds = []
    for index, train in enumerate(combinations(ACQUISITIONS, 3)):
        test = tuple(a for a in ACQUISITIONS if a not in train)
        folds.append(FoldSpec(fold_index=index, train_acquisitions=train, test_acquisitions=test))
    return folds


def slice_fold(ds, fold):
    """Split a dataset into (train, test) by the fold's acquisition sets."""
    train_set = set(fold.train_acquisitions)
    mask = np.array([a in train_set for a in ds.acquisitions], dtype=bool)
    train = ds.select(mask)
    test = ds.select(~mask)
    # An image lives in exactly one acquisition, so it cannot straddle the split.
    assert not (set(train.image_ids) & set(test.image_ids))
    return train, test


@dataclass(frozen=True)
class Sample:
    """Unlabeled spectra submitted for classification."""

    bands: np.ndarray  # (n, d)
    image_ids: tuple  # one id per row; empty string when the file had none

    def __len__(self):
        return self.bands.shape[0]

    @property
    def single_image(self):
        return len(set(self.image_ids)) == 1


def parse_sample_csv(text, band_count):
    """Parse a prediction sample from CSV text.

    The header must carry exactly ``band_count`` contiguous band columns
    (b001..bNNN); an ``image_id`` column is honored when present and all
    other columns are ignored. Rows without an image_id column are treated
    as one implicit image.
    """
    reader = csv.reader(text.splitlines())
    header = next(reader, None)
    if header is None or not any(cell.strip() for cell in header):
        raise ArgumentError("sample is empty")
    header = [h.strip() for h in header]
    band_positions = [
        (i, name) for i, name in enumerate(header) if len(name) == 4 and name[0] == "b" and name[1:].isdigit()
    ]
    expected = _band_column_names(band_count)
    found = [name for _, name in band_positions]
    if len(found) != band_count:
        raise BandCountError(
            f"sample has {len(found)} band columns, model expects {band_count}"
        )
    if found != expected:
        raise BandCountError(
            f"band columns must be named {expected[0]}..{expected[-1]} in order"
        )
    band_idx = [i for i, _ in band_positions]
    image_idx = header.index("image_id") if "image_id" in header else None
    rows = []
    image_ids = []
    for line_no, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise ParseError(
                f"row {line_no}: has {len(row)} columns, expected {len(header)}",
                row=line_no,
            )
        bands = np.empty(band_count)
        for j, col in enumerate(band_idx):
            cell = row[col]
            try:
                bands[j] = float(cell)
            except ValueError:
                raise ParseError(
                    f"row {line_no}: band {header[col]} value {cell!r} is not numeric",
                    row=line_no,
                    column=header[col],
                ) from None
            if not math.isfinite(bands[j]):
                raise ParseError(
                    f"row {line_no}: band {header[col]} is not finite",
                    row=line_no,
                    column=header[col],
                )
        rows.append(bands)
        image_ids.append(row[image_idx].strip() if image_idx is not None else "")
    if not rows:
        raise ArgumentError("sample contains no data rows")
    return Sample(bands=np.vstack(rows), image_ids=tuple(image_ids))
