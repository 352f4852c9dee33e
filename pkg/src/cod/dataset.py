"""Loading, normalization and view-splitting of labeled tabular datasets."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

TRUTH_COLUMN = "__outlier"
TRUTH_TAGS = ("none", "attribute", "class")


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, copy=True)
    out.setflags(write=False)
    return out


@dataclass
class LabeledDataset:
    """N samples x n features with integer class labels in {1..n_classes}.

    Arrays are copied and frozen on construction, so instances can be shared
    across threads/processes without defensive copies.
    """

    features: np.ndarray
    labels: np.ndarray
    n_classes: int
    feature_names: list[str] | None = None
    label_name: str = "label"

    def __post_init__(self) -> None:
        self.features = _freeze(np.asarray(self.features, dtype=np.float64))
        self.labels = _freeze(np.asarray(self.labels, dtype=np.int64))
        if self.features.ndim != 2:
            raise ValueError("features must be a 2-D matrix")
        if self.labels.shape != (self.features.shape[0],):
            raise ValueError("labels length must match the number of rows")

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def validate(self) -> None:
        """Check the full set of construction invariants (raises ValueError)."""
        if self.n_samples < 1:
            raise ValueError("dataset must contain at least one sample")
        if self.n_features < 1:
            raise ValueError("dataset must contain at least one feature")
        if not np.isfinite(self.features).all():
            raise ValueError("features contain non-finite values")
        present = np.unique(self.labels)
        if present.min() < 1 or present.max() > self.n_classes:
            raise ValueError(f"labels must lie in 1..{self.n_classes}")
        if len(present) != self.n_classes:
            raise ValueError("every class id in 1..n_classes must appear at least once")

    def with_features(self, features: np.ndarray) -> "LabeledDataset":
        return LabeledDataset(features, self.labels, self.n_classes,
                              self.feature_names, self.label_name)

    def with_labels(self, labels: np.ndarray) -> "LabeledDataset":
        return LabeledDataset(self.features, labels, self.n_classes,
                              self.feature_names, self.label_name)


@dataclass
class MultiViewDataset:
    """Ordered disjoint feature views over one shared sample set.

    ``view_feature_indices[j]`` holds the original column indices of view j;
    the blocks partition {0..n-1}. Views produced by :func:`split_views` carry
    identical labels; injected multi-view data may diverge per view.
    """

    views: list[LabeledDataset]
    view_feature_indices: list[np.ndarray] = field(default_factory=list)

    def __post_init__(self) -> None:
        if len(self.views) < 2:
            raise ValueError("a multi-view dataset needs at least 2 views")
        self.view_feature_indices = [
            _freeze(np.asarray(ix, dtype=np.int64)) for ix in self.view_feature_indices
        ]
        flat = np.concatenate(self.view_feature_indices) if self.view_feature_indices else np.array([])
        total = sum(v.n_features for v in self.views)
        if len(flat) != total or len(np.unique(flat)) != len(flat):
            raise ValueError("view feature indices must be disjoint")
        if len(flat) and sorted(flat.tolist()) != list(range(len(flat))):
            raise ValueError("view feature indices must partition 0..n-1")
        for v in self.views:
            if v.n_samples != self.views[0].n_samples:
                raise ValueError("views must share the same samples")
            if v.n_features < 1:
                raise ValueError("each view needs at least one feature")

    @property
    def n_views(self) -> int:
        return len(self.views)

    @property
    def n_samples(self) -> int:
        return self.views[0].n_samples

    @property
    def labels(self) -> np.ndarray:
        return self.views[0].labels


def load_dataset(path: str | Path, label_column: str | int = -1) -> LabeledDataset:
    """Load a labeled dataset from a headered CSV file.

    ``label_column`` selects the label column by header name or 0-based
    position (negative indices count from the right). Labels are remapped to
    contiguous ids 1..n_classes in first-appearance order; row order is
    preserved. A ``__outlier`` ground-truth column, if present, is ignored.
    """
    ds, _ = load_dataset_with_truth(path, label_column)
    return ds


def load_dataset_with_truth(
    path: str | Path, label_column: str | int = -1
) -> tuple[LabeledDataset, list[str] | None]:
    """Like :func:`load_dataset` but also return the ``__outlier`` tags, if any."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"dataset file not found: {path}")
    frame = pd.read_csv(path, header=0, sep=",")
    if frame.shape[0] == 0:
        raise ValueError(f"dataset is empty: {path}")

    truth: list[str] | None = None
    if TRUTH_COLUMN in frame.columns:
        truth = [str(t) for t in frame[TRUTH_COLUMN]]
        bad = set(truth) - set(TRUTH_TAGS)
        if bad:
            raise ValueError(f"unknown {TRUTH_COLUMN} tags: {sorted(bad)}")
        frame = frame.drop(columns=[TRUTH_COLUMN])

    columns = list(frame.columns)
    if isinstance(label_column, int):
        if not -len(columns) <= label_column < len(columns):
            raise ValueError(f"label column index {label_column} out of range")
        label_name = columns[label_column]
    else:
        if label_column not in columns:
            raise ValueError(f"label column {label_column!r} not found in header")
        label_name = label_column

    raw_labels = frame[label_name].tolist()
    feature_frame = frame.drop(columns=[label_name])
    if feature_frame.shape[1] == 0:
        raise ValueError("dataset has no feature columns besides the label")

    try:
        features = feature_frame.astype(np.float64).to_numpy()
    except (ValueError, TypeError) as exc:
        raise ValueError(f"non-numeric feature cell in {path}: {exc}") from exc
    if not np.isfinite(features).all():
        rows, cols = np.where(~np.isfinite(features))
        name = feature_frame.columns[cols[0]]
        raise ValueError(f"non-finite feature value at row {rows[0]}, column {name!r}")

    mapping: dict[object, int] = {}
    labels = np.empty(len(raw_labels), dtype=np.int64)
    for i, lab in enumerate(raw_labels):
        if lab not in mapping:
            mapping[lab] = len(mapping) + 1
        labels[i] = mapping[lab]

    ds = LabeledDataset(features, labels, n_classes=len(mapping),
                        feature_names=list(feature_frame.columns),
                        label_name=label_name)
    ds.validate()
    return ds, truth


def save_dataset(ds: LabeledDataset, path: str | Path, truth: list[str] | None = None) -> None:
    """Write a dataset as CSV, optionally with a ``__outlier`` truth column."""
    path = Path(path)
    names = ds.feature_names or [f"f{j}" for j in range(ds.n_features)]
    header = names + [ds.label_name] + ([TRUTH_COLUMN] if truth is not None else [])
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(ds.n_samples):
            row = [repr(float(v)) for v in ds.features[i]] + [int(ds.labels[i])]
            if truth is not None:
                row.append(truth[i])
            writer.writerow(row)


def normalize_features(ds: LabeledDataset) -> LabeledDataset:
    """Z-score every feature column (sample std, ddof=1); constant columns map to zeros."""
    if ds.n_samples < 2:
        raise ValueError("normalization needs at least 2 samples")
    mean = ds.features.mean(axis=0)
    std = ds.features.std(axis=0, ddof=1)
    scaled = np.zeros_like(ds.features)
    nonconst = std > 0
    scaled[:, nonconst] = (ds.features[:, nonconst] - mean[nonconst]) / std[nonconst]
    return ds.with_features(scaled)


def split_views(ds: LabeledDataset, n_views: int, seed: int) -> MultiViewDataset:
    """Randomly partition the feature columns into ``n_views`` disjoint views.

    Columns are shuffled by ``seed`` and cut into contiguous blocks whose
    sizes differ by at most one. Deterministic given the seed.
    """
    if n_views < 2:
        raise ValueError("n_views must be at least 2")
    if ds.n_features < n_views:
        raise ValueError(f"cannot split {ds.n_features} features into {n_views} views")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(ds.n_features)
    blocks = np.array_split(perm, n_views)
    views = []
    for block in blocks:
        names = [ds.feature_names[j] for j in block] if ds.feature_names else None
        views.append(LabeledDataset(ds.features[:, block], ds.labels, ds.n_classes,
                                    names, ds.label_name))
    return MultiViewDataset(views, [np.asarray(b) for b in blocks])
