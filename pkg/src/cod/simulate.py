"""Ground-truth outlier injection into clean datasets.

Class outliers get their labels exchanged between random pairs of classes
(features untouched); attribute outliers get every feature redrawn from
bands strictly outside the clean per-feature range. The two kinds are
injected on disjoint sample sets and tagged for later AUC scoring.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .dataset import LabeledDataset, MultiViewDataset

TAG_NONE = "none"
TAG_ATTRIBUTE = "attribute"
TAG_CLASS = "class"

#: Named class/attribute percentage pairs: "8-2" means 8% class + 2% attribute.
NAMED_CONFIGS = {
    "8-2": (0.08, 0.02),
    "5-5": (0.05, 0.05),
    "2-8": (0.02, 0.08),
    "0-8": (0.00, 0.08),
    "0-5": (0.00, 0.05),
    "0-2": (0.00, 0.02),
}


@dataclass
class OutlierConfig:
    """Fractions of class and attribute outliers to inject, plus seeding."""

    class_pct: float
    attr_pct: float
    seed: int = 0
    views_mode: str = "single"

    def __post_init__(self) -> None:
        if self.class_pct < 0 or self.attr_pct < 0:
            raise ValueError("outlier fractions must be non-negative")
        if self.class_pct + self.attr_pct >= 1:
            raise ValueError("outlier fractions must sum to less than 1")
        if self.views_mode not in ("single", "per_view"):
            raise ValueError("views_mode must be 'single' or 'per_view'")

    @classmethod
    def named(cls, name: str, seed: int = 0, views_mode: str = "single") -> "OutlierConfig":
        if name not in NAMED_CONFIGS:
            raise ValueError(f"unknown configuration {name!r}; "
                             f"choose one of {sorted(NAMED_CONFIGS)}")
        class_pct, attr_pct = NAMED_CONFIGS[name]
        return cls(class_pct, attr_pct, seed, views_mode)


@dataclass
class CorruptedDataset:
    """A dataset after injection plus its per-sample ground-truth tags."""

    data: Union[LabeledDataset, MultiViewDataset]
    truth: list[str]

    def __post_init__(self) -> None:
        if len(self.truth) != self.data.n_samples:
            raise ValueError("truth tags must cover every sample")

    @property
    def outlier_mask(self) -> np.ndarray:
        return np.array([t != TAG_NONE for t in self.truth], dtype=bool)


def gaussian_blobs(n_samples: int, n_features: int, n_classes: int,
                   separation: float, seed: int) -> LabeledDataset:
    """Synthetic dataset of unit-variance Gaussian blobs, one per class.

    Blob centers are rejection-sampled until every pair is at least
    ``separation`` apart (in units of the blob standard deviation).
    """
    if n_classes < 1 or n_samples < n_classes:
        raise ValueError("need at least one sample per class")
    rng = np.random.default_rng(seed)
    centers = np.empty((n_classes, n_features))
    placed = 0
    while placed < n_classes:
        cand = rng.normal(scale=max(separation, 1.0), size=n_features)
        if all(np.linalg.norm(cand - centers[i]) >= separation for i in range(placed)):
            centers[placed] = cand
            placed += 1
    sizes = [len(b) for b in np.array_split(np.arange(n_samples), n_classes)]
    features = np.vstack([rng.normal(loc=centers[c], size=(sizes[c], n_features))
                          for c in range(n_classes)])
    labels = np.repeat(np.arange(1, n_classes + 1), sizes)
    names = [f"f{j}" for j in range(n_features)]
    return LabeledDataset(features, labels, n_classes, names)


def _outside_range_draw(rng: np.random.Generator, lo: float, hi: float) -> float:
    # Uniform over two bands one clean range beyond each extreme; a constant
    # feature has no range, so fall back to a unit-wide band.
    span = hi - lo if hi > lo else 1.0
    if rng.integers(2) == 0:
        return float(rng.uniform(lo - 2 * span, lo - span))
    return float(rng.uniform(hi + span, hi + 2 * span))


def _choose_attribute_indices(rng: np.random.Generator, n: int, fraction: float,
                              exclude: set[int]) -> np.ndarray:
    if not 0.0 <= fraction < 1.0:
        raise ValueError("fraction must lie in [0, 1)")
    count = int(np.floor(fraction * n))
    pool = np.array(sorted(set(range(n)) - exclude), dtype=np.int64)
    if count > len(pool):
        raise ValueError("not enough uncorrupted samples for attribute injection")
    if count == 0:
        return np.array([], dtype=np.int64)
    return np.sort(rng.choice(pool, size=count, replace=False))


def _corrupt_features(rng: np.random.Generator, features: np.ndarray,
                      indices: np.ndarray) -> np.ndarray:
    lo = features.min(axis=0)
    hi = features.max(axis=0)
    out = features.copy()
    for i in indices:
        for j in range(features.shape[1]):
            out[i, j] = _outside_range_draw(rng, lo[j], hi[j])
    return out


def inject_attribute_outliers(ds: LabeledDataset, fraction: float, seed: int,
                              exclude: set[int] | None = None) -> CorruptedDataset:
    """Replace every feature of floor(fraction*N) random samples.

    New values are drawn uniformly from the two bands one clean range beyond
    the per-feature minimum and maximum, so they land strictly outside the
    observed range. Samples listed in ``exclude`` are never chosen.
    """
    rng = np.random.default_rng(seed)
    indices = _choose_attribute_indices(rng, ds.n_samples, fraction, exclude or set())
    out = ds.with_features(_corrupt_features(rng, ds.features, indices))
    truth = [TAG_NONE] * ds.n_samples
    for i in indices:
        truth[int(i)] = TAG_ATTRIBUTE
    return CorruptedDataset(out, truth)


def _plan_class_swaps(rng: np.random.Generator, labels: np.ndarray, n_classes: int,
                      fraction: float) -> list[tuple[int, int]]:
    """Plan label changes: (sample index, new label). Pairs get exchanged
    labels; an odd leftover is reassigned to a random different class."""
    if n_classes < 2:
        raise ValueError("class outliers need at least 2 classes")
    if not 0.0 <= fraction < 1.0:
        raise ValueError("fraction must lie in [0, 1)")
    count = int(np.floor(fraction * len(labels)))
    pools = {c: list(np.flatnonzero(labels == c)) for c in range(1, n_classes + 1)}
    changes: list[tuple[int, int]] = []
    for _ in range(count // 2):
        nonempty = [c for c, pool in pools.items() if pool]
        if len(nonempty) < 2:
            raise ValueError("not enough samples left to form a class pair")
        c1, c2 = rng.choice(nonempty, size=2, replace=False)
        a = pools[c1].pop(int(rng.integers(len(pools[c1]))))
        b = pools[c2].pop(int(rng.integers(len(pools[c2]))))
        changes.append((int(a), int(c2)))
        changes.append((int(b), int(c1)))
    if count % 2 == 1:
        nonempty = [c for c, pool in pools.items() if pool]
        if not nonempty:
            raise ValueError("no samples left for the leftover class outlier")
        c1 = int(rng.choice(nonempty))
        a = pools[c1].pop(int(rng.integers(len(pools[c1]))))
        others = [c for c in range(1, n_classes + 1) if c != c1]
        changes.append((int(a), int(rng.choice(others))))
    return changes


def inject_class_outliers(ds: LabeledDataset, fraction: float, seed: int) -> CorruptedDataset:
    """Swap labels of floor(fraction*N) samples between random class pairs.

    Samples are processed in pairs drawn from two distinct classes and have
    their labels exchanged; an odd leftover sample is reassigned to a
    uniformly chosen different class. Features are untouched.
    """
    rng = np.random.default_rng(seed)
    changes = _plan_class_swaps(rng, ds.labels, ds.n_classes, fraction)
    labels = ds.labels.copy()
    truth = [TAG_NONE] * ds.n_samples
    for idx, new_label in changes:
        labels[idx] = new_label
        truth[idx] = TAG_CLASS
    return CorruptedDataset(ds.with_labels(labels), truth)


def _nonempty_view_subset(rng: np.random.Generator, n_views: int) -> list[int]:
    while True:
        picked = [j for j in range(n_views) if rng.integers(2)]
        if picked:
            return picked


def build_experiment_instance(ds: Union[LabeledDataset, MultiViewDataset],
                              config: OutlierConfig) -> CorruptedDataset:
    """Inject class then attribute outliers on disjoint sample sets.

    On a multi-view dataset (``views_mode='per_view'``), each label swap is
    applied in a uniformly chosen non-empty subset of views, while attribute
    corruption alters every view of the chosen samples.
    """
    multiview = isinstance(ds, MultiViewDataset)
    if multiview != (config.views_mode == "per_view"):
        raise ValueError("views_mode must be 'per_view' exactly for multi-view data")
    master = np.random.default_rng(config.seed)
    class_rng = np.random.default_rng(master.integers(2 ** 63))
    attr_rng = np.random.default_rng(master.integers(2 ** 63))

    truth = [TAG_NONE] * ds.n_samples
    if not multiview:
        changes = _plan_class_swaps(class_rng, ds.labels, ds.n_classes,
                                    config.class_pct) if config.class_pct else []
        labels = ds.labels.copy()
        for idx, new_label in changes:
            labels[idx] = new_label
            truth[idx] = TAG_CLASS
        attr_idx = _choose_attribute_indices(attr_rng, ds.n_samples, config.attr_pct,
                                             {idx for idx, _ in changes})
        features = _corrupt_features(attr_rng, ds.features, attr_idx)
        for i in attr_idx:
            truth[int(i)] = TAG_ATTRIBUTE
        return CorruptedDataset(LabeledDataset(features, labels, ds.n_classes,
                                               ds.feature_names, ds.label_name), truth)

    changes = _plan_class_swaps(class_rng, ds.labels, ds.views[0].n_classes,
                                config.class_pct) if config.class_pct else []
    view_labels = [view.labels.copy() for view in ds.views]
    for idx, new_label in changes:
        for j in _nonempty_view_subset(class_rng, ds.n_views):
            view_labels[j][idx] = new_label
        truth[idx] = TAG_CLASS
    attr_idx = _choose_attribute_indices(attr_rng, ds.n_samples, config.attr_pct,
                                         {idx for idx, _ in changes})
    for i in attr_idx:
        truth[int(i)] = TAG_ATTRIBUTE
    views = []
    for j, view in enumerate(ds.views):
        features = _corrupt_features(attr_rng, view.features, attr_idx)
        views.append(LabeledDataset(features, view_labels[j], view.n_classes,
                                    view.feature_names, view.label_name))
    return CorruptedDataset(MultiViewDataset(views, list(ds.view_feature_indices)), truth)
