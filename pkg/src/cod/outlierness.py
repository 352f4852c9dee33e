"""Per-sample outlierness features from community label statistics.

Each sample maps into the unit square: the first coordinate measures how
label-homogeneous its communities are, the second how consistent its own
label is with its co-members. Inliers land near (1,1); samples in no
community are attribute-outlier candidates pinned to (0,0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .community import (CommunitySet, ExtensionParams, extend_communities,
                        extension_tolerance, percolation_communities)
from .dataset import LabeledDataset, MultiViewDataset, _freeze, normalize_features
from .graph import graph_from_distances, pairwise_distances


@dataclass
class DiversityParams:
    """Entropy tolerance (on normalized entropy) for the homogeneity score."""

    entropy_tol: float = 0.2

    def __post_init__(self) -> None:
        if not 0.0 <= self.entropy_tol <= 1.0:
            raise ValueError("entropy tolerance must lie in [0, 1]")


@dataclass
class PipelineParams:
    """Parameters of the per-view graph -> communities -> features pipeline.

    The defaults follow the reported operating point (k=40, 75th percentile).
    ``clique_size=None`` lets percolation pick q from the graph's own
    maximal-clique sizes: a fixed small q chains near-overlapping classes
    into one giant community on dense graphs, while a fixed large q orphans
    the fringe of sparse ones. Z-scoring is off by default because corrupted
    samples inflate the per-feature scale estimates.
    """

    k: int = 40
    clique_size: int | None = None
    percentile: float = 75.0
    entropy_tol: float = 0.2
    normalize: bool = False

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.clique_size is not None and self.clique_size < 2:
            raise ValueError("clique size must be at least 2")
        if not 0.0 < self.percentile <= 100.0:
            raise ValueError("percentile must lie in (0, 100]")
        if not 0.0 <= self.entropy_tol <= 1.0:
            raise ValueError("entropy tolerance must lie in [0, 1]")


@dataclass
class OutliernessFeatures:
    """Per-sample (homogeneity, consistency) pairs in [0,1]^2.

    ``values`` holds the log-rescaled coordinates, ``raw_values`` the scores
    before rescaling. ``attribute_flag`` marks samples in no community, which
    are pinned to (0, 0).
    """

    values: np.ndarray
    raw_values: np.ndarray
    attribute_flag: np.ndarray

    def __post_init__(self) -> None:
        self.values = _freeze(np.asarray(self.values, dtype=np.float64))
        self.raw_values = _freeze(np.asarray(self.raw_values, dtype=np.float64))
        self.attribute_flag = _freeze(np.asarray(self.attribute_flag, dtype=bool))

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]


def label_distribution(c: int, cs: CommunitySet, labels: np.ndarray) -> np.ndarray:
    """Class probabilities inside community c (length n_classes, sums to 1)."""
    members = sorted(cs.communities[c])
    if not members:
        raise ValueError(f"community {c} is empty")
    n_classes = int(labels.max())
    counts = np.bincount(labels[members], minlength=n_classes + 1)[1:]
    return counts / len(members)


def label_entropy(c: int, cs: CommunitySet, labels: np.ndarray) -> float:
    """Shannon entropy of community labels, normalized to [0, 1].

    Natural log, 0*log(0)=0, divided by log(n_classes) so a uniform label mix
    scores 1; with a single class the entropy is 0 by convention.
    """
    p = label_distribution(c, cs, labels)
    if len(p) <= 1:
        return 0.0
    nz = p[p > 0]
    return float(-(nz * np.log(nz)).sum() / math.log(len(p)))


def homogeneity_score(v: int, cs: CommunitySet, labels: np.ndarray,
                      params: DiversityParams) -> float:
    """Fraction of v's communities whose label entropy is within tolerance."""
    cids = cs.communities_of(v)
    if not cids:
        raise ValueError(f"node {v} belongs to no community")
    hits = sum(1 for c in cids if label_entropy(c, cs, labels) <= params.entropy_tol)
    return hits / len(cids)


def consistency_score(v: int, cs: CommunitySet, labels: np.ndarray) -> float:
    """Mean fraction of co-members sharing v's label, over v's communities."""
    cids = cs.communities_of(v)
    if not cids:
        raise ValueError(f"node {v} belongs to no community")
    total = 0.0
    for c in cids:
        others = [w for w in cs.communities[c] if w != v]
        total += sum(1 for w in others if labels[w] == labels[v]) / len(others)
    return total / len(cids)


def log_rescale(x: float) -> float:
    """Monotone rescale f(x) = 1/(1 - ln x) on (0, 1], with f(0) = 0.

    Fixes the endpoints (f(0)=0, f(1)=1) while stretching separation near 0.
    """
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"value must lie in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    return 1.0 / (1.0 - math.log(x))


def outlierness_features(ds: LabeledDataset, cs: CommunitySet,
                         params: DiversityParams) -> OutliernessFeatures:
    """Map every sample to (homogeneity, consistency), log-rescaled.

    Samples in no community get (0, 0) and the attribute flag; raw scores are
    kept alongside the rescaled coordinates.
    """
    if cs.n_nodes != ds.n_samples:
        raise ValueError("community set and dataset sizes differ")
    labels = ds.labels
    within_tol = [label_entropy(c, cs, labels) <= params.entropy_tol
                  for c in range(cs.n_communities)]
    raw = np.zeros((ds.n_samples, 2))
    flags = np.zeros(ds.n_samples, dtype=bool)
    for v in range(ds.n_samples):
        cids = cs.communities_of(v)
        if not cids:
            flags[v] = True
            continue
        raw[v, 0] = sum(1 for c in cids if within_tol[c]) / len(cids)
        raw[v, 1] = consistency_score(v, cs, labels)
    values = np.zeros_like(raw)
    for v in range(ds.n_samples):
        if not flags[v]:
            values[v, 0] = log_rescale(raw[v, 0])
            values[v, 1] = log_rescale(raw[v, 1])
    return OutliernessFeatures(values, raw, flags)


def single_view_features(ds: LabeledDataset, params: PipelineParams) -> OutliernessFeatures:
    """Full single-view pipeline: graph, communities, extension, features.

    Features are z-scored first unless ``params.normalize`` is off. An
    edgeless graph yields no communities, so every sample comes out flagged.
    """
    work = normalize_features(ds) if params.normalize else ds
    dm = pairwise_distances(work)
    g = graph_from_distances(dm, params.k)
    cs = percolation_communities(g, params.clique_size)
    if cs.n_communities and g.n_edges:
        delta = extension_tolerance(g, params.percentile)
        cs = extend_communities(cs, g, dm,
                                ExtensionParams(delta, params.percentile, cs.clique_size))
    return outlierness_features(ds, cs, DiversityParams(params.entropy_tol))


def aggregate_views(per_view: list[OutliernessFeatures]) -> OutliernessFeatures:
    """Coordinatewise minimum across views; flagged in any view means flagged.

    The rescale is monotone, so taking minima after rescaling matches
    rescaling the minima.
    """
    if not per_view:
        raise ValueError("need at least one view to aggregate")
    values = np.min([f.values for f in per_view], axis=0)
    raw = np.min([f.raw_values for f in per_view], axis=0)
    flags = np.any([f.attribute_flag for f in per_view], axis=0)
    return OutliernessFeatures(values, raw, flags)


def multiview_outlierness(mv: MultiViewDataset,
                          params: PipelineParams) -> OutliernessFeatures:
    """Min-aggregated features over the full per-view pipelines.

    Each view runs independently (on its own labels, which may diverge after
    injection); a sample flagged in any view ends up at (0, 0).
    """
    return aggregate_views([single_view_features(view, params) for view in mv.views])


def write_features(feats: OutliernessFeatures, path: str | Path) -> None:
    """Dump features as CSV: sample_index,phi1,phi2,attribute_flag (flag 0/1)."""
    with Path(path).open("w") as fh:
        fh.write("sample_index,phi1,phi2,attribute_flag\n")
        for i in range(feats.n_samples):
            fh.write(f"{i},{float(feats.values[i, 0])!r},{float(feats.values[i, 1])!r},"
                     f"{int(feats.attribute_flag[i])}\n")
