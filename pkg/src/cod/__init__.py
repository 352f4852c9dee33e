"""Community-based outlier detection for labeled tabular data.

The pipeline builds a weighted mutual k-nearest-neighbor graph over the
samples, detects and extends overlapping graph communities, maps every
sample into a normalized 2-D outlierness space from community label
statistics, and scores outliers with a probabilistic classifier on that
space.
"""

from .classifier import (OutlierModel, detect, load_model, save_model,
                         score_outlierness, train_outlier_model)
from .community import (CommunitySet, ExtensionParams, belongingness,
                        choose_clique_size, connection_strength,
                        extend_communities, extension_tolerance,
                        internal_connectivity, percolation_communities)
from .dataset import (LabeledDataset, MultiViewDataset, load_dataset,
                      normalize_features, save_dataset, split_views)
from .evaluation import (ExperimentReport, auc, run_experiment,
                         run_multiview_experiment)
from .graph import (DistanceMatrix, WeightedGraph, knn_sets, mutual_knn_graph,
                    pairwise_distances)
from .outlierness import (DiversityParams, OutliernessFeatures, PipelineParams,
                          aggregate_views, consistency_score, homogeneity_score,
                          label_distribution, label_entropy, log_rescale,
                          multiview_outlierness, outlierness_features,
                          single_view_features)
from .simulate import (NAMED_CONFIGS, CorruptedDataset, OutlierConfig,
                       build_experiment_instance, gaussian_blobs,
                       inject_attribute_outliers, inject_class_outliers)

__all__ = [
    "CommunitySet", "CorruptedDataset", "DistanceMatrix", "DiversityParams",
    "ExperimentReport", "ExtensionParams", "LabeledDataset", "MultiViewDataset",
    "NAMED_CONFIGS", "OutlierConfig", "OutlierModel", "OutliernessFeatures",
    "PipelineParams", "WeightedGraph", "aggregate_views", "auc", "belongingness",
    "build_experiment_instance", "choose_clique_size", "connection_strength",
    "consistency_score",
    "detect", "extend_communities", "extension_tolerance", "gaussian_blobs",
    "homogeneity_score", "inject_attribute_outliers", "inject_class_outliers",
    "internal_connectivity", "knn_sets", "label_distribution", "label_entropy",
    "load_dataset",
    "load_model", "log_rescale", "multiview_outlierness", "mutual_knn_graph",
    "normalize_features", "outlierness_features", "pairwise_distances",
    "percolation_communities", "run_experiment", "run_multiview_experiment",
    "save_dataset", "save_model", "score_outlierness", "single_view_features",
    "split_views", "train_outlier_model",
]

__version__ = "0.1.0"
