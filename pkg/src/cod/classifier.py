"""Probabilistic outlier scoring on the 2-D outlierness space.

A logistic model is enough here: the space is the unit square with inliers
and outliers pushed toward opposite corners, so any margin classifier
separates them, and logistic regression gives calibrated probabilities
without extra dependencies. Training data comes from synthetic blob
datasets run through the full pipeline; the outlierness coordinates do not
depend on the original feature space, so a model trained once transfers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .outlierness import OutliernessFeatures, PipelineParams, single_view_features
from .simulate import NAMED_CONFIGS, OutlierConfig, build_experiment_instance, gaussian_blobs

MAX_ITERATIONS = 10_000
GRADIENT_TOL = 1e-6
#: Step size for gradient descent. Design rows are (phi1, phi2, 1) with both
#: coordinates in [0, 1], so the log-loss is L-smooth with L <= 3/4 and a
#: unit step is firmly inside the guaranteed-descent region (< 2/L).
STEP_SIZE = 1.0


@dataclass
class OutlierModel:
    """Logistic outlier scorer: weights are (w_phi1, w_phi2, bias)."""

    kind: str
    weights: np.ndarray
    training_meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.kind != "logistic":
            raise ValueError(f"unsupported model kind: {self.kind}")
        if self.weights.shape != (3,) or not np.isfinite(self.weights).all():
            raise ValueError("model needs 3 finite weights (w1, w2, bias)")


def _design(features: np.ndarray) -> np.ndarray:
    phi = np.asarray(features, dtype=np.float64)
    if phi.ndim != 2 or phi.shape[1] != 2:
        raise ValueError("features must be an N x 2 matrix")
    return np.hstack([phi, np.ones((phi.shape[0], 1))])


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def log_loss_and_gradient(weights: np.ndarray, features: np.ndarray,
                          truth: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean log-loss and its analytic gradient for (w1, w2, bias)."""
    x = _design(features)
    y = np.asarray(truth, dtype=np.float64)
    z = x @ np.asarray(weights, dtype=np.float64)
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z))
    grad = x.T @ (_sigmoid(z) - y) / len(y)
    return loss, grad


def train_outlier_model(features: np.ndarray, truth: np.ndarray, seed: int = 0,
                        corpus: str = "custom") -> OutlierModel:
    """Fit the logistic scorer by full-batch gradient descent on log-loss.

    Runs until the gradient norm drops below 1e-6 or 10,000 iterations,
    whichever comes first. The fit is deterministic (zero initialization,
    fixed step size); the seed is recorded as corpus provenance.
    """
    y = np.asarray(truth, dtype=bool)
    if y.all() or not y.any():
        raise ValueError("training needs both inlier and outlier examples")
    weights = np.zeros(3)
    loss, grad = log_loss_and_gradient(weights, features, y)
    iterations = 0
    while iterations < MAX_ITERATIONS and np.linalg.norm(grad) >= GRADIENT_TOL:
        weights = weights - STEP_SIZE * grad
        loss, grad = log_loss_and_gradient(weights, features, y)
        iterations += 1
    meta = {
        "seed": int(seed),
        "corpus": corpus,
        "final_loss": loss,
        "iterations": iterations,
        "converged": bool(np.linalg.norm(grad) < GRADIENT_TOL),
    }
    return OutlierModel("logistic", weights, meta)


def score_outlierness(model: OutlierModel, features: np.ndarray) -> np.ndarray:
    """Outlier probability per sample, strictly inside (0, 1)."""
    p = _sigmoid(_design(features) @ model.weights)
    return np.clip(p, 1e-12, 1.0 - 1e-12)


def detect(model: OutlierModel, feats: OutliernessFeatures,
           threshold: float = 0.5) -> np.ndarray:
    """Flag samples whose score reaches the threshold (score >= threshold).

    Samples carrying the attribute flag are always flagged, whatever their
    score: being in no community is definitive.
    """
    scores = score_outlierness(model, feats.values)
    return (scores >= threshold) | feats.attribute_flag


def build_training_corpus(seed: int = 0, n_datasets: int = 20
                          ) -> tuple[np.ndarray, np.ndarray, str]:
    """Outlierness features plus truth from synthetic blob datasets.

    Generates blob datasets (2-5 classes, 2-10 features, 100-500 samples),
    injects each named outlier configuration in rotation, runs the full
    pipeline, and pools the resulting (phi1, phi2, is_outlier) examples.
    The neighbor count is capped below the class size so blobs stay separate.
    """
    rng = np.random.default_rng(seed)
    config_names = sorted(NAMED_CONFIGS)
    all_phi, all_truth = [], []
    for m in range(n_datasets):
        n_classes = int(rng.integers(2, 6))
        n_features = int(rng.integers(2, 11))
        n_samples = int(rng.integers(100, 501))
        ds = gaussian_blobs(n_samples, n_features, n_classes,
                            separation=float(rng.uniform(8.0, 15.0)),
                            seed=int(rng.integers(2 ** 63)))
        config = OutlierConfig.named(config_names[m % len(config_names)],
                                     seed=int(rng.integers(2 ** 63)))
        corrupted = build_experiment_instance(ds, config)
        # Cap k below the class size so well-separated blobs stay separate.
        k = min(40, max(10, (n_samples // n_classes) // 2))
        feats = single_view_features(corrupted.data, PipelineParams(k=k))
        all_phi.append(feats.values)
        all_truth.append(corrupted.outlier_mask)
    description = f"synthetic-blobs(n_datasets={n_datasets})"
    return np.vstack(all_phi), np.concatenate(all_truth), description


def train_default_model(seed: int = 0, n_datasets: int = 20
                        ) -> tuple[OutlierModel, np.ndarray, np.ndarray]:
    """Build the synthetic corpus and train on it; also return the corpus."""
    phi, truth, description = build_training_corpus(seed, n_datasets)
    model = train_outlier_model(phi, truth, seed=seed, corpus=description)
    return model, phi, truth


def save_model(model: OutlierModel, path: str | Path) -> None:
    """Persist the model as a small JSON document (full-precision weights)."""
    doc = {
        "kind": model.kind,
        "weights": [float(w) for w in model.weights],
        "seed": model.training_meta.get("seed"),
        "corpus": model.training_meta.get("corpus"),
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def load_model(path: str | Path) -> OutlierModel:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"model file not found: {path}")
    doc = json.loads(path.read_text())
    return OutlierModel(doc["kind"], np.array(doc["weights"], dtype=np.float64),
                        {"seed": doc.get("seed"), "corpus": doc.get("corpus")})
