import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cod.classifier import save_model, train_default_model
from cod.dataset import LabeledDataset, load_dataset

DATA_DIR = Path(__file__).parent / "data"


def uniform_clusters(n: int, dims: int, seed: int, gap: float = 10.0) -> LabeledDataset:
    """Two uniform-density boxes, far apart: full community coverage fixtures."""
    rng = np.random.default_rng(seed)
    half = n // 2
    a = rng.uniform(0, 2, size=(half, dims))
    b = rng.uniform(0, 2, size=(n - half, dims)) + gap
    labels = np.array([1] * half + [2] * (n - half))
    return LabeledDataset(np.vstack([a, b]), labels, 2)


def with_far_point(ds: LabeledDataset, value: float = 500.0) -> LabeledDataset:
    features = np.vstack([ds.features, np.full((1, ds.n_features), value)])
    labels = np.concatenate([ds.labels, [1]])
    return LabeledDataset(features, labels, ds.n_classes, ds.feature_names)


@pytest.fixture(scope="session")
def iris_path() -> Path:
    return DATA_DIR / "iris.csv"


@pytest.fixture(scope="session")
def iris(iris_path):
    return load_dataset(iris_path, "species")


@pytest.fixture(scope="session")
def trained():
    """The default model plus its training corpus (built once per session)."""
    model, phi, truth = train_default_model(seed=0)
    return model, phi, truth


@pytest.fixture(scope="session")
def model(trained):
    return trained[0]


@pytest.fixture(scope="session")
def model_path(model, tmp_path_factory) -> Path:
    path = tmp_path_factory.mktemp("model") / "model.json"
    save_model(model, path)
    return path
