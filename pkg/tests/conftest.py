import numpy as np
import pytest

from droidtriage.catalog import FeatureCatalog, FeatureDef
from droidtriage.dataset import Dataset


def toy_catalog(n: int, prefix: str = "f") -> FeatureCatalog:
    """n synthetic API features named f00, f01, ... with disjoint patterns."""
    return FeatureCatalog(
        FeatureDef(f"{prefix}{i:02d}", "API", f"tok_{prefix}{i:02d}") for i in range(n)
    )


def make_dataset(X, y, catalog: FeatureCatalog | None = None) -> Dataset:
    X = np.asarray(X, dtype=np.uint8)
    if catalog is None:
        catalog = toy_catalog(X.shape[1])
    return Dataset(catalog, X, np.asarray(y, dtype=np.uint8))


def random_dataset(rng, n: int, n_features: int, catalog=None) -> Dataset:
    """Random dataset guaranteed to contain both classes (n >= 2)."""
    X = (rng.random((n, n_features)) < rng.random(n_features)).astype(np.uint8)
    y = (rng.random(n) < 0.5).astype(np.uint8)
    y[0], y[1] = 0, 1
    return make_dataset(X, y, catalog)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
