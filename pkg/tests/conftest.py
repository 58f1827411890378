import numpy as np
import pytest
from hypothesis import strategies as st

from ldm.data import LabeledDataset, SparseVector, make_dataset


def dense_to_dataset(x: np.ndarray, y: np.ndarray) -> LabeledDataset:
    """Pack a dense matrix into the sparse dataset type, dropping zeros."""
    instances = []
    for row in x:
        nz = np.flatnonzero(row != 0.0)
        instances.append(SparseVector(nz.astype(np.int64) + 1, row[nz]))
    ds = make_dataset(instances, y)
    if ds.dimension < x.shape[1]:
        ds = LabeledDataset(ds.instances, ds.labels, x.shape[1])
    return ds


def random_dataset(seed: int, m: int, d: int, scale: float = 1.0) -> LabeledDataset:
    """Uniform [0, scale) features with both classes guaranteed."""
    rng = np.random.default_rng(seed)
    x = rng.random((m, d)) * scale
    y = np.where(rng.random(m) < 0.5, 1.0, -1.0)
    y[0], y[1] = 1.0, -1.0
    return dense_to_dataset(x, y)


def blob_dataset(seed: int, m: int, d: int, separation: float = 2.0,
                 flip: float = 0.0) -> LabeledDataset:
    """Two Gaussian clusters along a random direction; optional label noise."""
    rng = np.random.default_rng(seed)
    direction = rng.standard_normal(d)
    direction /= np.linalg.norm(direction)
    y = np.where(rng.random(m) < 0.5, 1.0, -1.0)
    y[0], y[1] = 1.0, -1.0
    x = rng.standard_normal((m, d)) + np.outer(y * separation / 2.0, direction)
    if flip > 0:
        noisy = rng.random(m) < flip
        y = np.where(noisy, -y, y)
        y[0], y[1] = 1.0, -1.0
    return dense_to_dataset(x, y)


@st.composite
def sparse_vectors(draw, max_dim: int = 8):
    dim = draw(st.integers(min_value=0, max_value=max_dim))
    indices = sorted(draw(st.sets(st.integers(1, max_dim), max_size=dim)))
    values = [
        draw(st.floats(-10, 10, allow_nan=False, allow_infinity=False, width=64))
        for _ in indices
    ]
    return SparseVector(np.array(indices, dtype=np.int64), np.array(values))


@st.composite
def labeled_datasets(draw, min_m: int = 2, max_m: int = 10, max_dim: int = 8,
                     both_classes: bool = True):
    m = draw(st.integers(min_value=min_m, max_value=max_m))
    instances = [draw(sparse_vectors(max_dim)) for _ in range(m)]
    labels = [draw(st.sampled_from([1, -1])) for _ in range(m)]
    if both_classes and m >= 2:
        labels[0], labels[1] = 1, -1
    return make_dataset(instances, labels)


def datasets_equal(a: LabeledDataset, b: LabeledDataset) -> bool:
    if a.m != b.m or a.dimension != b.dimension:
        return False
    if not np.array_equal(a.labels, b.labels):
        return False
    return all(
        np.array_equal(u.indices, v.indices) and np.array_equal(u.values, v.values)
        for u, v in zip(a.instances, b.instances)
    )


@pytest.fixture
def tiny_dataset():
    return random_dataset(seed=7, m=12, d=4)
