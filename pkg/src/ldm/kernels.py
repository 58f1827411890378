"""Kernel evaluation, Gram matrices, and the RBF width heuristic."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import LabeledDataset, SparseVector
from .errors import DataError
from .rng import XorShift64Star

LINEAR = "linear"
RBF = "rbf"


@dataclass(frozen=True)
class KernelSpec:
    kind: str
    width: float | None = None

    def __post_init__(self):
        if self.kind not in (LINEAR, RBF):
            raise DataError(f"unknown kernel kind {self.kind!r}")
        if self.kind == RBF and (self.width is None or self.width <= 0):
            raise DataError("rbf kernel requires a positive width")


def kernel_eval(spec: KernelSpec, a: SparseVector, b: SparseVector) -> float:
    if spec.kind == LINEAR:
        return a.dot(b)
    return float(np.exp(-a.sq_distance(b) / (2.0 * spec.width**2)))


def _pairwise_sq_dists(xa: np.ndarray, xb: np.ndarray) -> np.ndarray:
    sq_a = np.einsum("ij,ij->i", xa, xa)
    sq_b = np.einsum("ij,ij->i", xb, xb)
    d2 = sq_a[:, None] + sq_b[None, :] - 2.0 * (xa @ xb.T)
    return np.maximum(d2, 0.0)


def _symmetrize(upper_source: np.ndarray) -> np.ndarray:
    # Mirror the upper triangle so G is symmetric to the last bit.
    out = np.triu(upper_source)
    return out + np.triu(upper_source, 1).T


def gram_matrix(spec: KernelSpec, d: LabeledDataset) -> np.ndarray:
    """m x m matrix of pairwise kernel values, exactly symmetric."""
    x = d.to_dense()
    if spec.kind == LINEAR:
        return _symmetrize(x @ x.T)
    d2 = _pairwise_sq_dists(x, x)
    np.fill_diagonal(d2, 0.0)
    return _symmetrize(np.exp(-d2 / (2.0 * spec.width**2)))


def _dense_matrix(vectors, dimension: int) -> np.ndarray:
    out = np.zeros((len(vectors), dimension), dtype=np.float64)
    for r, vec in enumerate(vectors):
        if vec.indices.size:
            out[r, vec.indices - 1] = vec.values
    return out


def cross_gram(spec: KernelSpec, vectors_a, vectors_b) -> np.ndarray:
    """Rectangular kernel matrix K[i, j] = k(a_i, b_j).

    Both vector collections are embedded in their union feature space, so
    one side may carry indices the other never saw.
    """
    vectors_a = list(vectors_a)
    vectors_b = list(vectors_b)
    dim = max(
        max((v.max_index for v in vectors_a), default=0),
        max((v.max_index for v in vectors_b), default=0),
    )
    xa = _dense_matrix(vectors_a, dim)
    xb = _dense_matrix(vectors_b, dim)
    if spec.kind == LINEAR:
        return xa @ xb.T
    return np.exp(-_pairwise_sq_dists(xa, xb) / (2.0 * spec.width**2))


def rbf_width_base(d: LabeledDataset, cap: int = 1000, seed: int = 0) -> float:
    """Mean Euclidean distance over instance pairs.

    All unordered pairs are used when m <= cap; otherwise pairs are drawn
    from a seeded subsample of size cap, which is plenty to seed a width
    grid for model selection.
    """
    if d.m < 2:
        raise DataError("width heuristic needs at least two instances")
    if d.m > cap:
        idx = XorShift64Star(seed).permutation(d.m)[:cap]
        d = d.subset(sorted(idx))
    x = d.to_dense()
    d2 = _pairwise_sq_dists(x, x)
    iu = np.triu_indices(d.m, k=1)
    delta = float(np.mean(np.sqrt(d2[iu])))
    if delta <= 0.0:
        raise DataError("all instances identical; width heuristic is degenerate")
    return delta
