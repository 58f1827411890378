"""Sparse dataset ingestion, normalization, folds, and splits.

The on-disk format is the familiar sparse text exchange format: one
instance per line, ``<label> <index>:<value> ...`` with 1-based strictly
increasing indices.  Labels are +1/-1; files using two other raw label
tokens (e.g. 0/1) are mapped deterministically, lexicographically smaller
token to -1.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .rng import XorShift64Star

_CANONICAL_LABELS = {"+1": 1, "1": 1, "-1": -1}


def format_real(v: float) -> str:
    """17 significant digits: enough to round-trip any binary64 value."""
    return f"{v:.17g}"


@dataclass(frozen=True)
class SparseVector:
    """Sparse feature vector with 1-based, strictly increasing indices."""

    indices: np.ndarray  # int64
    values: np.ndarray   # float64

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        val = np.asarray(self.values, dtype=np.float64)
        if idx.shape != val.shape or idx.ndim != 1:
            raise DataError("indices and values must be 1-D and equally long")
        if idx.size:
            if idx[0] < 1 or np.any(np.diff(idx) <= 0):
                raise DataError("feature indices must be positive and strictly increasing")
            if not np.all(np.isfinite(val)):
                raise DataError("feature values must be finite")
        idx.flags.writeable = False
        val.flags.writeable = False
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", val)

    @staticmethod
    def from_pairs(pairs) -> "SparseVector":
        pairs = list(pairs)
        return SparseVector(
            np.array([i for i, _ in pairs], dtype=np.int64),
            np.array([v for _, v in pairs], dtype=np.float64),
        )

    @property
    def max_index(self) -> int:
        return int(self.indices[-1]) if self.indices.size else 0

    def to_dense(self, dimension: int) -> np.ndarray:
        out = np.zeros(dimension, dtype=np.float64)
        if self.indices.size:
            out[self.indices - 1] = self.values
        return out

    def dot(self, other: "SparseVector") -> float:
        """Sparse dot product; indices absent from either side contribute 0."""
        a_idx, a_val = self.indices, self.values
        b_idx, b_val = other.indices, other.values
        pos = np.searchsorted(b_idx, a_idx)
        pos = np.clip(pos, 0, b_idx.size - 1) if b_idx.size else pos
        if not b_idx.size or not a_idx.size:
            return 0.0
        hit = b_idx[pos] == a_idx
        return float(np.dot(a_val[hit], b_val[pos[hit]]))

    def dot_dense(self, w: np.ndarray) -> float:
        """Dot against a dense vector; indices beyond len(w) contribute 0."""
        if not self.indices.size:
            return 0.0
        in_range = self.indices <= w.shape[0]
        return float(np.dot(w[self.indices[in_range] - 1], self.values[in_range]))

    def sq_norm(self) -> float:
        return float(np.dot(self.values, self.values))

    def sq_distance(self, other: "SparseVector") -> float:
        d2 = self.sq_norm() + other.sq_norm() - 2.0 * self.dot(other)
        return max(d2, 0.0)


@dataclass(frozen=True)
class LabeledDataset:
    """Instances with +1/-1 labels; dimension is the largest feature index."""

    instances: tuple[SparseVector, ...]
    labels: np.ndarray  # float64, entries +1 or -1
    dimension: int

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.float64)
        if len(self.instances) != labels.shape[0] or labels.shape[0] < 1:
            raise DataError("need equally many instances and labels, at least one")
        if not np.all(np.abs(labels) == 1.0):
            raise DataError("labels must be +1 or -1")
        labels.flags.writeable = False
        object.__setattr__(self, "instances", tuple(self.instances))
        object.__setattr__(self, "labels", labels)

    @property
    def m(self) -> int:
        return len(self.instances)

    def has_both_classes(self) -> bool:
        return bool(np.any(self.labels > 0) and np.any(self.labels < 0))

    def to_dense(self, dimension: int | None = None) -> np.ndarray:
        dim = self.dimension if dimension is None else dimension
        out = np.zeros((self.m, dim), dtype=np.float64)
        for r, inst in enumerate(self.instances):
            if inst.indices.size:
                out[r, inst.indices - 1] = inst.values
        return out

    def subset(self, indices) -> "LabeledDataset":
        idx = np.asarray(indices, dtype=np.int64)
        return LabeledDataset(
            tuple(self.instances[int(i)] for i in idx),
            self.labels[idx],
            self.dimension,
        )


def make_dataset(instances, labels) -> LabeledDataset:
    insts = tuple(instances)
    dim = max((v.max_index for v in insts), default=0)
    return LabeledDataset(insts, np.asarray(labels, dtype=np.float64), dim)


def _parse_line(line: str, lineno: int) -> tuple[str, SparseVector]:
    parts = line.split()
    raw_label = parts[0]
    indices: list[int] = []
    values: list[float] = []
    prev = 0
    for tok in parts[1:]:
        idx_s, sep, val_s = tok.partition(":")
        if not sep:
            raise DataError(f"line {lineno}: expected index:value, got {tok!r}")
        try:
            idx = int(idx_s)
            val = float(val_s)
        except ValueError as exc:
            raise DataError(f"line {lineno}: bad feature token {tok!r}") from exc
        if idx <= prev:
            raise DataError(f"line {lineno}: feature indices must be strictly increasing")
        if not math.isfinite(val):
            raise DataError(f"line {lineno}: non-finite feature value in {tok!r}")
        indices.append(idx)
        values.append(val)
        prev = idx
    vec = SparseVector(np.array(indices, dtype=np.int64), np.array(values, dtype=np.float64))
    return raw_label, vec


def parse_sparse_file(source) -> LabeledDataset:
    """Parse sparse text data from a string, bytes, or readable object.

    Raw labels other than +1/-1 are allowed as long as the file uses at
    most two distinct tokens; the lexicographically smaller one maps to -1.
    """
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    else:
        text = source.read()
        if isinstance(text, bytes):
            text = text.decode("utf-8")

    raw_labels: list[str] = []
    vectors: list[SparseVector] = []
    for lineno, line in enumerate(io.StringIO(text), start=1):
        line = line.strip()
        if not line:
            continue
        raw, vec = _parse_line(line, lineno)
        raw_labels.append(raw)
        vectors.append(vec)
    if not vectors:
        raise DataError("no instances found")

    if all(r in _CANONICAL_LABELS for r in raw_labels):
        labels = [_CANONICAL_LABELS[r] for r in raw_labels]
    else:
        distinct = sorted(set(raw_labels))
        if len(distinct) > 2:
            raise DataError(f"more than two distinct labels: {distinct}")
        mapping = {distinct[0]: -1}
        if len(distinct) == 2:
            mapping[distinct[1]] = 1
        labels = [mapping[r] for r in raw_labels]

    return make_dataset(vectors, labels)


def load_sparse_file(path) -> LabeledDataset:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_sparse_file(fh)


def serialize_dataset(d: LabeledDataset) -> str:
    lines = []
    for inst, label in zip(d.instances, d.labels):
        head = "+1" if label > 0 else "-1"
        feats = " ".join(
            f"{int(i)}:{format_real(float(v))}" for i, v in zip(inst.indices, inst.values)
        )
        lines.append(f"{head} {feats}".rstrip())
    return "\n".join(lines) + "\n"


def save_sparse_file(d: LabeledDataset, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_dataset(d))


@dataclass(frozen=True)
class NormalizationMap:
    """Per-feature min/max fitted on one dataset, mapping values into [0, 1]."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=np.float64)
        hi = np.asarray(self.hi, dtype=np.float64)
        if lo.shape != hi.shape or np.any(lo > hi):
            raise DataError("normalization map requires min <= max per feature")
        lo.flags.writeable = False
        hi.flags.writeable = False
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dimension(self) -> int:
        return int(self.lo.shape[0])

    def transform_value(self, index: int, value: float) -> float:
        if index > self.dimension:
            return 0.0
        lo = self.lo[index - 1]
        hi = self.hi[index - 1]
        if hi <= lo:
            return 0.0
        return min(max((value - lo) / (hi - lo), 0.0), 1.0)

    def transform_vector(self, vec: SparseVector) -> SparseVector:
        vals = np.array(
            [self.transform_value(int(i), float(v)) for i, v in zip(vec.indices, vec.values)],
            dtype=np.float64,
        )
        return SparseVector(vec.indices.copy(), vals)


def fit_normalizer(d: LabeledDataset) -> NormalizationMap:
    """Column-wise min/max; implicit zeros of a feature that is absent from
    any instance participate in that feature's range."""
    dim = d.dimension
    lo = np.full(dim, np.inf)
    hi = np.full(dim, -np.inf)
    count = np.zeros(dim, dtype=np.int64)
    for inst in d.instances:
        if not inst.indices.size:
            continue
        cols = inst.indices - 1
        np.minimum.at(lo, cols, inst.values)
        np.maximum.at(hi, cols, inst.values)
        count[cols] += 1
    missing_somewhere = count < d.m
    lo = np.where(missing_somewhere, np.minimum(lo, 0.0), lo)
    hi = np.where(missing_somewhere, np.maximum(hi, 0.0), hi)
    return NormalizationMap(lo, hi)


def apply_normalizer(nmap: NormalizationMap, d: LabeledDataset) -> LabeledDataset:
    """Rescale stored entries to [0, 1], clamping out-of-range values.

    Only stored entries are transformed; implicit zeros stay implicit.
    Features with a degenerate range (min == max) map to 0.
    """
    new_instances = [
        inst if not inst.indices.size else nmap.transform_vector(inst)
        for inst in d.instances
    ]
    return LabeledDataset(tuple(new_instances), d.labels, d.dimension)


@dataclass(frozen=True)
class FoldPlan:
    """Deterministic fold assignment; sizes differ by at most one."""

    k: int
    assignment: np.ndarray
    seed: int

    def test_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == fold)

    def train_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignment != fold)


def make_folds(m: int, k: int, seed: int) -> FoldPlan:
    """Shuffled round-robin fold assignment over m instances."""
    if not 2 <= k <= m:
        raise DataError(f"need 2 <= k <= m, got k={k}, m={m}")
    perm = XorShift64Star(seed).permutation(m)
    assignment = np.empty(m, dtype=np.int64)
    for pos, idx in enumerate(perm):
        assignment[idx] = pos % k
    return FoldPlan(k, assignment, seed)


def random_split(
    d: LabeledDataset, fraction: float, seed: int
) -> tuple[LabeledDataset, LabeledDataset]:
    """Disjoint shuffle split with ceil(fraction * m) training instances."""
    if not 0.0 < fraction < 1.0:
        raise DataError("fraction must lie strictly between 0 and 1")
    n_train = math.ceil(fraction * d.m)
    perm = XorShift64Star(seed).permutation(d.m)
    train = d.subset(perm[:n_train])
    test = d.subset(perm[n_train:])
    if not train.has_both_classes():
        raise DataError("training split lost a class; choose another seed or fraction")
    return train, test
