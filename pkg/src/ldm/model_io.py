"""Line-oriented UTF-8 model files.

Layout: a `#LDM v1` magic line, header key/value lines (solver, kernel,
hyperparameters, normalization map), then the body: expansion
coefficients with their support instances for kernel models, or the
dense averaged weight vector for linear models.  Reals are written with
17 significant digits so save/load round-trips reproduce predictions
bit-exactly.
"""

from __future__ import annotations

import numpy as np

from .data import NormalizationMap, SparseVector, format_real
from .errors import DataError
from .kernel_ldm import KernelLdmModel
from .kernels import LINEAR, RBF, KernelSpec
from .linear_ldm import LinearModel

MAGIC = "#LDM v1"


def _write_normalizer(lines: list[str], nmap: NormalizationMap | None) -> None:
    if nmap is None:
        lines.append("normalizer none")
        return
    stored = [
        (i + 1, lo, hi)
        for i, (lo, hi) in enumerate(zip(nmap.lo, nmap.hi))
        if lo != 0.0 or hi != 0.0
    ]
    lines.append(f"normalizer {nmap.dimension} {len(stored)}")
    for idx, lo, hi in stored:
        lines.append(f"{idx} {format_real(lo)} {format_real(hi)}")


def _format_sparse(vec: SparseVector) -> str:
    return " ".join(f"{int(i)}:{format_real(float(v))}" for i, v in zip(vec.indices, vec.values))


def save_model(path, model, c: float, lambda1: float, lambda2: float) -> None:
    """Write a trained kernel or linear model with its hyperparameters."""
    lines = [MAGIC]
    if isinstance(model, KernelLdmModel):
        lines.append("solver kernel")
        if model.kernel.kind == RBF:
            lines.append(f"kernel rbf {format_real(model.kernel.width)}")
        else:
            lines.append("kernel linear")
    elif isinstance(model, LinearModel):
        lines.append("solver linear")
    else:
        raise DataError(f"cannot serialize model of type {type(model).__name__}")
    lines.append(f"c {format_real(c)}")
    lines.append(f"lambda1 {format_real(lambda1)}")
    lines.append(f"lambda2 {format_real(lambda2)}")
    _write_normalizer(lines, model.normalizer)

    if isinstance(model, KernelLdmModel):
        lines.append(f"support {len(model.instances)}")
        for a_i, inst in zip(model.alpha, model.instances):
            feats = _format_sparse(inst)
            lines.append(f"{format_real(float(a_i))} {feats}".rstrip())
    else:
        w_bar = model.w_bar
        lines.append(f"weights {w_bar.shape[0]}")
        for i, v in enumerate(w_bar, start=1):
            lines.append(f"{i}:{format_real(float(v))}")

    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


class _Reader:
    def __init__(self, path):
        with open(path, "r", encoding="utf-8") as fh:
            self.lines = fh.read().splitlines()
        self.pos = 0

    def next(self) -> str:
        if self.pos >= len(self.lines):
            raise DataError("model file truncated")
        line = self.lines[self.pos]
        self.pos += 1
        return line

    def expect_key(self, key: str) -> list[str]:
        line = self.next()
        parts = line.split()
        if not parts or parts[0] != key:
            raise DataError(f"model file: expected {key!r}, found {line!r}")
        return parts[1:]


def _read_normalizer(reader: _Reader) -> NormalizationMap | None:
    args = reader.expect_key("normalizer")
    if args == ["none"]:
        return None
    try:
        dim, count = int(args[0]), int(args[1])
    except (ValueError, IndexError) as exc:
        raise DataError("model file: bad normalizer header") from exc
    lo = np.zeros(dim)
    hi = np.zeros(dim)
    for _ in range(count):
        parts = reader.next().split()
        try:
            idx = int(parts[0])
            lo[idx - 1] = float(parts[1])
            hi[idx - 1] = float(parts[2])
        except (ValueError, IndexError) as exc:
            raise DataError("model file: bad normalizer entry") from exc
    return NormalizationMap(lo, hi)


def _parse_sparse_tokens(tokens: list[str]) -> SparseVector:
    indices = []
    values = []
    for tok in tokens:
        idx_s, sep, val_s = tok.partition(":")
        if not sep:
            raise DataError(f"model file: bad feature token {tok!r}")
        indices.append(int(idx_s))
        values.append(float(val_s))
    return SparseVector(np.array(indices, dtype=np.int64), np.array(values, dtype=np.float64))


def load_model(path):
    """Read a model file back; returns a KernelLdmModel or LinearModel."""
    reader = _Reader(path)
    if reader.next() != MAGIC:
        raise DataError("not a model file (missing magic header)")
    solver = reader.expect_key("solver")
    if solver == ["kernel"]:
        kspec_args = reader.expect_key("kernel")
        if kspec_args == ["linear"]:
            spec = KernelSpec(LINEAR)
        elif len(kspec_args) == 2 and kspec_args[0] == "rbf":
            spec = KernelSpec(RBF, float(kspec_args[1]))
        else:
            raise DataError(f"model file: bad kernel line {kspec_args!r}")
    elif solver == ["linear"]:
        spec = None
    else:
        raise DataError(f"model file: unknown solver {solver!r}")

    try:
        reader.expect_key("c")
        reader.expect_key("lambda1")
        reader.expect_key("lambda2")
    except DataError:
        raise
    nmap = _read_normalizer(reader)

    if spec is not None:
        (count_s,) = reader.expect_key("support")
        count = int(count_s)
        alphas = np.empty(count)
        instances = []
        for r in range(count):
            parts = reader.next().split()
            if not parts:
                raise DataError("model file: empty support line")
            try:
                alphas[r] = float(parts[0])
            except ValueError as exc:
                raise DataError("model file: bad expansion coefficient") from exc
            instances.append(_parse_sparse_tokens(parts[1:]))
        return KernelLdmModel(alphas, tuple(instances), spec, nmap)

    (dim_s,) = reader.expect_key("weights")
    dim = int(dim_s)
    w_bar = np.zeros(dim)
    for _ in range(dim):
        tok = reader.next().strip()
        idx_s, sep, val_s = tok.partition(":")
        if not sep:
            raise DataError(f"model file: bad weight line {tok!r}")
        idx = int(idx_s)
        if not 1 <= idx <= dim:
            raise DataError(f"model file: weight index {idx} out of range")
        w_bar[idx - 1] = float(val_s)
    return LinearModel(w=w_bar.copy(), w_bar=w_bar, t=0, normalizer=nmap)
