"""Grid search by k-fold cross-validation over c, lambda1, lambda2, and
RBF width multipliers.

All per-fold fitting (normalization, the width heuristic) happens on the
fold-training portion only.  For the RBF kernel the width grid is
relative: each multiplier scales the mean pairwise distance of the
normalized fold-training data, so a configuration is identified by its
multiplier rather than an absolute width.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernel_ldm, linear_ldm
from .analysis import accuracy
from .data import LabeledDataset, apply_normalizer, fit_normalizer, format_real, make_folds
from .errors import DataError
from .kernels import LINEAR, RBF, KernelSpec, rbf_width_base
from .rng import derive_seed

DEFAULT_C_VALUES = (10.0, 50.0, 100.0)
DEFAULT_LAMBDA_VALUES = tuple(2.0**-k for k in range(8, 1, -1))
DEFAULT_WIDTH_MULTIPLIERS = (0.25, 0.5, 1.0, 2.0, 4.0)


@dataclass(frozen=True)
class SearchGrid:
    c_values: tuple[float, ...] = DEFAULT_C_VALUES
    lambda_values: tuple[float, ...] = DEFAULT_LAMBDA_VALUES
    width_multipliers: tuple[float, ...] = DEFAULT_WIDTH_MULTIPLIERS

    def __post_init__(self):
        for name in ("c_values", "lambda_values", "width_multipliers"):
            vals = getattr(self, name)
            if not vals or any(v <= 0 for v in vals):
                raise DataError(f"{name} must be nonempty and positive")


@dataclass(frozen=True)
class Config:
    c: float
    lambda1: float
    lambda2: float
    width_multiplier: float | None = None

    def sort_key(self):
        wm = self.width_multiplier if self.width_multiplier is not None else 0.0
        return (self.c, self.lambda1, self.lambda2, wm)


@dataclass(frozen=True)
class CvRecord:
    config: Config
    fold: int
    accuracy: float


@dataclass
class SearchResult:
    best: Config
    means: list[tuple[Config, float]]
    records: list[CvRecord]
    tied: list[Config] = field(default_factory=list)


def _checked_folds(d: LabeledDataset, k: int, seed: int):
    """Folds whose training portions all contain both classes; one reseed."""
    for attempt_seed in (seed, seed + 1):
        plan = make_folds(d.m, k, attempt_seed)
        ok = all(
            d.subset(plan.train_indices(f)).has_both_classes() for f in range(k)
        )
        if ok:
            return plan
    raise DataError("could not build folds whose training parts keep both classes")


def _enumerate_configs(grid: SearchGrid, with_width: bool):
    widths = grid.width_multipliers if with_width else (None,)
    for c in grid.c_values:
        for lam1 in grid.lambda_values:
            for lam2 in grid.lambda_values:
                for wm in widths:
                    yield Config(c, lam1, lam2, wm)


def cross_validate(
    d: LabeledDataset,
    solver: str = "kernel",
    kernel_kind: str = LINEAR,
    grid: SearchGrid | None = None,
    k: int = 5,
    seed: int = 0,
    kernel_options: dict | None = None,
    linear_options: dict | None = None,
) -> SearchResult:
    """Evaluate every grid configuration by k-fold CV and pick the best.

    Ties on mean validation accuracy break toward smaller c, then smaller
    lambda1, lambda2, and width multiplier.
    """
    if solver not in ("kernel", "linear"):
        raise DataError(f"unknown solver {solver!r}")
    if k < 2:
        raise DataError("cross-validation needs k >= 2")
    grid = grid or SearchGrid()
    plan = _checked_folds(d, k, seed)

    fold_train: list[LabeledDataset] = []
    fold_test: list[LabeledDataset] = []
    fold_delta: list[float] = []
    use_rbf = solver == "kernel" and kernel_kind == RBF
    for f in range(k):
        d_tr = d.subset(plan.train_indices(f))
        d_te = d.subset(plan.test_indices(f))
        fold_train.append(d_tr)
        fold_test.append(d_te)
        if use_rbf:
            dn_tr = apply_normalizer(fit_normalizer(d_tr), d_tr)
            fold_delta.append(rbf_width_base(dn_tr, seed=derive_seed(seed, 100 + f)))
        else:
            fold_delta.append(0.0)

    records: list[CvRecord] = []
    means: list[tuple[Config, float]] = []
    for config in _enumerate_configs(grid, with_width=use_rbf):
        fold_accs = []
        for f in range(k):
            fold_seed = derive_seed(seed, 1000 + f)
            if solver == "kernel":
                width = (
                    config.width_multiplier * fold_delta[f] if use_rbf else None
                )
                spec = KernelSpec(kernel_kind, width)
                params = kernel_ldm.KernelLdmParams(
                    lambda1=config.lambda1,
                    lambda2=config.lambda2,
                    c=config.c,
                    seed=fold_seed,
                    **(kernel_options or {}),
                )
                model, _ = kernel_ldm.solve(fold_train[f], spec, params)
                scores = kernel_ldm.decision_values(model, fold_test[f].instances)
            else:
                params = linear_ldm.LinearLdmParams(
                    lambda1=config.lambda1,
                    lambda2=config.lambda2,
                    c=config.c,
                    seed=fold_seed,
                    **(linear_options or {}),
                )
                model, _ = linear_ldm.train(fold_train[f], params)
                scores = linear_ldm.decision_values_linear(model, fold_test[f].instances)
            preds = np.where(scores >= 0.0, 1.0, -1.0)
            acc = accuracy(preds, fold_test[f].labels)
            fold_accs.append(acc)
            records.append(CvRecord(config, f, acc))
        means.append((config, float(np.mean(fold_accs))))

    best_mean = max(mean for _, mean in means)
    tied = [config for config, mean in means if mean == best_mean]
    best = min(tied, key=Config.sort_key)
    return SearchResult(best=best, means=means, records=records, tied=tied)


def write_cv_log(result: SearchResult, path) -> None:
    """Per-fold CSV: c,lambda1,lambda2,width,fold,accuracy (width blank
    for configurations without one)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("c,lambda1,lambda2,width,fold,accuracy\n")
        for rec in result.records:
            cfg = rec.config
            width = "" if cfg.width_multiplier is None else format_real(cfg.width_multiplier)
            fh.write(
                f"{format_real(cfg.c)},{format_real(cfg.lambda1)},{format_real(cfg.lambda2)},"
                f"{width},{rec.fold},{format_real(rec.accuracy)}\n"
            )
