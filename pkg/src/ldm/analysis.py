"""Margin statistics, accuracy, and the leave-one-out diagnostics.

The margin of instance i is y_i * score_i.  The variance statistic used
throughout is (2/m^2) * (m * sum(g_i^2) - (sum g_i)^2), which equals
(2/m) * sum((g_i - mean)^2); it is evaluated in the centered form for
numerical stability.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import LabeledDataset, apply_normalizer, fit_normalizer, format_real
from .errors import DataError
from .kernels import KernelSpec, gram_matrix


@dataclass(frozen=True)
class MarginStats:
    margins: np.ndarray
    mean: float
    variance: float
    minimum: float
    cumulative: tuple[tuple[float, float], ...]


def compute_margins(scores: np.ndarray, y: np.ndarray) -> MarginStats:
    """Per-instance margins with mean, variance, minimum, and empirical CDF."""
    scores = np.asarray(scores, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if scores.shape != y.shape or scores.size < 1:
        raise DataError("scores and labels must be equally long and nonempty")
    margins = y * scores
    m = margins.size
    mean = float(margins.sum() / m)
    variance = float((2.0 / m) * np.sum((margins - mean) ** 2))
    sorted_margins = np.sort(margins)
    values, last_pos = np.unique(sorted_margins, return_index=True)
    # np.unique reports first positions; the cumulative count of a value is
    # the position just past its final occurrence.
    counts = np.append(last_pos[1:], m)
    cumulative = tuple((float(v), float(c) / m) for v, c in zip(values, counts))
    return MarginStats(
        margins=margins,
        mean=mean,
        variance=variance,
        minimum=float(sorted_margins[0]),
        cumulative=cumulative,
    )


def cumulative_curve_export(stats: MarginStats) -> list[tuple[float, float]]:
    """Rows (margin, cumulative fraction), sorted, duplicates collapsed."""
    return [tuple(row) for row in stats.cumulative]


def write_cumulative_csv(stats: MarginStats, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("margin,fraction\n")
        for margin, fraction in stats.cumulative:
            fh.write(f"{format_real(margin)},{format_real(fraction)}\n")


@dataclass(frozen=True)
class LooBoundReport:
    """Leave-one-out error bound (h * sum of interior duals + #bounded) / m."""

    bound: float
    h: float
    interior: np.ndarray
    bounded: np.ndarray


def loo_bound(
    alpha: np.ndarray, h_diag: np.ndarray, c: float, boundary_tol: float | None = None
) -> LooBoundReport:
    """Bound the leave-one-out error from the optimal dual variables.

    Duals within ``boundary_tol`` of the upper box bound count as bounded
    support vectors; those within it of zero are ignored.  Converged
    numerical duals sit near, not exactly at, the box boundary, hence the
    default tolerance 1e-6 * c.
    """
    alpha = np.asarray(alpha, dtype=np.float64)
    h_diag = np.asarray(h_diag, dtype=np.float64)
    if boundary_tol is None:
        boundary_tol = 1e-6 * c
    if np.any(alpha < -boundary_tol) or np.any(alpha > c + boundary_tol):
        raise DataError("dual variables outside [0, c] beyond the boundary tolerance")
    m = alpha.shape[0]
    bounded = np.flatnonzero(alpha >= c - boundary_tol)
    interior = np.flatnonzero((alpha > boundary_tol) & (alpha < c - boundary_tol))
    h = float(np.max(h_diag)) if h_diag.size else 0.0
    raw = (h * float(alpha[interior].sum()) + bounded.size) / m
    return LooBoundReport(bound=min(max(raw, 0.0), 1.0), h=h, interior=interior, bounded=bounded)


def leave_one_out_error(d: LabeledDataset, spec: KernelSpec, params, cap: int = 200) -> float:
    """Exact leave-one-out error by m retrainings of the kernel solver.

    The full-data normalization and Gram matrix are reused with row/column
    deletion; each held-out instance is scored through its Gram row.
    """
    from .kernel_ldm import solve_gram  # deferred; kernel_ldm imports this module

    if d.m > cap:
        raise DataError(f"leave-one-out retraining is capped at {cap} instances (got {d.m})")
    if not d.has_both_classes():
        raise DataError("leave-one-out needs both classes")
    dn = apply_normalizer(fit_normalizer(d), d)
    g = gram_matrix(spec, dn)
    y = dn.labels
    errors = 0
    for i in range(d.m):
        keep = np.concatenate([np.arange(i), np.arange(i + 1, d.m)])
        sub_g = g[np.ix_(keep, keep)]
        sub_y = y[keep]
        if not (np.any(sub_y > 0) and np.any(sub_y < 0)):
            errors += 1  # single-class remainder predicts that class only
            continue
        state, _ = solve_gram(sub_g, sub_y, params)
        score = float(g[i, keep] @ state.alpha)
        pred = 1.0 if score >= 0.0 else -1.0
        if pred != y[i]:
            errors += 1
    return errors / d.m


def accuracy(predictions: np.ndarray, truth: np.ndarray) -> float:
    predictions = np.asarray(predictions, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    if predictions.shape != truth.shape or predictions.size < 1:
        raise DataError("predictions and truth must be equally long and nonempty")
    return float(np.mean(predictions == truth))
