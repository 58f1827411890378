"""Linear solver: averaged stochastic gradient descent.

Minimizes, over a dense weight vector w,

    g(w) = 0.5 * w'w
         + (2*lambda1 / m^2) * (m * sum_i (w'x_i)^2 - (sum_i y_i w'x_i)^2)
         - (lambda2 / m) * sum_i y_i w'x_i
         + c * sum_i max(0, 1 - y_i w'x_i).

Each iteration samples an ordered pair of instances (i, j) independently
and uniformly with replacement and applies the two-sample gradient
estimate, whose average over all m^2 ordered pairs equals the exact
(sub)gradient.  The returned predictor is the running average of the
iterates from step t0 on, maintained by the recursion
``w_bar += mu_t * (w - w_bar)`` with ``mu_t = 1 / max(1, t - t0)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import LabeledDataset, NormalizationMap, SparseVector, apply_normalizer, fit_normalizer
from .errors import DataError
from .reports import SolverReport
from .rng import XorShift64Star, derive_seed

_CALIBRATION_GRID = tuple(10.0 ** e for e in np.linspace(-3.0, 1.0, 9))
_CALIBRATION_CAP = 500
_SUBSAMPLE_STREAM = 0x5B5


@dataclass(frozen=True)
class LinearLdmParams:
    """Hyperparameters for the averaged-SGD path.

    ``eta0 = None`` selects the initial step size on a small log-spaced
    grid by a one-epoch calibration run on a subsample; ``t0 = None``
    engages averaging after one pass (t0 = m).
    """

    lambda1: float = 0.0
    lambda2: float = 0.0
    c: float = 1.0
    epochs: int = 5
    eta0: float | None = None
    t0: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise DataError("lambda1 and lambda2 must be nonnegative")
        if self.c <= 0:
            raise DataError("c must be positive")
        if self.epochs < 1:
            raise DataError("epochs must be at least 1")
        if self.eta0 is not None and self.eta0 <= 0:
            raise DataError("eta0 must be positive")
        if self.t0 is not None and self.t0 < 0:
            raise DataError("t0 must be nonnegative")


@dataclass
class LinearModel:
    """Current iterate w, running average w_bar (the predictor), and step count."""

    w: np.ndarray
    w_bar: np.ndarray
    t: int
    normalizer: NormalizationMap | None = None


def _scores(w: np.ndarray, d: LabeledDataset) -> np.ndarray:
    return np.array([inst.dot_dense(w) for inst in d.instances], dtype=np.float64)


def exact_objective(w: np.ndarray, d: LabeledDataset, params: LinearLdmParams) -> float:
    """Full objective g(w) in O(m d) without forming any matrix."""
    m = d.m
    s = _scores(w, d)
    ys = d.labels * s
    quad = (2.0 * params.lambda1 / m**2) * (m * float(np.dot(s, s)) - float(ys.sum()) ** 2)
    hinge = float(np.maximum(0.0, 1.0 - ys).sum())
    return (
        0.5 * float(np.dot(w, w))
        + quad
        - (params.lambda2 / m) * float(ys.sum())
        + params.c * hinge
    )


def exact_gradient(w: np.ndarray, d: LabeledDataset, params: LinearLdmParams) -> np.ndarray:
    """Full (sub)gradient; hinge terms use strict margin < 1 membership."""
    m = d.m
    s = _scores(w, d)
    ys = d.labels * s
    ys_sum = float(ys.sum())
    grad = w.copy()
    for inst, y_i, s_i in zip(d.instances, d.labels, s):
        coef = (
            (4.0 * params.lambda1 / m**2) * (m * s_i - ys_sum * y_i)
            - (params.lambda2 / m) * y_i
        )
        if y_i * s_i < 1.0:
            coef -= params.c * y_i
        if inst.indices.size:
            grad[inst.indices - 1] += coef * inst.values
    return grad


def stochastic_gradient(
    w: np.ndarray, i: int, j: int, d: LabeledDataset, params: LinearLdmParams
) -> np.ndarray:
    """Two-sample gradient estimate for the ordered pair (i, j).

    Every data-dependent term is a multiple of x_i, so the estimate is
    w + coef * x_i for a scalar coef; no outer products are formed.
    """
    x_i = d.instances[i]
    x_j = d.instances[j]
    y_i = float(d.labels[i])
    y_j = float(d.labels[j])
    s_i = x_i.dot_dense(w)
    s_j = x_j.dot_dense(w)
    coef = 4.0 * params.lambda1 * s_i - 4.0 * params.lambda1 * y_i * y_j * s_j - params.lambda2 * y_i
    if y_i * s_i < 1.0:
        coef -= d.m * params.c * y_i
    grad = w.copy()
    if x_i.indices.size:
        grad[x_i.indices - 1] += coef * x_i.values
    return grad


def _run_asgd(
    d: LabeledDataset,
    params: LinearLdmParams,
    eta0: float,
    t0: int,
    rng: XorShift64Star,
    iterations: int,
    trace_every: int | None = None,
) -> tuple[np.ndarray, np.ndarray, list[float]]:
    m = d.m
    w = np.zeros(d.dimension)
    w_bar = np.zeros(d.dimension)
    schedule_t0 = max(t0, 1)  # eta decay needs a positive reference step
    trace: list[float] = []
    if trace_every:
        trace.append(exact_objective(w_bar, d, params))
    for t in range(1, iterations + 1):
        i = rng.below(m)
        j = rng.below(m)
        eta_t = eta0 / (1.0 + t / schedule_t0) ** 0.75
        w = w - eta_t * stochastic_gradient(w, i, j, d, params)
        mu_t = 1.0 / max(1, t - t0)
        w_bar = w_bar + mu_t * (w - w_bar)
        if trace_every and t % trace_every == 0:
            trace.append(exact_objective(w_bar, d, params))
    return w, w_bar, trace


def calibrate_eta0(d: LabeledDataset, params: LinearLdmParams) -> float:
    """One-epoch trial on a subsample for each grid step size; smallest
    objective wins, ties to the smaller step."""
    sub_m = min(d.m, _CALIBRATION_CAP)
    perm = XorShift64Star(derive_seed(params.seed, _SUBSAMPLE_STREAM)).permutation(d.m)
    sub = d.subset(sorted(perm[:sub_m]))
    draw_seed = derive_seed(params.seed, _SUBSAMPLE_STREAM + 1)
    best_eta = _CALIBRATION_GRID[0]
    best_obj = np.inf
    for eta0 in _CALIBRATION_GRID:
        rng = XorShift64Star(draw_seed)  # identical draws for every candidate
        _, w_bar, _ = _run_asgd(sub, params, eta0, sub_m, rng, sub_m)
        obj = exact_objective(w_bar, sub, params)
        if np.isfinite(obj) and obj < best_obj:
            best_obj = obj
            best_eta = eta0
    return best_eta


def train(
    d: LabeledDataset,
    params: LinearLdmParams,
    *,
    normalize: bool = True,
    normalizer: NormalizationMap | None = None,
) -> tuple[LinearModel, SolverReport]:
    """Averaged SGD for ``epochs * m`` pair draws; the averaged iterate is
    the reported predictor and its objective is traced per epoch."""
    if not d.has_both_classes():
        raise DataError("training data must contain both classes")
    if normalize:
        nmap = normalizer if normalizer is not None else fit_normalizer(d)
        dn = apply_normalizer(nmap, d)
    else:
        nmap = None
        dn = d
    m = dn.m
    t0 = params.t0 if params.t0 is not None else m
    eta0 = params.eta0 if params.eta0 is not None else calibrate_eta0(dn, params)
    iterations = params.epochs * m
    rng = XorShift64Star(params.seed)
    w, w_bar, trace = _run_asgd(dn, params, eta0, t0, rng, iterations, trace_every=m)
    model = LinearModel(w=w, w_bar=w_bar, t=iterations, normalizer=nmap)
    report = SolverReport(
        objective_trace=trace,
        converged=True,
        epochs=params.epochs,
        steps=iterations,
    )
    return model, report


def decision_values_linear(model: LinearModel, instances) -> np.ndarray:
    vecs = list(instances)
    if model.normalizer is not None:
        vecs = [model.normalizer.transform_vector(v) for v in vecs]
    return np.array([v.dot_dense(model.w_bar) for v in vecs], dtype=np.float64)


def predict_linear(model: LinearModel, z: SparseVector) -> tuple[int, float]:
    """Predicted label (+1 on ties) and raw averaged-iterate score."""
    zn = model.normalizer.transform_vector(z) if model.normalizer is not None else z
    score = zn.dot_dense(model.w_bar)
    return (1 if score >= 0.0 else -1), score
