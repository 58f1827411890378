"""Kernel solver: box-constrained dual coordinate descent.

The primal trades off the squared weight norm, the margin variance
(weight ``lambda1``), the margin mean (weight ``lambda2``), and hinge
slack (weight ``c``).  In expansion coefficients the quadratic term is

    Q = (4*lambda1 / m^2) * (m * G @ G - outer(G @ y, G @ y)) + G,

and the dual over box variables beta in [0, C]^m is

    f(beta) = 0.5 * beta' H beta + (lambda2/m * H @ e - e)' beta,
    H = Y G Q^{-1} G Y.

Each coordinate admits a closed-form clipped Newton step
``beta_i <- clip(beta_i - grad_i / H_ii, 0, C)``.  The expansion
coefficients ``alpha = Q^{-1} G Y (lambda2/m * e + beta)`` are maintained
incrementally so the gradient ``grad_i = y_i * (G alpha)_i - 1`` costs
O(m) per coordinate.  Q is factorized once (Cholesky, with a small
trace-scaled ridge) and never inverted explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .analysis import loo_bound
from .data import LabeledDataset, NormalizationMap, SparseVector, apply_normalizer, fit_normalizer
from .errors import DataError, SolverError
from .kernels import KernelSpec, cross_gram, gram_matrix, kernel_eval
from .reports import SolverReport
from .rng import XorShift64Star

# Coordinates with (numerically) zero dual curvature have no Newton step;
# they are skipped by the sweep and by the violation measure.
_H_EPS = 1e-12

DIAGNOSTIC_CAP = 2000
MAX_GRAM_INSTANCES = 10000


@dataclass(frozen=True)
class KernelLdmParams:
    """Hyperparameters and solver controls for the kernel path."""

    lambda1: float = 0.0
    lambda2: float = 0.0
    c: float = 1.0
    tolerance: float = 1e-3
    max_epochs: int = 1000
    ridge_scale: float = 1e-10
    shuffle: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise DataError("lambda1 and lambda2 must be nonnegative")
        if self.c <= 0:
            raise DataError("c must be positive")
        if self.tolerance <= 0:
            raise DataError("tolerance must be positive")
        if self.max_epochs < 1:
            raise DataError("max_epochs must be at least 1")
        if self.ridge_scale < 0:
            raise DataError("ridge_scale must be nonnegative")


class QOperator:
    """Factorized Q + ridge*I exposing solves against the factorization."""

    def __init__(self, matrix: np.ndarray, ridge: float):
        self.matrix = matrix
        self.ridge = ridge
        try:
            self._chol = cho_factor(matrix, lower=True)
        except LinAlgError as exc:
            raise SolverError(
                "Q factorization failed (matrix not positive definite); "
                "increase ridge_scale"
            ) from exc

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return cho_solve(self._chol, rhs)


def assemble_q(g: np.ndarray, y: np.ndarray, lambda1: float, ridge_scale: float) -> QOperator:
    """Build and factorize Q with ridge = ridge_scale * trace(Q) / m."""
    m = g.shape[0]
    if lambda1 != 0.0:
        gy = g @ y
        q = (4.0 * lambda1 / m**2) * (m * (g @ g) - np.outer(gy, gy)) + g
    else:
        q = g.copy()
    ridge = ridge_scale * float(np.trace(q)) / m
    q[np.diag_indices(m)] += ridge
    return QOperator(q, ridge)


@dataclass
class DualState:
    """Mutable solver state: box variables, expansion coefficients, and
    the precomputed update directions A = Q^{-1} G Y with curvature diag."""

    beta: np.ndarray
    alpha: np.ndarray
    a_matrix: np.ndarray
    h_diag: np.ndarray


def init_state(
    q: QOperator, g: np.ndarray, y: np.ndarray, params: KernelLdmParams
) -> DualState:
    m = y.shape[0]
    gy = g * y[None, :]
    a = q.solve(gy)
    alpha = (params.lambda2 / m) * q.solve(g @ y)
    h_diag = np.einsum("ij,ij->j", gy, a)
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(alpha))):
        raise SolverError("non-finite values while initializing the dual state")
    if np.any(h_diag < -1e-10):
        raise SolverError("dual curvature came out negative; Q is not positive definite")
    return DualState(np.zeros(m), alpha, a, h_diag)


def _step(state: DualState, i: int, g_row: np.ndarray, y_i: float, c: float) -> tuple[float, float]:
    """One clipped Newton step on coordinate i.

    Returns (|delta beta_i|, projected-gradient violation before the step).
    """
    grad = y_i * float(np.dot(g_row, state.alpha)) - 1.0
    beta_i = state.beta[i]
    if state.h_diag[i] <= _H_EPS:
        return 0.0, 0.0
    if beta_i <= 0.0:
        violation = max(0.0, -grad)
    elif beta_i >= c:
        violation = max(0.0, grad)
    else:
        violation = abs(grad)
    new_beta = min(max(beta_i - grad / state.h_diag[i], 0.0), c)
    delta = new_beta - beta_i
    if delta != 0.0:
        state.beta[i] = new_beta
        state.alpha += delta * state.a_matrix[:, i]
    return abs(delta), violation


def coordinate_step(
    state: DualState, i: int, g: np.ndarray, y: np.ndarray, c: float
) -> float:
    """Public single-coordinate update; returns |delta beta_i|."""
    delta, _ = _step(state, i, g[i], float(y[i]), c)
    return delta


def kkt_violation(state: DualState, g: np.ndarray, y: np.ndarray, c: float) -> float:
    """Max projected-gradient violation over all (non-degenerate) coordinates."""
    grads = y * (g @ state.alpha) - 1.0
    viol = np.where(
        state.beta <= 0.0,
        np.maximum(0.0, -grads),
        np.where(state.beta >= c, np.maximum(0.0, grads), np.abs(grads)),
    )
    viol[state.h_diag <= _H_EPS] = 0.0
    return float(np.max(viol))


def recover_alpha(
    q: QOperator, g: np.ndarray, y: np.ndarray, lambda2: float, beta: np.ndarray
) -> np.ndarray:
    """Closed-form expansion coefficients alpha = Q^{-1} G Y (lambda2/m e + beta)."""
    m = y.shape[0]
    return q.solve(g @ (y * (lambda2 / m + beta)))


def _objective_from_h(h: np.ndarray, he: np.ndarray, beta: np.ndarray, lambda2: float, m: int) -> float:
    return float(0.5 * beta @ (h @ beta) + (lambda2 / m) * (he @ beta) - beta.sum())


def dual_objective(
    state: DualState,
    g: np.ndarray,
    y: np.ndarray,
    q: QOperator,
    lambda2: float,
    cap: int = DIAGNOSTIC_CAP,
) -> float:
    """Dual objective f(beta), evaluated through a dense H = Y G Q^{-1} G Y.

    Diagnostic only: O(m^3). Refuses to run above ``cap`` instances.
    """
    m = y.shape[0]
    if m > cap:
        raise ValueError(
            f"dual objective diagnostics need a dense {m}x{m} H; disable diagnostics "
            f"or raise cap (currently {cap})"
        )
    gy = g * y[None, :]
    h = gy.T @ q.solve(gy)
    return _objective_from_h(h, h.sum(axis=1), state.beta, lambda2, m)


def solve_gram(
    g: np.ndarray,
    y: np.ndarray,
    params: KernelLdmParams,
    diagnostic_cap: int = DIAGNOSTIC_CAP,
) -> tuple[DualState, SolverReport]:
    """Run coordinate descent on a precomputed Gram matrix.

    Sweeps all coordinates per epoch (seeded random order unless
    ``params.shuffle`` is off).  When the largest projected-gradient
    violation seen during an epoch drops below tolerance, a fresh
    full-gradient check confirms convergence (mid-sweep violations go
    stale as later coordinates move).
    """
    m = int(y.shape[0])
    q = assemble_q(g, y, params.lambda1, params.ridge_scale)
    state = init_state(q, g, y, params)
    c = params.c

    diagnostics = m <= diagnostic_cap
    trace: list[float] = []
    h = he = None
    if diagnostics:
        gy = g * y[None, :]
        h = gy.T @ state.a_matrix
        he = h.sum(axis=1)
        trace.append(_objective_from_h(h, he, state.beta, params.lambda2, m))

    rng = XorShift64Star(params.seed)
    converged = False
    epochs = 0
    steps = 0
    fresh_kkt: float | None = None
    for _ in range(params.max_epochs):
        order = rng.permutation(m) if params.shuffle else range(m)
        max_violation = 0.0
        for i in order:
            _, violation = _step(state, i, g[i], float(y[i]), c)
            steps += 1
            if violation > max_violation:
                max_violation = violation
        epochs += 1
        if diagnostics:
            trace.append(_objective_from_h(h, he, state.beta, params.lambda2, m))
        if max_violation < params.tolerance:
            fresh_kkt = kkt_violation(state, g, y, c)
            if fresh_kkt <= params.tolerance:
                converged = True
                break
    if fresh_kkt is None or not converged:
        fresh_kkt = kkt_violation(state, g, y, c)

    bound = loo_bound(state.beta, state.h_diag, c).bound
    report = SolverReport(
        objective_trace=trace,
        converged=converged,
        epochs=epochs,
        steps=steps,
        kkt_violation=fresh_kkt,
        loo_bound=bound,
    )
    return state, report


@dataclass
class KernelLdmModel:
    """Dual expansion over the (normalized) training instances."""

    alpha: np.ndarray
    instances: tuple[SparseVector, ...]
    kernel: KernelSpec
    normalizer: NormalizationMap | None

    def __post_init__(self):
        if self.alpha.shape[0] != len(self.instances):
            raise DataError("one expansion coefficient per stored instance")


def solve(
    d: LabeledDataset,
    spec: KernelSpec,
    params: KernelLdmParams,
    *,
    normalize: bool = True,
    normalizer: NormalizationMap | None = None,
    diagnostic_cap: int = DIAGNOSTIC_CAP,
    max_instances: int = MAX_GRAM_INSTANCES,
) -> tuple[KernelLdmModel, SolverReport]:
    """Train a kernel model end to end: normalize, build the Gram matrix,
    run coordinate descent, and package the expansion with its kernel."""
    if d.m > max_instances:
        raise DataError(
            f"kernel path is capped at {max_instances} instances (got {d.m}); "
            "use the linear solver for larger data"
        )
    if not d.has_both_classes():
        raise DataError("training data must contain both classes")
    if normalize:
        nmap = normalizer if normalizer is not None else fit_normalizer(d)
        dn = apply_normalizer(nmap, d)
    else:
        nmap = None
        dn = d
    g = gram_matrix(spec, dn)
    state, report = solve_gram(g, dn.labels, params, diagnostic_cap)
    model = KernelLdmModel(state.alpha.copy(), dn.instances, spec, nmap)
    return model, report


def decision_values(model: KernelLdmModel, instances) -> np.ndarray:
    """Raw scores sum_i alpha_i k(x_i, z) for each raw input vector z."""
    vecs = list(instances)
    if model.normalizer is not None:
        vecs = [model.normalizer.transform_vector(v) for v in vecs]
    k = cross_gram(model.kernel, model.instances, vecs)
    return model.alpha @ k


def predict(model: KernelLdmModel, z: SparseVector) -> tuple[int, float]:
    """Predicted label (+1 on ties) and raw score for one instance."""
    zn = model.normalizer.transform_vector(z) if model.normalizer is not None else z
    score = 0.0
    for a_i, x_i in zip(model.alpha, model.instances):
        score += float(a_i) * kernel_eval(model.kernel, x_i, zn)
    return (1 if score >= 0.0 else -1), score
