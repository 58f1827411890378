"""Independent reference solver for box-constrained quadratic programs.

Solves min 0.5 * b' H b + q' b subject to 0 <= b <= c by accelerated
projected gradient with function-value restarts.  This is a full-gradient
method sharing no code with the coordinate-descent solver under test.
"""

import numpy as np


def box_qp_objective(h: np.ndarray, q: np.ndarray, beta: np.ndarray) -> float:
    return float(0.5 * beta @ (h @ beta) + q @ beta)


def box_qp_kkt_violation(h: np.ndarray, q: np.ndarray, c: float, beta: np.ndarray) -> float:
    grad = h @ beta + q
    viol = np.where(
        beta <= 0.0,
        np.maximum(0.0, -grad),
        np.where(beta >= c, np.maximum(0.0, grad), np.abs(grad)),
    )
    return float(viol.max())


def projected_gradient_box_qp(
    h: np.ndarray,
    q: np.ndarray,
    c: float,
    tol: float = 1e-10,
    max_iter: int = 200_000,
) -> np.ndarray:
    m = q.shape[0]
    lipschitz = float(np.linalg.eigvalsh(h)[-1])
    step = 1.0 / lipschitz if lipschitz > 0 else 1.0
    beta = np.zeros(m)
    momentum = beta.copy()
    t_k = 1.0
    f_best = box_qp_objective(h, q, beta)
    for _ in range(max_iter):
        candidate = np.clip(momentum - step * (h @ momentum + q), 0.0, c)
        f_new = box_qp_objective(h, q, candidate)
        if f_new > f_best:  # restart acceleration from the last good point
            momentum = beta.copy()
            t_k = 1.0
            candidate = np.clip(momentum - step * (h @ momentum + q), 0.0, c)
            f_new = box_qp_objective(h, q, candidate)
        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t_k * t_k))
        momentum = candidate + ((t_k - 1.0) / t_next) * (candidate - beta)
        beta = candidate
        t_k = t_next
        f_best = f_new
        if box_qp_kkt_violation(h, q, c, beta) < tol:
            break
    return beta
